#include "h1ns/errors.hpp"
#include "h1ns/kernel_bounds.hpp"

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace h1ns;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpaceParams kParams{3, 0.7};

KernelQuery query(SpaceParams p, std::initializer_list<int> k, double lambda) { return {p, make_point(k), lambda}; }

// Plain cube loop over |h| < radius, no compensation, different order.
double naive_sum(SpaceParams p, const LatticePoint& k, double radius) {
  const int r = static_cast<int>(std::ceil(radius));
  double s = 0.0;
  LatticePoint h = LatticePoint::Zero(p.d);
  if (p.d == 2) {
    for (int y = r; y >= -r; --y) {
      for (int x = r; x >= -r; --x) {
        h << x, y;
        const double n = static_cast<double>(euclid_sq(h));
        if (n == 0.0 || h == k || !(std::sqrt(n) < radius)) continue;
        s += 1.0 / (std::pow(n, p.omega) * static_cast<double>(euclid_sq(LatticePoint(k - h))));
      }
    }
  } else {
    for (int z = r; z >= -r; --z) {
      for (int y = r; y >= -r; --y) {
        for (int x = r; x >= -r; --x) {
          h << x, y, z;
          const double n = static_cast<double>(euclid_sq(h));
          if (n == 0.0 || h == k || !(std::sqrt(n) < radius)) continue;
          s += 1.0 / (std::pow(n, p.omega) * static_cast<double>(euclid_sq(LatticePoint(k - h))));
        }
      }
    }
  }
  return s;
}

Sequence1D random_even_unimodal(std::mt19937_64& rng, int radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> half(static_cast<std::size_t>(radius) + 1);
  double v = 1.0 + u(rng);
  for (auto& x : half) {
    x = v;
    v *= u(rng);
  }
  Sequence1D s;
  s.offset = -radius;
  for (int i = -radius; i <= radius; ++i) s.values.push_back(half[static_cast<std::size_t>(std::abs(i))]);
  return s;
}

}  // namespace

TEST_CASE("truncated kernel sum", "[kernel]") {
  const auto s = truncated_kernel_sum(query(kParams, {0, 0, 1}, 150));
  CHECK(s.value > 27.94);
  CHECK(s.value < 28.0);
  CHECK_THAT(s.value, WithinRel(27.948781432238306, 1e-13));
  CHECK(s.rounding_slack < 1e-10);

  const SpaceParams p2{2, 0.7};
  const auto tiny = query(p2, {0, 1}, 2);
  const double radius = 2 + 2 * std::sqrt(2.0);
  CHECK_THAT(truncated_kernel_sum(tiny).value, WithinRel(naive_sum(p2, tiny.k, radius), 1e-14));

  CHECK(truncated_kernel_sum(query(kParams, {0, 0, 1}, 150)).value >
        truncated_kernel_sum(query(kParams, {0, 0, 1}, 50)).value);
  const auto sym_a = truncated_kernel_sum(query(kParams, {0, 1, 1}, 40)).value;
  const auto sym_b = truncated_kernel_sum(query(kParams, {-1, 0, 1}, 40)).value;
  CHECK_THAT(sym_a, WithinRel(sym_b, 1e-13));
}

TEST_CASE("kernel query validation", "[kernel]") {
  CHECK_THROWS_AS(truncated_kernel_sum(query(kParams, {0, 0, 0}, 10)), InvalidArgument);
  CHECK_THROWS_AS(truncated_kernel_sum(query(kParams, {0, 0, 2}, 2)), InvalidArgument);
  CHECK_THROWS_AS(truncated_kernel_sum(query(kParams, {0, 1}, 10)), DimensionMismatch);
  CHECK_THROWS_AS(truncated_kernel_sum(query({3, 0.4}, {0, 0, 1}, 10)), InvalidArgument);
  CHECK_THROWS_AS(truncated_kernel_sum(query(kParams, {0, 0, 1}, 1e5)), InvalidArgument);
}

TEST_CASE("tail bound closed form", "[kernel]") {
  CHECK_THAT(tail_S_bound(3.4, 149.0, 3), WithinRel(4.27327040563883844, 1e-13));
  CHECK_THAT(tail_S_bound(3.4, 149.0, 3), WithinAbs(4.29, 0.02));
  CHECK_THROWS_AS(tail_S_bound(2.4, 149.0, 3), InvalidArgument);
  CHECK_THROWS_AS(tail_S_bound(3.0, 149.0, 3), InvalidArgument);
  CHECK_THROWS_AS(tail_S_bound(3.4, 0.0, 3), InvalidArgument);

  const double hand = 2 * std::numbers::pi * (0.1 + std::sqrt(2.0) / 200);
  CHECK_THAT(tail_S_bound(3.0, 10.0, 2), WithinRel(hand, 1e-14));
  CHECK_THAT(tail_S_bound(3.0, 10.0, 2), WithinRel(0.672747360099542310, 1e-14));

  for (double lambda : {5.0, 30.0, 149.0}) {
    CHECK(tail_S_bound(3.4, 2 * lambda, 3) <= tail_S_bound(3.4, lambda, 3) / std::pow(2.0, 0.4));
  }

  const double t1 = kernel_tail_bound(query(kParams, {0, 0, 1}, 150));
  CHECK_THAT(t1, WithinRel(tail_S_bound(3.4, 149.0, 3), 1e-15));
  CHECK(kernel_tail_bound(query(kParams, {0, 0, 2}, 150)) > t1);
  CHECK(kernel_tail_bound(query({3, 0.9}, {0, 0, 1}, 150)) < t1);
}

TEST_CASE("kernel brackets at the four lattice points", "[kernel]") {
  struct Row {
    std::initializer_list<int> k;
    double lower, upper, oracle_lower, oracle_upper;
  };
  const Row rows[] = {{{0, 0, 1}, 27.94, 32.23, 27.948781432238306, 32.222051837877146},
                      {{0, 1, 1}, 27.48, 31.77, 27.483185865935273, 31.761296570384395},
                      {{1, 1, 1}, 26.49, 30.78, 26.49384837947229, 30.775686214654527},
                      {{0, 0, 2}, 25.69, 29.98, 25.694785669884713, 29.979774465894423}};
  for (const auto& r : rows) {
    const auto b = kernel_bracket(query(kParams, r.k, 150));
    CHECK_THAT(b.lower, WithinAbs(r.lower, 0.02));
    CHECK_THAT(b.upper, WithinAbs(r.upper, 0.02));
    CHECK_THAT(b.lower, WithinRel(r.oracle_lower, 1e-12));
    CHECK_THAT(b.upper, WithinRel(r.oracle_upper, 1e-12));
    CHECK(b.lower == b.truncated_sum);
    CHECK(b.upper > b.lower);
    CHECK(b.tail_bound > 0.0);
    CHECK(b.upper >= b.truncated_sum + b.tail_bound);
  }
}

TEST_CASE("kernel brackets contain refined sums", "[kernel]") {
  const SpaceParams p2{2, 0.7};
  for (auto k : {make_point({0, 1}), make_point({1, 1}), make_point({0, 3})}) {
    const auto b = kernel_bracket({p2, k, 20});
    const double fine = naive_sum(p2, k, 80 + 2 * std::sqrt(2.0));
    CHECK(b.lower <= fine);
    CHECK(fine <= b.upper);
  }
  const auto b3 = kernel_bracket(query(kParams, {0, 1, 1}, 8));
  const double fine3 = naive_sum(kParams, make_point({0, 1, 1}), 32 + 2 * std::sqrt(3.0));
  CHECK(b3.lower <= fine3);
  CHECK(fine3 <= b3.upper);

  const auto b50 = kernel_bracket(query(kParams, {0, 0, 1}, 50));
  const auto b150 = kernel_bracket(query(kParams, {0, 0, 1}, 150));
  CHECK(b50.lower < b150.lower);
  CHECK(b150.upper < b50.upper);
}

TEST_CASE("sup certificate", "[kernel]") {
  const auto cert = sup_certificate(kParams, 1, 150);
  REQUIRE(cert.per_point.size() == 3);
  CHECK(cert.sup_lower > 27.94);
  CHECK(cert.sup_upper < 32.23);
  CHECK(cert.sup_lower <= cert.sup_upper);
  CHECK(cert.boundary_term < 30.61);
  CHECK_THAT(cert.boundary_term, WithinRel(30.608703607522145, 1e-12));
  const double by_hand = cert.boundary_point.upper + 0.25 + std::pow(2.0, -1.4);
  CHECK(cert.boundary_term >= by_hand);
  CHECK(cert.boundary_term <= by_hand * (1 + 1e-14));
  double max_upper = cert.boundary_term, max_lower = 0.0;
  for (const auto& b : cert.per_point) {
    max_upper = std::max(max_upper, b.upper);
    max_lower = std::max(max_lower, b.lower);
  }
  CHECK(cert.sup_upper == max_upper);
  CHECK(cert.sup_lower == max_lower);

  CHECK_THROWS_AS(sup_certificate(kParams, 0, 150), InvalidArgument);
  CHECK_THROWS_AS(sup_certificate(kParams, 1, 2.0), InvalidArgument);
}

TEST_CASE("two-dimensional sup certificate covers a lattice patch", "[kernel]") {
  const SpaceParams p2{2, 0.7};
  const auto cert = sup_certificate(p2, 1, 150);
  CHECK_THAT(cert.sup_lower, WithinRel(5.476855436690407, 1e-12));
  CHECK_THAT(cert.sup_upper, WithinRel(5.4809639833230159, 1e-12));
  CHECK_THAT(cert.boundary_term, WithinRel(5.4598463979091072, 1e-12));
  double patch_max = 0.0;
  for (int x = -6; x <= 6; ++x) {
    for (int y = -6; y <= 6; ++y) {
      if (x == 0 && y == 0) continue;
      const auto b = kernel_bracket({p2, make_point({x, y}), 150});
      patch_max = std::max(patch_max, b.lower);
    }
  }
  CHECK(patch_max <= cert.sup_upper);
  CHECK(patch_max >= cert.sup_lower);

  const auto k01 = kernel_bracket({p2, make_point({0, 1}), 150});
  CHECK_THAT(k01.lower, WithinRel(5.1693945485404145, 1e-12));
  CHECK_THAT(k01.upper, WithinRel(5.173487051035484, 1e-12));
}

TEST_CASE("K constant", "[kernel]") {
  const auto k = k_constant(kParams, 1, 150);
  CHECK(k.lower > 0.335);
  CHECK(k.upper < 0.361);
  CHECK_THAT(k.lower, WithinRel(0.33566931024592483, 1e-13));
  CHECK_THAT(k.upper, WithinRel(0.36041826645538483, 1e-13));
  const auto cert = sup_certificate(kParams, 1, 150);
  const double scale = std::pow(2 * std::numbers::pi, -1.5);
  CHECK(k.lower <= scale * std::sqrt(cert.sup_lower));
  CHECK(k.upper >= scale * std::sqrt(cert.sup_upper));

  const auto coarse = k_constant(kParams, 1, 40);
  CHECK(coarse.upper >= k.upper);
  CHECK(coarse.lower <= k.lower);

  const auto k2 = k_constant({2, 0.7}, 1, 150);
  CHECK_THAT(k2.lower, WithinRel(0.37246525860925755, 1e-13));
  CHECK_THAT(k2.upper, WithinRel(0.37260493766565644, 1e-13));
}

TEST_CASE("one-dimensional convolution", "[kernel]") {
  const Sequence1D box{-1, {1.0, 1.0, 1.0}};
  const auto tri = convolve_1d(box, box);
  CHECK(tri.first() == -2);
  CHECK(tri.last() == 2);
  CHECK(tri.values == std::vector<double>{1.0, 2.0, 3.0, 2.0, 1.0});
  CHECK(tri.at(7) == 0.0);
  CHECK_THROWS_AS(convolve_1d(box, Sequence1D{0, {1.0, -0.5}}), InvalidArgument);
  CHECK(check_even_unimodal(tri));
  CHECK_FALSE(check_even_unimodal(Sequence1D{-1, {1.0, 0.5, 2.0}}));
}

TEST_CASE("lattice grid", "[kernel]") {
  LatticeGrid g(2, 2);
  CHECK(g.size() == 25);
  g[make_point({1, -2})] = 3.0;
  CHECK(g.at(make_point({1, -2})) == 3.0);
  CHECK(g.at(make_point({3, 0})) == 0.0);
  CHECK_THROWS_AS(g[make_point({3, 0})], InvalidArgument);
  CHECK(g.point(0) == make_point({-2, -2}));
  CHECK_THROWS_AS(LatticeGrid(0, 1), InvalidArgument);
}

TEST_CASE("convolution preserves even unimodal symmetric shape", "[kernel][property]") {
  std::mt19937_64 rng(77);
  for (int s = 0; s < 200; ++s) {
    const auto p = random_even_unimodal(rng, 1 + s % 6);
    const auto q = random_even_unimodal(rng, 1 + (s / 6) % 5);
    const auto c = convolve_1d(p, q);
    CHECK(check_even_unimodal(c, 1e-12));
  }
  for (int s = 0; s < 40; ++s) {
    const int d = 2 + s % 2;
    const int r = 2;
    const auto a = random_even_unimodal(rng, r);
    const auto b = random_even_unimodal(rng, r);
    LatticeGrid f(d, r), g(d, r);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto k = f.point(i);
      double fa = 1.0, gb = 1.0;
      for (int j = 0; j < d; ++j) {
        fa *= a.at(k[j]);
        gb *= b.at(k[j]);
      }
      f.data()[i] = fa;
      g.data()[i] = gb;
    }
    REQUIRE(check_even_unimodal(f));
    REQUIRE(check_symmetric(f));
    const auto c = convolve_grid(f, g);
    CHECK(c.radius() == 2 * r);
    CHECK(check_even(c));
    CHECK(check_even_unimodal(c));
    CHECK(check_symmetric(c));
  }
  LatticeGrid lop(2, 1);
  lop[make_point({1, 0})] = 1.0;
  CHECK_FALSE(check_even(lop));
  CHECK_FALSE(check_symmetric(lop));
  CHECK_FALSE(check_unimodal(lop));
}
