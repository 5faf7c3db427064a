#include "h1ns/errors.hpp"
#include "h1ns/semigroup.hpp"
#include "h1ns/spectral.hpp"

#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

using namespace h1ns;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("mu_hat branches", "[semigroup]") {
  CHECK_THAT(mu_hat(1.7, 0.85), WithinAbs(1.0, 1e-15));
  CHECK(mu_hat(1.7, 2.0) == 1.0);
  CHECK_THAT(mu_hat(1.7, 0.1), WithinRel(2.91262937635646527, 1e-14));
  CHECK_THAT(mu_hat(1.7, 0.2), WithinRel(1.78582614679442046, 1e-14));
  CHECK_THAT(mu_hat(1.7, std::nextafter(0.85, 0.0)), WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(mu_hat(1.7, 0.0), InvalidArgument);
  CHECK_THROWS_AS(mu_hat(1.7, -1.0), InvalidArgument);
  CHECK_THROWS_AS(mu_hat(0.0, 1.0), InvalidArgument);
}

TEST_CASE("mu_omega", "[semigroup]") {
  CHECK_THAT(mu_omega(0.7, 0.85), WithinAbs(1.0, 1e-15));
  CHECK(mu_omega(0.7, 1.0) == 1.0);
  const double closed = std::pow(1.7 / (2 * std::numbers::e * 0.2), 0.85) * std::exp(0.2);
  CHECK_THAT(mu_omega(0.7, 0.2), WithinRel(closed, 1e-14));
  CHECK_THAT(mu_omega(0.7, 0.2), WithinRel(1.78582614679442046, 1e-14));
  CHECK_THROWS_AS(mu_omega(1.0, 0.2), InvalidArgument);
  CHECK_THROWS_AS(mu_omega(0.7, 0.0), InvalidArgument);
}

TEST_CASE("heat propagation", "[semigroup]") {
  SpaceParams p;
  const auto v = random_field(3, 4, p, 1.0);
  CHECK(heat_propagate(v, 0.0).coeffs() == v.coeffs());
  CHECK_THROWS_AS(heat_propagate(v, -1e-3), InvalidArgument);

  auto single = FourierField::vector(p, 2);
  CVector c(3);
  c << 0.0, 2.0, 0.0;
  single.set_pair(make_point({1, 0, 0}), c);
  const auto half = heat_propagate(single, std::log(2.0));
  CHECK_THAT(half.at(make_point({1, 0, 0}))[1].real(), WithinRel(1.0, 1e-15));

  const auto a = heat_propagate(heat_propagate(v, 0.13), 0.29);
  const auto b = heat_propagate(v, 0.42);
  for (Eigen::Index i = 0; i < a.coeffs().size(); ++i) {
    CHECK(std::abs(a.coeffs()(i) - b.coeffs()(i)) <= 1e-14 * std::abs(b.coeffs()(i)) + 1e-300);
  }

  const auto w = heat_propagate(v, 0.3);
  CHECK(w.solenoidal());
  CHECK_NOTHROW(w.validate(1e-13));
  for (double n : {-1.0, 0.0, 1.0, 2.0}) {
    CHECK(sobolev_norm(w, n) <= std::exp(-0.3) * sobolev_norm(v, n) * (1 + 1e-15));
  }
}

TEST_CASE("smoothing defect", "[semigroup]") {
  SpaceParams p;
  const auto v = random_field(11, 5, p, 1.0);
  CHECK(smoothing_defect(v, 0.3, 1.0, 1.7) >= 0.0);
  CHECK_THROWS_AS(smoothing_defect(v, 0.0, 1.0, 1.7), InvalidArgument);

  // near the maximizing shell |k|^2 ~ nu/(2t) = 8.5
  auto single = FourierField::vector(p, 3);
  CVector c(3);
  c << 1.0, 0.0, 0.0;
  single.set_pair(make_point({0, 2, 2}), c);
  const double lead = mu_hat(1.7, 0.1) * std::exp(-0.1) * sobolev_norm(single, 1.0 - 1.7);
  const double defect = smoothing_defect(single, 0.1, 1.0, 1.7);
  CHECK(defect >= 0.0);
  CHECK(defect < 0.01 * lead);

  const double t = 1.2;  // >= nu/2
  const double expected = std::exp(-t) * sobolev_norm(v, 1.0 - 1.7) - sobolev_norm(heat_propagate(v, t), 1.0);
  CHECK_THAT(smoothing_defect(v, t, 1.0, 1.7), WithinAbs(expected, 1e-15));
  CHECK(expected >= 0.0);
}

TEST_CASE("smoothing defect on random samples", "[semigroup][property]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ut(1e-3, 3.0), un(-1.0, 2.0), unu(0.1, 3.0);
  for (int s = 0; s < 300; ++s) {
    SpaceParams p{s % 4 == 0 ? 2 : 3, 0.7};
    const auto v = random_field(static_cast<std::uint64_t>(s), 2 + s % 4, p, 1.0);
    CHECK(smoothing_defect(v, ut(rng), un(rng), unu(rng)) >= -1e-12);
  }
}

TEST_CASE("power-exponential integrals", "[semigroup]") {
  auto r = power_exp_integral(0.0, 1.0, 0.0, 1.0, 1e-15);
  CHECK_THAT(r.value, WithinAbs(std::numbers::e - 1.0, 1e-15));
  CHECK(r.error_bound < 1e-14);
  r = power_exp_integral(1.0, -1.0, 0.0, 2.0, 1e-15);
  CHECK_THAT(r.value, WithinAbs(1.0 - 3.0 * std::exp(-2.0), 1e-15));
  r = power_exp_integral(-0.5, 0.0, 0.25, 4.0, 1e-15);
  CHECK_THAT(r.value, WithinAbs(3.0, 1e-14));
  r = power_exp_integral(-0.85, 2.0, 0.0, 0.5, 1e-14);
  CHECK(r.value > 0.0);
  CHECK(power_exp_integral(0.3, 1.0, 1.0, 1.0, 0.0).value == 0.0);
  CHECK_THROWS_AS(power_exp_integral(-1.0, 1.0, 0.0, 1.0, 1e-10), InvalidArgument);
  CHECK_THROWS_AS(power_exp_integral(0.0, 1.0, 1.0, 0.5, 1e-10), InvalidArgument);
  CHECK_THROWS_AS(power_exp_integral(0.0, 40.0, 0.0, 1.0, 1e-15, 5), QuadratureError);
}

TEST_CASE("smoothing kernel moments", "[semigroup]") {
  const SmoothingKernel k(1.7, 1.0);
  const auto m = k.moments(0.0, 1.0);
  CHECK_THAT(m.m0, WithinRel(2.48155343848673548, 1e-13));
  CHECK_THAT(m.mb, WithinRel(2.15806661991321055, 1e-13));
  CHECK(m.error_bound < 1e-12);
  CHECK_THAT(k(0.2), WithinRel(mu_hat(1.7, 0.2) * std::exp(-0.2), 1e-15));

  // additivity of m0 across the branch point
  const auto left = k.moments(0.3, 0.85);
  const auto right = k.moments(0.85, 1.4);
  CHECK_THAT(left.m0 + right.m0, WithinRel(k.moments(0.3, 1.4).m0, 1e-13));

  // weights reproduce the integral of g = 1 and g = s
  const std::vector<double> grid{0.0, 0.1, 0.25, 0.5, 1.0};
  const auto w = k.product_weights(grid, 4);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    s0 += w[j];
    s1 += w[j] * grid[j];
  }
  CHECK_THAT(s0, WithinRel(m.m0, 1e-13));
  CHECK_THAT(s1, WithinRel(m.mb, 1e-13));  // int kappa(1-s) s ds
  CHECK_THROWS_AS(SmoothingKernel(2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(k.product_weights(grid, 5), InvalidArgument);
}

TEST_CASE("convolution integral values", "[semigroup]") {
  CHECK(convolution_integral(0.7, 0.0, 1e-13) == 0.0);
  const double v = convolution_integral(0.7, 0.215, 1e-13);
  CHECK(v > 1.60);
  CHECK(v < 1.70);
  CHECK_THAT(convolution_integral(0.7, 50.0, 1e-13), WithinAbs(1.0, 1e-3));

  const std::pair<double, double> oracle[] = {
      {0.1, 1.63356834656431892}, {0.215, 1.68997950241256340}, {0.218, 1.69000126827818498},
      {1.0, 1.36763612300366251}, {2.0, 1.13524577148502300},   {5.0, 1.00673349047138934},
      {10.0, 1.00004536990191507}};
  for (const auto& [t, ref] : oracle) CHECK_THAT(convolution_integral(0.7, t, 1e-13), WithinAbs(ref, 1e-12));

  CHECK_THROWS_AS(convolution_integral(0.7, 0.2, 1e-20), QuadratureError);
  CHECK_THROWS_AS(convolution_integral(0.7, -1.0, 1e-13), InvalidArgument);
  CHECK_THROWS_AS(convolution_integral(1.2, 1.0, 1e-13), InvalidArgument);
}

TEST_CASE("convolution integral is Hoelder continuous", "[semigroup][property]") {
  for (double omega : {0.3, 0.7, 0.9}) {
    const double alpha = (1.0 + omega) / 2;
    const double c = std::pow((1.0 + omega) / (2 * std::numbers::e), alpha);
    const double modulus = 2.0 * c * std::exp(1.0) / (1.0 - alpha) + 2.0;
    for (double t = 0.0; t < 3.0; t += 0.137) {
      for (double delta : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const double diff = std::abs(convolution_integral(omega, t + delta, 1e-13) - convolution_integral(omega, t, 1e-13));
        CHECK(diff <= modulus * std::pow(delta, 1.0 - alpha));
      }
    }
  }
}

TEST_CASE("N bound", "[semigroup]") {
  const auto nb = compute_N(0.7);
  CHECK(nb.n_upper > 1.60);
  CHECK(nb.n_upper <= 1.70);
  CHECK(nb.argmax_lo > 0.20);
  CHECK(nb.argmax_hi < 0.23);
  CHECK(nb.argmax_lo <= nb.argmax);
  CHECK(nb.argmax <= nb.argmax_hi);
  CHECK(nb.n_upper >= nb.grid_max);
  CHECK(nb.allowance < 0.005);
  CHECK(nb.tail_bound < nb.grid_max);
  CHECK_THAT(nb.grid_max, WithinAbs(1.690001271, 1e-8));

  NOptions coarse;
  coarse.grid_step = 0.01;
  coarse.refine = false;
  CHECK(compute_N(0.7, coarse).n_upper >= nb.n_upper);

  const auto n9 = compute_N(0.9);
  CHECK(n9.n_upper > 1.0);
  CHECK_THAT(n9.n_upper, WithinRel(6.0669862953980482, 1e-9));
  CHECK_THAT(n9.grid_max, WithinRel(6.06394194970366, 1e-9));

  const auto n55 = compute_N(0.55);
  CHECK_THAT(n55.n_upper, WithinRel(1.0903059042195906, 1e-9));
  CHECK(n55.grid_max <= 1.0892163691 + 1e-10);
  CHECK_THAT(n55.grid_max, WithinAbs(1.0892163691, 1e-6));

  CHECK_THROWS_AS(compute_N(0.0), InvalidArgument);
}
