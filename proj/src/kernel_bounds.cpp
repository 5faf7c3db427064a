#include "h1ns/kernel_bounds.hpp"

#include "h1ns/parallel.hpp"
#include "h1ns/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace h1ns {

namespace {
constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
// Bins are indexed by |h|^2 < (lambda + 2 sqrt d)^2.
constexpr double kMaxRadiusSq = double(1 << 24);
}  // namespace

void KernelQuery::validate() const {
  params.require_kernel_range();
  if (k.size() != params.d) throw DimensionMismatch("kernel query point has wrong dimension");
  if (is_zero(k)) throw InvalidArgument("kernel query point must be nonzero");
  if (!(lambda > euclid(k))) {
    std::ostringstream os;
    os << "cutoff lambda = " << lambda << " must exceed |k| = " << euclid(k);
    throw InvalidArgument(os.str());
  }
  const double radius = lambda + 2 * std::sqrt(static_cast<double>(params.d));
  if (!(radius * radius < kMaxRadiusSq)) {
    throw InvalidArgument("cutoff lambda too large: |h|^2 would overflow the shell table");
  }
}

TruncatedSum truncated_kernel_sum(const KernelQuery& q) {
  q.validate();
  const int d = q.params.d;
  const double radius = q.lambda + 2 * std::sqrt(static_cast<double>(d));
  const double radius_sq = radius * radius;
  const auto extent = static_cast<int>(std::floor(radius));
  // largest integer n with n < radius^2
  auto max_n = static_cast<std::int64_t>(std::ceil(radius_sq)) - 1;
  while (static_cast<double>(max_n + 1) < radius_sq) ++max_n;

  std::vector<double> bin_sum(static_cast<std::size_t>(max_n) + 1, 0.0);
  std::vector<double> bin_comp(bin_sum.size(), 0.0);
  std::int64_t terms = 0;

  const int outer = d - 1;
  LatticePoint head = LatticePoint::Constant(outer, -extent);
  const int kz = q.k[d - 1];
  while (true) {
    std::int64_t s = 0;
    std::int64_t diff = 0;
    for (int r = 0; r < outer; ++r) {
      s += std::int64_t{head[r]} * head[r];
      const std::int64_t dr = q.k[r] - head[r];
      diff += dr * dr;
    }
    if (s <= max_n) {
      const auto span = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(max_n - s))));
      std::int64_t lo = -span;
      while ((lo - 1) * (lo - 1) + s <= max_n) --lo;
      while (lo * lo + s > max_n) ++lo;
      for (std::int64_t hz = lo; hz <= -lo; ++hz) {
        const std::int64_t n = s + hz * hz;
        const std::int64_t dz = kz - hz;
        const std::int64_t m = diff + dz * dz;
        if (n == 0 || m == 0) continue;
        const double x = 1.0 / static_cast<double>(m);
        double& acc = bin_sum[static_cast<std::size_t>(n)];
        const double t = acc + x;
        bin_comp[static_cast<std::size_t>(n)] += std::abs(acc) >= x ? (acc - t) + x : (x - t) + acc;
        acc = t;
        ++terms;
      }
    }
    int r = outer - 1;
    for (; r >= 0; --r) {
      if (++head[r] <= extent) break;
      head[r] = -extent;
    }
    if (r < 0) break;
  }

  CompensatedSum<double> total;
  for (std::int64_t n = 1; n <= max_n; ++n) {
    const double b = bin_sum[static_cast<std::size_t>(n)] + bin_comp[static_cast<std::size_t>(n)];
    if (b == 0.0) continue;
    total += std::pow(static_cast<double>(n), -q.params.omega) * b;
  }
  TruncatedSum out;
  out.value = total.value();
  out.terms = terms;
  // Per term: reciprocal (u), per-shell compensated sum (2u + n^2 u^2), pow (<= 2u),
  // product (u), compensated merge (2u + ...). 32u covers the sum with margin.
  const double n_terms = static_cast<double>(terms);
  out.rounding_slack = out.value * (32 * kUnit + n_terms * n_terms * kUnit * kUnit) + total.error_bound();
  return out;
}

double kernel_tail_bound(const KernelQuery& q) {
  q.validate();
  const double nu = 2 * q.params.omega + 2;
  return tail_S_bound<double>(nu, q.lambda - euclid(q.k), q.params.d);
}

KernelBracket kernel_bracket(const KernelQuery& q) {
  const auto sum = truncated_kernel_sum(q);
  KernelBracket b;
  b.k = q.k;
  b.lambda = q.lambda;
  b.truncated_sum = sum.value;
  b.terms = sum.terms;
  // the tail formula itself is evaluated in floating point; inflate by a few ulps
  b.analytic_tail = kernel_tail_bound(q) * (1 + 16 * kUnit);
  b.rounding_slack = sum.rounding_slack;
  b.tail_bound = b.analytic_tail + b.rounding_slack;
  b.lower = b.truncated_sum;
  b.upper = b.truncated_sum + b.tail_bound;
  b.upper = std::nextafter(b.upper, std::numeric_limits<double>::infinity());
  return b;
}

SupCertificate sup_certificate(SpaceParams params, int a, double lambda) {
  params.require_kernel_range();
  if (a < 1) throw InvalidArgument("fundamental-domain radius a must be >= 1");
  const auto domain = fundamental_domain(params.d, a);
  LatticePoint edge = LatticePoint::Zero(params.d);
  edge[params.d - 1] = a + 1;

  double reach = euclid(edge);
  for (const auto& k : domain) reach = std::max(reach, euclid(k));
  if (!(lambda > reach)) {
    std::ostringstream os;
    os << "cutoff lambda = " << lambda << " must exceed every queried |k| (max " << reach << ")";
    throw InvalidArgument(os.str());
  }

  std::vector<LatticePoint> queries = domain;
  queries.push_back(edge);
  std::vector<KernelBracket> brackets(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) { brackets[i] = kernel_bracket({params, queries[i], lambda}); });

  SupCertificate cert;
  cert.params = params;
  cert.a = a;
  cert.lambda = lambda;
  cert.boundary_point = brackets.back();
  brackets.pop_back();
  cert.per_point = std::move(brackets);

  const double edge_len = a + 1.0;
  const double extra = 1.0 / (edge_len * edge_len) + std::pow(edge_len, -2 * params.omega);
  cert.boundary_term = (cert.boundary_point.upper + extra) * (1 + 4 * kUnit);
  cert.boundary_term_lower = cert.boundary_point.lower + extra;

  cert.sup_lower = 0.0;
  cert.sup_upper = cert.boundary_term;
  for (const auto& b : cert.per_point) {
    cert.sup_lower = std::max(cert.sup_lower, b.lower);
    cert.sup_upper = std::max(cert.sup_upper, b.upper);
  }
  return cert;
}

Interval k_constant(const SupCertificate& cert) {
  const double scale = std::pow(2 * std::numbers::pi, -cert.params.d / 2.0);
  Interval out;
  out.lower = std::nextafter(std::nextafter(scale * std::sqrt(cert.sup_lower), 0.0), 0.0);
  out.upper = std::nextafter(std::nextafter(scale * std::sqrt(cert.sup_upper), 1e300), 1e300);
  return out;
}

Interval k_constant(SpaceParams params, int a, double lambda) { return k_constant(sup_certificate(params, a, lambda)); }

// ---------------------------------------------------------------------------

double Sequence1D::at(int i) const {
  if (i < first() || i > last()) return 0.0;
  return values[static_cast<std::size_t>(i - offset)];
}

Sequence1D convolve_1d(const Sequence1D& p, const Sequence1D& q) {
  Sequence1D s;
  if (p.values.empty() || q.values.empty()) return s;
  s.offset = p.offset + q.offset;
  s.values.assign(p.values.size() + q.values.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (p.values[i] < 0.0) throw InvalidArgument("convolve_1d: inputs must be nonnegative");
    for (std::size_t j = 0; j < q.values.size(); ++j) s.values[i + j] += p.values[i] * q.values[j];
  }
  for (double v : q.values) {
    if (v < 0.0) throw InvalidArgument("convolve_1d: inputs must be nonnegative");
  }
  return s;
}

LatticeGrid::LatticeGrid(int d, int radius) : d_(d), radius_(radius) {
  if (d < 1 || d > kMaxDim || radius < 0) throw InvalidArgument("LatticeGrid: bad shape");
  std::size_t n = 1;
  for (int r = 0; r < d; ++r) n *= static_cast<std::size_t>(2 * radius + 1);
  data_.assign(n, 0.0);
}

std::size_t LatticeGrid::index(const LatticePoint& k) const {
  std::size_t lin = 0;
  const auto side = static_cast<std::size_t>(2 * radius_ + 1);
  for (int r = 0; r < d_; ++r) {
    if (k[r] < -radius_ || k[r] > radius_) throw InvalidArgument("LatticeGrid: point outside cube");
    lin = lin * side + static_cast<std::size_t>(k[r] + radius_);
  }
  return lin;
}

double LatticeGrid::at(const LatticePoint& k) const {
  for (int r = 0; r < d_; ++r) {
    if (k[r] < -radius_ || k[r] > radius_) return 0.0;
  }
  return data_[index(k)];
}

LatticePoint LatticeGrid::point(std::size_t linear) const {
  LatticePoint k(d_);
  const auto side = static_cast<std::size_t>(2 * radius_ + 1);
  for (int r = d_ - 1; r >= 0; --r) {
    k[r] = static_cast<int>(linear % side) - radius_;
    linear /= side;
  }
  return k;
}

LatticeGrid convolve_grid(const LatticeGrid& p, const LatticeGrid& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("convolve_grid: dimensions differ");
  LatticeGrid s(p.dim(), p.radius() + q.radius());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pv = p.data()[i];
    if (pv < 0.0) throw InvalidArgument("convolve_grid: inputs must be nonnegative");
    if (pv == 0.0) continue;
    const LatticePoint h = p.point(i);
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double qv = q.data()[j];
      if (qv == 0.0) continue;
      s[LatticePoint(h + q.point(j))] += pv * qv;
    }
  }
  return s;
}

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300}); }

// a >= b up to tolerance
bool at_least(double a, double b, double tol) { return a >= b - tol * std::max(std::abs(a), std::abs(b)); }

}  // namespace

bool check_even(const LatticeGrid& f, double tol) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LatticePoint k = f.point(i);
    for (int r = 0; r < f.dim(); ++r) {
      if (!close(f.data()[i], f[reflect(k, r)], tol)) return false;
    }
  }
  return true;
}

bool check_unimodal(const LatticeGrid& f, double tol) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LatticePoint k = f.point(i);
    for (int r = 0; r < f.dim(); ++r) {
      // step away from the axis origin: value must not increase
      LatticePoint next = k;
      if (k[r] >= 0) {
        if (k[r] == f.radius()) continue;
        next[r] += 1;
      } else {
        if (k[r] == -f.radius()) continue;
        next[r] -= 1;
      }
      if (!at_least(f.data()[i], f[next], tol)) return false;
    }
  }
  return true;
}

bool check_even_unimodal(const LatticeGrid& f, double tol) { return check_even(f, tol) && check_unimodal(f, tol); }

bool check_symmetric(const LatticeGrid& f, double tol) {
  std::vector<int> sigma(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    const LatticePoint k = f.point(i);
    for (int r = 0; r + 1 < f.dim(); ++r) {
      for (int s = 0; s < f.dim(); ++s) sigma[static_cast<std::size_t>(s)] = s;
      std::swap(sigma[static_cast<std::size_t>(r)], sigma[static_cast<std::size_t>(r + 1)]);
      if (!close(f.data()[i], f[permute(k, sigma)], tol)) return false;
    }
  }
  return true;
}

bool check_even_unimodal(const Sequence1D& f, double tol) {
  const int r = std::max(std::abs(f.first()), std::abs(f.last()));
  for (int i = 0; i <= r; ++i) {
    if (!close(f.at(i), f.at(-i), tol)) return false;
    if (!at_least(f.at(i), f.at(i + 1), tol)) return false;
  }
  return true;
}

}  // namespace h1ns
