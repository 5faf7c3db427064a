#pragma once

#include "h1ns/errors.hpp"
#include "h1ns/lattice.hpp"
#include "h1ns/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace h1ns {

/// Evaluation request for K_omega(k) = sum_{h != 0,k} |h|^{-2 omega} |k-h|^{-2}.
struct KernelQuery {
  SpaceParams params;
  LatticePoint k;
  double lambda = 150.0;  ///< cutoff, must exceed |k|

  void validate() const;
};

/// Two-sided enclosure lower <= K_omega(k) <= upper.
///
/// lower is the truncated sum over |h| < lambda + 2 sqrt(d). The exact kernel
/// exceeds it strictly (every omitted term is positive, and the omitted mass
/// dwarfs the rounding slack), so the closed interval is reported.
struct KernelBracket {
  LatticePoint k;
  double lambda = 0.0;
  double truncated_sum = 0.0;
  double analytic_tail = 0.0;   ///< closed-form bound on the omitted terms
  double rounding_slack = 0.0;  ///< bound on accumulated floating-point error
  double tail_bound = 0.0;      ///< analytic_tail + rounding_slack
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t terms = 0;
};

struct TruncatedSum {
  double value = 0.0;
  double rounding_slack = 0.0;
  std::int64_t terms = 0;
};

/// Finite sum over the ball |h| < lambda + 2 sqrt(d), h != 0, k. Terms are
/// accumulated per shell |h|^2 (lexicographic inside a shell, compensated),
/// and shells are merged in increasing order.
TruncatedSum truncated_kernel_sum(const KernelQuery& q);

/// Bound on sum_{|h| >= lambda + 2 sqrt d} |h|^{-nu} for nu > d:
/// (2 pi^{d/2} / Gamma(d/2)) sum_i C(d-1,i) d^{(d-1-i)/2} / ((nu-i-1) lambda^{nu-i-1}).
template <typename Real>
Real tail_S_bound(Real nu, Real lambda, int d) {
  if (d < 1) throw InvalidArgument("tail_S_bound: dimension must be positive");
  if (!(nu > d)) throw InvalidArgument("tail_S_bound: nu must exceed d, the tail diverges otherwise");
  if (!(lambda > 0)) throw InvalidArgument("tail_S_bound: lambda must be positive");
  using std::pow;
  const Real half_d = Real(d) / 2;
  const Real sphere = 2 * pow(std::numbers::pi_v<Real>, half_d) / std::tgamma(half_d);
  Real sum = 0;
  Real binom = 1;
  for (int i = 0; i < d; ++i) {
    if (i > 0) binom = binom * Real(d - i) / Real(i);
    const Real e = nu - Real(i) - 1;
    sum += binom * pow(Real(d), (Real(d) - 1 - Real(i)) / 2) / (e * pow(lambda, e));
  }
  return sphere * sum;
}

/// tail_S_bound(2 omega + 2, lambda - |k|, d).
double kernel_tail_bound(const KernelQuery& q);

KernelBracket kernel_bracket(const KernelQuery& q);

/// Enclosure of sup_{k in Z^d_0} K_omega(k) from the fundamental domain I(a)
/// and the boundary majorant K(0,..,0,a+1) + (a+1)^{-2} + (a+1)^{-2 omega}.
struct SupCertificate {
  SpaceParams params;
  int a = 1;
  double lambda = 0.0;
  std::vector<KernelBracket> per_point;
  KernelBracket boundary_point;
  double boundary_term = 0.0;        ///< upper majorant R_omega(a)
  double boundary_term_lower = 0.0;  ///< same expression from the lower bracket (diagnostic)
  double sup_lower = 0.0;
  double sup_upper = 0.0;
};

SupCertificate sup_certificate(SpaceParams params, int a, double lambda);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double x) const { return lower <= x && x <= upper; }
};

/// (2 pi)^{-d/2} sqrt(.) applied to the sup enclosure, rounded outward.
Interval k_constant(const SupCertificate& cert);
Interval k_constant(SpaceParams params, int a, double lambda);

// ---------------------------------------------------------------------------
// Convolutions of nonnegative lattice functions.

/// Finitely supported sequence on Z: values[i] sits at offset + i.
struct Sequence1D {
  int offset = 0;
  std::vector<double> values;

  double at(int i) const;
  int first() const { return offset; }
  int last() const { return offset + static_cast<int>(values.size()) - 1; }
};

Sequence1D convolve_1d(const Sequence1D& p, const Sequence1D& q);

/// Values on the cube [-radius, radius]^d, row-major, zero outside.
class LatticeGrid {
 public:
  LatticeGrid(int d, int radius);

  int dim() const { return d_; }
  int radius() const { return radius_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](const LatticePoint& k) { return data_[index(k)]; }
  double operator[](const LatticePoint& k) const { return data_[index(k)]; }
  double at(const LatticePoint& k) const;  ///< zero outside the cube

  LatticePoint point(std::size_t linear) const;
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(const LatticePoint& k) const;

  int d_;
  int radius_;
  std::vector<double> data_;
};

LatticeGrid convolve_grid(const LatticeGrid& p, const LatticeGrid& q);

/// f(R_r k) = f(k) for every r, to relative tolerance tol.
bool check_even(const LatticeGrid& f, double tol = 1e-12);
/// Along every axis line, nonincreasing in |k_r| (to tolerance).
bool check_unimodal(const LatticeGrid& f, double tol = 1e-12);
bool check_even_unimodal(const LatticeGrid& f, double tol = 1e-12);
/// f(P_sigma k) = f(k) for all adjacent transpositions (they generate S_d).
bool check_symmetric(const LatticeGrid& f, double tol = 1e-12);

bool check_even_unimodal(const Sequence1D& f, double tol = 1e-12);

}  // namespace h1ns
