#pragma once

#include "h1ns/lattice.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <memory>

namespace h1ns {

using Complex = std::complex<double>;
using CoeffMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Dimension and Sobolev exponent of the functional setting.
struct SpaceParams {
  int d = 3;
  double omega = 0.7;

  /// d >= 2 and omega > d/2 - 1 (lattice kernel is finite).
  void require_kernel_range() const;
  /// d/2 - 1 < omega < 1 (both the semigroup and the bilinear estimate apply).
  void require_solver_range() const;
};

/// Zero-mean field on T^d truncated to the Euclidean ball 0 < |k| <= M.
///
/// Coefficients are stored for every mode of the ball (absent modes are zero)
/// as a components x modes matrix; column i belongs to modes().point(i).
/// Vector fields have d components, scalar fields one. Both k and -k are
/// stored; validate() checks the reality condition v_{-k} = conj(v_k).
class FourierField {
 public:
  FourierField(SpaceParams params, int cutoff, int components);

  static FourierField vector(SpaceParams params, int cutoff) { return {params, cutoff, params.d}; }
  static FourierField scalar(SpaceParams params, int cutoff) { return {params, cutoff, 1}; }

  const SpaceParams& params() const { return params_; }
  int dim() const { return params_.d; }
  int cutoff() const { return modes_->cutoff(); }
  int components() const { return static_cast<int>(coeffs_.rows()); }
  bool is_vector() const { return components() == dim(); }

  const ModeSet& modes() const { return *modes_; }
  const std::shared_ptr<const ModeSet>& mode_set() const { return modes_; }

  const CoeffMatrix& coeffs() const { return coeffs_; }
  CoeffMatrix& coeffs() { return coeffs_; }

  /// Coefficient at k; zero when k lies outside the ball.
  CVector at(const LatticePoint& k) const;

  /// Sets the coefficient at k. Throws when k is zero or outside the ball.
  void set(const LatticePoint& k, const CVector& c);

  /// Sets v_k = c and v_{-k} = conj(c).
  void set_pair(const LatticePoint& k, const CVector& c);

  /// Flag asserted by constructions that guarantee k . v_k = 0.
  bool solenoidal() const { return solenoidal_; }
  void mark_solenoidal(bool flag) { solenoidal_ = flag; }

  /// Copy truncated or zero-extended to a different cutoff.
  FourierField with_cutoff(int cutoff) const;

  /// Throws InvariantViolation unless reality (and k . v_k = 0 when flagged)
  /// hold to tol relative to the largest coefficient modulus.
  void validate(double tol = 1e-12) const;

  FourierField& operator+=(const FourierField& other);
  FourierField& operator-=(const FourierField& other);
  FourierField& operator*=(double s);

  bool same_layout(const FourierField& other) const;

 private:
  SpaceParams params_;
  std::shared_ptr<const ModeSet> modes_;
  CoeffMatrix coeffs_;
  bool solenoidal_ = false;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(double s, FourierField a);

/// |k|^{2n} for integer or real n; integer exponents use exact powers.
double weight_pow(std::int64_t norm_sq, double n);

/// ||v||_n = sqrt( sum |k|^{2n} |v_k|^2 ).
double sobolev_norm(const FourierField& v, double n);

/// <v|w>_n = Re sum |k|^{2n} conj(v_k) . w_k over modes present in both fields.
double sobolev_inner(const FourierField& v, const FourierField& w, double n);

/// ||v - w||_n for fields with possibly different cutoffs.
double sobolev_distance(const FourierField& v, const FourierField& w, double n);

/// Mode-wise projection c - (k.c/|k|^2) k. Result is flagged solenoidal.
FourierField leray_project(const FourierField& v);

/// Scalar field k -> i (k . v_k).
FourierField divergence(const FourierField& v);

/// k -> i k x v_k (d = 3 only).
FourierField curl(const FourierField& v);

/// k -> |k|^n v_k.
FourierField fractional_laplacian(const FourierField& v, double n);

/// Reproducible divergence-free real field with ||v||_1 = target_h1_norm.
/// Amplitudes decay like (1+|k|^2)^{-3/2} before Leray projection.
FourierField random_field(std::uint64_t seed, int cutoff, SpaceParams params, double target_h1_norm);

/// Reproducible real zero-mean scalar field with ||z||_n = target_norm.
FourierField random_scalar_field(std::uint64_t seed, int cutoff, SpaceParams params, double n,
                                 double target_norm);

}  // namespace h1ns
