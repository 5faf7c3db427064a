#include "h1ns/spectral.hpp"

#include "h1ns/errors.hpp"
#include "h1ns/summation.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace h1ns {

void SpaceParams::require_kernel_range() const {
  if (d < 2 || d > kMaxDim) throw InvalidArgument("dimension d must be >= 2");
  if (!(omega > d / 2.0 - 1.0) || !std::isfinite(omega)) {
    std::ostringstream os;
    os << "omega = " << omega << " must exceed d/2 - 1 = " << d / 2.0 - 1.0;
    throw InvalidArgument(os.str());
  }
}

void SpaceParams::require_solver_range() const {
  require_kernel_range();
  if (!(omega < 1.0)) {
    std::ostringstream os;
    os << "omega = " << omega << " must satisfy d/2 - 1 < omega < 1";
    throw InvalidArgument(os.str());
  }
}

FourierField::FourierField(SpaceParams params, int cutoff, int components)
    : params_(params), modes_(ModeSet::ball(params.d, cutoff)) {
  if (components < 1) throw InvalidArgument("field needs at least one component");
  coeffs_ = CoeffMatrix::Zero(components, static_cast<Eigen::Index>(modes_->size()));
}

CVector FourierField::at(const LatticePoint& k) const {
  const auto i = modes_->find(k);
  if (i < 0) return CVector::Zero(components());
  return coeffs_.col(i);
}

void FourierField::set(const LatticePoint& k, const CVector& c) {
  if (c.size() != components()) throw DimensionMismatch("coefficient length differs from component count");
  const auto i = modes_->find(k);
  if (i < 0) throw InvalidArgument("mode is zero or outside the cutoff ball");
  coeffs_.col(i) = c;
}

void FourierField::set_pair(const LatticePoint& k, const CVector& c) {
  set(k, c);
  set(LatticePoint(-k), c.conjugate());
}

FourierField FourierField::with_cutoff(int cutoff) const {
  FourierField out(params_, cutoff, components());
  const auto& dst = out.modes();
  if (cutoff >= this->cutoff()) {
    // Shell-major ordering makes the smaller ball a prefix of the larger one.
    out.coeffs_.leftCols(coeffs_.cols()) = coeffs_;
  } else {
    out.coeffs_ = coeffs_.leftCols(static_cast<Eigen::Index>(dst.size()));
  }
  out.solenoidal_ = solenoidal_;
  return out;
}

void FourierField::validate(double tol) const {
  const auto& ms = *modes_;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < coeffs_.cols(); ++i) scale = std::max(scale, coeffs_.col(i).norm());
  if (!std::isfinite(scale)) throw InvariantViolation("field contains non-finite coefficients");
  const double bound = tol * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto j = ms.conjugate(i);
    const double gap = (coeffs_.col(static_cast<Eigen::Index>(j)) - coeffs_.col(static_cast<Eigen::Index>(i)).conjugate()).norm();
    if (gap > bound) {
      std::ostringstream os;
      os << "reality violated at k = (" << ms.point(i).transpose() << "): |v_{-k} - conj(v_k)| = " << gap;
      throw InvariantViolation(os.str());
    }
    if (solenoidal_ && is_vector()) {
      const auto& k = ms.point(i);
      Complex dot = 0.0;
      for (int r = 0; r < dim(); ++r) dot += static_cast<double>(k[r]) * coeffs_(r, static_cast<Eigen::Index>(i));
      if (std::abs(dot) > bound * std::sqrt(static_cast<double>(ms.norm_sq(i)))) {
        std::ostringstream os;
        os << "divergence-free flag violated at k = (" << k.transpose() << "): |k.v_k| = " << std::abs(dot);
        throw InvariantViolation(os.str());
      }
    }
  }
}

bool FourierField::same_layout(const FourierField& other) const {
  return dim() == other.dim() && cutoff() == other.cutoff() && components() == other.components();
}

FourierField& FourierField::operator+=(const FourierField& other) {
  if (!same_layout(other)) throw DimensionMismatch("field layouts differ");
  coeffs_ += other.coeffs_;
  solenoidal_ = solenoidal_ && other.solenoidal_;
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
  if (!same_layout(other)) throw DimensionMismatch("field layouts differ");
  coeffs_ -= other.coeffs_;
  solenoidal_ = solenoidal_ && other.solenoidal_;
  return *this;
}

FourierField& FourierField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(double s, FourierField a) { return a *= s; }

double weight_pow(std::int64_t norm_sq, double n) {
  const double x = static_cast<double>(norm_sq);
  if (n == std::floor(n) && std::abs(n) <= 64) {
    const int e = static_cast<int>(n);
    double r = 1.0;
    double b = e >= 0 ? x : 1.0 / x;
    for (int p = std::abs(e); p > 0; p >>= 1, b *= b) {
      if (p & 1) r *= b;
    }
    return r;
  }
  return std::exp(n * std::log(x));
}

double sobolev_norm(const FourierField& v, double n) {
  const auto& ms = v.modes();
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    acc += weight_pow(ms.norm_sq(i), n) * v.coeffs().col(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  return std::sqrt(std::max(0.0, acc.value()));
}

double sobolev_inner(const FourierField& v, const FourierField& w, double n) {
  if (v.dim() != w.dim() || v.components() != w.components()) throw DimensionMismatch("field layouts differ");
  const auto& small = v.cutoff() <= w.cutoff() ? v : w;
  const auto& ms = small.modes();
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    acc += weight_pow(ms.norm_sq(i), n) * v.coeffs().col(c).dot(w.coeffs().col(c)).real();
  }
  return acc.value();
}

double sobolev_distance(const FourierField& v, const FourierField& w, double n) {
  if (v.dim() != w.dim() || v.components() != w.components()) throw DimensionMismatch("field layouts differ");
  const int m = std::max(v.cutoff(), w.cutoff());
  return sobolev_norm(v.with_cutoff(m) - w.with_cutoff(m), n);
}

FourierField leray_project(const FourierField& v) {
  if (!v.is_vector()) throw DimensionMismatch("Leray projection needs a vector field");
  FourierField out = v;
  const auto& ms = v.modes();
  const int d = v.dim();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto& k = ms.point(i);
    Complex dot = 0.0;
    for (int r = 0; r < d; ++r) dot += static_cast<double>(k[r]) * v.coeffs()(r, c);
    const Complex f = dot / static_cast<double>(ms.norm_sq(i));
    for (int r = 0; r < d; ++r) out.coeffs()(r, c) -= f * static_cast<double>(k[r]);
  }
  out.mark_solenoidal(true);
  return out;
}

FourierField divergence(const FourierField& v) {
  if (!v.is_vector()) throw DimensionMismatch("divergence needs a vector field");
  FourierField out(v.params(), v.cutoff(), 1);
  const auto& ms = v.modes();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto& k = ms.point(i);
    Complex dot = 0.0;
    for (int r = 0; r < v.dim(); ++r) dot += static_cast<double>(k[r]) * v.coeffs()(r, c);
    out.coeffs()(0, c) = Complex(0.0, 1.0) * dot;
  }
  return out;
}

FourierField curl(const FourierField& v) {
  if (v.dim() != 3 || !v.is_vector()) throw DimensionMismatch("curl is defined for d = 3 vector fields only");
  FourierField out(v.params(), v.cutoff(), 3);
  const auto& ms = v.modes();
  const Complex I(0.0, 1.0);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const auto& k = ms.point(i);
    const Complex a1 = v.coeffs()(0, c), a2 = v.coeffs()(1, c), a3 = v.coeffs()(2, c);
    out.coeffs()(0, c) = I * (static_cast<double>(k[1]) * a3 - static_cast<double>(k[2]) * a2);
    out.coeffs()(1, c) = I * (static_cast<double>(k[2]) * a1 - static_cast<double>(k[0]) * a3);
    out.coeffs()(2, c) = I * (static_cast<double>(k[0]) * a2 - static_cast<double>(k[1]) * a1);
  }
  out.mark_solenoidal(true);
  return out;
}

FourierField fractional_laplacian(const FourierField& v, double n) {
  FourierField out = v;
  const auto& ms = v.modes();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    out.coeffs().col(static_cast<Eigen::Index>(i)) *= std::sqrt(weight_pow(ms.norm_sq(i), n));
  }
  return out;
}

namespace {

// Fills the lexicographically positive half with amplitude-weighted Gaussian
// coefficients and mirrors the conjugates.
void fill_random(FourierField& f, std::uint64_t seed, double decay) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& ms = f.modes();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (!lex_positive(ms.point(i))) continue;
    const double amp = std::pow(1.0 + static_cast<double>(ms.norm_sq(i)), -decay);
    CVector c(f.components());
    for (int r = 0; r < f.components(); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      c[r] = amp * Complex(re, im);
    }
    f.set_pair(ms.point(i), c);
  }
}

}  // namespace

FourierField random_field(std::uint64_t seed, int cutoff, SpaceParams params, double target_h1_norm) {
  if (cutoff < 1) throw InvalidArgument("random_field needs cutoff >= 1");
  if (!(target_h1_norm >= 0.0)) throw InvalidArgument("target norm must be nonnegative");
  FourierField raw = FourierField::vector(params, cutoff);
  fill_random(raw, seed, 1.5);
  FourierField v = leray_project(raw);
  const double norm = sobolev_norm(v, 1.0);
  if (norm > 0.0) v *= target_h1_norm / norm;
  return v;
}

FourierField random_scalar_field(std::uint64_t seed, int cutoff, SpaceParams params, double n,
                                 double target_norm) {
  FourierField z = FourierField::scalar(params, cutoff);
  fill_random(z, seed, 1.0);
  const double norm = sobolev_norm(z, n);
  if (norm > 0.0) z *= target_norm / norm;
  return z;
}

}  // namespace h1ns
