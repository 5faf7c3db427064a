#pragma once

#include "h1ns/errors.hpp"
#include "h1ns/spectral.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace h1ns {

/// Smoothing majorant of e^{t Delta} from H^{n-nu}_0 to H^n_0:
/// (nu/(2 e t))^{nu/2} e^t for 0 < t <= nu/2, and 1 beyond.
template <typename Real>
Real mu_hat(Real nu, Real t) {
  if (!(nu > 0)) throw InvalidArgument("mu_hat: nu must be positive");
  if (!(t > 0)) throw InvalidArgument("mu_hat: t must be positive");
  if (t > nu / 2) return Real(1);
  using std::exp;
  using std::log;
  return exp((nu / 2) * log(nu / (2 * std::numbers::e_v<Real> * t)) + t);
}

/// mu_hat(1 + omega, t), the H^{-omega} -> H^1 smoothing majorant.
double mu_omega(double omega, double t);

/// Coefficient-wise damping e^{-t |k|^2}. Rejects negative t.
FourierField heat_propagate(const FourierField& v, double t);

/// mu_hat(nu,t) e^{-t} ||v||_{n-nu} - ||e^{t Delta} v||_n; nonnegative up to rounding.
double smoothing_defect(const FourierField& v, double t, double n, double nu);

struct SeriesIntegral {
  double value = 0.0;
  double error_bound = 0.0;
};

/// int_a^b tau^p e^{beta tau} d tau for p > -1 and 0 <= a <= b, by termwise
/// integration of the exponential series with a certified remainder bound.
/// Throws QuadratureError when abs_tol is not reached within max_terms.
SeriesIntegral power_exp_integral(double p, double beta, double a, double b, double abs_tol,
                                  int max_terms = 400);

/// kappa(tau) = mu_hat(nu, tau) e^{-B tau}: c tau^{-nu/2} e^{(1-B) tau} up to nu/2, e^{-B tau} after.
class SmoothingKernel {
 public:
  SmoothingKernel(double nu, double decay);

  static SmoothingKernel for_omega(double omega, double decay = 1.0) { return {1.0 + omega, decay}; }

  double nu() const { return nu_; }
  double decay() const { return decay_; }
  double operator()(double tau) const;

  struct Moments {
    double m0 = 0.0;   ///< int_a^b kappa
    double mb = 0.0;   ///< int_a^b kappa(tau) (b - tau)
    double error_bound = 0.0;
  };
  Moments moments(double a, double b) const;

  /// Weights w_j such that sum_j w_j g(s_j) = int_0^{s_n} kappa(s_n - s) g(s) ds
  /// for g piecewise linear on grid[0..n].
  std::vector<double> product_weights(std::span<const double> grid, std::size_t n) const;

 private:
  double nu_;
  double decay_;
  double alpha_;
  double c_;
};

/// I(t) = int_0^t e^{-s} mu_omega(t - s) ds, evaluated as
/// e^{-t} int_0^t e^tau mu_omega(tau) d tau with the tau^{-(1+omega)/2}
/// singularity integrated exactly against the exponential series.
double convolution_integral(double omega, double t, double quad_tol);

/// Certified majorant of sup_t I(t) on [0, inf).
struct NBound {
  double omega = 0.0;
  double n_upper = 0.0;
  double argmax_lo = 0.0;
  double argmax_hi = 0.0;
  double grid_resolution = 0.0;
  double grid_max = 0.0;       ///< max of I on the grid
  double argmax = 0.0;         ///< grid maximizer
  double allowance = 0.0;      ///< inter-grid variation added on top of grid_max
  double tail_bound = 0.0;     ///< majorant of I on (t_star, inf)
  double t_star = 0.0;
  double slack = 0.0;          ///< fixed rounding slack plus quadrature errors
};

struct NOptions {
  double grid_step = 1e-3;
  double quad_tol = 1e-13;
  double t_star = 10.0;
  double allowance_target = 0.005;
  bool refine = true;          ///< halve grid_step until allowance < allowance_target
};

NBound compute_N(double omega, const NOptions& options = {});

inline constexpr double kGlobalSlack = 1e-9;

}  // namespace h1ns
