#include "h1ns/semigroup.hpp"

#include "h1ns/errors.hpp"
#include "h1ns/summation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace h1ns {

namespace {
constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
}

double mu_omega(double omega, double t) {
  if (!(omega > 0.0 && omega < 1.0)) throw InvalidArgument("mu_omega: omega must lie in (0, 1)");
  return mu_hat(1.0 + omega, t);
}

FourierField heat_propagate(const FourierField& v, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("heat_propagate: t must be nonnegative");
  FourierField out = v;
  if (t == 0.0) return out;
  const auto& ms = v.modes();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    out.coeffs().col(static_cast<Eigen::Index>(i)) *= std::exp(-t * static_cast<double>(ms.norm_sq(i)));
  }
  return out;
}

double smoothing_defect(const FourierField& v, double t, double n, double nu) {
  if (!(t > 0.0)) throw InvalidArgument("smoothing_defect: t must be positive");
  const double bound = mu_hat(nu, t) * std::exp(-t) * sobolev_norm(v, n - nu);
  return bound - sobolev_norm(heat_propagate(v, t), n);
}

SeriesIntegral power_exp_integral(double p, double beta, double a, double b, double abs_tol, int max_terms) {
  if (!(p > -1.0)) throw InvalidArgument("power_exp_integral: exponent must exceed -1");
  if (!(a >= 0.0 && b >= a)) throw InvalidArgument("power_exp_integral: need 0 <= a <= b");
  if (a == b) return {};

  // D_j = int_a^b tau^{j+p} d tau
  auto power_integral = [&](double q) {
    if (a == 0.0) return std::pow(b, q) / q;
    return std::pow(a, q) * std::expm1(q * std::log(b / a)) / q;
  };

  const double x = std::abs(beta) * b;
  const double e0 = power_integral(p + 1.0);
  CompensatedSum<double> sum;
  double coef = 1.0;    // beta^j / j!
  double ratio = 1.0;   // x^j / j!
  double remainder = std::numeric_limits<double>::infinity();
  for (int j = 0; j < max_terms; ++j) {
    if (j > 0) {
      coef *= beta / j;
      ratio *= x / j;
    }
    sum += coef * power_integral(j + p + 1.0);
    const double next = ratio * x / (j + 1);
    const double denom = 1.0 - x / (j + 2);
    if (denom > 0.0) {
      remainder = e0 * next / denom;
      const double floor = 4 * kUnit * std::abs(sum.value());
      if (remainder <= std::max(abs_tol, floor)) {
        const double rounding = 16 * kUnit * sum.abs_sum() + sum.error_bound();
        return {sum.value(), remainder + rounding};
      }
    }
  }
  std::ostringstream os;
  os << "power_exp_integral: series did not reach tolerance " << abs_tol << " in " << max_terms << " terms";
  throw QuadratureError(os.str(), remainder);
}

SmoothingKernel::SmoothingKernel(double nu, double decay)
    : nu_(nu), decay_(decay), alpha_(nu / 2), c_(std::pow(nu / (2 * std::numbers::e), nu / 2)) {
  if (!(nu > 0.0 && nu < 2.0)) throw InvalidArgument("SmoothingKernel: nu must lie in (0, 2) for integrability");
  if (!(decay >= 0.0)) throw InvalidArgument("SmoothingKernel: decay must be nonnegative");
}

double SmoothingKernel::operator()(double tau) const {
  if (!(tau > 0.0)) throw InvalidArgument("SmoothingKernel: tau must be positive");
  return mu_hat(nu_, tau) * std::exp(-decay_ * tau);
}

namespace {

// (e^x - 1)/x and (x e^x - (e^x - 1))/x^2, stable near 0.
double phi1(double x) { return std::abs(x) < 1e-8 ? 1.0 + x / 2 : std::expm1(x) / x; }

double phi_sigma(double x) {
  if (std::abs(x) < 0.5) {
    double term = 1.0, sum = 0.0;
    for (int j = 0; j < 30; ++j) {
      if (j > 0) term *= x / j;
      sum += term / (j + 2);
    }
    return sum;
  }
  return (x * std::exp(x) - std::expm1(x)) / (x * x);
}

}  // namespace

SmoothingKernel::Moments SmoothingKernel::moments(double a, double b) const {
  if (!(a >= 0.0 && b >= a)) throw InvalidArgument("SmoothingKernel::moments: need 0 <= a <= b");
  Moments m;
  const double split = nu_ / 2;
  const double beta = 1.0 - decay_;
  if (a < split) {
    const double hi = std::min(b, split);
    const auto e0 = power_exp_integral(-alpha_, beta, a, hi, 0.0);
    const auto e1 = power_exp_integral(1.0 - alpha_, beta, a, hi, 0.0);
    m.m0 += c_ * e0.value;
    m.mb += c_ * (b * e0.value - e1.value);
    m.error_bound += c_ * (e0.error_bound + b * e0.error_bound + e1.error_bound);
  }
  if (b > split) {
    const double lo = std::max(a, split);
    const double len = b - lo;
    const double eb = std::exp(-decay_ * b);
    m.m0 += eb * len * phi1(decay_ * len);
    m.mb += eb * len * len * phi_sigma(decay_ * len);
  }
  m.error_bound += 8 * kUnit * (std::abs(m.m0) + std::abs(m.mb));
  return m;
}

std::vector<double> SmoothingKernel::product_weights(std::span<const double> grid, std::size_t n) const {
  if (n >= grid.size()) throw InvalidArgument("product_weights: index outside grid");
  std::vector<double> w(n + 1, 0.0);
  const double t = grid[n];
  for (std::size_t j = 0; j < n; ++j) {
    const double h = grid[j + 1] - grid[j];
    if (!(h > 0.0)) throw InvalidArgument("product_weights: grid must be strictly increasing");
    const double ta = t - grid[j + 1];
    const double tb = t - grid[j];
    const auto m = moments(std::max(0.0, ta), tb);
    w[j] += m.m0 - m.mb / h;
    w[j + 1] += m.mb / h;
  }
  return w;
}

double convolution_integral(double omega, double t, double quad_tol) {
  if (!(omega > 0.0 && omega < 1.0)) throw InvalidArgument("convolution_integral: omega must lie in (0, 1)");
  if (!(t >= 0.0)) throw InvalidArgument("convolution_integral: t must be nonnegative");
  if (t == 0.0) return 0.0;
  const double nu = 1.0 + omega;
  const double alpha = nu / 2;
  const double c = std::pow(nu / (2 * std::numbers::e), alpha);
  const double a = std::min(t, nu / 2);
  const double scale = c * std::exp(-t);
  const auto singular = power_exp_integral(-alpha, 2.0, 0.0, a, 0.5 * quad_tol / std::max(scale, 1e-300));
  double value = scale * singular.value;
  if (t > nu / 2) value += -std::expm1(nu / 2 - t);
  const double achieved = scale * singular.error_bound + 4 * kUnit * value;
  if (achieved > quad_tol) {
    std::ostringstream os;
    os << "convolution_integral: tolerance " << quad_tol << " not reachable, achieved " << achieved;
    throw QuadratureError(os.str(), achieved);
  }
  return value;
}

namespace {

NBound scan_grid(double omega, double step, const NOptions& opt) {
  const double nu = 1.0 + omega;
  const double alpha = nu / 2;
  const double c = std::pow(nu / (2 * std::numbers::e), alpha);
  const auto count = static_cast<std::size_t>(std::ceil(opt.t_star / step - 1e-9));

  NBound nb;
  nb.omega = omega;
  nb.grid_resolution = step;
  nb.t_star = opt.t_star;

  double best_upper = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = std::min(static_cast<double>(i) * step, opt.t_star);
    const double value = convolution_integral(omega, t, opt.quad_tol);
    if (value > nb.grid_max) {
      nb.grid_max = value;
      best = i;
    }
    if (i == count) break;
    const double t_next = std::min(static_cast<double>(i + 1) * step, opt.t_star);
    const double h = t_next - t;
    // I(s) <= I(t_i) + int_{t_i}^{t_{i+1}} mu on each cell; mu is nonincreasing.
    const double rise = i == 0 ? c * std::exp(h) * std::pow(h, 1.0 - alpha) / (1.0 - alpha)
                               : mu_hat(nu, t) * h;
    best_upper = std::max(best_upper, value + rise);
  }

  // For t >= nu/2, I(t) = 1 + e^{-t} (C - e^{nu/2}) with C = c int_0^{nu/2} tau^{-alpha} e^{2 tau}.
  const auto head = power_exp_integral(-alpha, 2.0, 0.0, nu / 2, 0.0);
  const double excess = c * (head.value + head.error_bound) - std::exp(nu / 2);
  nb.tail_bound = 1.0 + std::exp(-std::max(opt.t_star, nu / 2)) * std::max(0.0, excess);

  nb.argmax = static_cast<double>(best) * step;
  nb.argmax_lo = best == 0 ? 0.0 : static_cast<double>(best - 1) * step;
  nb.argmax_hi = std::min(static_cast<double>(best + 1) * step, opt.t_star);
  nb.allowance = best_upper - nb.grid_max;
  nb.slack = kGlobalSlack + opt.quad_tol;
  nb.n_upper = std::max(best_upper, nb.tail_bound) + nb.slack;
  return nb;
}

}  // namespace

NBound compute_N(double omega, const NOptions& options) {
  if (!(omega > 0.0 && omega < 1.0)) throw InvalidArgument("compute_N: omega must lie in (0, 1)");
  if (!(options.grid_step > 0.0) || !(options.t_star > 0.0)) throw InvalidArgument("compute_N: bad grid");
  double step = options.grid_step;
  NBound nb = scan_grid(omega, step, options);
  while (options.refine && nb.allowance >= options.allowance_target && step > 1e-7) {
    step /= 2;
    nb = scan_grid(omega, step, options);
  }
  return nb;
}

}  // namespace h1ns
