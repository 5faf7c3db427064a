#include "h1ns/aposteriori.hpp"

#include "h1ns/errors.hpp"
#include "h1ns/nonlinearity.hpp"
#include "h1ns/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>

namespace h1ns {

void EstimatorSeries::validate() const {
  const std::size_t n = times.size();
  if (n == 0) throw InvalidArgument("estimator series is empty");
  if (D.size() != n || E.size() != n || (!R.empty() && R.size() != n)) {
    throw InvalidArgument("estimator series: D, E (and R) must match the time grid");
  }
  if (times.front() != 0.0) throw InvalidArgument("estimator series: grid must start at 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("estimator series: times must increase");
    if (!(D[i] >= 0.0) || !(E[i] >= 0.0) || !std::isfinite(D[i]) || !std::isfinite(E[i])) {
      throw InvalidArgument("estimator series: D and E must be finite and nonnegative");
    }
    if (!R.empty() && !(R[i] >= 0.0)) throw InvalidArgument("estimator series: R must be nonnegative");
  }
}

std::vector<double> growth_estimator(const Trajectory& traj) {
  const auto& n = traj.h1_norms;
  std::vector<double> D(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    double var = 0.0;
    if (i > 0) var = std::max(var, std::abs(n[i] - n[i - 1]));
    if (i + 1 < n.size()) var = std::max(var, std::abs(n[i + 1] - n[i]));
    D[i] = n[i] + var;
  }
  return D;
}

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;

// phi_j(x) = int_0^1 e^{(1-s) x} s^{j-1}/(j-1)! ds for x <= 0.
double phi(int j, double x) {
  if (std::abs(x) < 1.0) {
    double fact = 1.0;
    for (int m = 2; m <= j; ++m) fact *= m;
    double term = 1.0 / fact;
    double sum = term;
    for (int m = 1; m < 40; ++m) {
      term *= x / (m + j);
      sum += term;
    }
    return sum;
  }
  double p = std::exp(x);
  double fact = 1.0;
  for (int m = 1; m <= j; ++m) {
    p = (p - 1.0 / fact) / x;
    fact *= m;
  }
  return p;
}

// int_0^{t_n} kappa(t_n - s) f(s) ds for f piecewise linear on the grid.
class HistoryQuadrature {
 public:
  HistoryQuadrature(const SmoothingKernel& kernel, std::vector<double> grid) : kernel_(kernel), grid_(std::move(grid)) {
    const std::size_t n = grid_.size();
    if (n >= 2) {
      const double h = grid_[1] - grid_[0];
      uniform_ = true;
      for (std::size_t j = 1; j + 1 < n; ++j) {
        if (std::abs((grid_[j + 1] - grid_[j]) - h) > 1e-12 * h) uniform_ = false;
      }
      if (uniform_) {
        h_ = h;
        lag_.resize(n - 1);
        for (std::size_t l = 0; l + 1 < n; ++l) {
          lag_[l] = kernel_.moments(static_cast<double>(l) * h, static_cast<double>(l + 1) * h);
        }
      }
    }
  }

  struct Split {
    double known = 0.0;        // contribution of f_0 .. f_{n-1}
    double self_weight = 0.0;  // weight of f_n
    double error = 0.0;        // moment error times the local size of f
  };

  Split at(std::size_t n, std::span<const double> f) const {
    Split s;
    for (std::size_t j = 0; j < n; ++j) {
      SmoothingKernel::Moments m;
      double h;
      if (uniform_) {
        m = lag_[n - j - 1];
        h = h_;
      } else {
        h = grid_[j + 1] - grid_[j];
        m = kernel_.moments(std::max(0.0, grid_[n] - grid_[j + 1]), grid_[n] - grid_[j]);
      }
      const double w0 = m.m0 - m.mb / h;
      const double w1 = m.mb / h;
      s.known += w0 * f[j];
      if (j + 1 < n) {
        s.known += w1 * f[j + 1];
      } else {
        s.self_weight = w1;
      }
      const double fn = j + 1 < n ? f[j + 1] : 0.0;
      s.error += m.error_bound * (std::abs(f[j]) + std::abs(fn - f[j]) / h) + 4 * kUnit * std::abs(w0 * f[j]);
    }
    return s;
  }

  // full integral using f_n as well
  double integral(std::size_t n, std::span<const double> f, double* error = nullptr) const {
    const auto s = at(n, f);
    if (error) *error = s.error + s.self_weight * std::abs(f[n]) * 4 * kUnit;
    return s.known + s.self_weight * f[n];
  }

  const std::vector<double>& grid() const { return grid_; }

 private:
  SmoothingKernel kernel_;
  std::vector<double> grid_;
  bool uniform_ = false;
  double h_ = 0.0;
  std::vector<SmoothingKernel::Moments> lag_;
};

double tail_norm(const FourierField& big, std::size_t inner_modes, double omega) {
  const auto& modes = big.modes();
  double s = 0.0;
  for (std::size_t i = inner_modes; i < modes.size(); ++i) {
    s += weight_pow(modes.norm_sq(i), -omega) * big.coeffs().col(static_cast<Eigen::Index>(i)).squaredNorm();
  }
  return std::sqrt(s);
}

}  // namespace

ErrorEstimate error_estimator(const Trajectory& traj, double omega, const QuadConfig& quad) {
  if (traj.states.empty() || traj.states.size() != traj.times.size()) {
    throw InvalidArgument("error_estimator: malformed trajectory");
  }
  if (!(omega > 0.0 && omega < 1.0)) throw InvalidArgument("error_estimator: omega must lie in (0, 1)");
  const std::size_t n_samples = traj.size();
  const FourierField& u0 = traj.states.front();
  const int M = u0.cutoff();
  const auto& modes = u0.modes();
  const std::size_t n_modes = modes.size();
  const bool refined = quad.mode == QuadMode::Refined;

  ErrorEstimate est;
  est.times = traj.times;
  est.residual.assign(n_samples, 0.0);
  est.tail.assign(n_samples, 0.0);
  est.total.assign(n_samples, 0.0);

  auto product = [&](const FourierField& u, FourierField& inner, double& g) {
    FourierField big = bilinear_P(u, u, 2 * M);
    g = tail_norm(big, n_modes, omega);
    inner = big.with_cutoff(M);
  };

  std::vector<double> fine_times{0.0};
  std::vector<double> g_fine;
  FourierField p_prev = u0;
  double g0 = 0.0;
  product(u0, p_prev, g0);
  g_fine.push_back(g0);

  FourierField J = FourierField::vector(u0.params(), M);
  J.mark_solenoidal(true);
  for (std::size_t n = 0; n + 1 < n_samples; ++n) {
    const double h = traj.times[n + 1] - traj.times[n];
    const FourierField& un = traj.states[n];
    FourierField p_next = un;
    double g_next = 0.0;
    product(traj.states[n + 1], p_next, g_next);

    FourierField J_next = J;
    auto& jc = J_next.coeffs();
    const auto& pn = p_prev.coeffs();
    const auto& pn1 = p_next.coeffs();
    if (!refined) {
      for (std::size_t i = 0; i < n_modes; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const double e = std::exp(-h * static_cast<double>(modes.norm_sq(i)));
        jc.col(col) = e * jc.col(col) + (h / 2) * (e * pn.col(col) + pn1.col(col));
      }
      fine_times.push_back(traj.times[n + 1]);
      g_fine.push_back(g_next);
    } else {
      const double tau = h / 2;
      FourierField mid = un;
      auto& mc = mid.coeffs();
      for (std::size_t i = 0; i < n_modes; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const double x = -tau * static_cast<double>(modes.norm_sq(i));
        mc.col(col) = std::exp(x) * mc.col(col) + tau * phi(1, x) * pn.col(col) +
                      (tau * tau / h) * phi(2, x) * (pn1.col(col) - pn.col(col));
      }
      mid.mark_solenoidal(true);
      FourierField p_mid = mid;
      double g_mid = 0.0;
      product(mid, p_mid, g_mid);
      const auto& pm = p_mid.coeffs();
      for (std::size_t i = 0; i < n_modes; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const double z = -h * static_cast<double>(modes.norm_sq(i));
        const double psi0 = phi(1, z);
        const double psi1 = phi(2, z);
        const double psi2 = 2 * phi(3, z);
        const double w0 = h * (2 * psi2 - 3 * psi1 + psi0);
        const double w1 = h * (4 * psi1 - 4 * psi2);
        const double w2 = h * (2 * psi2 - psi1);
        jc.col(col) = std::exp(z) * jc.col(col) + w0 * pn.col(col) + w1 * pm.col(col) + w2 * pn1.col(col);
      }
      fine_times.push_back(traj.times[n] + tau);
      g_fine.push_back(g_mid);
      fine_times.push_back(traj.times[n + 1]);
      g_fine.push_back(g_next);
    }
    J = std::move(J_next);
    p_prev = std::move(p_next);

    FourierField a = traj.states[n + 1].with_cutoff(M);
    a -= heat_propagate(u0, traj.times[n + 1]);
    a -= J;
    est.residual[n + 1] = sobolev_norm(a, 1.0);
  }

  const HistoryQuadrature hq(SmoothingKernel::for_omega(omega, 1.0), fine_times);
  const std::size_t stride = refined ? 2 : 1;
  for (std::size_t n = 0; n < n_samples; ++n) {
    double err = 0.0;
    est.tail[n] = hq.integral(n * stride, g_fine, &err) + err;
    est.total[n] = est.residual[n] + est.tail[n];
  }
  est.tail_samples = std::move(g_fine);
  return est;
}

ControlResult solve_control_inequality(const EstimatorSeries& input, const ControlOptions& opts) {
  input.validate();
  if (!(opts.K > 0.0) || !(opts.B > 0.0)) throw InvalidArgument("solve_control_inequality: K and B must be positive");
  if (!(opts.safety > 1.0)) throw InvalidArgument("solve_control_inequality: safety must exceed 1");
  if (!(opts.omega > 0.0 && opts.omega < 1.0)) throw InvalidArgument("solve_control_inequality: omega must lie in (0, 1)");

  const SmoothingKernel kernel = SmoothingKernel::for_omega(opts.omega, opts.B);
  const std::size_t n = input.size();
  ControlResult res;
  res.series = input;
  res.series.R.assign(n, 0.0);
  auto& R = res.series.R;
  const auto& D = input.D;
  const auto& E = input.E;
  const double K = opts.K;

  // equality march
  {
    const HistoryQuadrature hq(kernel, input.times);
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto s = hq.at(i, f);
      const double c = E[i] + K * s.known;
      const double beta = 2 * K * s.self_weight * D[i];
      const double gamma = K * s.self_weight;
      const double lin = 1.0 - beta;
      const double disc = lin * lin - 4 * gamma * c;
      if (!(lin > 0.0) || !(disc >= 0.0)) {
        res.t_star = input.times[i];
        res.defect = lin > 0.0 ? -disc : 1.0 - lin;
        std::ostringstream os;
        os << "control equation has no solution past t = " << input.times[i];
        res.reason = os.str();
        R.resize(i);
        return res;
      }
      R[i] = 2 * c / (lin + std::sqrt(disc));
      f[i] = 2 * D[i] * R[i] + R[i] * R[i];
    }
  }
  for (double& r : R) r *= opts.safety;

  // verification on the grid with every interval halved
  std::vector<double> fine_t;
  std::vector<double> fine_D, fine_E, fine_R;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      fine_t.push_back(0.5 * (input.times[i - 1] + input.times[i]));
      fine_D.push_back(0.5 * (D[i - 1] + D[i]));
      fine_E.push_back(0.5 * (E[i - 1] + E[i]));
      fine_R.push_back(0.5 * (R[i - 1] + R[i]));
    }
    fine_t.push_back(input.times[i]);
    fine_D.push_back(D[i]);
    fine_E.push_back(E[i]);
    fine_R.push_back(R[i]);
  }
  const std::size_t m = fine_t.size();
  std::vector<double> f(m);
  std::vector<double> f_coarse(m);
  for (std::size_t j = 0; j < m; ++j) f[j] = 2 * fine_D[j] * fine_R[j] + fine_R[j] * fine_R[j];
  for (std::size_t j = 0; j < m; ++j) f_coarse[j] = j % 2 == 0 ? f[j] : 0.5 * (f[j - 1] + f[j + 1]);

  const HistoryQuadrature fine(kernel, fine_t);
  res.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    double err = 0.0;
    const double integral = fine.integral(j, f, &err);
    const double coarse = fine.integral(j, f_coarse);
    const double allowance = K * (err + std::abs(integral - coarse));
    const double margin = fine_R[j] - (fine_E[j] + K * integral) - allowance;
    res.verify_times.push_back(fine_t[j]);
    res.verify_margins.push_back(margin);
    res.allowances.push_back(allowance);
    res.min_margin = std::min(res.min_margin, margin);
    if (margin < 0.0 && !res.t_star) {
      res.t_star = fine_t[j];
      res.defect = -margin;
      std::ostringstream os;
      os << "control inequality violated at t = " << fine_t[j] << " by " << -margin;
      res.reason = os.str();
    }
  }
  res.pass = !res.t_star.has_value();
  return res;
}

ReferenceReport verify_against_reference(const Trajectory& u_ap, const Trajectory& u_ref, const std::vector<double>& R) {
  if (R.size() != u_ap.size()) throw InvalidArgument("verify_against_reference: R must match the approximate trajectory");
  ReferenceReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  for (std::size_t i = 0; i < u_ap.size(); ++i) {
    const double t = u_ap.times[i];
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    while (j < u_ref.size() && u_ref.times[j] < t - tol) ++j;
    if (j == u_ref.size() || std::abs(u_ref.times[j] - t) > tol) {
      std::ostringstream os;
      os << "verify_against_reference: reference has no sample at t = " << t;
      throw InvalidArgument(os.str());
    }
    const double err = sobolev_distance(u_ref.states[j], u_ap.states[i], 1.0);
    const double margin = R[i] - err;
    rep.times.push_back(t);
    rep.errors.push_back(err);
    rep.margins.push_back(margin);
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < 0.0) rep.violations.push_back(i);
  }
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace h1ns
