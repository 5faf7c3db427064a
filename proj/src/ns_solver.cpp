#include "h1ns/ns_solver.hpp"

#include "h1ns/errors.hpp"
#include "h1ns/nonlinearity.hpp"
#include "h1ns/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace h1ns {

double chi(double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw InvalidArgument("chi: argument must lie in [0, 1]");
  return 2.0 / (1.0 + std::sqrt(1.0 - z));
}

double GlobalCertificate::envelope(double t) const {
  if (h1_norm == 0.0) return 0.0;
  return chi(std::min(ratio, 1.0)) * std::exp(-t) * h1_norm;
}

GlobalCertificate global_certificate(const FourierField& u0, double K, double N) {
  if (!(K > 0.0) || !(N > 0.0)) throw InvalidArgument("global_certificate: K and N must be positive");
  u0.validate(1e-10);
  GlobalCertificate c;
  c.K = K;
  c.N = N;
  c.h1_norm = sobolev_norm(u0, 1.0);
  c.threshold = 1.0 / (4 * K * N);
  c.ratio = 4 * K * N * c.h1_norm;
  c.covered = c.ratio <= 1.0;
  return c;
}

void SolveConfig::validate() const {
  params.require_solver_range();
  if (params.d != 2 && params.d != 3) throw InvalidArgument("SolveConfig: d must be 2 or 3");
  if (M < 1) throw InvalidArgument("SolveConfig: M must be >= 1");
  if (!(T > 0.0)) throw InvalidArgument("SolveConfig: T must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("SolveConfig: dt must be positive");
  if (!(picard_tol > 0.0)) throw InvalidArgument("SolveConfig: picard_tol must be positive");
  if (picard_max_iters < 1) throw InvalidArgument("SolveConfig: picard_max_iters must be >= 1");
  if (record_every < 1) throw InvalidArgument("SolveConfig: record_every must be >= 1");
  (void)steps();
}

std::size_t SolveConfig::steps() const {
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio) {
    std::ostringstream os;
    os << "SolveConfig: T = " << T << " is not an integer multiple of dt = " << dt;
    throw InvalidArgument(os.str());
  }
  return static_cast<std::size_t>(n);
}

void Trajectory::validate(double tol) const {
  if (times.size() != states.size() || times.size() != h1_norms.size() || times.empty()) {
    throw InvariantViolation("trajectory: times, states and norms must have equal nonzero length");
  }
  if (times.front() != 0.0) throw InvariantViolation("trajectory: first time must be 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) throw InvariantViolation("trajectory: times must increase");
    const auto& s = states[i];
    if (!s.is_vector() || s.cutoff() != states.front().cutoff() || s.dim() != states.front().dim()) {
      throw InvariantViolation("trajectory: states must share layout");
    }
    FourierField probe = s;
    probe.mark_solenoidal(true);
    probe.validate(tol);
    const double n = sobolev_norm(s, 1.0);
    if (std::abs(n - h1_norms[i]) > tol * std::max(1.0, n)) {
      throw InvariantViolation("trajectory: cached H^1 norm does not match state");
    }
  }
}

FourierField galerkin_P(const FourierField& u) { return bilinear_P(u, u, u.cutoff()); }

namespace {

FourierField damp(const FourierField& v, const std::vector<double>& factor) {
  FourierField out = v;
  auto& c = out.coeffs();
  for (Eigen::Index i = 0; i < c.cols(); ++i) c.col(i) *= factor[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

Trajectory picard_solve(const FourierField& u0_in, const SolveConfig& cfg) {
  cfg.validate();
  if (u0_in.dim() != cfg.params.d || !u0_in.is_vector()) throw DimensionMismatch("picard_solve: datum has wrong shape");
  FourierField u(cfg.params, cfg.M, cfg.params.d);
  u += u0_in.with_cutoff(cfg.M);
  u.mark_solenoidal(true);
  u.validate(1e-10);

  const std::size_t steps = cfg.steps();
  Trajectory traj;
  traj.config = cfg;
  auto record = [&](std::size_t n, const FourierField& s) {
    traj.times.push_back(static_cast<double>(n) * cfg.dt);
    traj.states.push_back(s);
    traj.h1_norms.push_back(sobolev_norm(s, 1.0));
  };
  record(0, u);

  if (!cfg.nonlinear) {
    for (std::size_t n = 1; n <= steps; ++n) {
      traj.picard_iterations.push_back(0);
      traj.contraction.push_back(0.0);
      if (n % static_cast<std::size_t>(cfg.record_every) == 0 || n == steps) {
        FourierField s = heat_propagate(u, static_cast<double>(n) * cfg.dt);
        s.mark_solenoidal(true);
        record(n, s);
      }
    }
    return traj;
  }

  const auto& modes = u.modes();
  std::vector<double> E(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) E[i] = std::exp(-cfg.dt * static_cast<double>(modes.norm_sq(i)));
  const double half = cfg.dt / 2;

  FourierField p_now = galerkin_P(u);
  std::optional<FourierField> p_prev;
  for (std::size_t n = 1; n <= steps; ++n) {
    FourierField base = damp(u, E);
    base += half * damp(p_now, E);
    FourierField guess = p_prev ? 2.0 * p_now - *p_prev : p_now;
    FourierField iterate = base + half * guess;
    iterate.mark_solenoidal(true);

    double prev_diff = 0.0;
    double ratio = 0.0;
    int iters = 0;
    FourierField p_next = p_now;
    while (true) {
      if (iters == cfg.picard_max_iters) {
        std::ostringstream os;
        os << "picard_solve: no convergence at t = " << static_cast<double>(n) * cfg.dt << " after " << iters
           << " iterations (last contraction ratio " << ratio << ")";
        throw ConvergenceError(os.str(), static_cast<double>(n) * cfg.dt, ratio);
      }
      p_next = galerkin_P(iterate);
      ++iters;
      FourierField updated = base + half * p_next;
      updated.mark_solenoidal(true);
      const double diff = sobolev_distance(updated, iterate, 1.0);
      if (!std::isfinite(diff)) {
        throw ConvergenceError("picard_solve: iteration diverged", static_cast<double>(n) * cfg.dt, ratio);
      }
      if (iters > 1 && prev_diff > 0.0) ratio = diff / prev_diff;
      prev_diff = diff;
      iterate = std::move(updated);
      if (diff <= cfg.picard_tol) break;
    }
    traj.picard_iterations.push_back(iters);
    traj.contraction.push_back(ratio);
    p_prev = std::move(p_now);
    p_now = std::move(p_next);
    u = std::move(iterate);
    if (n % static_cast<std::size_t>(cfg.record_every) == 0 || n == steps) record(n, u);
  }
  return traj;
}

EnvelopeReport envelope_check(const Trajectory& traj, const FourierField& u0, double K, double N, double tolerance) {
  const auto cert = global_certificate(u0, K, N);
  if (!cert.covered) throw InvalidArgument("envelope_check: datum exceeds the small-data threshold");
  EnvelopeReport rep;
  rep.tolerance = tolerance;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double env = cert.envelope(traj.times[i]);
    const double margin = env - traj.h1_norms[i];
    rep.envelope.push_back(env);
    rep.margins.push_back(margin);
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < -tolerance && !rep.first_violation) rep.first_violation = i;
  }
  rep.pass = !rep.first_violation.has_value();
  return rep;
}

std::vector<double> energy_law_defects(const Trajectory& traj) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double dt = traj.times[i + 1] - traj.times[i];
    const double e0 = sobolev_norm(traj.states[i], 0.0);
    const double e1 = sobolev_norm(traj.states[i + 1], 0.0);
    const double rate = (e1 * e1 - e0 * e0) / dt;
    out.push_back(std::abs(rate + traj.h1_norms[i] * traj.h1_norms[i] + traj.h1_norms[i + 1] * traj.h1_norms[i + 1]));
  }
  return out;
}

}  // namespace h1ns
