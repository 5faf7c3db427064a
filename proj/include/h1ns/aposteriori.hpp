#pragma once

#include "h1ns/ns_solver.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace h1ns {

/// Sampled growth and error estimators on a common time grid, plus the
/// radius R once the control inequality has been solved (empty before).
struct EstimatorSeries {
  std::vector<double> times;
  std::vector<double> D;
  std::vector<double> E;
  std::vector<double> R;

  std::size_t size() const { return times.size(); }
  /// Equal lengths, times strictly increasing from 0, nonnegative finite samples.
  void validate() const;
};

/// D_i = ||u_i||_1 plus the largest change of the norm towards either neighbour.
std::vector<double> growth_estimator(const Trajectory& traj);

enum class QuadMode {
  Trapezoid,  ///< same rule as the solver; the residual then vanishes up to the Picard tolerance
  Refined,    ///< quadratic interpolation through an exponential midpoint state
};

struct QuadConfig {
  QuadMode mode = QuadMode::Refined;
};

/// Split of the mild residual bound.
struct ErrorEstimate {
  std::vector<double> times;
  std::vector<double> residual;  ///< || u_i - e^{t Delta} u_0 - int e^{(t-s) Delta} pi_M P ||_1
  std::vector<double> tail;      ///< int kappa(t-s) ||(1 - pi_M) P(s)||_{-omega} ds
  std::vector<double> total;     ///< residual + tail
  std::vector<double> tail_samples;  ///< ||(1 - pi_M) P||_{-omega} on the quadrature grid
};

/// Residual of the trajectory in the mild formulation, evaluated with the
/// product P(u, u) resolved up to twice the trajectory cutoff.
ErrorEstimate error_estimator(const Trajectory& traj, double omega, const QuadConfig& quad = {});

struct ControlOptions {
  double K = 0.0;
  double B = 1.0;
  double omega = 0.7;
  double safety = 1.25;  ///< > 1
};

struct ControlResult {
  bool pass = false;
  EstimatorSeries series;  ///< R filled on success, partial on failure
  /// Failure location and size of the violated inequality (or blow-up of the march).
  std::optional<double> t_star;
  double defect = 0.0;
  std::string reason;
  /// Verification pass at doubled resolution: R - (E + K int kappa (2 D R + R^2)) - allowance.
  std::vector<double> verify_times;
  std::vector<double> verify_margins;
  std::vector<double> allowances;
  double min_margin = 0.0;
};

/// E + K int_0^t kappa(t-s) (2 D(s) R(s) + R(s)^2) ds <= R(t), kappa(tau) = mu_omega(tau) e^{-B tau}.
/// Marches the equality by product integration, scales by safety, then
/// re-checks the inequality on the grid with every interval halved.
ControlResult solve_control_inequality(const EstimatorSeries& input, const ControlOptions& opts);

struct ReferenceReport {
  std::vector<double> times;
  std::vector<double> errors;   ///< ||u_ref - u_ap||_1
  std::vector<double> margins;  ///< R - error
  std::vector<std::size_t> violations;
  double min_margin = 0.0;
  bool pass = true;
};

/// Compares at every sample of u_ap; u_ref must contain each of those times
/// (matched to 1e-9 relative) and may have a different cutoff.
ReferenceReport verify_against_reference(const Trajectory& u_ap, const Trajectory& u_ref,
                                         const std::vector<double>& R);

}  // namespace h1ns
