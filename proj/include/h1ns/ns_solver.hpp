#pragma once

#include "h1ns/spectral.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace h1ns {

/// (1 - sqrt(1 - z)) / (z/2) on [0, 1], equal to 1 at z = 0.
double chi(double z);

/// Small-datum test 4 K N ||u0||_1 <= 1 and the resulting decay envelope.
struct GlobalCertificate {
  double K = 0.0;
  double N = 0.0;
  double h1_norm = 0.0;
  double threshold = 0.0;  ///< 1 / (4 K N)
  double ratio = 0.0;      ///< 4 K N ||u0||_1
  bool covered = false;

  /// chi(4 K N ||u0||_1) e^{-t} ||u0||_1. Only meaningful when covered.
  double envelope(double t) const;
};

GlobalCertificate global_certificate(const FourierField& u0, double K, double N);

struct SolveConfig {
  SpaceParams params;
  int M = 8;
  double T = 5.0;
  double dt = 0.01;
  double picard_tol = 1e-12;  ///< absolute, in the H^1 norm
  int picard_max_iters = 50;
  int record_every = 1;
  bool nonlinear = true;      ///< false gives pure heat flow (test hook)

  void validate() const;
  /// Number of steps; T must be an integer multiple of dt.
  std::size_t steps() const;
};

struct Trajectory {
  SolveConfig config;
  std::vector<double> times;
  std::vector<FourierField> states;
  std::vector<double> h1_norms;
  /// Per step: Picard iterations used and the last contraction ratio observed.
  std::vector<int> picard_iterations;
  std::vector<double> contraction;

  std::size_t size() const { return times.size(); }
  /// Equal lengths, increasing times from 0, valid states with cached norms.
  void validate(double tol = 1e-10) const;
};

/// Exponential trapezoid on the Duhamel form,
/// u_{n+1} = E u_n + (dt/2) (E P(u_n) + P(u_{n+1})), E = e^{dt Delta},
/// with the implicit term closed by Picard iteration from an extrapolated guess.
/// Throws ConvergenceError when an iteration budget is exhausted.
Trajectory picard_solve(const FourierField& u0, const SolveConfig& cfg);

/// Galerkin nonlinearity of the solver: P(u, u) projected to |k| <= u.cutoff().
FourierField galerkin_P(const FourierField& u);

struct EnvelopeReport {
  std::vector<double> envelope;
  std::vector<double> margins;  ///< envelope - ||u(t)||_1
  double min_margin = 0.0;
  std::optional<std::size_t> first_violation;  ///< first sample with margin < -tolerance
  double tolerance = 0.0;
  bool pass = true;
};

/// Throws InvalidArgument unless global_certificate(u0, K, N) is covered.
EnvelopeReport envelope_check(const Trajectory& traj, const FourierField& u0, double K, double N,
                              double tolerance = 0.0);

/// Discrete energy law between consecutive samples:
/// | (|u_{i+1}|_0^2 - |u_i|_0^2) / dt_i + |u_i|_1^2 + |u_{i+1}|_1^2 |.
std::vector<double> energy_law_defects(const Trajectory& traj);

}  // namespace h1ns
