#pragma once

#include "h1ns/aposteriori.hpp"
#include "h1ns/kernel_bounds.hpp"
#include "h1ns/ns_solver.hpp"
#include "h1ns/semigroup.hpp"
#include "h1ns/spectral.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace h1ns::io {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// Throws InvalidArgument naming the offending path on parse or schema errors.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& doc);

Json field_to_json(const FourierField& v);
/// Enforces the field invariants; violations raise InvariantViolation.
FourierField field_from_json(const Json& doc);

Json config_to_json(const SolveConfig& cfg);
/// Keys are optional and default to SolveConfig's values; `path` prefixes error messages.
SolveConfig config_from_json(const Json& doc, const std::string& path = "config");

/// Modes are listed once (the lexicographically positive half); conjugates are implied.
Json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const Json& doc);

Json to_json(const KernelBracket& b);
Json to_json(const SupCertificate& c);
Json to_json(const NBound& n);
Json to_json(const GlobalCertificate& c);
Json to_json(const EnvelopeReport& r);
Json to_json(const ErrorEstimate& e);
Json to_json(const ControlResult& r);
Json to_json(const ReferenceReport& r);

/// Reproducibility header embedded in every report.
Json header(const std::string& command, const Json& parameters);

/// K, N and the threshold as used downstream, bundled into one document.
struct ConstantsCertificate {
  SpaceParams params;
  int a = 1;
  double lambda = 150.0;
  Interval K;
  SupCertificate sup;
  NBound N;
  double threshold_lower = 0.0;  ///< 1 / (4 N_upper K_upper)
};

inline constexpr double kPriorThreshold = 0.00724;  ///< earlier published threshold, for display only

ConstantsCertificate certify_constants(SpaceParams params, int a, double lambda, const NOptions& n_options = {});
Json to_json(const ConstantsCertificate& c);
/// Reads back the K and N values (and parameters) of a constants document.
ConstantsCertificate constants_from_json(const Json& doc);

}  // namespace h1ns::io
