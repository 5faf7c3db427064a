#include "h1ns/io.hpp"

#include "h1ns/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace h1ns::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidArgument(path + ": " + what);
}

const Json& need(const Json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  const auto it = doc.find(key);
  if (it == doc.end()) fail(path + "." + key, "missing");
  return *it;
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

void check_format(const Json& doc, const std::string& format) {
  const auto& f = need(doc, "format", "document");
  if (!f.is_string() || f.get<std::string>() != format) fail("document.format", "expected \"" + format + "\"");
  const auto v = as_int(need(doc, "version", "document"), "document.version");
  if (v != kFormatVersion) fail("document.version", "unsupported version " + std::to_string(v));
}

Json point_json(const LatticePoint& k) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < k.size(); ++r) a.push_back(k[r]);
  return a;
}

LatticePoint point_from(const Json& j, int d, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) fail(path, "expected " + std::to_string(d) + " integers");
  LatticePoint k(d);
  for (int r = 0; r < d; ++r) k[r] = static_cast<int>(as_int(j[static_cast<std::size_t>(r)], path));
  return k;
}

SpaceParams params_from(const Json& doc, const std::string& path) {
  SpaceParams p;
  p.d = static_cast<int>(as_int(need(doc, "d", path), path + ".d"));
  p.omega = as_double(need(doc, "omega", path), path + ".omega");
  if (p.d < 1 || p.d > kMaxDim) fail(path + ".d", "dimension out of range");
  return p;
}

Json pair(double a, double b) { return Json::array({a, b}); }

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

Json header(const std::string& command, const Json& parameters) {
  return {{"tool", "h1ns"}, {"version", kToolVersion}, {"command", command}, {"parameters", parameters}};
}

// ---------------------------------------------------------------------------

Json field_to_json(const FourierField& v) {
  Json modes = Json::array();
  const auto& ms = v.modes();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto col = v.coeffs().col(static_cast<Eigen::Index>(i));
    if (col.isZero(0.0)) continue;
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      re.push_back(col[r].real());
      im.push_back(col[r].imag());
    }
    modes.push_back({{"k", point_json(ms.point(i))}, {"re", re}, {"im", im}});
  }
  return {{"format", "h1ns.field"},
          {"version", kFormatVersion},
          {"d", v.dim()},
          {"omega", v.params().omega},
          {"M", v.cutoff()},
          {"components", v.components()},
          {"solenoidal", v.solenoidal()},
          {"modes", modes}};
}

FourierField field_from_json(const Json& doc) {
  check_format(doc, "h1ns.field");
  const SpaceParams p = params_from(doc, "field");
  const auto M = as_int(need(doc, "M", "field"), "field.M");
  if (M < 1 || M > 64) fail("field.M", "cutoff must lie in [1, 64]");
  int comps = p.d;
  if (doc.contains("components")) comps = static_cast<int>(as_int(doc["components"], "field.components"));
  if (comps != 1 && comps != p.d) fail("field.components", "must be 1 or d");
  FourierField v(p, static_cast<int>(M), comps);
  const auto& modes = need(doc, "modes", "field");
  if (!modes.is_array()) fail("field.modes", "expected an array");
  std::set<std::size_t> seen;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const std::string path = "field.modes[" + std::to_string(n) + "]";
    const auto& m = modes[n];
    const LatticePoint k = point_from(need(m, "k", path), p.d, path + ".k");
    const auto idx = v.modes().find(k);
    if (idx < 0) fail(path + ".k", "zero or outside the ball |k| <= M");
    if (!seen.insert(static_cast<std::size_t>(idx)).second) fail(path + ".k", "duplicate mode");
    const auto& re = need(m, "re", path);
    const auto& im = need(m, "im", path);
    if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != comps || static_cast<int>(im.size()) != comps) {
      fail(path, "re and im must hold " + std::to_string(comps) + " numbers");
    }
    for (int r = 0; r < comps; ++r) {
      v.coeffs()(r, idx) = Complex(as_double(re[static_cast<std::size_t>(r)], path + ".re"),
                                   as_double(im[static_cast<std::size_t>(r)], path + ".im"));
    }
  }
  if (doc.contains("solenoidal")) v.mark_solenoidal(as_bool(doc["solenoidal"], "field.solenoidal"));
  v.validate(1e-10);
  return v;
}

// ---------------------------------------------------------------------------

Json config_to_json(const SolveConfig& c) {
  return {{"d", c.params.d},         {"omega", c.params.omega},
          {"M", c.M},                {"T", c.T},
          {"dt", c.dt},              {"picard_tol", c.picard_tol},
          {"picard_max_iters", c.picard_max_iters}, {"record_every", c.record_every},
          {"nonlinear", c.nonlinear}};
}

SolveConfig config_from_json(const Json& doc, const std::string& path) {
  if (!doc.is_object()) fail(path, "expected an object");
  static const std::set<std::string> known{"d",  "omega",      "M",                "T",         "dt",
                                           "picard_tol", "picard_max_iters", "record_every", "nonlinear",
                                           "datum", "output"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) fail(path + "." + key, "unknown key");
  }
  SolveConfig c;
  if (doc.contains("d")) c.params.d = static_cast<int>(as_int(doc["d"], path + ".d"));
  if (doc.contains("omega")) c.params.omega = as_double(doc["omega"], path + ".omega");
  if (doc.contains("M")) c.M = static_cast<int>(as_int(doc["M"], path + ".M"));
  if (doc.contains("T")) c.T = as_double(doc["T"], path + ".T");
  if (doc.contains("dt")) c.dt = as_double(doc["dt"], path + ".dt");
  if (doc.contains("picard_tol")) c.picard_tol = as_double(doc["picard_tol"], path + ".picard_tol");
  if (doc.contains("picard_max_iters")) c.picard_max_iters = static_cast<int>(as_int(doc["picard_max_iters"], path + ".picard_max_iters"));
  if (doc.contains("record_every")) c.record_every = static_cast<int>(as_int(doc["record_every"], path + ".record_every"));
  if (doc.contains("nonlinear")) c.nonlinear = as_bool(doc["nonlinear"], path + ".nonlinear");
  if (c.M > 64) fail(path + ".M", "cutoff above 64 is not supported");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    fail(path, e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------

Json trajectory_to_json(const Trajectory& traj) {
  if (traj.states.empty()) throw InvalidArgument("trajectory_to_json: empty trajectory");
  const auto& ms = traj.states.front().modes();
  std::vector<std::size_t> half;
  Json modes = Json::array();
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (lex_positive(ms.point(i))) {
      half.push_back(i);
      modes.push_back(point_json(ms.point(i)));
    }
  }
  Json states = Json::array();
  for (const auto& s : traj.states) {
    Json re = Json::array();
    Json im = Json::array();
    for (int r = 0; r < s.components(); ++r) {
      Json cr = Json::array();
      Json ci = Json::array();
      for (std::size_t i : half) {
        const Complex z = s.coeffs()(r, static_cast<Eigen::Index>(i));
        cr.push_back(z.real());
        ci.push_back(z.imag());
      }
      re.push_back(std::move(cr));
      im.push_back(std::move(ci));
    }
    states.push_back({{"re", std::move(re)}, {"im", std::move(im)}});
  }
  return {{"format", "h1ns.trajectory"},
          {"version", kFormatVersion},
          {"config", config_to_json(traj.config)},
          {"d", traj.states.front().dim()},
          {"omega", traj.states.front().params().omega},
          {"M", traj.states.front().cutoff()},
          {"modes", modes},
          {"times", traj.times},
          {"h1_norms", traj.h1_norms},
          {"picard_iterations", traj.picard_iterations},
          {"contraction", traj.contraction},
          {"states", states}};
}

Trajectory trajectory_from_json(const Json& doc) {
  check_format(doc, "h1ns.trajectory");
  Trajectory traj;
  traj.config = config_from_json(need(doc, "config", "trajectory"), "trajectory.config");
  const SpaceParams p = params_from(doc, "trajectory");
  const auto M = as_int(need(doc, "M", "trajectory"), "trajectory.M");
  if (M < 1 || M > 64) fail("trajectory.M", "cutoff must lie in [1, 64]");
  const auto ms = ModeSet::ball(p.d, static_cast<int>(M));
  const auto& modes = need(doc, "modes", "trajectory");
  if (!modes.is_array()) fail("trajectory.modes", "expected an array");
  std::vector<std::size_t> idx;
  std::set<std::size_t> seen;
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const std::string path = "trajectory.modes[" + std::to_string(n) + "]";
    const LatticePoint k = point_from(modes[n], p.d, path);
    if (!lex_positive(k)) fail(path, "listed modes must be lexicographically positive");
    const auto i = ms->find(k);
    if (i < 0) fail(path, "outside the ball |k| <= M");
    if (!seen.insert(static_cast<std::size_t>(i)).second) fail(path, "duplicate mode");
    idx.push_back(static_cast<std::size_t>(i));
  }

  auto number_list = [](const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
  };
  traj.times = number_list(need(doc, "times", "trajectory"), "trajectory.times");
  traj.h1_norms = number_list(need(doc, "h1_norms", "trajectory"), "trajectory.h1_norms");
  if (doc.contains("picard_iterations")) {
    for (const auto& x : doc["picard_iterations"]) traj.picard_iterations.push_back(static_cast<int>(as_int(x, "trajectory.picard_iterations")));
  }
  if (doc.contains("contraction")) traj.contraction = number_list(doc["contraction"], "trajectory.contraction");

  const auto& states = need(doc, "states", "trajectory");
  if (!states.is_array()) fail("trajectory.states", "expected an array");
  for (std::size_t s = 0; s < states.size(); ++s) {
    const std::string path = "trajectory.states[" + std::to_string(s) + "]";
    FourierField f = FourierField::vector(p, static_cast<int>(M));
    const auto& re = need(states[s], "re", path);
    const auto& im = need(states[s], "im", path);
    if (!re.is_array() || !im.is_array() || static_cast<int>(re.size()) != p.d || static_cast<int>(im.size()) != p.d) {
      fail(path, "re and im must hold one list per component");
    }
    for (int r = 0; r < p.d; ++r) {
      const auto& cr = re[static_cast<std::size_t>(r)];
      const auto& ci = im[static_cast<std::size_t>(r)];
      if (!cr.is_array() || !ci.is_array() || cr.size() != idx.size() || ci.size() != idx.size()) {
        fail(path, "component lists must match the mode list");
      }
      for (std::size_t n = 0; n < idx.size(); ++n) {
        const Complex z(as_double(cr[n], path + ".re"), as_double(ci[n], path + ".im"));
        f.coeffs()(r, static_cast<Eigen::Index>(idx[n])) = z;
        f.coeffs()(r, static_cast<Eigen::Index>(ms->conjugate(idx[n]))) = std::conj(z);
      }
    }
    f.mark_solenoidal(true);
    traj.states.push_back(std::move(f));
  }
  try {
    traj.validate(1e-10);
  } catch (const InvalidArgument& e) {
    fail("trajectory", e.what());
  }
  return traj;
}

// ---------------------------------------------------------------------------

Json to_json(const KernelBracket& b) {
  return {{"k", point_json(b.k)},
          {"lambda", b.lambda},
          {"truncated_sum", b.truncated_sum},
          {"analytic_tail", b.analytic_tail},
          {"rounding_slack", b.rounding_slack},
          {"tail_bound", b.tail_bound},
          {"lower", b.lower},
          {"upper", b.upper},
          {"terms", b.terms}};
}

Json to_json(const SupCertificate& c) {
  Json points = Json::array();
  for (const auto& b : c.per_point) points.push_back(to_json(b));
  return {{"d", c.params.d},
          {"omega", c.params.omega},
          {"a", c.a},
          {"lambda", c.lambda},
          {"per_point", points},
          {"boundary_point", to_json(c.boundary_point)},
          {"boundary_term", c.boundary_term},
          {"boundary_term_lower", c.boundary_term_lower},
          {"sup_lower", c.sup_lower},
          {"sup_upper", c.sup_upper}};
}

Json to_json(const NBound& n) {
  return {{"omega", n.omega},
          {"n_upper", n.n_upper},
          {"argmax_window", pair(n.argmax_lo, n.argmax_hi)},
          {"argmax", n.argmax},
          {"grid_resolution", n.grid_resolution},
          {"grid_max", n.grid_max},
          {"allowance", n.allowance},
          {"tail_bound", n.tail_bound},
          {"t_star", n.t_star},
          {"slack", n.slack}};
}

Json to_json(const GlobalCertificate& c) {
  Json j{{"K", c.K},
         {"N", c.N},
         {"h1_norm", c.h1_norm},
         {"threshold", c.threshold},
         {"ratio", c.ratio},
         {"covered", c.covered}};
  if (c.covered) {
    j["chi"] = chi(c.ratio);
  } else {
    j["note"] = "datum above the small-data threshold: not covered by the global existence criterion";
  }
  return j;
}

Json to_json(const EnvelopeReport& r) {
  Json j{{"min_margin", r.min_margin}, {"tolerance", r.tolerance}, {"pass", r.pass}, {"margins", r.margins}};
  j["first_violation"] = r.first_violation ? Json(*r.first_violation) : Json(nullptr);
  return j;
}

Json to_json(const ErrorEstimate& e) {
  return {{"times", e.times}, {"residual", e.residual}, {"tail", e.tail}, {"total", e.total}};
}

Json to_json(const ControlResult& r) {
  Json j{{"pass", r.pass},
         {"times", r.series.times},
         {"D", r.series.D},
         {"E", r.series.E},
         {"R", r.series.R},
         {"min_margin", r.min_margin},
         {"verify_times", r.verify_times},
         {"verify_margins", r.verify_margins},
         {"allowances", r.allowances}};
  if (r.t_star) {
    j["t_star"] = *r.t_star;
    j["defect"] = r.defect;
    j["reason"] = r.reason;
  }
  return j;
}

Json to_json(const ReferenceReport& r) {
  return {{"pass", r.pass},
          {"times", r.times},
          {"errors", r.errors},
          {"margins", r.margins},
          {"violations", r.violations},
          {"min_margin", r.min_margin}};
}

// ---------------------------------------------------------------------------

ConstantsCertificate certify_constants(SpaceParams params, int a, double lambda, const NOptions& n_options) {
  params.require_solver_range();
  ConstantsCertificate c;
  c.params = params;
  c.a = a;
  c.lambda = lambda;
  c.sup = sup_certificate(params, a, lambda);
  c.K = k_constant(c.sup);
  c.N = compute_N(params.omega, n_options);
  c.threshold_lower = std::nextafter(1.0 / (4 * c.N.n_upper * c.K.upper), 0.0);
  return c;
}

Json to_json(const ConstantsCertificate& c) {
  return {{"format", "h1ns.constants"},
          {"version", kFormatVersion},
          {"omega", c.params.omega},
          {"d", c.params.d},
          {"a", c.a},
          {"lambda", c.lambda},
          {"K_bracket", pair(c.K.lower, c.K.upper)},
          {"sup_bracket", pair(c.sup.sup_lower, c.sup.sup_upper)},
          {"boundary_term", c.sup.boundary_term},
          {"N_upper", c.N.n_upper},
          {"N_argmax_window", pair(c.N.argmax_lo, c.N.argmax_hi)},
          {"threshold_lower", c.threshold_lower},
          {"prior_threshold_reference", kPriorThreshold},
          {"sup_certificate", to_json(c.sup)},
          {"N_bound", to_json(c.N)}};
}

ConstantsCertificate constants_from_json(const Json& doc) {
  check_format(doc, "h1ns.constants");
  ConstantsCertificate c;
  c.params = params_from(doc, "constants");
  c.a = static_cast<int>(as_int(need(doc, "a", "constants"), "constants.a"));
  c.lambda = as_double(need(doc, "lambda", "constants"), "constants.lambda");
  const auto& kb = need(doc, "K_bracket", "constants");
  if (!kb.is_array() || kb.size() != 2) fail("constants.K_bracket", "expected [lower, upper]");
  c.K.lower = as_double(kb[0], "constants.K_bracket[0]");
  c.K.upper = as_double(kb[1], "constants.K_bracket[1]");
  c.N.omega = c.params.omega;
  c.N.n_upper = as_double(need(doc, "N_upper", "constants"), "constants.N_upper");
  c.threshold_lower = as_double(need(doc, "threshold_lower", "constants"), "constants.threshold_lower");
  if (!(c.K.lower > 0.0 && c.K.upper >= c.K.lower) || !(c.N.n_upper > 0.0)) {
    fail("constants", "K bracket and N_upper must be positive");
  }
  return c;
}

}  // namespace h1ns::io
