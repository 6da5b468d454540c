#include "ucpext/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <variant>

#include "ucpext/extension.hpp"
#include "ucpext/json_io.hpp"

namespace ucpext::cli {

namespace {

using io::to_json;

// Thrown for schema violations; reported with exit code 2.
struct SchemaError : InputError {
  using InputError::InputError;
};

const std::set<std::string> kCommands = {
    "check-cp",         "check-ccp",       "validate",     "evolve",
    "resolvent",        "identities",      "extend-map",   "extend-generator",
    "extend-resolvent-family", "extend-group", "extend-discrete", "rigidity-probe",
    "demo-rebit"};

const std::set<std::string> kOptionKeys = {
    "tol",   "max_iter",    "seed",  "omega",   "grid",    "times",        "lambdas",
    "starts", "omega_param", "delta", "horizon", "start",   "g2_prefactor", "perturbation"};

struct Options {
  double tol = tol::kFeasibility;
  std::size_t max_iter = 200000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double omega = 4.0;
  std::vector<double> grid;  // default filled from omega
  std::vector<double> times{0.5, 1.0, 2.0};
  std::vector<double> lambdas{0.5, 1.0, 2.0, 4.0};
  std::size_t starts = 8;
  bool starts_given = false;
  double omega_param = 1.0;
  double delta = 1.0;
  std::size_t horizon = 3;
  std::string start;  // "", "deterministic", "random"
  double perturbation = 1.0;
  catalog::G2Prefactor g2 = catalog::G2Prefactor::derived;

  ExtensionOptions extension() const {
    ExtensionOptions e;
    e.tol = tol;
    e.max_iter = max_iter;
    e.seed = seed;
    e.perturbation = perturbation;
    const bool random = start == "random" || (start.empty() && seed_given);
    e.start = random ? StartMode::random : StartMode::deterministic;
    return e;
  }

  json to_json() const {
    return json{{"tol", tol},
                {"max_iter", max_iter},
                {"seed", seed},
                {"omega", omega},
                {"grid", grid},
                {"times", times},
                {"lambdas", lambdas},
                {"starts", starts},
                {"omega_param", omega_param},
                {"delta", delta},
                {"horizon", horizon},
                {"start", extension().start == StartMode::random ? "random" : "deterministic"},
                {"perturbation", perturbation},
                {"g2_prefactor", g2 == catalog::G2Prefactor::derived ? "derived" : "paper"}};
  }
};

double positive_number(const json& j, const char* key) {
  if (!j.is_number()) throw SchemaError(std::string("options.") + key + " must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw SchemaError(std::string("options.") + key + " must be positive");
  return v;
}

std::vector<double> number_list(const json& j, const char* key, bool allow_zero) {
  if (!j.is_array() || j.empty()) throw SchemaError(std::string("options.") + key + " must be a non-empty array");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw SchemaError(std::string("options.") + key + " entries must be numbers");
    const double v = e.get<double>();
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0))
      throw SchemaError(std::string("options.") + key + " entries must be " + (allow_zero ? "nonnegative" : "positive"));
    out.push_back(v);
  }
  return out;
}

std::size_t positive_count(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() <= 0)
    throw SchemaError(std::string("options.") + key + " must be a positive integer");
  return j.get<std::size_t>();
}

Options parse_options(const json& scenario, const RunFlags& flags) {
  Options o;
  if (scenario.contains("options")) {
    const json& j = scenario["options"];
    if (!j.is_object()) throw SchemaError("options must be an object");
    for (const auto& [k, v] : j.items())
      if (!kOptionKeys.contains(k)) throw SchemaError("unknown option \"" + k + "\"");
    if (j.contains("tol")) o.tol = positive_number(j["tol"], "tol");
    if (j.contains("max_iter")) o.max_iter = positive_count(j["max_iter"], "max_iter");
    if (j.contains("seed")) {
      if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
        throw SchemaError("options.seed must be a nonnegative integer");
      o.seed = j["seed"].get<std::uint64_t>();
      o.seed_given = true;
    }
    if (j.contains("omega")) o.omega = positive_number(j["omega"], "omega");
    if (j.contains("grid")) o.grid = number_list(j["grid"], "grid", false);
    if (j.contains("times")) o.times = number_list(j["times"], "times", true);
    if (j.contains("lambdas")) o.lambdas = number_list(j["lambdas"], "lambdas", false);
    if (j.contains("starts")) {
      o.starts = positive_count(j["starts"], "starts");
      o.starts_given = true;
    }
    if (j.contains("omega_param")) {
      if (!j["omega_param"].is_number()) throw SchemaError("options.omega_param must be a number");
      o.omega_param = j["omega_param"].get<double>();
    }
    if (j.contains("delta")) o.delta = positive_number(j["delta"], "delta");
    if (j.contains("horizon")) o.horizon = positive_count(j["horizon"], "horizon");
    if (j.contains("perturbation")) o.perturbation = positive_number(j["perturbation"], "perturbation");
    if (j.contains("start")) {
      if (!j["start"].is_string() || (j["start"] != "random" && j["start"] != "deterministic"))
        throw SchemaError("options.start must be \"random\" or \"deterministic\"");
      o.start = j["start"].get<std::string>();
    }
    if (j.contains("g2_prefactor")) {
      if (j["g2_prefactor"] == "paper") o.g2 = catalog::G2Prefactor::printed;
      else if (j["g2_prefactor"] != "derived") throw SchemaError("options.g2_prefactor must be \"derived\" or \"paper\"");
    }
  }
  if (flags.tol) o.tol = *flags.tol;
  if (flags.max_iter) o.max_iter = *flags.max_iter;
  if (flags.seed) o.seed = *flags.seed, o.seed_given = true;
  if (flags.omega) o.omega = *flags.omega;
  if (flags.starts) o.starts = *flags.starts, o.starts_given = true;
  if (flags.g2_prefactor == catalog::G2Prefactor::printed) o.g2 = flags.g2_prefactor;
  if (o.grid.empty())
    for (int k = 1; k <= 8; ++k) o.grid.push_back(o.omega * k / 8.0);
  return o;
}

MatricialSystem system_by_name(const std::string& name) {
  if (name == "rebit") return catalog::rebit_system();
  if (name == "qubit") return catalog::qubit_system();
  if (name == "diagonal") return catalog::diagonal_system();
  if (name == "scalar") return catalog::scalar_system();
  std::smatch m;
  static const std::regex full(R"(M([1-9][0-9]?))");
  static const std::regex sym(R"(real_symmetric_([1-9][0-9]?))");
  if (std::regex_match(name, m, full)) return catalog::full_system(std::stoul(m[1]));
  if (std::regex_match(name, m, sym)) return catalog::real_symmetric_system(std::stoul(m[1]));
  throw SchemaError("unknown system \"" + name + "\"");
}

std::optional<MatricialSystem> parse_system(const json& scenario) {
  if (!scenario.contains("system")) return std::nullopt;
  const json& j = scenario["system"];
  if (j.is_string()) return system_by_name(j.get<std::string>());
  if (j.is_object() && j.contains("basis") && j["basis"].is_array()) {
    std::vector<CMatrix> basis;
    for (const auto& b : j["basis"]) basis.push_back(io::matrix_from_json(b));
    return MatricialSystem(std::move(basis));
  }
  throw SchemaError("system must be a catalog name or {\"basis\": [matrix, ...]}");
}

using Dynamics = std::variant<Generator, SubsystemGenerator>;

bool same_system(const MatricialSystem& a, const MatricialSystem& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return false;
  return std::all_of(a.basis().begin(), a.basis().end(), [&](const CMatrix& v) { return contains(b, v); });
}

std::optional<Dynamics> parse_dynamics(const json& scenario, const Options& o,
                                       const std::optional<MatricialSystem>& system) {
  if (!scenario.contains("dynamics")) return std::nullopt;
  const json& j = scenario["dynamics"];
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "rebit_rotation" || name == "rebit_dissipative") {
      if (system && !same_system(*system, catalog::rebit_system()))
        throw InputError("dynamics \"" + name + "\" lives on the rebit system");
      return name == "rebit_rotation" ? catalog::rebit_rotation(o.omega_param)
                                      : catalog::rebit_dissipative(o.delta);
    }
    if (name == "g1") return catalog::g1(o.delta);
    if (name == "g2") return catalog::g2(o.delta, o.g2);
    if (name == "rotation_extension") return catalog::rotation_extension(o.omega_param);
    if (name == "zero") return Generator(SuperOp::zero(system ? system->ambient_dim() : 2));
    throw SchemaError("unknown dynamics \"" + name + "\"");
  }
  if (j.is_object() && j.contains("kind") && j["kind"] == "subsystem") {
    if (!system) throw SchemaError("subsystem dynamics require a system");
    if (!j.contains("images") || !j["images"].is_array()) throw SchemaError("subsystem dynamics require \"images\"");
    std::vector<CMatrix> images;
    for (const auto& m : j["images"]) images.push_back(io::matrix_from_json(m));
    return SubsystemGenerator(*system, std::move(images), o.tol);
  }
  if (j.is_object()) return io::generator_from_json(j);
  throw SchemaError("dynamics must be a catalog name or an object");
}

const Generator& need_generator(const std::optional<Dynamics>& dyn) {
  if (!dyn) throw SchemaError("this command requires \"dynamics\"");
  if (const auto* g = std::get_if<Generator>(&*dyn)) return *g;
  throw InputError("this command requires a generator on the full matrix algebra");
}

SubsystemGenerator need_subsystem(const std::optional<Dynamics>& dyn,
                                  const std::optional<MatricialSystem>& system, double tol) {
  if (!dyn) throw SchemaError("this command requires \"dynamics\"");
  if (const auto* a = std::get_if<SubsystemGenerator>(&*dyn)) return *a;
  const Generator& g = std::get<Generator>(*dyn);
  return SubsystemGenerator::restrict(g, system ? *system : catalog::full_system(g.d()), tol);
}

MatricialSystem need_system(const std::optional<MatricialSystem>& system) {
  if (!system) throw SchemaError("this command requires \"system\"");
  return *system;
}

std::optional<SuperOp> parse_full_map(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    static const std::regex named(R"((identity|transpose)_([1-9][0-9]?))");
    std::smatch m;
    if (name == "identity") return SuperOp::identity(2);
    if (name == "transpose") return SuperOp::transpose_map(2);
    if (std::regex_match(name, m, named)) {
      const std::size_t d = std::stoul(m[2]);
      return m[1] == "identity" ? SuperOp::identity(d) : SuperOp::transpose_map(d);
    }
    throw SchemaError("unknown map \"" + name + "\"");
  }
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("map must be a name or an object with \"kind\"");
  if (j["kind"] == "choi") return io::superop_from_json(j.at("super"));
  if (j["kind"] == "kraus") {
    if (!j.contains("ops") || !j["ops"].is_array()) throw SchemaError("kraus map requires \"ops\"");
    std::vector<CMatrix> ops;
    for (const auto& m : j["ops"]) ops.push_back(io::matrix_from_json(m));
    std::vector<double> w(ops.size(), 1.0);
    if (j.contains("weights")) w = j["weights"].get<std::vector<double>>();
    if (ops.empty()) throw SchemaError("kraus map requires at least one operator");
    for (double x : w)
      if (!(x > 0.0)) throw InputError("kraus weights must be positive");
    return from_kraus(ops.front().rows(), ops, w);
  }
  if (j["kind"] == "images") return std::nullopt;
  throw SchemaError("unknown map kind");
}

// The map on V used by extend-map and extend-discrete.
std::vector<CMatrix> map_on_system(const json& scenario, const MatricialSystem& sys,
                                   const std::optional<Dynamics>& dyn, const Options& o) {
  if (scenario.contains("map")) {
    const json& j = scenario["map"];
    if (auto full = parse_full_map(j)) return restrict_to(*full, sys);
    if (!j.contains("images") || !j["images"].is_array()) throw SchemaError("images map requires \"images\"");
    std::vector<CMatrix> images;
    for (const auto& m : j["images"]) images.push_back(io::matrix_from_json(m));
    if (images.size() != sys.dim()) throw InputError("map: one image per basis element is required");
    return images;
  }
  const double t = o.times.front();
  if (!dyn) throw SchemaError("this command requires \"map\" or \"dynamics\"");
  if (const auto* a = std::get_if<SubsystemGenerator>(&*dyn)) return subsystem_evolve(*a, t);
  return restrict_to(evolve(std::get<Generator>(*dyn), t), sys);
}

json report_json(const ExtensionReport& r) {
  return json{{"iterations", r.iterations},
              {"cone_residual", r.cone_residual},
              {"affine_residual", r.affine_residual},
              {"restriction_error", r.restriction_error},
              {"converged", r.converged}};
}

json certificates_json(const Generator& g) {
  const auto& c = g.certificates();
  return json{{"hermiticity_preserving", c.hermiticity_preserving},
              {"unital_kernel", c.unital_kernel},
              {"ccp", c.ccp},
              {"group", c.group}};
}

// Action of a map on a labelled basis of M_d (Pauli labels for d = 2).
json action_json(const SuperOp& s) {
  json out = json::object();
  if (s.d() == 2) {
    const auto& p = catalog::pauli();
    const std::pair<const char*, const CMatrix*> labelled[] = {{"I", &p.I}, {"X", &p.X}, {"Y", &p.Y}, {"Z", &p.Z}};
    for (const auto& [name, m] : labelled) out[name] = to_json(apply(s, *m));
    return out;
  }
  const auto sys = catalog::full_system(s.d());
  json list = json::array();
  for (const auto& b : sys.basis()) list.push_back({{"input", to_json(b)}, {"output", to_json(apply(s, b))}});
  out["basis"] = list;
  return out;
}

struct Outcome {
  json results = json::object();
  bool ok = true;
  std::vector<std::string> failed_checks;

  void check(const std::string& name, bool passed) {
    if (!passed) {
      ok = false;
      failed_checks.push_back(name);
    }
  }
};

Outcome cmd_check_cp(const json& scenario, const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  SuperOp phi;
  if (scenario.contains("map")) {
    auto m = parse_full_map(scenario["map"]);
    if (!m) throw SchemaError("check-cp requires a map on the full algebra");
    phi = *m;
  } else {
    phi = evolve(need_generator(dyn), o.times.front());
    out.results["time"] = o.times.front();
  }
  const CPReport r = is_completely_positive(phi, o.tol);
  out.results["map"] = to_json(phi);
  out.results["is_cp"] = r.is_cp;
  out.results["min_choi_eigenvalue"] = r.min_choi_eigenvalue;
  out.results["is_unital"] = is_unital(phi, o.tol);
  out.results["is_ucp"] = is_ucp(phi, o.tol);
  out.results["hermiticity_preserving"] = is_hermiticity_preserving(phi, o.tol);
  if (r.witness) {
    out.results["witness"] = {{"level", phi.d()},
                              {"matrix", to_json(*r.witness)},
                              {"image_min_eigenvalue", *r.witness_image_min_eigenvalue}};
  }
  return out;
}

Outcome cmd_check_ccp(const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  const Generator& g = need_generator(dyn);
  out.results["generator"] = to_json(g.op());
  out.results["certificates"] = certificates_json(g);
  out.results["compressed_min_eigenvalue"] =
      min_eigenvalue(HermMatrix(hermitian_part(ccp_compression(g.op())), 1.0));
  // Small-time exponential oracle: the Choi matrix of exp(tG) may dip below
  // zero only at second order in t |G| when G is ccp.
  const double gnorm = g.op().choi().frobenius_norm();
  const double t = 1e-3 / std::max(1.0, gnorm);
  const double min_eig = is_completely_positive(evolve(g, t), o.tol).min_choi_eigenvalue;
  const bool oracle = min_eig >= -10.0 * t * t * gnorm * gnorm;
  out.results["small_time_oracle"] = {{"t", t}, {"min_choi_eigenvalue", min_eig}, {"ccp", oracle}};
  out.results["oracle_agrees"] = oracle == g.certificates().ccp;
  out.check("oracle_agreement", oracle == g.certificates().ccp);
  return out;
}

Outcome cmd_validate(const std::optional<Dynamics>& dyn, const std::optional<MatricialSystem>& sys,
                     const Options& o) {
  Outcome out;
  const SubsystemGenerator a = need_subsystem(dyn, sys, o.tol);
  ValidationOptions vo;
  vo.lambdas = o.lambdas;
  vo.times = o.times;
  vo.tol = o.tol;
  vo.max_iter = o.max_iter;
  const ValidationReport v = validate_subsystem_semigroup(a, vo);
  json samples = json::array();
  for (const auto& s : v.samples)
    samples.push_back({{"kind", s.kind},
                       {"parameter", s.parameter},
                       {"contractive", s.contractive},
                       {"feasible", s.feasible},
                       {"residual", s.residual},
                       {"iterations", s.iterations},
                       {"note", s.note}});
  out.results["valid"] = v.valid;
  out.results["unital_kernel"] = v.unital_kernel;
  out.results["unital_residual"] = v.unital_residual;
  out.results["samples"] = samples;
  if (!v.valid) out.results["reason"] = "not a UCP subsystem semigroup: " + v.reason;
  out.check("ucp_subsystem_semigroup", v.valid);
  return out;
}

Outcome cmd_evolve(const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  if (!dyn) throw SchemaError("evolve requires \"dynamics\"");
  json series = json::array();
  if (const auto* a = std::get_if<SubsystemGenerator>(&*dyn)) {
    for (double t : o.times) {
      json images = json::array();
      for (const auto& m : subsystem_evolve(*a, t)) images.push_back(to_json(m));
      series.push_back({{"t", t}, {"images", images}});
    }
    out.results["series"] = series;
    return out;
  }
  const Generator& g = std::get<Generator>(*dyn);
  out.results["certificates"] = certificates_json(g);
  for (double t : o.times) {
    const SuperOp phi = evolve(g, t);
    const bool ucp = is_ucp(phi, o.tol);
    series.push_back({{"t", t}, {"map", to_json(phi)}, {"is_ucp", ucp}});
    if (g.certified()) out.check("ucp_at_t", ucp);
  }
  out.results["series"] = series;
  return out;
}

Outcome cmd_resolvent(const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  const Generator& g = need_generator(dyn);
  json list = json::array();
  for (double l : o.lambdas) {
    const SuperOp r = scaled_resolvent(g, l);
    const bool ucp = is_ucp(r, o.tol);
    list.push_back({{"lambda", l}, {"scaled_resolvent", to_json(r)}, {"is_ucp", ucp}});
    if (g.certified()) out.check("scaled_resolvent_ucp", ucp);
  }
  out.results["certificates"] = certificates_json(g);
  out.results["resolvents"] = list;
  return out;
}

Outcome cmd_identities(const std::optional<Dynamics>& dyn, const json& scenario, const Options& o) {
  Outcome out;
  const Generator& g = need_generator(dyn);
  std::vector<double> grid{0.5, 1.375, 2.25, 3.125, 4.0};
  if (scenario.contains("options") && scenario["options"].contains("lambdas")) grid = o.lambdas;
  double worst = 0.0;
  json pairs = json::array();
  for (double l : grid)
    for (double m : grid) {
      if (l == m) continue;
      const double r = hilbert_identity_residual(g, l, m);
      worst = std::max(worst, r);
      pairs.push_back({{"lambda", l}, {"mu", m}, {"residual", r}});
    }
  out.results["hilbert_identity"] = {{"grid", grid}, {"max_residual", worst}, {"tolerance", 1e-9}, {"pairs", pairs}};
  out.check("hilbert_identity", worst <= 1e-9);

  json laplace = json::array();
  if (g.certified()) {
    for (double l : {0.5, 1.0, 2.0}) {
      const LaplaceResult q = laplace_resolvent(g, l, default_laplace_horizon(l), 400);
      const double err = distance(q.value, resolvent(g, l));
      laplace.push_back({{"lambda", l},
                         {"horizon", q.horizon},
                         {"panels", 400},
                         {"truncation_bound", q.truncation_bound},
                         {"distance_to_resolvent", err}});
      out.check("laplace_resolvent", err <= 1e-6);
    }
  }
  out.results["laplace"] = laplace;
  const SpectralBoundReport sb = spectral_bound_report(g);
  out.results["spectral_bound"] = {{"value", sb.value},
                                   {"hermitian_part_bound", sb.hermitian_part_bound},
                                   {"gershgorin_bound", sb.gershgorin_bound},
                                   {"kernel_verified", sb.kernel_verified}};
  out.results["certificates"] = certificates_json(g);
  if (g.certified()) out.check("spectral_bound_zero", std::abs(sb.value) <= 1e-8);
  return out;
}

Outcome cmd_extend_map(const json& scenario, const std::optional<MatricialSystem>& sysopt,
                       const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  const MatricialSystem sys = need_system(sysopt);
  const auto images = map_on_system(scenario, sys, dyn, o);
  const MapExtension e = extend_ucp_map(ExtensionProblem(sys, MapTarget{images}, o.extension()));
  out.results["extension"] = to_json(e.map);
  out.results["report"] = report_json(e.report);
  out.results["is_ucp"] = is_ucp(e.map, o.tol);
  out.results["action"] = action_json(e.map);
  out.check("converged", e.report.converged);
  out.check("restriction", e.report.restriction_error <= o.tol);
  return out;
}

Outcome cmd_extend_generator(const std::optional<MatricialSystem>& sys, const std::optional<Dynamics>& dyn,
                             const Options& o) {
  Outcome out;
  const SubsystemGenerator a = need_subsystem(dyn, sys, o.tol);
  const ExtensionProblem problem(a, o.extension());
  const GeneratorExtension e = extend_generator(problem);
  const bool ccp = is_conditionally_completely_positive(e.generator, o.tol);
  out.results["generator"] = to_json(e.generator);
  out.results["report"] = report_json(e.report);
  out.results["ccp"] = ccp;
  out.results["action"] = action_json(e.generator);
  out.check("converged", e.report.converged);
  out.check("restriction", e.report.restriction_error <= o.tol);
  out.check("ccp", ccp);
  if (o.starts_given && o.starts > 1) {
    json runs = json::array();
    std::vector<SuperOp> gens;
    for (std::size_t s = 0; s < o.starts; ++s) {
      ExtensionOptions eo = o.extension();
      eo.start = StartMode::random;
      eo.seed = o.seed + s;
      const GeneratorExtension r = extend_generator(ExtensionProblem(a, eo));
      runs.push_back({{"seed", eo.seed}, {"generator", to_json(r.generator)}, {"report", report_json(r.report)}});
      out.check("multi_start_converged", r.report.converged);
      gens.push_back(r.generator);
    }
    double spread = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j) spread = std::max(spread, distance(gens[i], gens[j]));
    out.results["multi_start"] = {{"runs", runs}, {"max_pairwise_distance", spread}};
  }
  return out;
}

Outcome cmd_extend_family(const std::optional<MatricialSystem>& sys, const std::optional<Dynamics>& dyn,
                          const Options& o) {
  Outcome out;
  const SubsystemGenerator a = need_subsystem(dyn, sys, o.tol);
  const ExtensionProblem problem(a, o.extension());
  const ResolventFamilyExtension r = extend_via_resolvent_family(problem, o.omega, o.grid);
  out.results["success"] = r.success;
  out.results["attempts"] = r.attempts;
  out.results["report"] = report_json(r.report);
  if (!r.failure.empty()) out.results["failure"] = r.failure;
  if (r.family.f_omega.d() > 0) {
    json fam = {{"omega", r.family.omega},
                {"grid", r.family.grid},
                {"f_omega", to_json(r.family.f_omega)},
                {"max_ucp_defect", r.family.max_ucp_defect},
                {"max_hilbert_residual", r.family.max_hilbert_residual},
                {"max_restriction_error", r.family.max_restriction_error},
                {"generator_spread", r.family.generator_spread}};
    out.results["family"] = fam;
    out.results["generator"] = to_json(r.generator);
    out.results["action"] = action_json(r.generator);
    const GeneratorExtension route_a = extend_generator(problem);
    out.results["route_a_distance"] = distance(route_a.generator, r.generator);
  }
  out.check("resolvent_family", r.success);
  if (r.success) out.check("generator_spread", r.family.generator_spread <= 1e-7);
  return out;
}

Outcome cmd_extend_group(const json& scenario, const std::optional<MatricialSystem>& sys,
                         const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  const SubsystemGenerator a = need_subsystem(dyn, sys, o.tol);
  GroupOptions go;
  go.starts = o.starts;
  go.times = o.times;
  const GroupExtension g = extend_group(ExtensionProblem(a, o.extension()), go);
  out.results["success"] = g.success;
  if (!g.failure.empty()) out.results["failure"] = g.failure;
  if (g.generator.d() > 0) {
    out.results["generator"] = to_json(g.generator);
    out.results["inverse_generator"] = to_json(g.inverse_generator);
    out.results["action"] = action_json(g.generator);
    out.results["report"] = report_json(g.report);
    out.results["inverse_defect"] = g.inverse_defect;
    out.results["uniqueness_spread"] = g.uniqueness_spread;
    out.results["multiplicativity_defect"] = g.multiplicativity_defect;
    out.results["starts"] = g.starts;
    if (scenario.contains("dynamics") && scenario["dynamics"] == "rebit_rotation") {
      const double dist = distance(g.generator, catalog::rotation_extension(o.omega_param).op());
      out.results["reference_distance"] = dist;
      out.check("matches_rotation_extension", dist <= 1e-6);
    }
  }
  out.check("group_extension", g.success);
  return out;
}

Outcome cmd_extend_discrete(const json& scenario, const std::optional<MatricialSystem>& sysopt,
                            const std::optional<Dynamics>& dyn, const Options& o) {
  Outcome out;
  const MatricialSystem sys = need_system(sysopt);
  const auto images = map_on_system(scenario, sys, dyn, o);
  const DiscreteExtension e = extend_discrete(sys, MapTarget{images}, o.horizon, o.extension());
  json powers = json::array();
  for (std::size_t k = 0; k < e.powers.size(); ++k) {
    powers.push_back({{"k", k}, {"map", to_json(e.powers[k])}, {"restriction_error", e.restriction_errors[k]}});
    out.check("power_restriction", e.restriction_errors[k] <= std::max<double>(1.0, static_cast<double>(k)) * o.tol);
  }
  out.results["powers"] = powers;
  out.results["report"] = report_json(e.report);
  return out;
}

Outcome cmd_rigidity(const std::optional<MatricialSystem>& sysopt, const Options& o) {
  Outcome out;
  const MatricialSystem sys = need_system(sysopt);
  const RigidityReport r = rigidity_probe(sys, o.starts, o.seed, o.tol);
  out.results["starts"] = r.starts;
  out.results["converged"] = r.converged;
  out.results["max_pairwise_distance"] = r.max_pairwise_distance;
  out.results["max_distance_to_identity"] = r.max_distance_to_identity;
  out.results["all_identity"] = r.all_identity;
  out.results["heuristic"] = true;
  if (sys.dim() == 1) {
    // Explicit non-rigidity witnesses: psi(B) = tr(rho B) I for two states.
    const std::size_t d = sys.ambient_dim();
    CMatrix r0(d, d), r1(d, d);
    r0(0, 0) = 1.0;
    r1(d - 1, d - 1) = 1.0;
    const SuperOp w0 = catalog::state_map(r0);
    const SuperOp w1 = catalog::state_map(r1);
    out.results["witness_pair"] = {{"first", to_json(w0)},
                                   {"second", to_json(w1)},
                                   {"both_ucp", is_ucp(w0, o.tol) && is_ucp(w1, o.tol)},
                                   {"distance", distance(w0, w1)}};
  }
  out.check("all_converged", r.converged == r.starts);
  return out;
}

Report finish(const std::string& command, Outcome out, const Options& o) {
  Report rep;
  rep.status = out.ok ? Status::ok : Status::failed;
  rep.doc = json{{"command", command},
                 {"status", to_string(rep.status)},
                 {"results", std::move(out.results)},
                 {"failed_checks", out.failed_checks},
                 {"provenance", {{"tool", kToolName}, {"version", kToolVersion}, {"seed", o.seed}, {"options", o.to_json()}}}};
  return rep;
}

Report error_report(const std::string& command, Status status, const std::string& type, const std::string& message) {
  Report rep;
  rep.status = status;
  rep.doc = json{{"command", command},
                 {"status", to_string(status)},
                 {"error", {{"type", type}, {"message", message}}},
                 {"provenance", {{"tool", kToolName}, {"version", kToolVersion}}}};
  return rep;
}

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

bool residual_like(const std::string& key) {
  for (const char* w : {"residual", "error", "defect", "spread", "distance", "bound", "eigenvalue"})
    if (key.find(w) != std::string::npos) return true;
  return false;
}

bool is_matrix(const json& j) {
  return j.is_array() && !j.empty() && j[0].is_array() && !j[0].empty() && j[0][0].is_array();
}

void render(std::ostringstream& os, const json& j, const std::string& key, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (j.is_object()) {
    if (j.contains("choi") && j.contains("d")) {
      os << pad << key << ": <superoperator d=" << j["d"] << ">\n";
      return;
    }
    if (!key.empty()) os << pad << key << ":\n";
    for (const auto& [k, v] : j.items()) render(os, v, k, key.empty() ? depth : depth + 1);
  } else if (is_matrix(j)) {
    os << pad << key << ": <" << j.size() << "x" << j[0].size() << " matrix>\n";
  } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
    os << pad << key << ": [" << j.size() << " entries]\n";
    for (std::size_t i = 0; i < j.size(); ++i) render(os, j[i], "- " + std::to_string(i), depth + 1);
  } else if (j.is_number_float() && residual_like(key)) {
    os << pad << key << ": " << fmt_sci(j.get<double>()) << "\n";
  } else {
    os << pad << key << ": " << j.dump() << "\n";
  }
}

Options options_or_default(const json& scenario, const RunFlags& flags) {
  try {
    return parse_options(scenario, flags);
  } catch (...) {
    return Options{};
  }
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::failed: return "failed";
    case Status::invalid_input: return "invalid-input";
  }
  return "invalid-input";
}

Report run_scenario(const json& scenario, const RunFlags& flags) {
  std::string command = "<unknown>";
  try {
    if (!scenario.is_object()) throw SchemaError("scenario must be a JSON object");
    for (const auto& [k, v] : scenario.items())
      if (k != "system" && k != "dynamics" && k != "command" && k != "options" && k != "map")
        throw SchemaError("unknown scenario field \"" + k + "\"");
    if (!scenario.contains("command") || !scenario["command"].is_string())
      throw SchemaError("scenario requires a string \"command\"");
    command = scenario["command"].get<std::string>();
    if (!kCommands.contains(command)) throw SchemaError("unknown command \"" + command + "\"");
    const Options o = parse_options(scenario, flags);
    if (command == "demo-rebit") {
      RunFlags f = flags;
      f.g2_prefactor = o.g2;
      f.tol = o.tol;
      f.max_iter = o.max_iter;
      if (o.seed_given) f.seed = o.seed;
      f.starts = o.starts;
      return demo_rebit(f, o.delta, o.omega_param);
    }
    const auto sys = parse_system(scenario);
    const auto dyn = parse_dynamics(scenario, o, sys);

    Outcome out;
    if (command == "check-cp") out = cmd_check_cp(scenario, dyn, o);
    else if (command == "check-ccp") out = cmd_check_ccp(dyn, o);
    else if (command == "validate") out = cmd_validate(dyn, sys, o);
    else if (command == "evolve") out = cmd_evolve(dyn, o);
    else if (command == "resolvent") out = cmd_resolvent(dyn, o);
    else if (command == "identities") out = cmd_identities(dyn, scenario, o);
    else if (command == "extend-map") out = cmd_extend_map(scenario, sys, dyn, o);
    else if (command == "extend-generator") out = cmd_extend_generator(sys, dyn, o);
    else if (command == "extend-resolvent-family") out = cmd_extend_family(sys, dyn, o);
    else if (command == "extend-group") out = cmd_extend_group(scenario, sys, dyn, o);
    else if (command == "extend-discrete") out = cmd_extend_discrete(scenario, sys, dyn, o);
    else if (command == "rigidity-probe") out = cmd_rigidity(sys, o);
    return finish(command, std::move(out), o);
  } catch (const SchemaError& e) {
    return error_report(command, Status::invalid_input, "schema", e.what());
  } catch (const InputError& e) {
    return error_report(command, Status::invalid_input, "input", e.what());
  } catch (const nlohmann::json::exception& e) {
    return error_report(command, Status::invalid_input, "schema", e.what());
  } catch (const NumericalError& e) {
    Report r = error_report(command, Status::failed, "numerical", e.what());
    if (e.condition() > 0.0 && std::isfinite(e.condition())) r.doc["error"]["condition"] = e.condition();
    (void)options_or_default;
    return r;
  }
}

Report run_file(const std::filesystem::path& path, const RunFlags& flags) {
  std::ifstream in(path);
  if (!in) return error_report("<unknown>", Status::invalid_input, "io", "cannot open " + path.string());
  json scenario;
  try {
    in >> scenario;
  } catch (const nlohmann::json::parse_error& e) {
    return error_report("<unknown>", Status::invalid_input, "parse", e.what());
  }
  return run_scenario(scenario, flags);
}

Report demo_rebit(const RunFlags& flags, double delta, double omega) {
  Options o;
  if (flags.tol) o.tol = *flags.tol;
  if (flags.max_iter) o.max_iter = *flags.max_iter;
  if (flags.seed) o.seed = *flags.seed, o.seed_given = true;
  if (flags.starts) o.starts = *flags.starts;
  o.g2 = flags.g2_prefactor;
  o.delta = delta;
  o.omega_param = omega;
  for (int k = 1; k <= 8; ++k) o.grid.push_back(o.omega * k / 8.0);

  Outcome out;
  json checks = json::array();
  auto record = [&](const std::string& name, bool passed, json detail) {
    checks.push_back({{"name", name}, {"passed", passed}, {"detail", std::move(detail)}});
    out.check(name, passed);
  };
  const auto& p = catalog::pauli();

  try {
    // Four cases of operator systems in M_2.
    json cases = json::array();
    bool dims_ok = true;
    std::size_t expected_dim = 1;
    for (const auto& c : catalog::four_case_catalog()) {
      cases.push_back({{"name", c.name},
                       {"dim", c.system.dim()},
                       {"envelope", {{"name", c.envelope.name}, {"dim", c.envelope.dim}, {"commutative", c.envelope.commutative}}}});
      dims_ok = dims_ok && c.system.dim() == expected_dim++;
    }
    record("four_case_catalog", dims_ok, cases);

    // Rebit cone: aI + bX + cZ >= 0 iff a >= 0 and b^2 + c^2 <= a^2.
    const auto rebit = catalog::rebit_system();
    std::size_t mismatches = 0;
    std::size_t points = 0;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        for (int c = -2; c <= 2; ++c) {
          const CMatrix v = cplx(a) * p.I + cplx(b) * p.X + cplx(c) * p.Z;
          const bool positive = is_positive_element(rebit, LevelElement(rebit, 1, v), o.tol);
          const bool predicted = a >= 0 && b * b + c * c <= a * a;
          mismatches += positive != predicted;
          ++points;
        }
    record("rebit_cone", mismatches == 0, {{"grid_points", points}, {"mismatches", mismatches}});

    // Rotation group: unique extension i (omega / 2) [Y, .].
    GroupOptions go;
    go.starts = o.starts;
    const GroupExtension grp = extend_group(ExtensionProblem(catalog::rebit_rotation(omega), o.extension()), go);
    const Generator reference = catalog::rotation_extension(omega);
    const double rot_dist = grp.generator.d() > 0 ? distance(grp.generator, reference.op()) : INFINITY;
    record("rotation_extension_unique", grp.success && rot_dist <= 1e-6,
           {{"reference_distance", rot_dist},
            {"uniqueness_spread", grp.uniqueness_spread},
            {"starts", grp.starts},
            {"failure", grp.failure}});
    double rot_formula = 0.0;
    for (double wt : {0.0, M_PI / 4, M_PI / 2, M_PI}) {
      const double t = omega != 0.0 ? wt / omega : 0.0;
      const SuperOp psi = evolve(reference, t);
      // b, c = 1, 0.5 on X, Z.
      const CMatrix v = p.X + 0.5 * p.Z;
      const CMatrix expected = (std::cos(wt) - 0.5 * std::sin(wt)) * p.X + (std::sin(wt) + 0.5 * std::cos(wt)) * p.Z;
      rot_formula = std::max(rot_formula, frobenius_distance(apply(psi, v), expected));
    }
    record("rotation_formula", rot_formula <= 1e-8, {{"max_error", rot_formula}});

    // Dissipative semigroup: G1 and G2 both extend A but differ on Y.
    const Generator gen1 = catalog::g1(delta);
    const Generator gen2 = catalog::g2(delta, o.g2);
    const auto dissipative = catalog::rebit_dissipative(delta);
    const double g1_restr = restriction_error(gen1.op(), rebit, dissipative.images());
    const double g2_restr = restriction_error(gen2.op(), rebit, dissipative.images());
    const CMatrix g2x = apply(gen2.op(), p.X);
    record("g1_extends_dissipative", g1_restr <= 1e-12 && gen1.certified(), {{"restriction_error", g1_restr}});
    record("g2_extends_dissipative", g2_restr <= 1e-12 && gen2.certified(),
           {{"restriction_error", g2_restr},
            {"prefactor", catalog::g2_prefactor(o.g2)},
            {"x_coefficient", g2x(0, 1).real() / delta},
            {"expected_x_coefficient", -1.0}});
    const double g1y = frobenius_distance(apply(gen1.op(), p.Y), -2.0 * delta * p.Y);
    const double g2y = frobenius_distance(apply(gen2.op(), p.Y), -delta * p.Y);
    record("g1_on_y", g1y <= 1e-12, {{"error", g1y}});
    record("g2_on_y", g2y <= 1e-12, {{"error", g2y}});
    double decay = 0.0;
    for (double t : {0.5, 1.0, 2.0}) {
      decay = std::max(decay, frobenius_distance(apply(evolve(gen1, t), p.Y), std::exp(-2 * delta * t) * p.Y));
      decay = std::max(decay, frobenius_distance(apply(evolve(gen2, t), p.Y), std::exp(-delta * t) * p.Y));
      decay = std::max(decay, frobenius_distance(apply(evolve(gen1, t), p.X), std::exp(-delta * t) * p.X));
    }
    record("dissipative_evolution", decay <= 1e-8, {{"max_error", decay}});

    // Non-uniqueness from randomized starts.
    std::vector<CMatrix> y_actions;
    bool all_valid = true;
    for (std::size_t s = 0; s < std::max<std::size_t>(o.starts, 2); ++s) {
      ExtensionOptions eo = o.extension();
      eo.start = StartMode::random;
      eo.seed = o.seed + s;
      const GeneratorExtension e = extend_generator(ExtensionProblem(dissipative, eo));
      all_valid = all_valid && e.report.converged && e.report.restriction_error <= o.tol &&
                  is_conditionally_completely_positive(e.generator, o.tol);
      y_actions.push_back(apply(e.generator, p.Y));
    }
    double spread = 0.0;
    for (std::size_t i = 0; i < y_actions.size(); ++i)
      for (std::size_t j = i + 1; j < y_actions.size(); ++j)
        spread = std::max(spread, frobenius_distance(y_actions[i], y_actions[j]));
    record("dissipative_non_unique", all_valid && spread >= 1e-3,
           {{"max_y_action_distance", spread}, {"all_extensions_valid", all_valid}});
    const double g12 = distance(evolve(gen1, 1.0), evolve(gen2, 1.0));
    record("g1_g2_differ", g12 > 0.1, {{"distance_at_t1", g12}});
  } catch (const std::exception& e) {
    record("demo_exception", false, {{"message", e.what()}});
  }

  out.results["delta"] = delta;
  out.results["omega"] = omega;
  out.results["checks"] = checks;
  return finish("demo-rebit", std::move(out), o);
}

std::string render_text(const json& report) {
  std::ostringstream os;
  render(os, report, "", 0);
  return os.str();
}

}  // namespace ucpext::cli
