#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nsfv/errors.hpp"
#include "nsfv/io.hpp"

namespace nsfv {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config key '" + path + "': " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& known) {
  if (!obj.is_object()) fail(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(join(prefix, key), "unknown key");
  }
}

void read(const json& obj, const std::string& prefix, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(prefix, key), "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) fail(join(prefix, key), "must be finite");
}

template <class Int>
void read_int(const json& obj, const std::string& prefix, const char* key, Int& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(join(prefix, key), "expected an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) {
      out = v.get<Int>();
    } else {
      const auto s = v.get<long long>();
      if (s < 0) fail(join(prefix, key), "must be nonnegative");
      out = static_cast<Int>(s);
    }
  } else {
    out = v.get<Int>();
  }
}

void read(const json& obj, const std::string& prefix, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(prefix, key), "expected true or false");
  out = v.get<bool>();
}

void read(const json& obj, const std::string& prefix, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(prefix, key), "expected a string");
  out = v.get<std::string>();
}

const char* bulk_name(BulkProfile b) {
  switch (b) {
    case BulkProfile::Bump: return "bump";
    case BulkProfile::Layered: return "layered";
    case BulkProfile::None:
    default: return "none";
  }
}

const char* linear_name(LinearSolverKind k) {
  switch (k) {
    case LinearSolverKind::Direct: return "direct";
    case LinearSolverKind::Krylov: return "krylov";
    case LinearSolverKind::Auto:
    default: return "auto";
  }
}

// Whole number of steps of size dt in a time span, or a ConfigError.
long long whole_steps(double span, double dt, const std::string& key) {
  const double r = span / dt;
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-9 * std::max(1.0, r) || n < 1.0) {
    std::ostringstream m;
    m.precision(17);
    m << span << " is not a positive whole number of steps dt = " << dt;
    fail(key, m.str());
  }
  return static_cast<long long>(n);
}

json solver_json(const SolverOptions& s) {
  json k;
  k["restart"] = s.krylov.restart;
  k["max_iterations"] = s.krylov.max_iterations;
  k["rtol"] = s.krylov.rtol;
  k["atol"] = s.krylov.atol;
  json o;
  o["newton_tol"] = s.newton_tol;
  o["max_newton"] = s.max_newton;
  o["linear"] = linear_name(s.linear);
  o["damping"] = s.damping;
  o["positivity_floor"] = s.positivity_floor;
  o["max_halvings"] = s.max_halvings;
  o["direct_max_cells"] = s.direct_max_cells;
  o["krylov"] = k;
  return o;
}

json config_json(const RunConfig& c) {
  const ExperimentConfig& e = c.experiment;
  json j;
  j["experiment"] = e.id;
  if (e.id == 1) j["variant"] = e.variant;
  j["theta_L"] = e.theta_L;
  j["theta_H"] = e.theta_H;
  j["g"] = e.g;
  j["c"] = e.c;
  j["seed"] = e.seed;
  j["bulk"] = bulk_name(e.bulk);
  j["boundary_perturbation"] = e.boundary_perturbation;
  j["n1"] = e.n1;
  j["n2"] = e.n2;
  j["mu"] = e.mu;
  j["lambda"] = e.lambda;
  j["kappa"] = e.kappa;
  j["gamma"] = e.gamma;
  j["alpha"] = e.alpha;
  j["solver"] = solver_json(c.solver);
  json r;
  r["t_end"] = c.plan.t_end;
  r["dt_over_h"] = c.plan.dt_over_h;
  if (c.plan.dt) r["dt"] = *c.plan.dt;
  r["series_every"] = c.plan.series_every;
  r["sample_cadence"] = c.plan.sample_cadence;
  r["vtk_cadence"] = c.plan.vtk_cadence;
  r["checkpoint_cadence"] = c.plan.checkpoint_cadence;
  r["M0"] = c.plan.M0;
  j["run"] = r;
  return j;
}

RunConfig from_json(const json& root) {
  reject_unknown(root, "",
                 {"experiment", "variant", "theta_L", "theta_H", "g", "c", "seed", "bulk", "boundary_perturbation",
                  "n1", "n2", "mu", "lambda", "kappa", "gamma", "alpha", "solver", "run"});
  int id = 2;
  read_int(root, "", "experiment", id);
  std::string variant;
  read(root, "", "variant", variant);
  if (!variant.empty() && id != 1) fail("variant", "only experiment 1 has variants");

  RunConfig c;
  c.experiment = preset(id, variant);
  ExperimentConfig& e = c.experiment;
  read(root, "", "theta_L", e.theta_L);
  read(root, "", "theta_H", e.theta_H);
  read(root, "", "g", e.g);
  read(root, "", "c", e.c);
  read_int(root, "", "seed", e.seed);
  if (root.contains("bulk")) {
    std::string b;
    read(root, "", "bulk", b);
    if (b == "none") {
      e.bulk = BulkProfile::None;
    } else if (b == "bump") {
      e.bulk = BulkProfile::Bump;
    } else if (b == "layered") {
      e.bulk = BulkProfile::Layered;
    } else {
      fail("bulk", "expected none, bump or layered");
    }
  }
  read(root, "", "boundary_perturbation", e.boundary_perturbation);
  read_int(root, "", "n1", e.n1);
  if (root.contains("n1") && !root.contains("n2")) e.n2 = e.n1 / 2;
  read_int(root, "", "n2", e.n2);
  read(root, "", "mu", e.mu);
  read(root, "", "lambda", e.lambda);
  read(root, "", "kappa", e.kappa);
  read(root, "", "gamma", e.gamma);
  read(root, "", "alpha", e.alpha);

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    reject_unknown(s, "solver",
                   {"newton_tol", "max_newton", "linear", "damping", "positivity_floor", "max_halvings",
                    "direct_max_cells", "krylov"});
    SolverOptions& o = c.solver;
    read(s, "solver", "newton_tol", o.newton_tol);
    read_int(s, "solver", "max_newton", o.max_newton);
    if (s.contains("linear")) {
      std::string k;
      read(s, "solver", "linear", k);
      if (k == "auto") {
        o.linear = LinearSolverKind::Auto;
      } else if (k == "direct") {
        o.linear = LinearSolverKind::Direct;
      } else if (k == "krylov") {
        o.linear = LinearSolverKind::Krylov;
      } else {
        fail("solver.linear", "expected auto, direct or krylov");
      }
    }
    read(s, "solver", "damping", o.damping);
    read(s, "solver", "positivity_floor", o.positivity_floor);
    read_int(s, "solver", "max_halvings", o.max_halvings);
    read_int(s, "solver", "direct_max_cells", o.direct_max_cells);
    if (s.contains("krylov")) {
      const json& k = s.at("krylov");
      reject_unknown(k, "solver.krylov", {"restart", "max_iterations", "rtol", "atol"});
      read_int(k, "solver.krylov", "restart", o.krylov.restart);
      read_int(k, "solver.krylov", "max_iterations", o.krylov.max_iterations);
      read(k, "solver.krylov", "rtol", o.krylov.rtol);
      read(k, "solver.krylov", "atol", o.krylov.atol);
    }
  }

  if (root.contains("run")) {
    const json& r = root.at("run");
    reject_unknown(r, "run",
                   {"t_end", "dt_over_h", "dt", "series_every", "sample_cadence", "vtk_cadence",
                    "checkpoint_cadence", "M0"});
    RunPlan& p = c.plan;
    read(r, "run", "t_end", p.t_end);
    read(r, "run", "dt_over_h", p.dt_over_h);
    if (r.contains("dt")) {
      double dt = 0.0;
      read(r, "run", "dt", dt);
      p.dt = dt;
    }
    read_int(r, "run", "series_every", p.series_every);
    read(r, "run", "sample_cadence", p.sample_cadence);
    read(r, "run", "vtk_cadence", p.vtk_cadence);
    read(r, "run", "checkpoint_cadence", p.checkpoint_cadence);
    read_int(r, "run", "M0", p.M0);
  }

  // Physical and structural validation.
  if (!(e.gamma > 1.0)) fail("gamma", "must exceed 1");
  if (!(e.kappa > 0.0)) fail("kappa", "must be positive");
  if (!(e.mu > 0.0)) fail("mu", "must be positive");
  if (!(e.alpha > -1.0 && e.alpha < 1.0)) fail("alpha", "must lie in (-1, 1)");
  if (!(e.theta_L > 0.0) || !(e.theta_H > 0.0)) fail("theta_L/theta_H", "wall temperatures must be positive");
  const Grid g = make_grid(e);
  const RunPlan& p = c.plan;
  if (!(p.t_end >= 0.0)) fail("run.t_end", "must be nonnegative");
  if (p.dt ? !(*p.dt > 0.0) : !(p.dt_over_h > 0.0)) fail("run.dt", "time step must be positive");
  if (p.series_every < 1) fail("run.series_every", "must be at least 1");
  if (p.M0 < 0) fail("run.M0", "must be nonnegative");
  const double dt = c.dt(g);
  whole_steps(p.sample_cadence, dt, "run.sample_cadence");
  if (p.vtk_cadence < 0.0) fail("run.vtk_cadence", "must be nonnegative");
  if (p.vtk_cadence > 0.0) whole_steps(p.vtk_cadence, dt, "run.vtk_cadence");
  whole_steps(p.checkpoint_cadence, p.sample_cadence, "run.checkpoint_cadence");
  make_params(e, g, dt).validate(g);
  c.solver.validate();
  build_initial_state(e, g);
  return c;
}

}  // namespace

long long RunConfig::steps_per_sample(const Grid& g) const {
  return whole_steps(plan.sample_cadence, dt(g), "run.sample_cadence");
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("format") && root["format"] == "nsfv-metadata") {
    if (!root.contains("config")) throw ConfigError("metadata document has no config section");
    return from_json(root["config"]);
  }
  return from_json(root);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json_text(const RunConfig& c) { return config_json(c).dump(2) + "\n"; }

std::string metadata_json_text(const RunConfig& c, const std::vector<std::string>& warnings) {
  const Grid g = make_grid(c.experiment);
  const PerturbationSpec spec = PerturbationSpec::from_seed(c.experiment.seed);
  json m;
  m["format"] = "nsfv-metadata";
  m["code_version"] = kCodeVersion;
  m["config"] = config_json(c);
  m["seed"] = c.experiment.seed;
  m["rng"] = "mt19937_64, a_j uniform [0,1] normalized, b_j uniform [-pi,pi]";
  m["perturbation"] = {{"a", spec.a}, {"b", spec.b}};
  m["alpha"] = c.experiment.alpha;
  m["dt"] = c.dt(g);
  m["h"] = g.h();
  m["grid"] = {{"n1", g.n1()}, {"n2", g.n2()}, {"L", g.L()}, {"H", g.H()}};
  m["S_theta"] = c.experiment.S_theta();
  m["theta_M"] = c.experiment.theta_M();
  m["rayleigh"] = rayleigh(c.experiment);
  m["solver"] = solver_json(c.solver);
  m["warnings"] = warnings;
  return m.dump(2) + "\n";
}

}  // namespace nsfv
