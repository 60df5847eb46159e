#include "polysde/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "polysde/errors.hpp"
#include "polysde/mlp.hpp"

namespace polysde {

namespace {

using nlohmann::json;

Vec parse_vec(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a nonempty array");
  Vec v;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(what + " must contain numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    if (known.find(key) == known.end()) {
      throw ConfigError("unknown config field '" + key + "' in " + where);
    }
  }
}

PolyhedronConfig parse_polyhedron(const json& j) {
  PolyhedronConfig cfg;
  reject_unknown_keys(j, {"box", "halfspaces"}, "polyhedron");
  if (j.contains("box")) {
    reject_unknown_keys(j["box"], {"lo", "hi"}, "polyhedron.box");
    cfg.is_box = true;
    cfg.lo = parse_vec(j["box"].at("lo"), "polyhedron.box.lo");
    cfg.hi = parse_vec(j["box"].at("hi"), "polyhedron.box.hi");
  } else if (j.contains("halfspaces")) {
    cfg.is_box = false;
    cfg.halfspaces.clear();
    for (const auto& hs : j["halfspaces"]) {
      reject_unknown_keys(hs, {"u", "v"}, "polyhedron.halfspaces[]");
      cfg.halfspaces.emplace_back(parse_vec(hs.at("u"), "halfspace u"),
                                  parse_vec(hs.at("v"), "halfspace v"));
    }
    if (cfg.halfspaces.empty()) throw ConfigError("halfspaces list is empty");
  } else {
    throw ConfigError("polyhedron needs either 'box' or 'halfspaces'");
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown_keys(j, {"name", "mode", "polyhedron", "parameterization", "parameterizations",
                          "calculus", "base", "wsp", "solver", "z0", "seeds",
                          "samples_per_seed", "target", "stationary", "out", "resolution",
                          "samples_per_facet"},
                      "top level");

  ExperimentConfig cfg;
  if (j.contains("name")) cfg.name = j["name"].get<std::string>();
  if (j.contains("mode")) cfg.mode = j["mode"].get<std::string>();
  if (j.contains("polyhedron")) cfg.poly = parse_polyhedron(j["polyhedron"]);
  if (j.contains("parameterization")) {
    cfg.parameterizations = {j["parameterization"].get<std::string>()};
  }
  if (j.contains("parameterizations")) {
    cfg.parameterizations.clear();
    for (const auto& p : j["parameterizations"]) {
      cfg.parameterizations.push_back(p.get<std::string>());
    }
  }
  if (j.contains("calculus")) cfg.calculus = j["calculus"].get<std::string>();
  if (j.contains("base")) {
    reject_unknown_keys(j["base"], {"sizes", "activation"}, "base");
    if (j["base"].contains("sizes")) {
      cfg.net_sizes.clear();
      for (const auto& s : j["base"]["sizes"]) cfg.net_sizes.push_back(s.get<int>());
    }
    if (j["base"].contains("activation")) {
      cfg.activation = j["base"]["activation"].get<std::string>();
    }
  }
  if (j.contains("wsp")) {
    reject_unknown_keys(j["wsp"], {"alpha", "beta", "gamma", "eps"}, "wsp");
    const auto& w = j["wsp"];
    if (w.contains("alpha")) cfg.alpha = w["alpha"].get<double>();
    if (w.contains("beta")) cfg.beta = w["beta"].get<double>();
    if (w.contains("gamma")) cfg.gamma = w["gamma"].get<double>();
    if (w.contains("eps")) cfg.eps = w["eps"].get<double>();
  }
  if (j.contains("solver")) {
    reject_unknown_keys(j["solver"], {"solver", "dt", "T", "R", "rtol", "atol"}, "solver");
    const auto& s = j["solver"];
    if (s.contains("solver")) cfg.solver.name = s["solver"].get<std::string>();
    if (s.contains("dt")) cfg.solver.dt = s["dt"].get<double>();
    if (s.contains("T")) cfg.solver.horizon = s["T"].get<double>();
    if (s.contains("R")) cfg.solver.kl_terms = s["R"].get<int>();
    if (s.contains("rtol")) cfg.solver.rtol = s["rtol"].get<double>();
    if (s.contains("atol")) cfg.solver.atol = s["atol"].get<double>();
  }
  if (j.contains("z0")) cfg.z0 = parse_vec(j["z0"], "z0");
  if (j.contains("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
  }
  if (j.contains("samples_per_seed")) cfg.samples_per_seed = j["samples_per_seed"].get<int>();
  if (j.contains("target")) {
    reject_unknown_keys(j["target"], {"name", "mu", "sigma"}, "target");
    const auto& t = j["target"];
    if (t.contains("name")) cfg.target.name = t["name"].get<std::string>();
    if (t.contains("mu")) cfg.target.mu = t["mu"].get<double>();
    if (t.contains("sigma")) cfg.target.sigma = t["sigma"].get<double>();
  }
  if (j.contains("stationary")) {
    reject_unknown_keys(j["stationary"], {"burn_in", "subsample"}, "stationary");
    const auto& s = j["stationary"];
    if (s.contains("burn_in")) cfg.burn_in = s["burn_in"].get<double>();
    if (s.contains("subsample")) cfg.subsample = s["subsample"].get<double>();
  }
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("resolution")) cfg.resolution = j["resolution"].get<int>();
  if (j.contains("samples_per_facet")) cfg.samples_per_facet = j["samples_per_facet"].get<int>();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::vector<std::string> list_builtins() {
  return {"fig1_weights", "fig2_top", "fig2_stationary", "fig3_kl", "conditions_suite"};
}

bool is_builtin(const std::string& name) {
  for (const std::string& b : list_builtins()) {
    if (b == name) return true;
  }
  return false;
}

ExperimentConfig builtin_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.out_dir = "out/" + name;
  if (name == "fig1_weights") {
    cfg.mode = "weight_field";
    cfg.resolution = 60;
    return cfg;
  }
  if (name == "fig2_top") {
    cfg.parameterizations = {"unconstrained", "absorbed", "wsp"};
    cfg.solver.name = "milstein";
    cfg.solver.dt = 1e-3;
    cfg.solver.horizon = 5.0;
    return cfg;
  }
  if (name == "fig2_stationary") {
    cfg.parameterizations = {"wsp_stationary"};
    cfg.solver.name = "milstein";
    cfg.solver.dt = 1e-3;
    cfg.solver.horizon = 2000.0;
    cfg.samples_per_seed = 1;
    cfg.burn_in = 100.0;
    cfg.subsample = 0.5;
    // The slow-hopping bimodal target needs ~10 pooled chains to pin its
    // mode weights; with the five-seed grid the unimodal target is the
    // robust default. Select "bimodal" plus a longer seed list via config.
    cfg.target.name = "gauss";
    return cfg;
  }
  if (name == "fig3_kl") {
    cfg.parameterizations = {"unconstrained", "sigmoid_ito", "absorbed", "wsp"};
    cfg.calculus = "stratonovich";
    cfg.solver.name = "kl_ode";
    cfg.solver.dt = 1e-3;
    cfg.solver.horizon = 5.0;
    cfg.solver.kl_terms = 40;
    return cfg;
  }
  if (name == "conditions_suite") {
    cfg.mode = "conditions";
    cfg.parameterizations = {"wsp", "unconstrained"};
    cfg.samples_per_facet = 1000;
    return cfg;
  }
  throw ConfigError("unknown builtin '" + name + "'");
}

ExperimentConfig resolve_config(const std::string& arg) {
  if (is_builtin(arg)) return builtin_config(arg);
  return load_config_file(arg);
}

Polyhedron build_polyhedron(const PolyhedronConfig& cfg) {
  if (cfg.is_box) return Polyhedron::box(cfg.lo, cfg.hi);
  std::vector<HalfSpace> hs;
  hs.reserve(cfg.halfspaces.size());
  for (const auto& [u, v] : cfg.halfspaces) hs.emplace_back(u, v);
  return Polyhedron(std::move(hs));
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> issues;
  auto complain = [&issues](const std::string& msg) { issues.push_back(msg); };

  if (cfg.mode != "simulate" && cfg.mode != "weight_field" && cfg.mode != "conditions") {
    complain("mode must be simulate, weight_field or conditions (got '" + cfg.mode + "')");
  }

  int dim = -1;
  bool poly_ok = false;
  try {
    const Polyhedron poly = build_polyhedron(cfg.poly);
    dim = poly.dim();
    poly_ok = true;

    if (cfg.mode == "simulate") {
      if (static_cast<int>(cfg.z0.size()) != dim) {
        complain("z0 dimension does not match the polyhedron");
      } else {
        bool constrained = false;
        for (const std::string& p : cfg.parameterizations) {
          if (p != "unconstrained") constrained = true;
        }
        if (constrained && !poly.contains(cfg.z0, kBoundaryTol)) {
          complain("z0 outside polyhedron");
        }
      }
    }
  } catch (const std::exception& e) {
    complain(std::string("polyhedron: ") + e.what());
  }

  static const std::set<std::string> kParams = {"unconstrained", "sigmoid_ito", "absorbed",
                                                "wsp", "wsp_stationary"};
  if (cfg.parameterizations.empty()) complain("parameterizations list is empty");
  for (const std::string& p : cfg.parameterizations) {
    if (kParams.find(p) == kParams.end()) complain("unknown parameterization '" + p + "'");
    if ((p == "sigmoid_ito" || p == "absorbed") && poly_ok && dim != 1) {
      complain("parameterization '" + p + "' is one-dimensional");
    }
  }

  if (cfg.calculus != "ito" && cfg.calculus != "stratonovich") {
    complain("calculus must be ito or stratonovich");
  }

  if (cfg.net_sizes.size() < 2) {
    complain("base.sizes needs at least input and output");
  } else {
    for (int s : cfg.net_sizes) {
      if (s < 1) complain("base.sizes entries must be >= 1");
    }
    if (poly_ok && cfg.mode != "conditions" &&
        (cfg.net_sizes.front() != dim || cfg.net_sizes.back() != dim)) {
      complain("base.sizes must start and end with the state dimension");
    }
  }
  try {
    activation_from_string(cfg.activation);
  } catch (const ConfigError& e) {
    complain(e.what());
  }

  if (!(cfg.alpha > 0.0)) complain("wsp.alpha must be positive");
  if (!(cfg.beta > 0.0)) complain("wsp.beta must be positive");
  if (!(cfg.gamma > 0.0)) complain("wsp.gamma must be positive");
  if (!(cfg.eps > 0.0)) complain("wsp.eps must be positive");

  const SolverSettings& s = cfg.solver;
  if (s.name != "milstein" && s.name != "euler" && s.name != "kl_ode" &&
      s.name != "kl_ode_adaptive") {
    complain("unknown solver '" + s.name + "'");
  }
  if (!(s.dt > 0.0)) complain("dt must be positive");
  if (!(s.horizon > 0.0)) complain("T must be positive");
  if (s.dt > 0.0 && s.horizon > 0.0) {
    const double n = s.horizon / s.dt;
    if (std::fabs(n - std::round(n)) * s.dt > 1e-9) complain("dt must divide T");
  }
  if (s.kl_terms < 1) complain("R must be >= 1");
  if (!(s.rtol > 0.0) || !(s.atol > 0.0)) complain("rtol and atol must be positive");

  const bool wants_kl = s.name == "kl_ode" || s.name == "kl_ode_adaptive";
  if (wants_kl && cfg.calculus != "stratonovich") {
    complain("kl_ode solvers integrate Stratonovich dynamics; set calculus accordingly");
  }
  if (!wants_kl && cfg.calculus == "stratonovich" && cfg.mode == "simulate") {
    complain("euler/milstein integrate Ito dynamics; set calculus accordingly");
  }

  for (const std::string& p : cfg.parameterizations) {
    if (p == "wsp_stationary") {
      if (cfg.target.name != "gauss" && cfg.target.name != "bimodal") {
        complain("unknown target '" + cfg.target.name + "'");
      }
      if (!(cfg.target.sigma > 0.0)) complain("target.sigma must be positive");
      if (wants_kl) complain("stationary runs use the Ito solvers");
      if (poly_ok && dim != 1) complain("wsp_stationary experiments are one-dimensional");
    }
  }

  if (cfg.seeds.empty()) complain("seeds list is empty");
  if (cfg.samples_per_seed < 1) complain("samples_per_seed must be >= 1");
  if (cfg.burn_in < 0.0) complain("burn_in must be nonnegative");
  if (cfg.subsample < 0.0) complain("subsample must be nonnegative");
  if (cfg.burn_in >= cfg.solver.horizon && cfg.burn_in > 0.0) {
    complain("burn_in consumes the whole horizon");
  }
  if (cfg.mode == "weight_field" && poly_ok && dim > 2) {
    complain("weight_field rendering supports dimensions 1 and 2");
  }
  if (cfg.mode == "weight_field" && cfg.resolution < 2) complain("resolution must be >= 2");
  if (cfg.mode == "conditions" && cfg.samples_per_facet < 1) {
    complain("samples_per_facet must be >= 1");
  }
  return issues;
}

}  // namespace polysde
