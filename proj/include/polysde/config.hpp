#ifndef POLYSDE_CONFIG_HPP
#define POLYSDE_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polysde/geometry.hpp"

namespace polysde {

struct PolyhedronConfig {
  bool is_box = true;
  Vec lo{0.0};
  Vec hi{1.0};
  std::vector<std::pair<Vec, Vec>> halfspaces;  // (u, v) pairs when !is_box
};

struct SolverSettings {
  std::string name = "milstein";  // milstein | euler | kl_ode | kl_ode_adaptive
  double dt = 1e-3;
  double horizon = 5.0;
  int kl_terms = 40;
  double rtol = 1e-6;
  double atol = 1e-9;
};

struct TargetSettings {
  std::string name = "gauss";  // gauss | bimodal
  double mu = 0.5;
  double sigma = 0.1;
};

// One experiment: a polyhedron, one or more parameterizations (panels), a
// solver protocol and the (seed, sample) grid. Modes: "simulate" runs the
// grid, "weight_field" renders w(z) and the center pull without simulating,
// "conditions" runs the boundary-condition suite.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string mode = "simulate";
  PolyhedronConfig poly;
  std::vector<std::string> parameterizations{"wsp"};
  std::string calculus = "ito";
  std::vector<int> net_sizes{1, 64, 64, 64, 1};
  std::string activation = "celu";
  double alpha = 10.0;
  double beta = 10.0;
  double gamma = 1.0;
  double eps = 0.01;
  SolverSettings solver;
  Vec z0{0.99};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int samples_per_seed = 3;
  TargetSettings target;
  double burn_in = 0.0;    // stationary runs: discard t < burn_in
  double subsample = 0.0;  // stationary runs: keep states every this many time units
  std::string out_dir = "out";
  int resolution = 60;          // weight_field mode
  int samples_per_facet = 1000; // conditions mode
};

// Parses a JSON document (see README for the schema). Unknown keys are a
// hard error so typos do not silently fall back to defaults.
ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

std::vector<std::string> list_builtins();
bool is_builtin(const std::string& name);
ExperimentConfig builtin_config(const std::string& name);

// Resolves `arg` as a builtin name or a config file path.
ExperimentConfig resolve_config(const std::string& arg);

// All violations, empty when runnable. Never simulates.
std::vector<std::string> validate(const ExperimentConfig& cfg);

Polyhedron build_polyhedron(const PolyhedronConfig& cfg);

}  // namespace polysde

#endif  // POLYSDE_CONFIG_HPP
