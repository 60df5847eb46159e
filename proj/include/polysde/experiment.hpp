#ifndef POLYSDE_EXPERIMENT_HPP
#define POLYSDE_EXPERIMENT_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "polysde/analysis.hpp"
#include "polysde/config.hpp"
#include "polysde/dynamics.hpp"

namespace polysde {

struct RunOptions {
  std::string out_dir;                // overrides the config when nonempty
  std::vector<std::uint64_t> seeds;   // overrides the config when nonempty
  bool quiet = false;
  bool dump_nets = false;  // also write the per-seed network parameters
};

// Dynamics for one panel at one seed. The polyhedron is shared across
// seeds; networks depend on the seed.
DynamicsSpec build_panel_dynamics(const ExperimentConfig& cfg, const std::string& param,
                                  std::uint64_t seed, const PolyhedronPtr& poly);

// Runs the configured experiment and writes CSV/SVG/report artifacts.
// Returns 0 when every configured PASS-assertion holds, 1 otherwise.
// Config and numeric failures propagate as ConfigError / SimulationError.
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

// Renders w(z) over the polyhedron: a curve for D=1, a heatmap for D=2
// (with the center-pull quiver when `wsp` is given); D > 2 is an error.
void write_weight_field_svg(const std::string& path, const Polyhedron& poly,
                            const WeightParams& wp, int resolution,
                            const WspConfig* wsp = nullptr);

}  // namespace polysde

#endif  // POLYSDE_EXPERIMENT_HPP
