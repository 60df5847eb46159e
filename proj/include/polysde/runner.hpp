#ifndef POLYSDE_RUNNER_HPP
#define POLYSDE_RUNNER_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "polysde/solvers.hpp"

namespace polysde {

// One simulation protocol applied across a (seed, sample) grid.
struct SimProtocol {
  enum class Scheme { EulerMaruyama, Milstein, KlOde, KlOdeAdaptive };
  Scheme scheme = Scheme::Milstein;
  double t0 = 0.0;
  double horizon = 5.0;
  double dt = 1e-3;
  int kl_terms = 40;
  double rtol = 1e-6;
  double atol = 1e-9;
  long store_stride = 1;
};

// Builds the per-seed dynamics (networks are seed-dependent; the polyhedron
// and parameters are shared).
using SpecFactory = std::function<DynamicsSpec(std::uint64_t seed)>;

// Simulates every (seed, sample) job of the grid. Jobs are pure functions
// of their inputs, so the OpenMP schedule cannot affect results; the serial
// variant runs the identical job list in order and is kept as the reference
// implementation for equivalence tests and the benchmark. Results come back
// in (seed index, sample) order either way.
std::vector<Trajectory> run_grid(const SpecFactory& factory, std::span<const std::uint64_t> seeds,
                                 int samples_per_seed, std::span<const double> z0,
                                 const SimProtocol& protocol);

std::vector<Trajectory> run_grid_serial(const SpecFactory& factory,
                                        std::span<const std::uint64_t> seeds,
                                        int samples_per_seed, std::span<const double> z0,
                                        const SimProtocol& protocol);

// Single (seed, sample) job; both grid runners delegate here.
Trajectory run_job(const DynamicsSpec& spec, std::uint64_t seed, std::uint32_t sample,
                   std::span<const double> z0, const SimProtocol& protocol);

}  // namespace polysde

#endif  // POLYSDE_RUNNER_HPP
