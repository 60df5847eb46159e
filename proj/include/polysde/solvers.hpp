#ifndef POLYSDE_SOLVERS_HPP
#define POLYSDE_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polysde/dynamics.hpp"

namespace polysde {

// Identifies one Brownian path. Increment (step k, dim d) is a pure
// function of (seed, sample_index, k, d), so paths are reproducible and
// independent of evaluation order or thread schedule.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::uint32_t sample_index = 0;
  int dim = 1;
  double dt = 0.0;
  int n_steps = 0;
};

// Single increment, distributed N(0, dt).
double brownian_increment(const NoiseStream& stream, std::uint32_t step, int d);

// All increments as a row-major n_steps x dim matrix.
std::vector<double> brownian_increments(const NoiseStream& stream);

struct TrajectoryMeta {
  std::string solver;
  std::uint64_t seed = 0;
  std::uint32_t sample = 0;
  double dt = 0.0;    // step size (fixed modes) or 0 for adaptive
  double rtol = 0.0;  // tolerances (adaptive mode only)
  double atol = 0.0;
};

// Time grid, states, and per-point membership flags. `in_k` stays empty
// until annotated against a polyhedron (membership is a measurement, not
// part of simulation).
struct Trajectory {
  Vec times;
  std::vector<double> states;  // row-major num_points x dim
  std::vector<char> in_k;
  int dim = 1;
  TrajectoryMeta meta;

  std::size_t num_points() const { return times.size(); }
  std::span<const double> state(std::size_t i) const {
    return {states.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

// Explicit Euler-Maruyama for Ito dynamics:
//   z_{k+1} = z_k + h dt + g .* dB_k.
// `store_stride` keeps every m-th point (plus the endpoint) so long runs
// do not hold millions of states. Non-finite states abort with the step.
Trajectory euler_maruyama(const DynamicsSpec& spec, std::span<const double> z0, double t0,
                          double T, double dt, const NoiseStream& stream, long store_stride = 1);

// Milstein with diagonal noise; adds 0.5 * g^d * (dg^d/dz^d) * (dB^2 - dt)
// per dimension, with the derivative from a forward-mode pass.
Trajectory milstein(const DynamicsSpec& spec, std::span<const double> z0, double t0, double T,
                    double dt, const NoiseStream& stream, long store_stride = 1);

// Truncated Karhunen-Loeve expansion of one Brownian dimension on [0, T].
struct KlExpansion {
  Vec xi;  // R standard-normal coefficients
  double horizon = 1.0;
  int terms = 1;
};

KlExpansion make_kl_expansion(std::uint64_t seed, std::uint32_t sample_index, int dim_index,
                              int terms, double horizon);

// Pathwise velocity sum_r sqrt(2/T) cos((2r-1) pi t / (2T)) xi^r.
double kl_velocity(const KlExpansion& exp, double t);

// Exact time integral of the velocity over [0, t]; test oracle and cheap
// closed form for the endpoint distribution.
double kl_integral(const KlExpansion& exp, double t);

using OdeRhs = std::function<void(double t, std::span<const double> z, std::span<double> out)>;

// Fixed-step Dormand-Prince 5(4) (error estimate unused in this mode).
Trajectory rk_fixed(const OdeRhs& rhs, int dim, std::span<const double> z0, double t0, double T,
                    double dt, long store_stride = 1);

// Adaptive Dormand-Prince 5(4) with PI step control against
// atol + rtol * |z|. If grid_dt > 0 the trajectory holds dense output on
// the uniform grid (4th-order interpolation of the accepted stages);
// otherwise it holds the accepted steps.
Trajectory rk_adaptive(const OdeRhs& rhs, int dim, std::span<const double> z0, double t0,
                       double T, double rtol, double atol, double grid_dt = 0.0);

struct KlSdeOptions {
  int terms = 40;
  bool adaptive = false;
  double dt = 1e-3;      // fixed mode
  double rtol = 1e-6;    // adaptive mode
  double atol = 1e-9;
  double grid_dt = 0.0;  // adaptive dense-output grid (0 = accepted steps)
  long store_stride = 1;
};

// Smooth pathwise SDE surrogate: integrates dz/dt = h(t,z) + g(t,z) .* v(t)
// with per-dimension KL velocities. The dynamics must be Stratonovich-tagged
// (the expansion converges to the Stratonovich solution).
Trajectory simulate_kl_sde(const DynamicsSpec& spec, std::span<const double> z0, double T,
                           const NoiseStream& stream, const KlSdeOptions& opts);

}  // namespace polysde

#endif  // POLYSDE_SOLVERS_HPP
