// Timing harness for the OpenMP batch kernels against their serial
// reference implementations, plus microbenchmarks of the dual-mode network
// evaluation that dominates long stationary runs. The parallel and serial
// paths must produce identical trajectories; this binary checks that while
// it times them.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polysde/analysis.hpp"
#include "polysde/dynamics.hpp"
#include "polysde/mlp.hpp"
#include "polysde/runner.hpp"
#include "polysde/solvers.hpp"
#include "polysde/targets.hpp"

using namespace polysde;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void bench_mlp_dual() {
  const MlpParams net = mlp_init({1, 64, 64, 64, 1}, Activation::Celu, 0);
  std::vector<Dual> x(1), out(1);
  double acc = 0.0;
  const int iters = 200000;
  const double t0 = now_seconds();
  for (int i = 0; i < iters; ++i) {
    x[0] = Dual(0.3 + 1e-7 * i, 1.0);
    mlp_eval<Dual>(net, x, out);
    acc += out[0].v + out[0].d;
  }
  const double dt = now_seconds() - t0;
  std::printf("mlp dual eval [1,64,64,64,1]   %8.2f us/eval   (%d evals, checksum %.6f)\n",
              1e6 * dt / iters, iters, acc);
}

void bench_grid_runner() {
  const auto poly = std::make_shared<const Polyhedron>(Polyhedron::box({0.0}, {1.0}));
  const SpecFactory factory = [poly](std::uint64_t seed) {
    WspConfig cfg;
    cfg.base = make_mlp_dynamics({1, 64, 64, 64, 1}, Activation::Celu, seed);
    cfg.poly = poly;
    cfg.domain_tol = 1e-6;
    return make_wsp(cfg);
  };
  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3};
  const double z0 = 0.99;
  SimProtocol protocol;
  protocol.scheme = SimProtocol::Scheme::Milstein;
  protocol.horizon = 2.0;
  protocol.dt = 1e-3;

  double t0 = now_seconds();
  const auto serial = run_grid_serial(factory, seeds, 3, {&z0, 1}, protocol);
  const double t_serial = now_seconds() - t0;
  t0 = now_seconds();
  const auto parallel = run_grid(factory, seeds, 3, {&z0, 1}, protocol);
  const double t_parallel = now_seconds() - t0;

  bool identical = serial.size() == parallel.size();
  for (std::size_t j = 0; identical && j < serial.size(); ++j) {
    identical = serial[j].states.size() == parallel[j].states.size() &&
                std::memcmp(serial[j].states.data(), parallel[j].states.data(),
                            serial[j].states.size() * sizeof(double)) == 0;
  }
  std::printf("trajectory grid (12 jobs)      serial %6.2f s   openmp %6.2f s   "
              "speedup %.2fx   results %s\n",
              t_serial, t_parallel, t_serial / t_parallel,
              identical ? "identical" : "DIFFER");
}

void bench_boundary_checker() {
  const auto poly = std::make_shared<const Polyhedron>(
      Polyhedron::box({0.0, 0.0}, {1.0, 1.0}));
  WspConfig cfg;
  cfg.base = make_mlp_dynamics({2, 64, 64, 64, 2}, Activation::Celu, 0);
  cfg.poly = poly;
  const DynamicsSpec spec = make_wsp(cfg);
  const double ts[] = {0.0, 2.5, 5.0};

  const double t0 = now_seconds();
  const ConditionReport rep = check_boundary_conditions(spec, *poly, 2000, ts, 0);
  const double dt = now_seconds() - t0;
  std::printf("boundary checker (8k samples)  %6.2f s             min inner %.2e, "
              "max diff %.2e\n",
              dt, rep.min_drift_inner, rep.max_diffusion_comp);
}

void bench_stationary_chain() {
  auto poly = std::make_shared<Polyhedron>(Polyhedron::box({0.0}, {1.0}));
  WspConfig wsp;
  wsp.base = make_mlp_dynamics({1, 64, 64, 64, 1}, Activation::Celu, 0);
  wsp.poly = poly;
  wsp.domain_tol = 1e-6;
  const DynamicsSpec blended = make_wsp(wsp);

  StationaryConfig st;
  st.diffusion = blended.diffusion;
  st.log_ptilde = make_gauss_target(0.5, 0.1);
  st.dim = 1;
  const DynamicsSpec spec = make_stationary(st);

  const double z0[] = {0.99};
  NoiseStream stream{0, 0, 1, 1e-3, 20000};
  const double t0 = now_seconds();
  const Trajectory traj = milstein(spec, z0, 0.0, 20.0, 1e-3, stream, 500);
  const double dt = now_seconds() - t0;
  std::printf("stationary milstein chain      %8.2f us/step   (T=2000 extrapolates "
              "to %.0f s; endpoint %.6f)\n",
              1e6 * dt / 20000, dt * 100.0, traj.states.back());
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp disabled (serial build)\n");
#endif
  bench_mlp_dual();
  bench_stationary_chain();
  bench_grid_runner();
  bench_boundary_checker();
  return 0;
}
