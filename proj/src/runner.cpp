#include "polysde/runner.hpp"

#include <exception>
#include <stdexcept>
#include <string>
#include <utility>

#include "polysde/errors.hpp"

namespace polysde {

Trajectory run_job(const DynamicsSpec& spec, std::uint64_t seed, std::uint32_t sample,
                   std::span<const double> z0, const SimProtocol& protocol) {
  NoiseStream stream;
  stream.seed = seed;
  stream.sample_index = sample;
  stream.dim = spec.dim;
  stream.dt = protocol.dt;
  stream.n_steps = static_cast<int>((protocol.horizon - protocol.t0) / protocol.dt + 0.5);

  switch (protocol.scheme) {
    case SimProtocol::Scheme::EulerMaruyama:
      return euler_maruyama(spec, z0, protocol.t0, protocol.horizon, protocol.dt, stream,
                            protocol.store_stride);
    case SimProtocol::Scheme::Milstein:
      return milstein(spec, z0, protocol.t0, protocol.horizon, protocol.dt, stream,
                      protocol.store_stride);
    case SimProtocol::Scheme::KlOde:
    case SimProtocol::Scheme::KlOdeAdaptive: {
      KlSdeOptions opts;
      opts.terms = protocol.kl_terms;
      opts.adaptive = protocol.scheme == SimProtocol::Scheme::KlOdeAdaptive;
      opts.dt = protocol.dt;
      opts.rtol = protocol.rtol;
      opts.atol = protocol.atol;
      opts.grid_dt = opts.adaptive ? protocol.dt : 0.0;
      opts.store_stride = protocol.store_stride;
      return simulate_kl_sde(spec, z0, protocol.horizon, stream, opts);
    }
  }
  throw ConfigError("unknown simulation scheme");
}

namespace {

std::vector<Trajectory> run_grid_impl(const SpecFactory& factory,
                                      std::span<const std::uint64_t> seeds, int samples_per_seed,
                                      std::span<const double> z0, const SimProtocol& protocol,
                                      bool parallel) {
  if (seeds.empty()) throw ConfigError("seed list must be nonempty");
  if (samples_per_seed < 1) throw ConfigError("samples_per_seed must be >= 1");
  const long n_jobs = static_cast<long>(seeds.size()) * samples_per_seed;
  std::vector<Trajectory> out(static_cast<std::size_t>(n_jobs));
  std::vector<std::string> errors(static_cast<std::size_t>(n_jobs));
  bool failed = false;

  // Exceptions must not unwind out of the parallel region; they are
  // captured per job and rethrown once below.
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long j = 0; j < n_jobs; ++j) {
    const std::size_t seed_idx = static_cast<std::size_t>(j) / samples_per_seed;
    const std::uint32_t sample = static_cast<std::uint32_t>(j % samples_per_seed);
    try {
      const DynamicsSpec spec = factory(seeds[seed_idx]);
      out[static_cast<std::size_t>(j)] = run_job(spec, seeds[seed_idx], sample, z0, protocol);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(j)] =
          "seed " + std::to_string(seeds[seed_idx]) + " sample " + std::to_string(sample) +
          ": " + e.what();
      failed = true;
    }
  }

  if (failed) {
    for (const std::string& msg : errors) {
      if (!msg.empty()) throw SimulationError(msg, -1);
    }
  }
  return out;
}

}  // namespace

std::vector<Trajectory> run_grid(const SpecFactory& factory, std::span<const std::uint64_t> seeds,
                                 int samples_per_seed, std::span<const double> z0,
                                 const SimProtocol& protocol) {
  return run_grid_impl(factory, seeds, samples_per_seed, z0, protocol, true);
}

std::vector<Trajectory> run_grid_serial(const SpecFactory& factory,
                                        std::span<const std::uint64_t> seeds,
                                        int samples_per_seed, std::span<const double> z0,
                                        const SimProtocol& protocol) {
  return run_grid_impl(factory, seeds, samples_per_seed, z0, protocol, false);
}

}  // namespace polysde
