#include "polysde/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "polysde/errors.hpp"
#include "polysde/philox.hpp"

namespace polysde {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

long resolve_steps(double t0, double T, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(T > t0)) throw ConfigError("horizon must exceed start time");
  const double n_real = (T - t0) / dt;
  const long n = std::lround(n_real);
  if (n < 1 || std::fabs(static_cast<double>(n) * dt - (T - t0)) > 1e-9) {
    throw ConfigError("dt must divide the horizon (within 1e-9)");
  }
  return n;
}

void check_finite(std::span<const double> z, long step) {
  for (double x : z) {
    if (!std::isfinite(x)) {
      throw SimulationError("non-finite state (simulation blow-up)", step);
    }
  }
}

bool stored_step(long k, long n, long stride) { return k % stride == 0 || k == n; }

}  // namespace

double brownian_increment(const NoiseStream& stream, std::uint32_t step, int d) {
  const double z = standard_normal(stream.seed, stream.sample_index, step,
                                   static_cast<std::uint32_t>(d), rng_domain::kBrownian);
  return std::sqrt(stream.dt) * z;
}

std::vector<double> brownian_increments(const NoiseStream& stream) {
  if (!(stream.dt > 0.0) || stream.n_steps < 1) {
    throw ConfigError("noise stream needs dt > 0 and n_steps >= 1");
  }
  std::vector<double> inc(static_cast<std::size_t>(stream.n_steps) * stream.dim);
  for (int k = 0; k < stream.n_steps; ++k) {
    for (int d = 0; d < stream.dim; ++d) {
      inc[static_cast<std::size_t>(k) * stream.dim + d] =
          brownian_increment(stream, static_cast<std::uint32_t>(k), d);
    }
  }
  return inc;
}

namespace {

enum class SdeScheme { Euler, Milstein };

Trajectory integrate_sde(const DynamicsSpec& spec, std::span<const double> z0, double t0,
                         double T, double dt, const NoiseStream& stream, long store_stride,
                         SdeScheme scheme) {
  if (spec.calculus != Calculus::Ito) {
    throw ConfigError("SDE schemes integrate Ito dynamics; convert Stratonovich specs first");
  }
  if (static_cast<int>(z0.size()) != spec.dim) throw ConfigError("z0 dimension mismatch");
  if (store_stride < 1) store_stride = 1;
  const long n = resolve_steps(t0, T, dt);
  const std::size_t dim = z0.size();

  Trajectory traj;
  traj.dim = spec.dim;
  traj.meta.solver = scheme == SdeScheme::Euler ? "euler" : "milstein";
  traj.meta.seed = stream.seed;
  traj.meta.sample = stream.sample_index;
  traj.meta.dt = dt;

  Vec z(z0.begin(), z0.end());
  Vec z_next(dim), drift(dim), diff(dim);
  std::vector<Dual> zd(dim), gd(dim);

  traj.times.push_back(t0);
  traj.states.insert(traj.states.end(), z.begin(), z.end());

  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    spec.drift->eval(t, z, drift);
    if (scheme == SdeScheme::Euler) {
      spec.diffusion->eval(t, z, diff);
      for (std::size_t d = 0; d < dim; ++d) {
        const double db = brownian_increment(stream, static_cast<std::uint32_t>(k),
                                             static_cast<int>(d));
        z_next[d] = z[d] + drift[d] * dt + diff[d] * db;
      }
    } else {
      // One forward-mode pass per dimension yields g^d and dg^d/dz^d, all
      // coefficients read at the step-start state.
      for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t j = 0; j < dim; ++j) zd[j] = Dual(z[j], j == d ? 1.0 : 0.0);
        spec.diffusion->eval(t, zd, gd);
        const double g = gd[d].v;
        const double dg = gd[d].d;
        const double db = brownian_increment(stream, static_cast<std::uint32_t>(k),
                                             static_cast<int>(d));
        z_next[d] = z[d] + drift[d] * dt + g * db + 0.5 * g * dg * (db * db - dt);
      }
    }
    z.swap(z_next);
    check_finite(z, k + 1);
    if (stored_step(k + 1, n, store_stride)) {
      traj.times.push_back(k + 1 == n ? T : t0 + static_cast<double>(k + 1) * dt);
      traj.states.insert(traj.states.end(), z.begin(), z.end());
    }
  }
  return traj;
}

}  // namespace

Trajectory euler_maruyama(const DynamicsSpec& spec, std::span<const double> z0, double t0,
                          double T, double dt, const NoiseStream& stream, long store_stride) {
  return integrate_sde(spec, z0, t0, T, dt, stream, store_stride, SdeScheme::Euler);
}

Trajectory milstein(const DynamicsSpec& spec, std::span<const double> z0, double t0, double T,
                    double dt, const NoiseStream& stream, long store_stride) {
  return integrate_sde(spec, z0, t0, T, dt, stream, store_stride, SdeScheme::Milstein);
}

KlExpansion make_kl_expansion(std::uint64_t seed, std::uint32_t sample_index, int dim_index,
                              int terms, double horizon) {
  if (terms < 1) throw ConfigError("KL expansion needs at least one term");
  if (!(horizon > 0.0)) throw ConfigError("KL horizon must be positive");
  KlExpansion exp;
  exp.horizon = horizon;
  exp.terms = terms;
  exp.xi.resize(static_cast<std::size_t>(terms));
  for (int r = 0; r < terms; ++r) {
    exp.xi[static_cast<std::size_t>(r)] =
        standard_normal(seed, sample_index, static_cast<std::uint32_t>(r),
                        static_cast<std::uint32_t>(dim_index), rng_domain::kKlCoefficients);
  }
  return exp;
}

double kl_velocity(const KlExpansion& exp, double t) {
  if (t < 0.0 || t > exp.horizon) throw DomainError("KL velocity requested outside [0, T]");
  const double scale = std::sqrt(2.0 / exp.horizon);
  double v = 0.0;
  for (int r = 1; r <= exp.terms; ++r) {
    const double freq = (2.0 * r - 1.0) * kPi / (2.0 * exp.horizon);
    v += scale * std::cos(freq * t) * exp.xi[static_cast<std::size_t>(r - 1)];
  }
  return v;
}

double kl_integral(const KlExpansion& exp, double t) {
  if (t < 0.0 || t > exp.horizon) throw DomainError("KL integral requested outside [0, T]");
  const double scale = std::sqrt(2.0 / exp.horizon);
  double b = 0.0;
  for (int r = 1; r <= exp.terms; ++r) {
    const double freq = (2.0 * r - 1.0) * kPi / (2.0 * exp.horizon);
    b += scale / freq * std::sin(freq * t) * exp.xi[static_cast<std::size_t>(r - 1)];
  }
  return b;
}

namespace {

// Dormand-Prince 5(4) coefficients (FSAL form).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - bhat, for the embedded 4th-order error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (Hairer, Norsett, Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct DopriStep {
  Vec k1, k2, k3, k4, k5, k6, k7, y_tmp, y_new, y_err;

  explicit DopriStep(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y_tmp(n), y_new(n), y_err(n) {}

  // One step from (t, y) of size h; k1 must hold rhs(t, y) on entry, and
  // k7 holds rhs(t + h, y_new) on exit (FSAL).
  void advance(const OdeRhs& rhs, double t, const Vec& y, double h) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) y_tmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, y_tmp, k2);
    for (std::size_t i = 0; i < n; ++i) y_tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, y_tmp, k3);
    for (std::size_t i = 0; i < n; ++i) {
      y_tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    }
    rhs(t + c4 * h, y_tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y_tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs(t + c5 * h, y_tmp, k5);
    for (std::size_t i = 0; i < n; ++i) {
      y_tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    rhs(t + h, y_tmp, k6);
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }
    rhs(t + h, y_new, k7);
    for (std::size_t i = 0; i < n; ++i) {
      y_err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
  }
};

}  // namespace

Trajectory rk_fixed(const OdeRhs& rhs, int dim, std::span<const double> z0, double t0, double T,
                    double dt, long store_stride) {
  if (static_cast<int>(z0.size()) != dim) throw ConfigError("z0 dimension mismatch");
  if (store_stride < 1) store_stride = 1;
  const long n = resolve_steps(t0, T, dt);
  const std::size_t nd = z0.size();

  Trajectory traj;
  traj.dim = dim;
  traj.meta.solver = "rk_fixed";
  traj.meta.dt = dt;
  Vec y(z0.begin(), z0.end());
  traj.times.push_back(t0);
  traj.states.insert(traj.states.end(), y.begin(), y.end());

  DopriStep step(nd);
  rhs(t0, y, step.k1);
  for (long k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    step.advance(rhs, t, y, dt);
    y = step.y_new;
    check_finite(y, k + 1);
    step.k1 = step.k7;  // FSAL
    if (stored_step(k + 1, n, store_stride)) {
      traj.times.push_back(k + 1 == n ? T : t0 + static_cast<double>(k + 1) * dt);
      traj.states.insert(traj.states.end(), y.begin(), y.end());
    }
  }
  return traj;
}

Trajectory rk_adaptive(const OdeRhs& rhs, int dim, std::span<const double> z0, double t0,
                       double T, double rtol, double atol, double grid_dt) {
  if (static_cast<int>(z0.size()) != dim) throw ConfigError("z0 dimension mismatch");
  if (!(T > t0)) throw ConfigError("horizon must exceed start time");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ConfigError("tolerances must be positive");
  const std::size_t nd = z0.size();

  Trajectory traj;
  traj.dim = dim;
  traj.meta.solver = "rk_adaptive";
  traj.meta.rtol = rtol;
  traj.meta.atol = atol;
  Vec y(z0.begin(), z0.end());
  traj.times.push_back(t0);
  traj.states.insert(traj.states.end(), y.begin(), y.end());

  const bool dense = grid_dt > 0.0;
  long next_grid = 1;  // next uniform grid index awaiting output

  DopriStep step(nd);
  rhs(t0, y, step.k1);

  double t = t0;
  double h = std::min(1e-2 * (T - t0), 1.0);
  double err_prev = 1e-4;
  long n_steps = 0;
  constexpr long kMaxSteps = 20'000'000;

  while (t < T) {
    if (h < 1e-12) {
      throw SimulationError("step size underflow (stiffness suspected)", n_steps);
    }
    if (++n_steps > kMaxSteps) {
      throw SimulationError("adaptive solver exceeded the step budget", n_steps);
    }
    const bool last = t + h >= T;
    if (last) h = T - t;
    step.advance(rhs, t, y, h);

    double err_sq = 0.0;
    for (std::size_t i = 0; i < nd; ++i) {
      const double scale = atol + rtol * std::max(std::fabs(y[i]), std::fabs(step.y_new[i]));
      const double e = step.y_err[i] / scale;
      err_sq += e * e;
    }
    const double err = std::sqrt(err_sq / static_cast<double>(nd));

    if (err <= 1.0) {
      const double t_new = last ? T : t + h;  // land on T exactly
      if (dense) {
        // 4th-order interpolation of the accepted stages on the grid.
        Vec r2(nd), r3(nd), r4(nd), r5(nd);
        for (std::size_t i = 0; i < nd; ++i) {
          const double dy = step.y_new[i] - y[i];
          r2[i] = dy;
          r3[i] = h * step.k1[i] - dy;
          r4[i] = dy - h * step.k7[i] - r3[i];
          r5[i] = h * (d1 * step.k1[i] + d3 * step.k3[i] + d4 * step.k4[i] + d5 * step.k5[i] +
                       d6 * step.k6[i] + d7 * step.k7[i]);
        }
        while (true) {
          const double tg = t0 + static_cast<double>(next_grid) * grid_dt;
          if (tg > t_new + 1e-12 || tg > T + 1e-12) break;
          const double theta = (tg - t) / h;
          const double omt = 1.0 - theta;
          traj.times.push_back(std::min(tg, T));
          for (std::size_t i = 0; i < nd; ++i) {
            traj.states.push_back(y[i] +
                                  theta * (r2[i] + omt * (r3[i] + theta * (r4[i] + omt * r5[i]))));
          }
          ++next_grid;
        }
      }
      y = step.y_new;
      t = t_new;
      check_finite(y, n_steps);
      step.k1 = step.k7;
      if (!dense) {
        traj.times.push_back(t);
        traj.states.insert(traj.states.end(), y.begin(), y.end());
      }
      const double fac =
          std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.17) * std::pow(err_prev, 0.04),
                     0.2, 5.0);
      h *= fac;
      err_prev = std::max(err, 1e-4);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }

  if (dense && (traj.times.empty() || traj.times.back() < T - 1e-12)) {
    traj.times.push_back(T);
    traj.states.insert(traj.states.end(), y.begin(), y.end());
  } else if (dense && traj.times.back() < T) {
    traj.times.back() = T;
  }
  return traj;
}

Trajectory simulate_kl_sde(const DynamicsSpec& spec, std::span<const double> z0, double T,
                           const NoiseStream& stream, const KlSdeOptions& opts) {
  if (spec.calculus != Calculus::Stratonovich) {
    throw ConfigError("KL pathwise simulation expects Stratonovich dynamics");
  }
  if (static_cast<int>(z0.size()) != spec.dim) throw ConfigError("z0 dimension mismatch");

  std::vector<KlExpansion> expansions;
  expansions.reserve(z0.size());
  for (int d = 0; d < spec.dim; ++d) {
    expansions.push_back(make_kl_expansion(stream.seed, stream.sample_index, d, opts.terms, T));
  }

  const FieldPtr drift = spec.drift;
  const FieldPtr diffusion = spec.diffusion;
  const std::size_t nd = z0.size();
  OdeRhs rhs = [&expansions, drift, diffusion, nd](double t, std::span<const double> z,
                                                   std::span<double> out) {
    std::vector<double> g(nd);
    drift->eval(t, z, out);
    diffusion->eval(t, z, g);
    for (std::size_t d = 0; d < nd; ++d) out[d] += g[d] * kl_velocity(expansions[d], t);
  };

  Trajectory traj;
  if (opts.adaptive) {
    traj = rk_adaptive(rhs, spec.dim, z0, 0.0, T, opts.rtol, opts.atol, opts.grid_dt);
    traj.meta.solver = "kl_ode_adaptive";
  } else {
    traj = rk_fixed(rhs, spec.dim, z0, 0.0, T, opts.dt, opts.store_stride);
    traj.meta.solver = "kl_ode";
    traj.meta.dt = opts.dt;
  }
  traj.meta.seed = stream.seed;
  traj.meta.sample = stream.sample_index;
  return traj;
}

}  // namespace polysde
