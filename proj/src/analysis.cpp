#include "polysde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "polysde/errors.hpp"
#include "polysde/philox.hpp"

namespace polysde {

ViabilityReport viability(const Trajectory& traj, const Polyhedron& poly, double tol) {
  if (traj.num_points() == 0) throw ConfigError("viability of an empty trajectory");
  ViabilityReport rep;
  rep.n_points = static_cast<long>(traj.num_points());
  long inside = 0;
  for (std::size_t i = 0; i < traj.num_points(); ++i) {
    const double min_d = poly.min_distance(traj.state(i));
    const double violation = std::max(0.0, -min_d);
    rep.max_violation = std::max(rep.max_violation, violation);
    if (violation <= tol) {
      ++inside;
    } else if (!rep.first_exit_time) {
      rep.first_exit_time = traj.times[i];
    }
  }
  rep.fraction_in_k = static_cast<double>(inside) / static_cast<double>(rep.n_points);
  return rep;
}

void annotate_in_k(Trajectory& traj, const Polyhedron& poly, double tol) {
  traj.in_k.resize(traj.num_points());
  for (std::size_t i = 0; i < traj.num_points(); ++i) {
    traj.in_k[i] = poly.contains(traj.state(i), tol) ? 1 : 0;
  }
}

Vec sample_in_polyhedron(const Polyhedron& poly, std::uint64_t seed, std::uint32_t index) {
  const std::size_t dim = static_cast<std::size_t>(poly.dim());
  const Vec& lo = poly.bbox_lo();
  const Vec& hi = poly.bbox_hi();
  Vec z(dim);
  for (std::uint32_t attempt = 0; attempt < 65536; ++attempt) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = uniform_unit(seed, index, attempt, static_cast<std::uint32_t>(j),
                                    rng_domain::kSampling);
      z[j] = lo[j] + u * (hi[j] - lo[j]);
    }
    if (poly.contains(z, 0.0)) return z;
  }
  // A compact polyhedron occupies a positive fraction of its bounding box,
  // so exhausting the attempt budget means something is badly wrong.
  throw GeometryError("rejection sampler failed to hit the polyhedron");
}

std::optional<Vec> sample_on_facet(const Polyhedron& poly, int facet, std::uint64_t seed,
                                   std::uint32_t index, int max_tries) {
  const std::size_t dim = static_cast<std::size_t>(poly.dim());
  const Vec& lo = poly.bbox_lo();
  const Vec& hi = poly.bbox_hi();
  const HalfSpace& hs = poly.halfspaces()[static_cast<std::size_t>(facet)];
  Vec z(dim);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = uniform_unit(seed, index, static_cast<std::uint32_t>(attempt),
                                    0x40000000u + static_cast<std::uint32_t>(facet) * 16 +
                                        static_cast<std::uint32_t>(j),
                                    rng_domain::kSampling);
      z[j] = lo[j] + u * (hi[j] - lo[j]);
    }
    // Project onto the facet plane.
    const double d = hs.distance(std::span<const double>(z));
    for (std::size_t j = 0; j < dim; ++j) z[j] -= d * hs.unit_normal()[j];
    bool ok = true;
    for (int s = 0; s < poly.num_facets() && ok; ++s) {
      if (s == facet) continue;
      ok = poly.facet_distance(s, std::span<const double>(z)) >= -kBoundaryTol;
    }
    if (ok) return z;
  }
  return std::nullopt;
}

ConditionReport check_boundary_conditions(const DynamicsSpec& spec, const Polyhedron& poly,
                                          int n_per_facet, std::span<const double> t_samples,
                                          std::uint64_t sampler_seed) {
  if (t_samples.empty()) throw ConfigError("boundary check needs at least one time sample");
  ConditionReport rep;
  rep.min_drift_inner = std::numeric_limits<double>::infinity();
  rep.max_diffusion_comp = 0.0;

  const std::size_t dim = static_cast<std::size_t>(poly.dim());
  for (int s = 0; s < poly.num_facets(); ++s) {
    FacetConditionStats stats;
    stats.facet = s;
    const Vec& vhat = poly.halfspaces()[static_cast<std::size_t>(s)].unit_normal();
    double min_inner = std::numeric_limits<double>::infinity();
    double max_diff = 0.0;
    long n_hit = 0;
    std::string error;
    // Sample draws are keyed by index, so the schedule cannot change the
    // result; exceptions must not unwind out of the parallel region.
#pragma omp parallel for schedule(static) reduction(min : min_inner) \
    reduction(max : max_diff) reduction(+ : n_hit)
    for (int i = 0; i < n_per_facet; ++i) {
      try {
        const auto z = sample_on_facet(poly, s, sampler_seed, static_cast<std::uint32_t>(i));
        if (!z) continue;
        Vec h(dim), g(dim);
        for (double t : t_samples) {
          spec.drift->eval(t, *z, h);
          spec.diffusion->eval(t, *z, g);
          double inner = 0.0;
          for (std::size_t j = 0; j < dim; ++j) inner += h[j] * vhat[j];
          min_inner = std::min(min_inner, inner);
          for (std::size_t j = 0; j < dim; ++j) {
            max_diff = std::max(max_diff, std::fabs(g[j] * vhat[j]));
          }
        }
        ++n_hit;
      } catch (const std::exception& e) {
#pragma omp critical
        error = e.what();
      }
    }
    if (!error.empty()) throw DomainError("boundary check failed: " + error);
    stats.n_samples = n_hit;
    stats.min_drift_inner = min_inner;
    stats.max_diffusion_comp = max_diff;
    if (stats.n_samples == 0) {
      stats.skipped = true;
      stats.min_drift_inner = 0.0;
    } else {
      rep.min_drift_inner = std::min(rep.min_drift_inner, stats.min_drift_inner);
      rep.max_diffusion_comp = std::max(rep.max_diffusion_comp, stats.max_diffusion_comp);
    }
    rep.facets.push_back(stats);
  }
  if (!std::isfinite(rep.min_drift_inner)) rep.min_drift_inner = 0.0;

  // Interior regularity estimates at t_samples[0].
  const double t0 = t_samples[0];
  auto drift_fn = [&spec, t0](std::span<const double> z) {
    std::vector<double> out(z.size());
    spec.drift->eval(t0, z, out);
    return out;
  };
  auto diff_fn = [&spec, t0](std::span<const double> z) {
    std::vector<double> out(z.size());
    spec.diffusion->eval(t0, z, out);
    return out;
  };
  rep.lipschitz_drift = lipschitz_estimate(drift_fn, poly, 512, sampler_seed + 1);
  rep.lipschitz_diffusion = lipschitz_estimate(diff_fn, poly, 512, sampler_seed + 2);

  rep.linear_bound_ratio = 0.0;
  Vec h(dim), g(dim);
  for (std::uint32_t i = 0; i < 512; ++i) {
    const Vec z = sample_in_polyhedron(poly, sampler_seed + 3, i);
    double hz2 = 0.0, gz2 = 0.0, z2 = 0.0;
    spec.drift->eval(t0, z, h);
    spec.diffusion->eval(t0, z, g);
    for (std::size_t j = 0; j < dim; ++j) {
      hz2 += h[j] * h[j];
      gz2 += g[j] * g[j];
      z2 += z[j] * z[j];
    }
    rep.linear_bound_ratio = std::max(rep.linear_bound_ratio, (hz2 + gz2) / (1.0 + z2));
  }
  return rep;
}

double lipschitz_estimate(const VecFn& f, const Polyhedron& domain, int n_pairs,
                          std::uint64_t seed) {
  if (n_pairs < 1) throw ConfigError("lipschitz_estimate needs n_pairs >= 1");
  const std::size_t dim = static_cast<std::size_t>(domain.dim());
  double best = 0.0;

  auto quotient = [&f](const Vec& a, const Vec& b) {
    const std::vector<double> fa = f(a);
    const std::vector<double> fb = f(b);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < fa.size(); ++j) num += (fa[j] - fb[j]) * (fa[j] - fb[j]);
    for (std::size_t j = 0; j < a.size(); ++j) den += (a[j] - b[j]) * (a[j] - b[j]);
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
  };

  for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n_pairs); ++i) {
    const Vec a = sample_in_polyhedron(domain, seed, 2 * i);
    const Vec b = sample_in_polyhedron(domain, seed, 2 * i + 1);
    best = std::max(best, quotient(a, b));
  }

  // Near-coincident pairs probe the local (derivative-scale) quotient.
  constexpr double kStep = 1e-4;
  for (std::uint32_t i = 0; i < 100; ++i) {
    const Vec a = sample_in_polyhedron(domain, seed ^ 0xabcdu, i);
    Vec dir(dim);
    double norm = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      dir[j] = standard_normal(seed ^ 0xabcdu, i, static_cast<std::uint32_t>(j), 7,
                               rng_domain::kSampling);
      norm += dir[j] * dir[j];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    Vec b = a;
    for (std::size_t j = 0; j < dim; ++j) b[j] += kStep * dir[j] / norm;
    if (!domain.contains(b, 0.0)) {
      for (std::size_t j = 0; j < dim; ++j) b[j] = a[j] - kStep * dir[j] / norm;
    }
    if (!domain.contains(b, 0.0)) continue;
    best = std::max(best, quotient(a, b));
  }
  return best;
}

double stationary_flux_max(const StationaryConfig& cfg, std::span<const double> grid) {
  if (cfg.dim != 1) throw ConfigError("stationary flux check is one-dimensional");
  double worst = 0.0;
  std::vector<Dual> zd(1), gd(1);
  for (double z : grid) {
    const Vec h = stationary_drift(cfg, std::span<const double>(&z, 1));
    zd[0] = Dual(z, 1.0);
    cfg.diffusion->eval(0.0, zd, gd);
    const Dual logp = cfg.log_ptilde->eval(std::span<const Dual>(zd));
    const Dual ptilde = exp(logp);
    const Dual composed = gd[0] * gd[0] * ptilde;  // g^2 * ptilde, d/dz in tangent
    const double flux = h[0] * ptilde.v - 0.5 * composed.d;
    worst = std::max(worst, std::fabs(flux));
  }
  return worst;
}

DistributionDistance distribution_distance(std::vector<double> samples,
                                           const ScalarField& log_ptilde, double lo, double hi,
                                           int n_bins) {
  if (samples.empty()) throw ConfigError("distribution_distance needs samples");
  if (n_bins < 1) throw ConfigError("distribution_distance needs n_bins >= 1");
  if (!(hi > lo)) throw ConfigError("empty support interval");

  DistributionDistance out;
  const double first = samples.front();
  out.degenerate = std::all_of(samples.begin(), samples.end(),
                               [first](double s) { return s == first; });

  // Normalize the target by trapezoid quadrature.
  constexpr int kQuad = 10000;
  Vec density(kQuad + 1), cdf(kQuad + 1, 0.0);
  const double dx = (hi - lo) / kQuad;
  for (int i = 0; i <= kQuad; ++i) {
    const double x = lo + i * dx;
    density[static_cast<std::size_t>(i)] =
        std::exp(log_ptilde.eval(std::span<const double>(&x, 1)));
  }
  for (int i = 1; i <= kQuad; ++i) {
    cdf[static_cast<std::size_t>(i)] =
        cdf[static_cast<std::size_t>(i - 1)] +
        0.5 * dx * (density[static_cast<std::size_t>(i - 1)] + density[static_cast<std::size_t>(i)]);
  }
  const double total = cdf.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DomainError("target density integrates to zero or overflows on the support");
  }
  for (double& c : cdf) c /= total;

  auto target_cdf = [&](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double pos = (x - lo) / dx;
    const int i = std::min(kQuad - 1, static_cast<int>(pos));
    const double frac = pos - i;
    return cdf[static_cast<std::size_t>(i)] +
           frac * (cdf[static_cast<std::size_t>(i + 1)] - cdf[static_cast<std::size_t>(i)]);
  };

  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = target_cdf(samples[i]);
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - F));
    ks = std::max(ks, std::fabs(static_cast<double>(i) / n - F));
  }
  out.ks = ks;

  double tv = 0.0;
  const double bin_w = (hi - lo) / n_bins;
  std::size_t cursor = 0;
  for (int b = 0; b < n_bins; ++b) {
    const double b_lo = lo + b * bin_w;
    const double b_hi = (b + 1 == n_bins) ? hi : lo + (b + 1) * bin_w;
    std::size_t count = 0;
    while (cursor + count < samples.size() &&
           (samples[cursor + count] < b_hi || b + 1 == n_bins)) {
      ++count;
    }
    const double emp = static_cast<double>(count) / n;
    const double model = target_cdf(b_hi) - target_cdf(b_lo);
    tv += std::fabs(emp - model);
    cursor += count;
  }
  out.tv = 0.5 * tv;
  return out;
}

bool Report::all_pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const Line& l) { return l.status != 0; });
}

std::string Report::to_string() const {
  std::string out;
  char buf[160];
  for (const Line& l : lines) {
    const char* status = l.status < 0 ? "-" : (l.status == 1 ? "PASS" : "FAIL");
    std::snprintf(buf, sizeof buf, "%s %.12g %s\n", l.name.c_str(), l.value, status);
    out += buf;
  }
  return out;
}

void Report::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open report file '" + path + "'");
  out << to_string();
}

}  // namespace polysde
