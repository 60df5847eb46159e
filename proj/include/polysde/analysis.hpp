#ifndef POLYSDE_ANALYSIS_HPP
#define POLYSDE_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polysde/dynamics.hpp"
#include "polysde/solvers.hpp"

namespace polysde {

// Membership measurement over one trajectory.
struct ViabilityReport {
  double fraction_in_k = 0.0;
  double max_violation = 0.0;  // largest distance outside any facet, >= 0
  std::optional<double> first_exit_time;
  long n_points = 0;
};

ViabilityReport viability(const Trajectory& traj, const Polyhedron& poly, double tol);

// Fills traj.in_k from contains(poly, z, tol), point by point.
void annotate_in_k(Trajectory& traj, const Polyhedron& poly, double tol);

struct FacetConditionStats {
  int facet = 0;
  long n_samples = 0;
  bool skipped = false;            // sampler could not hit the face
  double min_drift_inner = 0.0;    // min over samples of <h, unit normal>
  double max_diffusion_comp = 0.0; // max over samples, dims of |g^d * v_s^d|
};

// Worst-case boundary behavior of a drift/diffusion pair, sampled uniformly
// over each facet's face, plus interior regularity estimates.
struct ConditionReport {
  std::vector<FacetConditionStats> facets;
  double min_drift_inner = 0.0;
  double max_diffusion_comp = 0.0;
  double lipschitz_drift = 0.0;      // sampled lower bound
  double lipschitz_diffusion = 0.0;  // sampled lower bound
  double linear_bound_ratio = 0.0;   // sup (|h|^2+|g|^2)/(1+|z|^2) over samples

  bool pass(double drift_tol = 1e-9, double diffusion_tol = 1e-9) const {
    return min_drift_inner >= -drift_tol && max_diffusion_comp <= diffusion_tol;
  }
};

ConditionReport check_boundary_conditions(const DynamicsSpec& spec, const Polyhedron& poly,
                                          int n_per_facet, std::span<const double> t_samples,
                                          std::uint64_t sampler_seed = 0);

// Uniform point in K by rejection from the bounding box; draw `index` is a
// pure function of (seed, index), so sample sets nest as counts grow.
Vec sample_in_polyhedron(const Polyhedron& poly, std::uint64_t seed, std::uint32_t index);

// Samples a point on facet `s` (projection of a box-uniform draw onto the
// facet plane, rejected against the other half-spaces). Returns nothing if
// the face was never hit (measure-zero face).
std::optional<Vec> sample_on_facet(const Polyhedron& poly, int facet, std::uint64_t seed,
                                   std::uint32_t index, int max_tries = 1024);

using VecFn = std::function<std::vector<double>(std::span<const double>)>;

// Max sampled difference quotient of f over K: n_pairs box-rejection pairs
// plus near-coincident pairs at distance 1e-4. A lower bound on the true
// constant, monotone in n_pairs for a fixed seed.
double lipschitz_estimate(const VecFn& f, const Polyhedron& domain, int n_pairs,
                          std::uint64_t seed = 0);

// Max over the grid of the per-dimension stationary flux residual
//   |h(z) ptilde(z) - 1/2 d/dz (g(z)^2 ptilde(z))|
// with the derivative from a forward-mode pass through the composed
// product (1D).
double stationary_flux_max(const StationaryConfig& cfg, std::span<const double> grid);

struct DistributionDistance {
  double ks = 0.0;  // Kolmogorov-Smirnov, empirical CDF vs normalized target
  double tv = 0.0;  // total variation of the binned histogram
  bool degenerate = false;
};

// Normalizes exp(log_ptilde) on [lo, hi] by trapezoid quadrature (1e4
// points) and compares the sample set against it.
DistributionDistance distribution_distance(std::vector<double> samples,
                                           const ScalarField& log_ptilde, double lo, double hi,
                                           int n_bins);

// Flat key-value report: one metric per line as "name value PASS|FAIL|-".
struct Report {
  struct Line {
    std::string name;
    double value = 0.0;
    int status = -1;  // -1 informational, 0 FAIL, 1 PASS
  };
  std::vector<Line> lines;

  void add(const std::string& name, double value) { lines.push_back({name, value, -1}); }
  void add_check(const std::string& name, double value, bool pass) {
    lines.push_back({name, value, pass ? 1 : 0});
  }
  bool all_pass() const;
  std::string to_string() const;
  void write(const std::string& path) const;
};

}  // namespace polysde

#endif  // POLYSDE_ANALYSIS_HPP
