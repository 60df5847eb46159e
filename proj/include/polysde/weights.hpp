#ifndef POLYSDE_WEIGHTS_HPP
#define POLYSDE_WEIGHTS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "polysde/dual.hpp"
#include "polysde/errors.hpp"
#include "polysde/geometry.hpp"

namespace polysde {

// Saturation rates of the boundary weight: alpha drives how fast a facet
// distance saturates, beta how fast the combined product saturates to 1.
struct WeightParams {
  double alpha = 10.0;
  double beta = 10.0;
};

inline void validate(const WeightParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) {
    throw ConfigError("weight parameters require alpha > 0 and beta > 0");
  }
}

// Distances smaller than this in magnitude are treated as exactly on the
// facet: the value is zeroed (making the weight vanish exactly) while the
// tangent is kept, so one-sided derivatives still come out of dual mode.
constexpr double kDistanceSnapTol = 1e-12;

namespace detail {

inline double snap_distance(double d) {
  return (d <= kDistanceSnapTol && d >= -kDistanceSnapTol) ? 0.0 : d;
}
inline Dual snap_distance(Dual d) {
  return (d.v <= kDistanceSnapTol && d.v >= -kDistanceSnapTol) ? Dual{0.0, d.d} : d;
}

}  // namespace detail

// Boundary weight from saturated facet distances:
//   w = tanh(beta * prod_s softmin_s(d) * tanh(alpha * d_s)),
// softmin_s(d) = exp(-d_s) / sum_s' exp(-d_s'). Zero exactly when any facet
// distance is zero, approaching 1 deep in the interior. The softmin is
// evaluated with max-subtraction so large distances cannot underflow the
// normalizer.
template <typename S>
S weight_from_distances(std::span<const S> d, const WeightParams& p) {
  using std::exp;
  using std::tanh;
  double dmin = value_of(d[0]);
  for (const S& ds : d) dmin = std::min(dmin, value_of(ds));

  S norm(0.0);
  for (const S& ds : d) norm += exp(-(ds - S(dmin)));

  S prod(1.0);
  for (const S& ds : d) {
    prod *= exp(-(ds - S(dmin))) / norm * tanh(S(p.alpha) * ds);
  }
  return tanh(S(p.beta) * prod);
}

// Evaluates the weight at z, snapping near-boundary distances to exact zero
// and rejecting points further than `domain_tol` outside K (the distances
// turn negative off K and the formula stops meaning anything there).
template <typename S>
S weight_at(const Polyhedron& poly, const WeightParams& p, std::span<const S> z,
            double domain_tol = kBoundaryTol) {
  validate(p);
  std::vector<S> d(static_cast<std::size_t>(poly.num_facets()));
  for (int s = 0; s < poly.num_facets(); ++s) {
    S ds = poly.facet_distance<S>(s, z);
    const double dv = value_of(ds);
    if (dv < -domain_tol) {
      throw DomainError("weight undefined outside the polyhedron (facet distance " +
                        std::to_string(dv) + ")");
    }
    if (dv < 0.0) {
      // Within tolerance outside: treat as on the facet.
      ds = S(0.0);
    }
    d[static_cast<std::size_t>(s)] = detail::snap_distance(ds);
  }
  return weight_from_distances<S>(d, p);
}

inline double weight(const Polyhedron& poly, const WeightParams& p, std::span<const double> z,
                     double domain_tol = kBoundaryTol) {
  return weight_at<double>(poly, p, z, domain_tol);
}

// Gradient of the weight by forward-mode passes along the basis directions.
// On the boundary the result is the one-sided forward-mode derivative;
// `on_boundary` (optional) reports that case.
Vec weight_gradient(const Polyhedron& poly, const WeightParams& p, std::span<const double> z,
                    bool* on_boundary = nullptr, double domain_tol = kBoundaryTol);

}  // namespace polysde

#endif  // POLYSDE_WEIGHTS_HPP
