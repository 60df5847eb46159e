#ifndef POLYSDE_GEOMETRY_HPP
#define POLYSDE_GEOMETRY_HPP

#include <span>
#include <vector>

#include "polysde/dual.hpp"

namespace polysde {

using Vec = std::vector<double>;

// Closed half-space {z : <z - u, v> >= 0} given by an anchor point u on its
// bounding hyperplane and an inward normal v (any nonzero length).
class HalfSpace {
 public:
  HalfSpace(Vec u, Vec v);  // throws GeometryError on degenerate normal

  const Vec& anchor() const { return u_; }
  const Vec& normal() const { return v_; }
  const Vec& unit_normal() const { return unit_v_; }
  int dim() const { return static_cast<int>(u_.size()); }

  // Signed distance <z - u, v> / ||v||; >= 0 inside, linear in z.
  template <typename S>
  S distance(std::span<const S> z) const {
    S acc = -offset_;
    for (std::size_t j = 0; j < unit_v_.size(); ++j) acc += z[j] * S(unit_v_[j]);
    return acc;
  }
  double distance(std::span<const double> z) const { return distance<double>(z); }

 private:
  Vec u_;
  Vec v_;
  Vec unit_v_;
  double offset_;  // <u, v>/||v||, precomputed so distance is one dot product
};

// Compact polyhedron as an intersection of half-spaces. Construction solves
// the Chebyshev LP and per-axis bounding LPs, rejecting empty or unbounded
// inputs; the result is immutable and safe to share across threads.
class Polyhedron {
 public:
  explicit Polyhedron(std::vector<HalfSpace> halfspaces);

  // Axis-aligned box [lo_1,hi_1] x ... x [lo_D,hi_D] as 2D half-spaces with
  // unit normals.
  static Polyhedron box(const Vec& lo, const Vec& hi);

  int dim() const { return dim_; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
  int num_facets() const { return static_cast<int>(halfspaces_.size()); }

  const Vec& center() const { return center_; }  // Chebyshev center
  double radius() const { return radius_; }      // inscribed-ball radius
  const Vec& bbox_lo() const { return bbox_lo_; }
  const Vec& bbox_hi() const { return bbox_hi_; }

  template <typename S>
  S facet_distance(int s, std::span<const S> z) const {
    return halfspaces_[static_cast<std::size_t>(s)].template distance<S>(z);
  }
  double facet_distance(int s, std::span<const double> z) const {
    return facet_distance<double>(s, z);
  }

  double min_distance(std::span<const double> z) const;
  bool contains(std::span<const double> z, double tol) const;
  std::vector<int> active_facets(std::span<const double> z, double tol) const;

 private:
  std::vector<HalfSpace> halfspaces_;
  int dim_;
  Vec center_;
  double radius_;
  Vec bbox_lo_;
  Vec bbox_hi_;
};

// Default absolute tolerance for boundary classification.
constexpr double kBoundaryTol = 1e-9;

// Recomputes the Chebyshev LP for an arbitrary facet list (no caching);
// the Polyhedron constructor uses this and callers normally want center().
struct ChebyshevResult {
  Vec center;
  double radius;
};
ChebyshevResult chebyshev_center(const std::vector<HalfSpace>& halfspaces);

}  // namespace polysde

#endif  // POLYSDE_GEOMETRY_HPP
