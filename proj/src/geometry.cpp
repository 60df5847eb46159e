#include "polysde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "polysde/errors.hpp"
#include "polysde/simplex.hpp"

namespace polysde {

HalfSpace::HalfSpace(Vec u, Vec v) : u_(std::move(u)), v_(std::move(v)) {
  if (u_.size() != v_.size() || u_.empty()) {
    throw GeometryError("half-space anchor and normal must have equal nonzero dimension");
  }
  double norm_sq = 0.0;
  for (double x : v_) norm_sq += x * x;
  const double norm = std::sqrt(norm_sq);
  if (norm <= 1e-12) throw GeometryError("degenerate half-space normal (norm <= 1e-12)");
  unit_v_.resize(v_.size());
  for (std::size_t j = 0; j < v_.size(); ++j) unit_v_[j] = v_[j] / norm;
  offset_ = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) offset_ += u_[j] * unit_v_[j];
}

namespace {

ChebyshevResult solve_chebyshev(const std::vector<HalfSpace>& hs, int dim) {
  // maximize r  s.t.  <unit_v_s, z> - r >= <u_s, unit_v_s>
  const std::size_t n = static_cast<std::size_t>(dim) + 1;
  std::vector<double> c(n, 0.0);
  c[n - 1] = 1.0;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  a.reserve(hs.size());
  for (const HalfSpace& h : hs) {
    std::vector<double> row(n, 0.0);
    double rhs = 0.0;
    for (int j = 0; j < dim; ++j) {
      row[static_cast<std::size_t>(j)] = -h.unit_normal()[static_cast<std::size_t>(j)];
      rhs -= h.anchor()[static_cast<std::size_t>(j)] * h.unit_normal()[static_cast<std::size_t>(j)];
    }
    row[n - 1] = 1.0;
    a.push_back(std::move(row));
    b.push_back(rhs);
  }
  const LpResult lp = simplex_maximize(c, a, b);
  if (lp.status == LpStatus::Unbounded) throw GeometryError("polyhedron not compact");
  if (lp.status == LpStatus::Infeasible) throw GeometryError("empty polyhedron");
  if (lp.objective <= 0.0) throw GeometryError("empty polyhedron");
  ChebyshevResult res;
  res.center.assign(lp.x.begin(), lp.x.begin() + dim);
  res.radius = lp.objective;
  return res;
}

// max (sign * z_axis) over K; throws if unbounded in that direction.
double solve_extent(const std::vector<HalfSpace>& hs, int dim, int axis, double sign) {
  const std::size_t n = static_cast<std::size_t>(dim);
  std::vector<double> c(n, 0.0);
  c[static_cast<std::size_t>(axis)] = sign;
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const HalfSpace& h : hs) {
    std::vector<double> row(n, 0.0);
    double rhs = 0.0;
    for (int j = 0; j < dim; ++j) {
      row[static_cast<std::size_t>(j)] = -h.unit_normal()[static_cast<std::size_t>(j)];
      rhs -= h.anchor()[static_cast<std::size_t>(j)] * h.unit_normal()[static_cast<std::size_t>(j)];
    }
    a.push_back(std::move(row));
    b.push_back(rhs);
  }
  const LpResult lp = simplex_maximize(c, a, b);
  if (lp.status == LpStatus::Unbounded) throw GeometryError("polyhedron not compact");
  if (lp.status == LpStatus::Infeasible) throw GeometryError("empty polyhedron");
  return lp.objective;  // equals max of sign * z_axis
}

}  // namespace

ChebyshevResult chebyshev_center(const std::vector<HalfSpace>& halfspaces) {
  if (halfspaces.empty()) throw GeometryError("polyhedron needs at least one half-space");
  return solve_chebyshev(halfspaces, halfspaces.front().dim());
}

Polyhedron::Polyhedron(std::vector<HalfSpace> halfspaces)
    : halfspaces_(std::move(halfspaces)) {
  if (halfspaces_.empty()) throw GeometryError("polyhedron needs at least one half-space");
  dim_ = halfspaces_.front().dim();
  for (const HalfSpace& h : halfspaces_) {
    if (h.dim() != dim_) throw GeometryError("half-space dimensions disagree");
  }
  ChebyshevResult cheb = solve_chebyshev(halfspaces_, dim_);
  center_ = std::move(cheb.center);
  radius_ = cheb.radius;
  bbox_lo_.resize(static_cast<std::size_t>(dim_));
  bbox_hi_.resize(static_cast<std::size_t>(dim_));
  for (int j = 0; j < dim_; ++j) {
    bbox_hi_[static_cast<std::size_t>(j)] = solve_extent(halfspaces_, dim_, j, 1.0);
    bbox_lo_[static_cast<std::size_t>(j)] = -solve_extent(halfspaces_, dim_, j, -1.0);
  }
}

Polyhedron Polyhedron::box(const Vec& lo, const Vec& hi) {
  if (lo.size() != hi.size() || lo.empty()) {
    throw GeometryError("box bounds must have equal nonzero dimension");
  }
  const int dim = static_cast<int>(lo.size());
  std::vector<HalfSpace> hs;
  hs.reserve(2 * lo.size());
  for (int j = 0; j < dim; ++j) {
    if (!(lo[static_cast<std::size_t>(j)] < hi[static_cast<std::size_t>(j)])) {
      throw GeometryError("box needs lo < hi in every coordinate");
    }
    Vec n_lo(lo.size(), 0.0), n_hi(lo.size(), 0.0);
    n_lo[static_cast<std::size_t>(j)] = 1.0;
    n_hi[static_cast<std::size_t>(j)] = -1.0;
    hs.emplace_back(lo, n_lo);
    hs.emplace_back(hi, n_hi);
  }
  return Polyhedron(std::move(hs));
}

double Polyhedron::min_distance(std::span<const double> z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const HalfSpace& h : halfspaces_) best = std::min(best, h.distance(z));
  return best;
}

bool Polyhedron::contains(std::span<const double> z, double tol) const {
  return min_distance(z) >= -tol;
}

std::vector<int> Polyhedron::active_facets(std::span<const double> z, double tol) const {
  std::vector<int> active;
  for (int s = 0; s < num_facets(); ++s) {
    if (std::fabs(facet_distance(s, z)) <= tol) active.push_back(s);
  }
  return active;
}

}  // namespace polysde
