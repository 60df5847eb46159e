#include "polysde/weights.hpp"

namespace polysde {

Vec weight_gradient(const Polyhedron& poly, const WeightParams& p, std::span<const double> z,
                    bool* on_boundary, double domain_tol) {
  const std::size_t dim = static_cast<std::size_t>(poly.dim());
  if (on_boundary != nullptr) {
    *on_boundary = false;
    for (int s = 0; s < poly.num_facets(); ++s) {
      if (std::fabs(poly.facet_distance(s, z)) <= kDistanceSnapTol) *on_boundary = true;
    }
  }
  std::vector<Dual> zd(dim);
  Vec grad(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < dim; ++j) zd[j] = Dual(z[j], j == k ? 1.0 : 0.0);
    grad[k] = weight_at<Dual>(poly, p, zd, domain_tol).d;
  }
  return grad;
}

}  // namespace polysde
