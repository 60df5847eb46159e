#include "polysde/field.hpp"

namespace polysde {

std::vector<double> diag_jacobian(const Field& f, double t, std::span<const double> z) {
  const std::size_t dim = z.size();
  std::vector<Dual> zd(dim), out(dim);
  std::vector<double> diag(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < dim; ++j) zd[j] = Dual(z[j], j == k ? 1.0 : 0.0);
    f.eval(t, zd, out);
    diag[k] = out[k].d;
  }
  return diag;
}

std::vector<double> gradient(const ScalarField& f, std::span<const double> z) {
  const std::size_t dim = z.size();
  std::vector<Dual> zd(dim);
  std::vector<double> grad(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t j = 0; j < dim; ++j) zd[j] = Dual(z[j], j == k ? 1.0 : 0.0);
    grad[k] = f.eval(zd).d;
  }
  return grad;
}

}  // namespace polysde
