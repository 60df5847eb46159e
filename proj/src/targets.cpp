#include "polysde/targets.hpp"

#include <cmath>

#include "polysde/dual.hpp"
#include "polysde/errors.hpp"

namespace polysde {

ScalarFieldPtr make_gauss_target(double mu, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("gauss target needs sigma > 0");
  return make_scalar_field(1, [mu, sigma](auto z) {
    using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(z)>::element_type>;
    const S diff = z[0] - S(mu);
    return -(diff * diff) / S(2.0 * sigma * sigma);
  });
}

ScalarFieldPtr make_bimodal_target() {
  return make_scalar_field(1, [](auto z) {
    using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(z)>::element_type>;
    using std::exp;
    using std::fmax;
    using std::fmin;
    using std::log1p;
    const S a = -((z[0] - S(0.3)) * (z[0] - S(0.3))) / S(0.005);
    const S b = -((z[0] - S(0.7)) * (z[0] - S(0.7))) / S(0.005);
    // log(e^a + e^b), max-subtracted.
    const S hi = fmax(a, b);
    const S lo = fmin(a, b);
    return hi + log1p(exp(lo - hi));
  });
}

ScalarFieldPtr make_target(const std::string& name, double mu, double sigma) {
  if (name == "gauss") return make_gauss_target(mu, sigma);
  if (name == "bimodal") return make_bimodal_target();
  throw ConfigError("unknown target density '" + name + "'");
}

}  // namespace polysde
