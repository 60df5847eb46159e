#ifndef POLYSDE_TARGETS_HPP
#define POLYSDE_TARGETS_HPP

#include <string>

#include "polysde/field.hpp"

namespace polysde {

// Builtin unnormalized 1D log-densities for stationary experiments.
//   gauss:   log ptilde(z) = -(z - mu)^2 / (2 s^2)
//   bimodal: log ptilde(z) = log(e^{-(z-0.3)^2/0.005} + e^{-(z-0.7)^2/0.005})
ScalarFieldPtr make_gauss_target(double mu, double sigma);
ScalarFieldPtr make_bimodal_target();

// Lookup by config name ("gauss" takes mu/sigma, "bimodal" none).
ScalarFieldPtr make_target(const std::string& name, double mu = 0.5, double sigma = 0.1);

}  // namespace polysde

#endif  // POLYSDE_TARGETS_HPP
