#ifndef POLYSDE_DYNAMICS_HPP
#define POLYSDE_DYNAMICS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "polysde/field.hpp"
#include "polysde/geometry.hpp"
#include "polysde/mlp.hpp"
#include "polysde/weights.hpp"

namespace polysde {

enum class Calculus { Ito, Stratonovich };

// A drift/diffusion pair with diagonal noise. Diffusion outputs are
// componentwise nonnegative on the domain of definition.
struct DynamicsSpec {
  FieldPtr drift;
  FieldPtr diffusion;
  Calculus calculus = Calculus::Ito;
  int dim = 0;
};

using PolyhedronPtr = std::shared_ptr<const Polyhedron>;

// Weighted-sums blend of an unconstrained base with constraint-satisfying
// boundary dynamics: drift -> w*h + (1-w)*c_h, diffusion -> w*g.
struct WspConfig {
  DynamicsSpec base;
  PolyhedronPtr poly;
  WeightParams weights;
  double gamma = 1.0;  // magnitude of the center pull
  double eps = 0.01;   // pull regularizer (avoids the unit-vector kink at z*)
  // Points farther outside K than this are a hard evaluation error.
  // Simulations use the membership-measurement tolerance (1e-6) so a
  // sub-tolerance discretization overshoot behaves like a boundary point
  // instead of crashing; violations are still measured on the raw states.
  double domain_tol = kBoundaryTol;
};

// Autonomous diffusion plus unnormalized log-density; the drift that makes
// the pair stationary is derived, not configured.
struct StationaryConfig {
  FieldPtr diffusion;
  ScalarFieldPtr log_ptilde;
  int dim = 0;
};

// Inward pull gamma * (z* - z) / (||z* - z|| + eps) toward the Chebyshev
// center; norm strictly below gamma, zero at the center itself.
template <typename S>
void center_pull_into(const Polyhedron& poly, double gamma, double eps, std::span<const S> z,
                      std::span<S> out) {
  using std::sqrt;
  const Vec& center = poly.center();
  S sum(0.0);
  for (std::size_t j = 0; j < z.size(); ++j) {
    const S diff = S(center[j]) - z[j];
    sum += diff * diff;
  }
  if (value_of(sum) == 0.0) {
    // Exactly at the center the pull is zero with slope -gamma/eps.
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = S(gamma / eps) * (S(center[j]) - z[j]);
    return;
  }
  const S scale = S(gamma) / (sqrt(sum) + S(eps));
  for (std::size_t j = 0; j < z.size(); ++j) out[j] = scale * (S(center[j]) - z[j]);
}

Vec center_pull(const Polyhedron& poly, double gamma, double eps, std::span<const double> z);

DynamicsSpec make_wsp(const WspConfig& cfg);

// 1D pushforward of a free-space SDE through a sigmoid, expressed in the
// constrained coordinate. Ito keeps the second-order polynomial drift term;
// Stratonovich uses the plain chain rule. Evaluation requires z strictly
// inside (0, 1) since the base dynamics are read at logit(z).
DynamicsSpec make_sigmoid_transformed(const DynamicsSpec& base_y,
                                      Calculus calculus = Calculus::Ito);

// Same polynomial structure with h, g read directly at z (the base nets
// absorb the inverse sigmoid); bounded whenever h and g are bounded.
DynamicsSpec make_absorbed(FieldPtr h, FieldPtr g, Calculus calculus = Calculus::Ito);

// Drift that zeroes the per-dimension stationary Fokker-Planck flux:
//   h^d = g^d * dg^d/dz^d + (1/2) * (g^d)^2 * d(log ptilde)/dz^d.
Vec stationary_drift(const StationaryConfig& cfg, std::span<const double> z);

// Wraps the construction as an autonomous Ito spec for simulation.
DynamicsSpec make_stationary(const StationaryConfig& cfg);

// Ito drift equivalent to a Stratonovich spec:
//   h_ito = h + (1/2) * diag(grad g) .* g,  diffusion unchanged.
// An already-Ito input is returned as-is with `*warned` set when provided.
DynamicsSpec stratonovich_to_ito(const DynamicsSpec& spec, bool* warned = nullptr);

// Inverse correction (subtracts the same term).
DynamicsSpec ito_to_stratonovich(const DynamicsSpec& spec, bool* warned = nullptr);

// Unconstrained MLP dynamics: drift is a raw network over z, diffusion a
// network post-composed with softplus so outputs are strictly positive.
// Drift and diffusion nets get distinct sub-seeds derived from `seed`.
DynamicsSpec make_mlp_dynamics(const std::vector<int>& sizes, Activation activation,
                               std::uint64_t seed, Calculus calculus = Calculus::Ito);

// Sub-seed derivation for independent networks / streams under one
// user-facing seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t role);

}  // namespace polysde

#endif  // POLYSDE_DYNAMICS_HPP
