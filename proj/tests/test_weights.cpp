#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "polysde/errors.hpp"
#include "polysde/philox.hpp"
#include "polysde/weights.hpp"

using namespace polysde;

namespace {

// Independent scalar evaluation of the boundary weight for the unit
// interval: S = 2 facets with distances z and 1 - z. Written from the
// formula, no shared code with the library path.
double interval_weight_oracle(double z, double alpha, double beta) {
  const double d0 = z;
  const double d1 = 1.0 - z;
  const double e0 = std::exp(-d0), e1 = std::exp(-d1);
  const double s0 = e0 / (e0 + e1), s1 = e1 / (e0 + e1);
  const double prod = (s0 * std::tanh(alpha * d0)) * (s1 * std::tanh(alpha * d1));
  return std::tanh(beta * prod);
}

// Same for the unit square: distances (x, 1-x, y, 1-y).
double square_weight_oracle(double x, double y, double alpha, double beta) {
  const double d[4] = {x, 1.0 - x, y, 1.0 - y};
  double norm = 0.0;
  for (double di : d) norm += std::exp(-di);
  double prod = 1.0;
  for (double di : d) prod *= std::exp(-di) / norm * std::tanh(alpha * di);
  return std::tanh(beta * prod);
}

const WeightParams kDefault{10.0, 10.0};

}  // namespace

TEST_CASE("weight matches the independent interval oracle") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  for (double z : {0.01, 0.1, 0.25, 0.5, 0.77, 0.999}) {
    const double w = weight(box, kDefault, {&z, 1});
    CHECK(w == doctest::Approx(interval_weight_oracle(z, 10, 10)).epsilon(1e-12));
  }
  // Frozen value: tanh(10 * (0.5 * tanh(5))^2) at the midpoint.
  const double mid = 0.5;
  CHECK(weight(box, kDefault, {&mid, 1}) == doctest::Approx(0.98661).epsilon(1e-4));
}

TEST_CASE("weight matches the independent square oracle") {
  const Polyhedron sq = Polyhedron::box({0.0, 0.0}, {1.0, 1.0});
  for (const Vec z : {Vec{0.5, 0.5}, Vec{0.3, 0.8}, Vec{0.05, 0.6}}) {
    CHECK(weight(sq, kDefault, z) ==
          doctest::Approx(square_weight_oracle(z[0], z[1], 10, 10)).epsilon(1e-12));
  }
}

TEST_CASE("weight vanishes exactly on the boundary") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  for (double z : {0.0, 1.0}) {
    for (double alpha : {0.5, 10.0, 100.0}) {
      CHECK(weight(box, WeightParams{alpha, 10.0}, {&z, 1}) == 0.0);
    }
  }
  const Polyhedron sq = Polyhedron::box({0.0, 0.0}, {1.0, 1.0});
  const Vec edge = {0.0, 0.37};
  CHECK(weight(sq, kDefault, edge) == 0.0);
}

TEST_CASE("near-boundary distances snap to an exact zero weight") {
  // Points constructed with rounding dust (|d| ~ 1e-16) must still produce
  // weight 0; boundary samplers cannot always cancel exactly in floats.
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  const double dusty = 5e-14;
  CHECK(weight(box, kDefault, {&dusty, 1}) == 0.0);
  const double slightly_out = -5e-10;  // inside the default tolerance band
  CHECK(weight(box, kDefault, {&slightly_out, 1}) == 0.0);
}

TEST_CASE("weight rejects points beyond the domain tolerance") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  const double outside = -1e-3;
  CHECK_THROWS_AS(weight(box, kDefault, {&outside, 1}), DomainError);
}

TEST_CASE("interior weights lie in (0, 1] and saturate monotonically in beta") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  for (int i = 1; i < 64; ++i) {
    const double z = i / 64.0;
    const double w = weight(box, kDefault, {&z, 1});
    CHECK(w > 0.0);
    CHECK(w <= 1.0);
  }
  for (double z : {0.1, 0.5, 0.9}) {
    double prev = 0.0;
    for (double beta : {1.0, 5.0, 10.0, 50.0}) {
      const double w = weight(box, WeightParams{10.0, beta}, {&z, 1});
      CHECK(w >= prev);
      prev = w;
    }
  }
}

TEST_CASE("weight symmetry under reflection") {
  const Polyhedron sq = Polyhedron::box({0.0, 0.0}, {1.0, 1.0});
  for (const Vec z : {Vec{0.2, 0.7}, Vec{0.05, 0.05}, Vec{0.4, 0.9}}) {
    const Vec zr = {1.0 - z[0], 1.0 - z[1]};
    const Vec zs = {z[1], z[0]};
    CHECK(weight(sq, kDefault, z) == doctest::Approx(weight(sq, kDefault, zr)).epsilon(1e-12));
    CHECK(weight(sq, kDefault, z) == doctest::Approx(weight(sq, kDefault, zs)).epsilon(1e-12));
  }
}

TEST_CASE("sampled Lipschitz quotient stays bounded near the boundary") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  double worst = 0.0;
  for (std::uint32_t i = 0; i < 10000; ++i) {
    const double a = uniform_unit(11, i, 0, 0, rng_domain::kSampling);
    double b = a + 1e-5 * (uniform_unit(11, i, 1, 0, rng_domain::kSampling) - 0.5);
    b = std::min(1.0, std::max(0.0, b));
    if (a == b) continue;
    const double wa = weight(box, kDefault, {&a, 1});
    const double wb = weight(box, kDefault, {&b, 1});
    worst = std::max(worst, std::fabs(wa - wb) / std::fabs(a - b));
  }
  CHECK(std::isfinite(worst));
  // alpha * beta bounds the slope scale for the interval; a generous cap
  // just documents there is no blow-up.
  CHECK(worst < 1000.0);
}

TEST_CASE("weight gradient is zero at the symmetric point") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  const double mid = 0.5;
  const Vec g = weight_gradient(box, kDefault, {&mid, 1});
  CHECK(std::fabs(g[0]) < 1e-12);
}

TEST_CASE("weight gradient matches central differences") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  for (double z : {0.25, 0.6, 0.93}) {
    const Vec g = weight_gradient(box, kDefault, {&z, 1});
    const double zp = z + 1e-5, zm = z - 1e-5;
    const double fd =
        (weight(box, kDefault, {&zp, 1}) - weight(box, kDefault, {&zm, 1})) / 2e-5;
    CHECK(std::fabs(g[0] - fd) < 1e-6);
  }
  const Polyhedron sq = Polyhedron::box({0.0, 0.0}, {1.0, 1.0});
  const Vec z = {0.3, 0.5};
  const Vec g = weight_gradient(sq, kDefault, z);
  for (int d = 0; d < 2; ++d) {
    Vec zp = z, zm = z;
    zp[static_cast<std::size_t>(d)] += 1e-5;
    zm[static_cast<std::size_t>(d)] -= 1e-5;
    const double fd = (weight(sq, kDefault, zp) - weight(sq, kDefault, zm)) / 2e-5;
    CHECK(std::fabs(g[static_cast<std::size_t>(d)] - fd) < 1e-6);
  }
}

TEST_CASE("gradient on the boundary reports the one-sided case") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  const double edge = 0.0;
  bool on_boundary = false;
  const Vec g = weight_gradient(box, kDefault, {&edge, 1}, &on_boundary);
  CHECK(on_boundary);
  CHECK(std::isfinite(g[0]));
}

TEST_CASE("weight parameters are validated") {
  const Polyhedron box = Polyhedron::box({0.0}, {1.0});
  const double z = 0.5;
  CHECK_THROWS_AS(weight(box, WeightParams{0.0, 10.0}, {&z, 1}), ConfigError);
  CHECK_THROWS_AS(weight(box, WeightParams{10.0, -1.0}, {&z, 1}), ConfigError);
}
