#include <doctest.h>

#include <cmath>
#include <memory>

#include "polysde/analysis.hpp"
#include "polysde/dynamics.hpp"
#include "polysde/errors.hpp"
#include "polysde/solvers.hpp"
#include "polysde/targets.hpp"

using namespace polysde;

namespace {

PolyhedronPtr interval() {
  return std::make_shared<const Polyhedron>(Polyhedron::box({0.0}, {1.0}));
}

PolyhedronPtr square() {
  return std::make_shared<const Polyhedron>(Polyhedron::box({0.0, 0.0}, {1.0, 1.0}));
}

FieldPtr constant_field(int dim, double value) {
  return make_field(dim, [value, dim](double, auto, auto out) {
    for (int j = 0; j < dim; ++j) out[static_cast<std::size_t>(j)] = value;
  });
}

DynamicsSpec constant_spec(int dim, double h, double g,
                           Calculus calc = Calculus::Ito) {
  return {constant_field(dim, h), constant_field(dim, g), calc, dim};
}

WspConfig default_wsp(const PolyhedronPtr& poly, std::uint64_t seed) {
  WspConfig cfg;
  const int d = poly->dim();
  std::vector<int> sizes = {d, 64, 64, 64, d};
  cfg.base = make_mlp_dynamics(sizes, Activation::Celu, seed);
  cfg.poly = poly;
  return cfg;
}

}  // namespace

TEST_CASE("center pull examples") {
  const auto box = interval();
  const Vec zero_at_center = center_pull(*box, 1.0, 0.01, box->center());
  CHECK(zero_at_center[0] == 0.0);

  const double z = 1.0;
  const Vec pull = center_pull(*box, 1.0, 0.01, {&z, 1});
  CHECK(pull[0] == doctest::Approx(-0.5 / 0.51).epsilon(1e-12));
  CHECK(std::fabs(pull[0]) < 1.0);  // norm strictly below gamma

  const auto sq = square();
  const Vec edge = {1.0, 0.5};
  const Vec pull2 = center_pull(*sq, 2.0, 1e-2, edge);
  CHECK(pull2[0] == doctest::Approx(-0.5 * 2.0 / 0.51).epsilon(1e-12));
  CHECK(pull2[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("WSP dynamics on the boundary: diffusion zero, drift is the pull") {
  const auto box = interval();
  for (std::uint64_t seed : {0ull, 1ull, 2ull}) {
    WspConfig cfg = default_wsp(box, seed);
    const DynamicsSpec spec = make_wsp(cfg);
    for (double z : {0.0, 1.0}) {
      Vec h(1), g(1);
      spec.drift->eval(0.3, {&z, 1}, h);
      spec.diffusion->eval(0.3, {&z, 1}, g);
      CHECK(g[0] == 0.0);
      const Vec pull = center_pull(*box, cfg.gamma, cfg.eps, {&z, 1});
      CHECK(h[0] == pull[0]);  // exact: w is exactly zero there
    }
  }
}

TEST_CASE("WSP with a zero base leaves only the weighted pull") {
  const auto box = interval();
  WspConfig cfg;
  cfg.base = constant_spec(1, 0.0, 0.0);
  cfg.poly = box;
  const DynamicsSpec spec = make_wsp(cfg);
  for (double z : {0.1, 0.5, 0.9}) {
    Vec h(1), g(1);
    spec.drift->eval(0.0, {&z, 1}, h);
    spec.diffusion->eval(0.0, {&z, 1}, g);
    const double w = weight(*box, cfg.weights, {&z, 1});
    const Vec pull = center_pull(*box, cfg.gamma, cfg.eps, {&z, 1});
    CHECK(h[0] == doctest::Approx((1.0 - w) * pull[0]).epsilon(1e-15));
    CHECK(g[0] == 0.0);
  }
}

TEST_CASE("WSP blend matches an independently coded scalar formula") {
  const auto box = interval();
  WspConfig cfg = default_wsp(box, 0);
  const DynamicsSpec spec = make_wsp(cfg);

  const double z = 0.5;
  Vec h(1), g(1), bh(1), bg(1);
  spec.drift->eval(0.0, {&z, 1}, h);
  spec.diffusion->eval(0.0, {&z, 1}, g);
  cfg.base.drift->eval(0.0, {&z, 1}, bh);
  cfg.base.diffusion->eval(0.0, {&z, 1}, bg);

  // Scalar re-implementation for K = [0,1]: distances z and 1-z.
  const double d0 = z, d1 = 1.0 - z;
  const double e0 = std::exp(-d0), e1 = std::exp(-d1);
  const double w = std::tanh(10.0 * (e0 / (e0 + e1) * std::tanh(10.0 * d0)) *
                             (e1 / (e0 + e1) * std::tanh(10.0 * d1)));
  const double pull = 1.0 * (0.5 - z) / (std::fabs(0.5 - z) + 0.01);
  CHECK(h[0] == doctest::Approx(w * bh[0] + (1.0 - w) * pull).epsilon(1e-12));
  CHECK(g[0] == doctest::Approx(w * bg[0]).epsilon(1e-12));
}

TEST_CASE("WSP evaluation outside the domain tolerance is an error") {
  const auto box = interval();
  WspConfig cfg = default_wsp(box, 0);
  cfg.domain_tol = 1e-6;
  const DynamicsSpec spec = make_wsp(cfg);
  Vec out(1);
  const double inside_band = -5e-7;
  CHECK_NOTHROW(spec.drift->eval(0.0, {&inside_band, 1}, out));
  const double outside = -1e-3;
  CHECK_THROWS_AS(spec.drift->eval(0.0, {&outside, 1}, out), DomainError);
}

TEST_CASE("boundary vanishing across seeds and facets of the square") {
  const auto sq = square();
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 3ull, 4ull}) {
    const DynamicsSpec spec = make_wsp(default_wsp(sq, seed));
    for (int facet = 0; facet < sq->num_facets(); ++facet) {
      for (std::uint32_t i = 0; i < 250; ++i) {
        const auto z = sample_on_facet(*sq, facet, seed * 97 + 13, i);
        REQUIRE(z.has_value());
        Vec h(2), g(2);
        spec.drift->eval(0.0, *z, h);
        spec.diffusion->eval(0.0, *z, g);
        CHECK(std::fabs(g[0]) <= 1e-300);
        CHECK(std::fabs(g[1]) <= 1e-300);
        const Vec& v = sq->halfspaces()[static_cast<std::size_t>(facet)].unit_normal();
        CHECK(h[0] * v[0] + h[1] * v[1] >= -1e-12);
      }
    }
  }
}

TEST_CASE("WSP drift approaches the base drift in the deep interior") {
  const auto box = interval();
  WspConfig cfg = default_wsp(box, 1);
  const DynamicsSpec spec = make_wsp(cfg);
  for (int i = 1; i < 32; ++i) {
    const double z = i / 32.0;
    Vec h(1), bh(1);
    spec.drift->eval(0.0, {&z, 1}, h);
    cfg.base.drift->eval(0.0, {&z, 1}, bh);
    const double w = weight(*box, cfg.weights, {&z, 1});
    const double bound = (1.0 - w) * (std::fabs(bh[0]) + cfg.gamma);
    CHECK(std::fabs(h[0] - bh[0]) <= bound + 1e-12);
  }
}

TEST_CASE("sigmoid-transformed coefficients by hand") {
  // h ~ 0, g ~ 1: drift at z = 0.5 vanishes with the cubic; diffusion 0.25.
  const DynamicsSpec flat = constant_spec(1, 0.0, 1.0);
  const DynamicsSpec spec = make_sigmoid_transformed(flat);
  Vec out(1);
  const double half = 0.5;
  spec.drift->eval(0.0, {&half, 1}, out);
  CHECK(out[0] == doctest::Approx(0.0).epsilon(1e-15));
  spec.diffusion->eval(0.0, {&half, 1}, out);
  CHECK(out[0] == doctest::Approx(0.25).epsilon(1e-15));

  // h ~ 1, g ~ 0 at z = 0.99: drift is z - z^2 = 0.0099.
  const DynamicsSpec drifty = make_sigmoid_transformed(constant_spec(1, 1.0, 0.0));
  const double z99 = 0.99;
  drifty.drift->eval(0.0, {&z99, 1}, out);
  CHECK(out[0] == doctest::Approx(0.0099).epsilon(1e-12));

  // Both coefficients vanish toward the boundary (the sticking mechanism).
  const DynamicsSpec both = make_sigmoid_transformed(constant_spec(1, 1.0, 1.0));
  double prev_drift = 1.0, prev_diff = 1.0;
  for (double z : {1e-2, 1e-4, 1e-6, 1e-8}) {
    both.drift->eval(0.0, {&z, 1}, out);
    const double drift_mag = std::fabs(out[0]);
    both.diffusion->eval(0.0, {&z, 1}, out);
    const double diff_mag = std::fabs(out[0]);
    CHECK(drift_mag < prev_drift);
    CHECK(diff_mag < prev_diff);
    prev_drift = drift_mag;
    prev_diff = diff_mag;
  }
  CHECK(prev_diff < 1e-7);
}

TEST_CASE("sigmoid transform is singular at the boundary") {
  const DynamicsSpec spec = make_sigmoid_transformed(constant_spec(1, 1.0, 1.0));
  Vec out(1);
  for (double z : {0.0, 1.0}) {
    CHECK_THROWS_AS(spec.drift->eval(0.0, {&z, 1}, out), DomainError);
  }
}

TEST_CASE("absorbed parameterization by hand") {
  const DynamicsSpec zero = make_absorbed(constant_field(1, 0.0), constant_field(1, 0.0));
  Vec out(1);
  const double q = 0.25;
  zero.drift->eval(0.0, {&q, 1}, out);
  CHECK(out[0] == 0.0);
  zero.diffusion->eval(0.0, {&q, 1}, out);
  CHECK(out[0] == 0.0);

  const DynamicsSpec ones = make_absorbed(constant_field(1, 1.0), constant_field(1, 1.0));
  ones.drift->eval(0.0, {&q, 1}, out);
  CHECK(out[0] == doctest::Approx(0.234375).epsilon(1e-15));
  ones.diffusion->eval(0.0, {&q, 1}, out);
  CHECK(out[0] == doctest::Approx(0.1875).epsilon(1e-15));

  const double edge = 1.0;  // polynomial roots: no logit, no error
  ones.drift->eval(0.0, {&edge, 1}, out);
  CHECK(out[0] == 0.0);
  ones.diffusion->eval(0.0, {&edge, 1}, out);
  CHECK(out[0] == 0.0);
}

TEST_CASE("stationary drift: Ornstein-Uhlenbeck reduction") {
  const double sigma = 0.7, mu = 0.3, s = 0.2;
  StationaryConfig cfg;
  cfg.diffusion = constant_field(1, sigma);
  cfg.log_ptilde = make_gauss_target(mu, s);
  cfg.dim = 1;
  for (double z : {0.05, 0.3, 0.5, 0.95}) {
    const Vec h = stationary_drift(cfg, {&z, 1});
    const double expected = -sigma * sigma * (z - mu) / (2.0 * s * s);
    CHECK(h[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("stationary drift: g(z) = z with flat density gives h = z") {
  StationaryConfig cfg;
  cfg.diffusion = make_field(1, [](double, auto z, auto out) { out[0] = z[0]; });
  cfg.log_ptilde = make_scalar_field(1, [](auto z) {
    using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(z)>::element_type>;
    return S(0.0) * z[0];
  });
  cfg.dim = 1;
  for (double z : {0.11, 0.42, 0.9}) {
    CHECK(stationary_drift(cfg, {&z, 1})[0] == doctest::Approx(z).epsilon(1e-14));
  }

  StationaryConfig off = cfg;
  off.diffusion = constant_field(1, 0.0);
  const double z = 0.5;
  CHECK(stationary_drift(off, {&z, 1})[0] == 0.0);
}

TEST_CASE("stationary zero-flux residual on a fine grid") {
  const auto box = interval();
  const DynamicsSpec wsp = make_wsp(default_wsp(box, 0));
  Vec grid(1000);
  for (int i = 0; i < 1000; ++i) grid[static_cast<std::size_t>(i)] = (i + 1) / 1001.0;

  for (const ScalarFieldPtr target :
       {make_gauss_target(0.5, 0.1), make_bimodal_target()}) {
    StationaryConfig cfg{wsp.diffusion, target, 1};
    CHECK(stationary_flux_max(cfg, grid) < 1e-6);
  }
}

TEST_CASE("flux residual is invariant under rescaling the density") {
  const auto box = interval();
  const DynamicsSpec wsp = make_wsp(default_wsp(box, 2));
  Vec grid(200);
  for (int i = 0; i < 200; ++i) grid[static_cast<std::size_t>(i)] = (i + 1) / 201.0;
  for (double log_c : {-9.2, 0.0, 9.2}) {
    const ScalarFieldPtr scaled = make_scalar_field(1, [log_c](auto z) {
      using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(z)>::element_type>;
      const S diff = z[0] - S(0.5);
      return -(diff * diff) / S(2.0 * 0.1 * 0.1) + S(log_c);
    });
    StationaryConfig cfg{wsp.diffusion, scaled, 1};
    CHECK(stationary_flux_max(cfg, grid) < 1e-6);
  }
}

TEST_CASE("Stratonovich correction: constant diffusion is untouched") {
  const DynamicsSpec strat = constant_spec(1, 0.7, 0.3, Calculus::Stratonovich);
  const DynamicsSpec ito = stratonovich_to_ito(strat);
  CHECK(ito.calculus == Calculus::Ito);
  Vec out(1);
  const double z = 0.4;
  ito.drift->eval(0.0, {&z, 1}, out);
  CHECK(out[0] == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("Stratonovich correction: g(z) = z adds z/2") {
  DynamicsSpec strat;
  strat.dim = 1;
  strat.calculus = Calculus::Stratonovich;
  strat.drift = constant_field(1, 0.0);
  strat.diffusion = make_field(1, [](double, auto z, auto out) { out[0] = z[0]; });
  const DynamicsSpec ito = stratonovich_to_ito(strat);
  Vec out(1);
  for (double z : {0.2, 1.0, 3.7}) {
    ito.drift->eval(0.0, {&z, 1}, out);
    CHECK(out[0] == doctest::Approx(0.5 * z).epsilon(1e-12));
  }
}

TEST_CASE("conversion round-trip recovers the drift") {
  const auto box = interval();
  WspConfig cfg = default_wsp(box, 3);
  cfg.base.calculus = Calculus::Stratonovich;
  const DynamicsSpec strat = make_wsp(cfg);
  const DynamicsSpec back = ito_to_stratonovich(stratonovich_to_ito(strat));
  Vec a(1), b(1);
  for (double z : {0.15, 0.5, 0.92}) {
    strat.drift->eval(0.0, {&z, 1}, a);
    back.drift->eval(0.0, {&z, 1}, b);
    CHECK(b[0] == doctest::Approx(a[0]).epsilon(1e-12));
  }
}

TEST_CASE("correction vanishes on the boundary (inward drift preserved)") {
  const auto box = interval();
  WspConfig cfg = default_wsp(box, 0);
  cfg.base.calculus = Calculus::Stratonovich;
  const DynamicsSpec strat = make_wsp(cfg);
  const DynamicsSpec ito = stratonovich_to_ito(strat);
  Vec corrected(1), original(1);
  for (double z : {0.0, 1.0}) {
    strat.drift->eval(0.0, {&z, 1}, original);
    ito.drift->eval(0.0, {&z, 1}, corrected);
    CHECK(corrected[0] == doctest::Approx(original[0]).epsilon(1e-15));
  }
}

TEST_CASE("already-Ito input is returned unchanged with a warning flag") {
  const DynamicsSpec ito = constant_spec(1, 1.0, 1.0, Calculus::Ito);
  bool warned = false;
  const DynamicsSpec same = stratonovich_to_ito(ito, &warned);
  CHECK(warned);
  CHECK(same.drift == ito.drift);
}

TEST_CASE("pathwise equivalence of the sigmoid pushforward with unit diffusion") {
  // y-SDE: dy = h(y) dt + dB. Mapping Euler-Maruyama y-paths through the
  // sigmoid must track the directly simulated transformed SDE with shared
  // noise to O(dt).
  const DynamicsSpec base = [] {
    DynamicsSpec spec;
    spec.dim = 1;
    spec.calculus = Calculus::Ito;
    const MlpParams net = mlp_init({1, 64, 64, 64, 1}, Activation::Celu, 5);
    spec.drift = make_field(1, [net](double, auto y, auto out) {
      using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(y)>::element_type>;
      mlp_eval<S>(net, y, out);
    });
    spec.diffusion = constant_field(1, 1.0);
    return spec;
  }();
  const DynamicsSpec transformed = make_sigmoid_transformed(base);

  const double dt = 1e-3, T = 1.0;
  double max_gap = 0.0;
  for (std::uint32_t sample = 0; sample < 10; ++sample) {
    const NoiseStream stream{77, sample, 1, dt, 1000};
    const double y0 = 0.0;
    const Trajectory y_path = euler_maruyama(base, {&y0, 1}, 0.0, T, dt, stream);
    const double z0 = 0.5;  // sigmoid(0)
    const Trajectory z_path = euler_maruyama(transformed, {&z0, 1}, 0.0, T, dt, stream);
    for (std::size_t i = 0; i < y_path.num_points(); ++i) {
      const double mapped = 1.0 / (1.0 + std::exp(-y_path.state(i)[0]));
      max_gap = std::max(max_gap, std::fabs(mapped - z_path.state(i)[0]));
    }
  }
  CHECK(max_gap < 0.05);
}
