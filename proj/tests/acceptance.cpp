// Acceptance suite: one criterion per numbered block, each printing a
// single PASS/FAIL line. Exit status is the number of failed criteria.
//
// `--write-golden` refreshes the recorded regression files (escape
// outcomes and sticking statistics) instead of comparing against them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polysde/analysis.hpp"
#include "polysde/philox.hpp"
#include "polysde/dynamics.hpp"
#include "polysde/runner.hpp"
#include "polysde/solvers.hpp"
#include "polysde/targets.hpp"

using namespace polysde;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
const std::string kGoldenDir = std::string(POLYSDE_TEST_DIR) + "/golden";

bool g_write_golden = false;
int g_failures = 0;

struct Criterion {
  std::string label;
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }

  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

void run_criterion(const std::string& label, const std::function<void(Criterion&)>& body,
                   double runtime_limit_s = 0.0) {
  Criterion c{label};
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (runtime_limit_s > 0.0) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "runtime %.1f s > limit %.0f s", elapsed, runtime_limit_s);
    c.require(elapsed < runtime_limit_s, buf);
  }
  std::printf("[%s] %s (%.1f s)%s%s\n", c.ok ? "PASS" : "FAIL", label.c_str(), elapsed,
              c.detail.empty() ? "" : " -- ", c.detail.c_str());
  std::fflush(stdout);
  if (!c.ok) ++g_failures;
}

PolyhedronPtr unit_interval() {
  return std::make_shared<const Polyhedron>(Polyhedron::box({0.0}, {1.0}));
}

PolyhedronPtr right_triangle() {
  std::vector<HalfSpace> hs;
  hs.emplace_back(Vec{0.0, 0.0}, Vec{1.0, 0.0});
  hs.emplace_back(Vec{0.0, 0.0}, Vec{0.0, 1.0});
  hs.emplace_back(Vec{1.0, 0.0}, Vec{-1.0, -1.0});
  return std::make_shared<const Polyhedron>(Polyhedron(std::move(hs)));
}

DynamicsSpec mlp_base(int dim, std::uint64_t seed, Calculus calc = Calculus::Ito) {
  return make_mlp_dynamics({dim, 64, 64, 64, dim}, Activation::Celu, seed, calc);
}

DynamicsSpec wsp_spec(const PolyhedronPtr& poly, std::uint64_t seed,
                      Calculus calc = Calculus::Ito) {
  WspConfig cfg;
  cfg.base = mlp_base(poly->dim(), seed, calc);
  cfg.poly = poly;
  cfg.domain_tol = 1e-6;
  return make_wsp(cfg);
}

const std::vector<std::uint64_t> kSeeds = {0, 1, 2, 3, 4};

SimProtocol fig2_protocol(SimProtocol::Scheme scheme) {
  SimProtocol p;
  p.scheme = scheme;
  p.horizon = 5.0;
  p.dt = 1e-3;
  return p;
}

double trajectory_std(const Trajectory& t) {
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < t.num_points(); ++i) {
    sum += t.state(i)[0];
    sum_sq += t.state(i)[0] * t.state(i)[0];
  }
  const double n = static_cast<double>(t.num_points());
  return std::sqrt(std::max(0.0, sum_sq / n - (sum / n) * (sum / n)));
}

// ---------------------------------------------------------------- criteria

void criterion_1_wsp_viability(Criterion& c) {
  const auto poly = unit_interval();
  const SpecFactory factory = [&poly](std::uint64_t seed) { return wsp_spec(poly, seed); };
  const double z0 = 0.99;
  const auto trajs =
      run_grid(factory, kSeeds, 3, {&z0, 1}, fig2_protocol(SimProtocol::Scheme::Milstein));
  c.require(trajs.size() == 15, "expected 15 trajectories");
  long states = 0;
  double worst = 0.0;
  for (const Trajectory& t : trajs) {
    const ViabilityReport rep = viability(t, *poly, 1e-6);
    states += rep.n_points;
    worst = std::max(worst, rep.max_violation);
    c.require(rep.fraction_in_k == 1.0, "trajectory left K");
  }
  c.require(states == 15 * 5001, "wrong state count");
  c.require(worst <= 1e-6, "max violation " + std::to_string(worst));
}

void criterion_2_unconstrained_escape(Criterion& c) {
  const auto poly = unit_interval();
  const SpecFactory factory = [](std::uint64_t seed) { return mlp_base(1, seed); };
  const double z0 = 0.99;
  const auto trajs =
      run_grid(factory, kSeeds, 3, {&z0, 1}, fig2_protocol(SimProtocol::Scheme::Milstein));

  std::map<std::uint64_t, double> first_exit;  // min over the seed's samples
  for (const Trajectory& t : trajs) {
    const ViabilityReport rep = viability(t, *poly, 1e-6);
    if (rep.first_exit_time) {
      auto it = first_exit.find(t.meta.seed);
      if (it == first_exit.end() || *rep.first_exit_time < it->second) {
        first_exit[t.meta.seed] = *rep.first_exit_time;
      }
    }
  }
  c.require(first_exit.size() >= 3,
            "only " + std::to_string(first_exit.size()) + " of 5 seeds escaped");

  const std::string path = kGoldenDir + "/escape.txt";
  if (g_write_golden) {
    std::ofstream out(path);
    for (std::uint64_t seed : kSeeds) {
      const auto it = first_exit.find(seed);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%llu %d %.17g\n",
                    static_cast<unsigned long long>(seed), it != first_exit.end() ? 1 : 0,
                    it != first_exit.end() ? it->second : -1.0);
      out << buf;
    }
    return;
  }
  std::ifstream in(path);
  c.require(static_cast<bool>(in), "golden file missing: " + path);
  if (!in) return;
  std::uint64_t seed;
  int escaped;
  double t_exit;
  while (in >> seed >> escaped >> t_exit) {
    const auto it = first_exit.find(seed);
    const bool now = it != first_exit.end();
    c.require(now == (escaped == 1),
              "seed " + std::to_string(seed) + " escape outcome changed");
    if (now && escaped == 1) {
      c.require(std::fabs(it->second - t_exit) <= 1e-9,
                "seed " + std::to_string(seed) + " exit time drifted");
    }
  }
}

void criterion_3_sigmoid_sticking(Criterion& c) {
  // Analytic coefficient ratio of the vanishing drift multiplier.
  const double at_edge = 0.99 - 0.99 * 0.99;
  const double at_mid = 0.5 - 0.5 * 0.5;
  c.require(std::fabs(at_edge - 0.0099) <= 1e-12, "z - z^2 at 0.99");
  c.require(std::fabs(at_mid - 0.25) <= 1e-12, "z - z^2 at 0.5");
  c.require(std::fabs(at_mid / at_edge - 25.252525252525252) <= 1e-9, "coefficient ratio");

  const auto poly = unit_interval();
  const double z0 = 0.99;
  const SpecFactory absorbed = [](std::uint64_t seed) {
    const DynamicsSpec base = mlp_base(1, seed);
    return make_absorbed(base.drift, base.diffusion);
  };
  const SpecFactory wsp = [&poly](std::uint64_t seed) { return wsp_spec(poly, seed); };
  const SimProtocol protocol = fig2_protocol(SimProtocol::Scheme::Milstein);
  const auto absorbed_trajs = run_grid(absorbed, kSeeds, 3, {&z0, 1}, protocol);
  const auto wsp_trajs = run_grid(wsp, kSeeds, 3, {&z0, 1}, protocol);

  std::vector<double> std_absorbed, std_wsp;
  for (std::size_t j = 0; j < absorbed_trajs.size(); ++j) {
    std_absorbed.push_back(trajectory_std(absorbed_trajs[j]));
    std_wsp.push_back(trajectory_std(wsp_trajs[j]));
    c.require(std_absorbed.back() < std_wsp.back(),
              "absorbed path wanders more than WSP at job " + std::to_string(j));
  }

  const std::string path = kGoldenDir + "/sticking_std.txt";
  if (g_write_golden) {
    std::ofstream out(path);
    for (std::size_t j = 0; j < std_absorbed.size(); ++j) {
      char buf[80];
      std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", j, std_absorbed[j], std_wsp[j]);
      out << buf;
    }
    return;
  }
  std::ifstream in(path);
  c.require(static_cast<bool>(in), "golden file missing: " + path);
  if (!in) return;
  std::size_t j;
  double a, w;
  while (in >> j >> a >> w) {
    c.require(std::fabs(std_absorbed[j] - a) <= 1e-9 * std::max(1.0, std::fabs(a)),
              "absorbed std drifted at job " + std::to_string(j));
    c.require(std::fabs(std_wsp[j] - w) <= 1e-9 * std::max(1.0, std::fabs(w)),
              "wsp std drifted at job " + std::to_string(j));
  }
}

void criterion_4_boundary_conditions(Criterion& c) {
  const double ts[] = {0.0, 2.5, 5.0};
  const auto interval = unit_interval();
  const auto triangle = right_triangle();
  for (const auto& poly : {interval, triangle}) {
    for (std::uint64_t seed : kSeeds) {
      const ConditionReport wsp_rep =
          check_boundary_conditions(wsp_spec(poly, seed), *poly, 1000, ts, seed);
      c.require(wsp_rep.min_drift_inner >= -1e-9,
                "WSP drift inner product " + std::to_string(wsp_rep.min_drift_inner));
      c.require(wsp_rep.max_diffusion_comp <= 1e-9,
                "WSP diffusion component " + std::to_string(wsp_rep.max_diffusion_comp));

      const ConditionReport raw_rep =
          check_boundary_conditions(mlp_base(poly->dim(), seed), *poly, 1000, ts, seed);
      c.require(!raw_rep.pass(), "unconstrained spec unexpectedly satisfied (a)/(b)");
    }
  }
}

void criterion_5_stationary(Criterion& c) {
  // (a) Ornstein-Uhlenbeck reduction, exact.
  {
    const double sigma = 0.8, mu = 0.45, s = 0.12;
    StationaryConfig cfg;
    cfg.diffusion = make_field(1, [sigma](double, auto, auto out) {
      using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(out)>::element_type>;
      out[0] = S(sigma);
    });
    cfg.log_ptilde = make_gauss_target(mu, s);
    cfg.dim = 1;
    for (double z : {0.1, 0.45, 0.8}) {
      const double expected = -sigma * sigma * (z - mu) / (2.0 * s * s);
      const double got = stationary_drift(cfg, {&z, 1})[0];
      c.require(std::fabs(got - expected) <= 1e-12, "OU reduction at z=" + std::to_string(z));
    }
  }

  const auto poly = unit_interval();
  const std::vector<std::pair<std::string, ScalarFieldPtr>> targets = {
      {"gauss", make_gauss_target(0.5, 0.1)}, {"bimodal", make_bimodal_target()}};

  // (b) zero-flux residual for every seed's WSP diffusion.
  Vec grid(1000);
  for (int i = 0; i < 1000; ++i) grid[static_cast<std::size_t>(i)] = (i + 1) / 1001.0;
  for (const auto& [name, target] : targets) {
    for (std::uint64_t seed : kSeeds) {
      StationaryConfig cfg{wsp_spec(poly, seed).diffusion, target, 1};
      const double flux = stationary_flux_max(cfg, grid);
      c.require(flux < 1e-6, name + " flux " + std::to_string(flux));
    }
  }

  // (c) long-run sampling vs the normalized target. Every chain follows the
  // protocol exactly; chains from several seeds are pooled because the
  // bimodal barrier (density dip ~ e^-8) limits each chain to ~45 mode
  // hops over the horizon, so single-chain mode weights carry ~0.10
  // statistical scatter. Ten chains bring the pooled scatter inside the
  // tolerance; the fast-mixing gauss target needs only two.
  for (const auto& [name, target] : targets) {
    std::vector<std::uint64_t> chain_seeds = {0, 1};
    if (name == "bimodal") chain_seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const ScalarFieldPtr tgt = target;
    const SpecFactory factory = [&poly, tgt](std::uint64_t seed) {
      StationaryConfig cfg{wsp_spec(poly, seed).diffusion, tgt, 1};
      return make_stationary(cfg);
    };
    SimProtocol protocol;
    protocol.scheme = SimProtocol::Scheme::Milstein;
    protocol.horizon = 2000.0;
    protocol.dt = 1e-3;
    protocol.store_stride = 500;  // every 0.5 time units
    const double z0 = 0.99;
    const auto trajs = run_grid(factory, chain_seeds, 1, {&z0, 1}, protocol);
    std::vector<double> samples;
    for (const Trajectory& t : trajs) {
      for (std::size_t i = 0; i < t.num_points(); ++i) {
        if (t.times[i] > 100.0) samples.push_back(t.state(i)[0]);
      }
    }
    const DistributionDistance d = distribution_distance(samples, *tgt, 0.0, 1.0, 40);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s KS %.4f (n=%zu)", name.c_str(), d.ks, samples.size());
    if (d.ks < 0.05) {
      c.note(buf);
    } else {
      c.require(false, buf);
    }
  }
}

void criterion_6_stratonovich(Criterion& c) {
  // g(z) = z gives the correction z/2 exactly.
  DynamicsSpec linear;
  linear.dim = 1;
  linear.calculus = Calculus::Stratonovich;
  linear.drift = make_field(1, [](double, auto, auto out) {
    using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(out)>::element_type>;
    out[0] = S(0.0);
  });
  linear.diffusion = make_field(1, [](double, auto z, auto out) { out[0] = z[0]; });
  const DynamicsSpec ito = stratonovich_to_ito(linear);
  Vec out(1);
  for (double z : {0.25, 1.0, 2.0}) {
    ito.drift->eval(0.0, {&z, 1}, out);
    c.require(std::fabs(out[0] - 0.5 * z) <= 1e-12, "z/2 correction");
  }

  // Round-trip on WSP dynamics.
  const auto poly = unit_interval();
  const DynamicsSpec strat = wsp_spec(poly, 0, Calculus::Stratonovich);
  const DynamicsSpec back = ito_to_stratonovich(stratonovich_to_ito(strat));
  Vec a(1), b(1);
  for (double z : {0.1, 0.5, 0.87}) {
    strat.drift->eval(0.0, {&z, 1}, a);
    back.drift->eval(0.0, {&z, 1}, b);
    c.require(std::fabs(a[0] - b[0]) <= 1e-12, "round-trip drift recovery");
  }
}

void criterion_7_kl_expansion(Criterion& c) {
  const double T = 5.0;
  const int R = 40;
  double expected = 0.0;
  for (int r = 1; r <= R; ++r) {
    expected += 8.0 / ((2.0 * r - 1.0) * (2.0 * r - 1.0) * kPi * kPi);
  }
  c.require(std::fabs(expected - 0.99494) < 2e-5, "partial-sum constant");

  double sum = 0.0, sum_sq = 0.0;
  const int n_draws = 100000;
  for (int i = 0; i < n_draws; ++i) {
    const KlExpansion exp = make_kl_expansion(4242, static_cast<std::uint32_t>(i), 0, R, T);
    const double b = kl_integral(exp, T);
    sum += b;
    sum_sq += b * b;
  }
  const double var = sum_sq / n_draws - (sum / n_draws) * (sum / n_draws);
  c.require(std::fabs(var / T - expected) < 0.01 * expected,
            "endpoint variance ratio " + std::to_string(var / T));

  // WSP under the pathwise expansion stays in K (Stratonovich reading).
  const auto poly = unit_interval();
  const SpecFactory factory = [&poly](std::uint64_t seed) {
    return wsp_spec(poly, seed, Calculus::Stratonovich);
  };
  SimProtocol protocol = fig2_protocol(SimProtocol::Scheme::KlOde);
  protocol.kl_terms = R;
  const double z0 = 0.99;
  const auto trajs = run_grid(factory, kSeeds, 3, {&z0, 1}, protocol);
  for (const Trajectory& t : trajs) {
    const ViabilityReport rep = viability(t, *poly, 1e-6);
    c.require(rep.fraction_in_k == 1.0,
              "KL path left K (violation " + std::to_string(rep.max_violation) + ")");
  }
}

void criterion_8_solver_orders(Criterion& c) {
  const double mu = 1.0, sigma = 1.0, z0 = 1.0, T = 1.0;
  DynamicsSpec spec;
  spec.dim = 1;
  spec.calculus = Calculus::Ito;
  spec.drift = make_field(1, [mu](double, auto z, auto out) {
    using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(out)>::element_type>;
    out[0] = S(mu) * z[0];
  });
  spec.diffusion = make_field(1, [sigma](double, auto z, auto out) {
    using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(out)>::element_type>;
    out[0] = S(sigma) * z[0];
  });

  std::vector<double> lvls, em_err, mi_err;
  for (int lvl = 4; lvl <= 9; ++lvl) {
    const double dt = std::pow(2.0, -lvl);
    const int n = 1 << lvl;
    double sum_em = 0.0, sum_mi = 0.0;
    const int n_paths = 256;
#pragma omp parallel for reduction(+ : sum_em, sum_mi)
    for (int p = 0; p < n_paths; ++p) {
      const NoiseStream stream{900 + static_cast<std::uint64_t>(lvl),
                               static_cast<std::uint32_t>(p), 1, dt, n};
      double b_total = 0.0;
      for (int k = 0; k < n; ++k) {
        b_total += brownian_increment(stream, static_cast<std::uint32_t>(k), 0);
      }
      const double exact = z0 * std::exp((mu - 0.5 * sigma * sigma) * T + sigma * b_total);
      const Trajectory em = euler_maruyama(spec, {&z0, 1}, 0.0, T, dt, stream, n);
      const Trajectory mi = milstein(spec, {&z0, 1}, 0.0, T, dt, stream, n);
      sum_em += std::fabs(em.states.back() - exact);
      sum_mi += std::fabs(mi.states.back() - exact);
    }
    lvls.push_back(-lvl);
    em_err.push_back(std::log2(sum_em / n_paths));
    mi_err.push_back(std::log2(sum_mi / n_paths));
  }
  auto slope = [&lvls](const std::vector<double>& ys) {
    const double n = static_cast<double>(lvls.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lvls.size(); ++i) {
      sx += lvls[i];
      sy += ys[i];
      sxx += lvls[i] * lvls[i];
      sxy += lvls[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  const double em_slope = slope(em_err);
  const double mi_slope = slope(mi_err);
  char buf[96];
  std::snprintf(buf, sizeof buf, "euler slope %.3f, milstein slope %.3f", em_slope, mi_slope);
  c.note(buf);
  c.require(em_slope >= 0.3 && em_slope <= 0.7, "euler slope outside [0.3, 0.7]");
  c.require(mi_slope >= 0.8 && mi_slope <= 1.2, "milstein slope outside [0.8, 1.2]");
}

void criterion_9_geometry(Criterion& c) {
  const Polyhedron square = Polyhedron::box({0.0, 0.0}, {1.0, 1.0});
  c.require(std::fabs(square.radius() - 0.5) <= 1e-9, "square radius");
  const auto tri = right_triangle();
  const double r = (2.0 - std::sqrt(2.0)) / 2.0;
  c.require(std::fabs(tri->radius() - r) <= 1e-9, "triangle radius");
  c.require(std::fabs(tri->center()[0] - r) <= 1e-7, "triangle center x");
  c.require(std::fabs(tri->center()[1] - r) <= 1e-7, "triangle center y");

  // Grid oracle: no sampled point beats the LP radius.
  double best = -1.0;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const Vec z = {i / 100.0, j / 100.0};
      best = std::max(best, tri->min_distance(z));
    }
  }
  c.require(best <= tri->radius() + 1e-6, "grid point beat the Chebyshev radius");
}

void criterion_10_derivative_stack(Criterion& c) {
  int checked = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MlpParams net = mlp_init({1, 64, 64, 64, 1}, Activation::Celu, seed);
    const FieldPtr field = make_field(1, [net](double, auto z, auto out) {
      using S = std::remove_cv_t<typename std::remove_cvref_t<decltype(z)>::element_type>;
      mlp_eval<S>(net, z, out);
      out[0] = softplus(out[0]);
    });
    for (int i = 0; i < 5; ++i) {
      const double z =
          uniform_unit(seed, static_cast<std::uint32_t>(i), 5, 0, rng_domain::kSampling);
      const double forward = diag_jacobian(*field, 0.0, {&z, 1})[0];
      const double zp = z + 1e-5, zm = z - 1e-5;
      Vec fp(1), fm(1);
      field->eval(0.0, {&zp, 1}, fp);
      field->eval(0.0, {&zm, 1}, fm);
      const double fd = (fp[0] - fm[0]) / 2e-5;
      worst = std::max(worst, std::fabs(forward - fd));
      ++checked;
    }
  }
  c.require(checked == 100, "expected 100 cases");
  c.require(worst < 1e-6, "worst forward-vs-differences gap " + std::to_string(worst));
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--write-golden") == 0) g_write_golden = true;
  }
  run_criterion("1. WSP viability under Milstein", criterion_1_wsp_viability, 10.0);
  run_criterion("2. unconstrained escape (golden regression)", criterion_2_unconstrained_escape);
  run_criterion("3. sigmoid sticking vs WSP", criterion_3_sigmoid_sticking);
  run_criterion("4. boundary conditions (a)/(b)", criterion_4_boundary_conditions, 30.0);
  run_criterion("5. stationary construction", criterion_5_stationary, 180.0);
  run_criterion("6. Stratonovich correction", criterion_6_stratonovich);
  run_criterion("7. Karhunen-Loeve expansion", criterion_7_kl_expansion);
  run_criterion("8. strong convergence orders", criterion_8_solver_orders, 60.0);
  run_criterion("9. Chebyshev geometry", criterion_9_geometry);
  run_criterion("10. forward-mode derivative stack", criterion_10_derivative_stack);

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
