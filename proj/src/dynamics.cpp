#include "polysde/dynamics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <type_traits>

#include "polysde/errors.hpp"
#include "polysde/philox.hpp"

namespace polysde {

namespace {

template <class Span>
using scalar_of = std::remove_cv_t<typename std::remove_cvref_t<Span>::element_type>;

// Field whose plain evaluation is given by a callable and whose dual-mode
// tangent falls back to a central difference along the seeded direction.
// Used for derived drifts (stationary, Stratonovich-corrected) whose exact
// tangents would need second derivatives of the underlying diffusion; no
// integrator in this project consumes those tangents.
template <class Fn>
class DerivedDriftField final : public Field {
 public:
  DerivedDriftField(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
  int dim() const override { return dim_; }

  void eval(double t, std::span<const double> z, std::span<double> out) const override {
    fn_(t, z, out);
  }

  void eval(double t, std::span<const Dual> z, std::span<Dual> out) const override {
    const std::size_t n = z.size();
    std::vector<double> zv(n), dir(n), f0(n);
    double dir_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      zv[j] = z[j].v;
      dir[j] = z[j].d;
      dir_max = std::max(dir_max, std::fabs(dir[j]));
    }
    fn_(t, zv, f0);
    if (dir_max == 0.0) {
      for (std::size_t j = 0; j < n; ++j) out[j] = Dual(f0[j], 0.0);
      return;
    }
    double znorm = 0.0;
    for (double x : zv) znorm = std::max(znorm, std::fabs(x));
    const double h = 1e-6 * (1.0 + znorm) / dir_max;
    std::vector<double> zp(n), zm(n), fp(n), fm(n);
    for (std::size_t j = 0; j < n; ++j) {
      zp[j] = zv[j] + h * dir[j];
      zm[j] = zv[j] - h * dir[j];
    }
    fn_(t, zp, fp);
    fn_(t, zm, fm);
    for (std::size_t j = 0; j < n; ++j) out[j] = Dual(f0[j], (fp[j] - fm[j]) / (2.0 * h));
  }

 private:
  int dim_;
  Fn fn_;
};

template <class Fn>
FieldPtr make_derived_drift(int dim, Fn fn) {
  return std::make_shared<DerivedDriftField<Fn>>(dim, std::move(fn));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t role) {
  const philox::Counter r = philox::block(seed, {role, 0, 0, 0x5eedu});
  return (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
}

Vec center_pull(const Polyhedron& poly, double gamma, double eps, std::span<const double> z) {
  Vec out(z.size(), 0.0);
  center_pull_into<double>(poly, gamma, eps, z, out);
  return out;
}

DynamicsSpec make_wsp(const WspConfig& cfg) {
  if (!cfg.poly) throw ConfigError("WSP needs a polyhedron");
  if (!(cfg.gamma > 0.0) || !(cfg.eps > 0.0)) {
    throw ConfigError("WSP requires gamma > 0 and eps > 0");
  }
  validate(cfg.weights);
  const int dim = cfg.poly->dim();
  if (cfg.base.dim != dim) throw ConfigError("WSP base dynamics dimension mismatch");

  const PolyhedronPtr poly = cfg.poly;
  const WeightParams wp = cfg.weights;
  const double gamma = cfg.gamma;
  const double eps = cfg.eps;
  const double tol = cfg.domain_tol;
  const FieldPtr base_h = cfg.base.drift;
  const FieldPtr base_g = cfg.base.diffusion;

  DynamicsSpec spec;
  spec.dim = dim;
  spec.calculus = cfg.base.calculus;
  spec.drift = make_field(dim, [poly, wp, gamma, eps, tol, base_h](double t, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    const S w = weight_at<S>(*poly, wp, z, tol);
    base_h->eval(t, z, out);
    std::vector<S> pull(z.size());
    center_pull_into<S>(*poly, gamma, eps, z, {pull.data(), pull.size()});
    const S rest = S(1.0) - w;
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = w * out[j] + rest * pull[j];
  });
  spec.diffusion = make_field(dim, [poly, wp, tol, base_g](double t, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    const S w = weight_at<S>(*poly, wp, z, tol);
    base_g->eval(t, z, out);
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = w * out[j];
  });
  return spec;
}

namespace {

// Shared polynomial factors of the sigmoid pushforward.
template <typename S>
S sigmoid_linear_factor(S z) {
  return z - z * z;
}
template <typename S>
S sigmoid_drift_cubic(S z) {
  return (S(2.0) * z * z * z - S(3.0) * z * z + z) / S(2.0);
}

template <typename S>
S logit_checked(S z) {
  using std::log;
  using std::log1p;
  if (value_of(z) <= 0.0 || value_of(z) >= 1.0) {
    throw DomainError("singular logit: state must lie strictly inside (0, 1)");
  }
  return log(z) - log1p(-z);
}

}  // namespace

DynamicsSpec make_sigmoid_transformed(const DynamicsSpec& base_y, Calculus calculus) {
  if (base_y.dim != 1) throw ConfigError("sigmoid transform is one-dimensional");
  const FieldPtr h = base_y.drift;
  const FieldPtr g = base_y.diffusion;
  const bool ito = calculus == Calculus::Ito;

  DynamicsSpec spec;
  spec.dim = 1;
  spec.calculus = calculus;
  spec.drift = make_field(1, [h, g, ito](double t, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    const S y = logit_checked(z[0]);
    std::array<S, 1> ybuf{y}, hv{}, gv{};
    h->eval(t, {ybuf.data(), 1}, {hv.data(), 1});
    out[0] = hv[0] * sigmoid_linear_factor(z[0]);
    if (ito) {
      g->eval(t, {ybuf.data(), 1}, {gv.data(), 1});
      out[0] += gv[0] * sigmoid_drift_cubic(z[0]);
    }
  });
  spec.diffusion = make_field(1, [g](double t, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    const S y = logit_checked(z[0]);
    std::array<S, 1> ybuf{y}, gv{};
    g->eval(t, {ybuf.data(), 1}, {gv.data(), 1});
    out[0] = gv[0] * sigmoid_linear_factor(z[0]);
  });
  return spec;
}

DynamicsSpec make_absorbed(FieldPtr h, FieldPtr g, Calculus calculus) {
  if (!h || !g || h->dim() != 1 || g->dim() != 1) {
    throw ConfigError("absorbed parameterization is one-dimensional");
  }
  const bool ito = calculus == Calculus::Ito;

  DynamicsSpec spec;
  spec.dim = 1;
  spec.calculus = calculus;
  spec.drift = make_field(1, [h, g, ito](double t, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    std::array<S, 1> hv{}, gv{};
    h->eval(t, z, {hv.data(), 1});
    out[0] = hv[0] * sigmoid_linear_factor(z[0]);
    if (ito) {
      g->eval(t, z, {gv.data(), 1});
      out[0] += gv[0] * sigmoid_drift_cubic(z[0]);
    }
  });
  spec.diffusion = make_field(1, [g](double t, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    std::array<S, 1> gv{};
    g->eval(t, z, {gv.data(), 1});
    out[0] = gv[0] * sigmoid_linear_factor(z[0]);
  });
  return spec;
}

Vec stationary_drift(const StationaryConfig& cfg, std::span<const double> z) {
  const std::size_t n = z.size();
  Vec out(n, 0.0);
  std::vector<Dual> zd(n), gd(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) zd[j] = Dual(z[j], j == k ? 1.0 : 0.0);
    cfg.diffusion->eval(0.0, zd, gd);
    const double g = gd[k].v;
    const double dg = gd[k].d;
    const Dual score_k = cfg.log_ptilde->eval(std::span<const Dual>(zd));
    if (!std::isfinite(score_k.v) || !std::isfinite(score_k.d)) {
      throw DomainError("non-finite score in stationary drift");
    }
    out[k] = g * dg + 0.5 * g * g * score_k.d;
  }
  return out;
}

namespace {

// The stationary drift needs (g, diag grad g) at exactly the points where
// Milstein asks the diffusion for the same pair one call later. The shared
// core memoizes the last evaluation per thread (keyed by instance, t, z) so
// each step pays for one forward-mode pass instead of two. Values are pure
// functions of (t, z); the cache only skips recomputation.
struct StationaryCore {
  FieldPtr g;
  ScalarFieldPtr logp;
  int dim = 0;
  std::uint64_t id = 0;

  struct Slot {
    std::uint64_t id = 0;
    double t = 0.0;
    Vec z, gval, gdiag;
  };
  static Slot& slot() {
    thread_local Slot s;
    return s;
  }

  void g_and_diag(double t, std::span<const double> z, Vec& gval, Vec& gdiag) const {
    Slot& s = slot();
    if (s.id == id && s.t == t && s.z.size() == z.size() &&
        std::equal(z.begin(), z.end(), s.z.begin())) {
      gval = s.gval;
      gdiag = s.gdiag;
      return;
    }
    const std::size_t n = z.size();
    gval.resize(n);
    gdiag.resize(n);
    std::vector<Dual> zd(n), gd(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) zd[j] = Dual(z[j], j == k ? 1.0 : 0.0);
      g->eval(t, zd, gd);
      gval[k] = gd[k].v;
      gdiag[k] = gd[k].d;
    }
    s.id = id;
    s.t = t;
    s.z.assign(z.begin(), z.end());
    s.gval = gval;
    s.gdiag = gdiag;
  }
};

// Diffusion view over the core: plain calls delegate; 1D basis-direction
// dual calls (the Milstein pattern) are served from the memo. Tangent
// requests the diagonal cannot answer fall back to the wrapped field.
class StationaryDiffusionField final : public Field {
 public:
  explicit StationaryDiffusionField(std::shared_ptr<const StationaryCore> core)
      : core_(std::move(core)) {}
  int dim() const override { return core_->dim; }

  void eval(double t, std::span<const double> z, std::span<double> out) const override {
    core_->g->eval(t, z, out);
  }

  void eval(double t, std::span<const Dual> z, std::span<Dual> out) const override {
    if (z.size() == 1 && z[0].d == 1.0) {
      Vec gval, gdiag, zv(1, z[0].v);
      core_->g_and_diag(t, zv, gval, gdiag);
      out[0] = Dual(gval[0], gdiag[0]);
      return;
    }
    core_->g->eval(t, z, out);
  }

 private:
  std::shared_ptr<const StationaryCore> core_;
};

std::uint64_t next_stationary_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

DynamicsSpec make_stationary(const StationaryConfig& cfg) {
  if (!cfg.diffusion || !cfg.log_ptilde) throw ConfigError("stationary config incomplete");
  auto core = std::make_shared<const StationaryCore>(
      StationaryCore{cfg.diffusion, cfg.log_ptilde, cfg.dim, next_stationary_id()});
  DynamicsSpec spec;
  spec.dim = cfg.dim;
  spec.calculus = Calculus::Ito;
  spec.diffusion = std::make_shared<StationaryDiffusionField>(core);
  spec.drift = make_derived_drift(
      cfg.dim, [core](double t, std::span<const double> z, std::span<double> out) {
        Vec gval, gdiag;
        core->g_and_diag(t, z, gval, gdiag);
        const std::size_t n = z.size();
        std::vector<Dual> zd(n);
        for (std::size_t k = 0; k < n; ++k) {
          for (std::size_t j = 0; j < n; ++j) zd[j] = Dual(z[j], j == k ? 1.0 : 0.0);
          const Dual score_k = core->logp->eval(std::span<const Dual>(zd));
          if (!std::isfinite(score_k.v) || !std::isfinite(score_k.d)) {
            throw DomainError("non-finite score in stationary drift");
          }
          out[k] = gval[k] * gdiag[k] + 0.5 * gval[k] * gval[k] * score_k.d;
        }
      });
  return spec;
}

namespace {

DynamicsSpec apply_ito_correction(const DynamicsSpec& spec, double sign, Calculus result_tag) {
  const FieldPtr drift = spec.drift;
  const FieldPtr diffusion = spec.diffusion;
  DynamicsSpec out;
  out.dim = spec.dim;
  out.calculus = result_tag;
  out.diffusion = diffusion;
  out.drift = make_derived_drift(
      spec.dim, [drift, diffusion, sign](double t, std::span<const double> z,
                                         std::span<double> res) {
        drift->eval(t, z, res);
        const std::vector<double> diag = diag_jacobian(*diffusion, t, z);
        std::vector<double> g(z.size());
        diffusion->eval(t, z, g);
        for (std::size_t j = 0; j < z.size(); ++j) res[j] += sign * 0.5 * diag[j] * g[j];
      });
  return out;
}

}  // namespace

DynamicsSpec stratonovich_to_ito(const DynamicsSpec& spec, bool* warned) {
  if (warned != nullptr) *warned = false;
  if (spec.calculus == Calculus::Ito) {
    if (warned != nullptr) *warned = true;  // no-op on already-Ito input
    return spec;
  }
  return apply_ito_correction(spec, +1.0, Calculus::Ito);
}

DynamicsSpec ito_to_stratonovich(const DynamicsSpec& spec, bool* warned) {
  if (warned != nullptr) *warned = false;
  if (spec.calculus == Calculus::Stratonovich) {
    if (warned != nullptr) *warned = true;
    return spec;
  }
  return apply_ito_correction(spec, -1.0, Calculus::Stratonovich);
}

DynamicsSpec make_mlp_dynamics(const std::vector<int>& sizes, Activation activation,
                               std::uint64_t seed, Calculus calculus) {
  if (sizes.size() < 2 || sizes.front() != sizes.back()) {
    throw ConfigError("dynamics nets need matching input/output dimension");
  }
  const int dim = sizes.front();
  const MlpParams h_net = mlp_init(sizes, activation, derive_seed(seed, 0));
  const MlpParams g_net = mlp_init(sizes, activation, derive_seed(seed, 1));

  DynamicsSpec spec;
  spec.dim = dim;
  spec.calculus = calculus;
  spec.drift = make_field(dim, [h_net](double, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    mlp_eval<S>(h_net, z, out);
  });
  spec.diffusion = make_field(dim, [g_net](double, auto z, auto out) {
    using S = scalar_of<decltype(z)>;
    mlp_eval<S>(g_net, z, out);
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = softplus(out[j]);
  });
  return spec;
}

}  // namespace polysde
