#ifndef POLYSDE_MLP_HPP
#define POLYSDE_MLP_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polysde/dual.hpp"
#include "polysde/errors.hpp"

namespace polysde {

enum class Activation { Celu, Gelu, Elu, Selu, Silu };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

// Numerically safe logistic; both branches keep the exp argument <= 0.
template <typename S>
S sigmoid(S x) {
  using std::exp;
  if (value_of(x) >= 0.0) return S(1.0) / (S(1.0) + exp(-x));
  const S e = exp(x);
  return e / (S(1.0) + e);
}

// softplus(x) = log(1 + e^x), overflow-safe for large |x|.
template <typename S>
S softplus(S x) {
  using std::exp;
  using std::log1p;
  if (value_of(x) > 0.0) return x + log1p(exp(-x));
  return log1p(exp(x));
}

template <typename S>
S activate(Activation a, S x) {
  using std::erf;
  using std::exp;
  switch (a) {
    case Activation::Celu:
    case Activation::Elu:
      // CELU with unit shape parameter coincides with ELU.
      return value_of(x) > 0.0 ? x : exp(x) - S(1.0);
    case Activation::Gelu: {
      constexpr double inv_sqrt2 = 0.7071067811865475244;
      return S(0.5) * x * (S(1.0) + erf(x * S(inv_sqrt2)));
    }
    case Activation::Selu: {
      constexpr double lambda = 1.0507009873554804934193349852946;
      constexpr double alpha = 1.6732632423543772848170429916717;
      return value_of(x) > 0.0 ? S(lambda) * x : S(lambda * alpha) * (exp(x) - S(1.0));
    }
    case Activation::Silu:
      return x * sigmoid(x);
  }
  return x;  // unreachable
}

struct MlpLayer {
  int fan_in = 0;
  int fan_out = 0;
  std::vector<double> w;  // row-major fan_out x fan_in
  std::vector<double> b;
};

// Inference-only feed-forward network. Parameters are a pure function of
// (sizes, activation, seed): every weight entry is drawn from its own
// keyed-counter stream indexed by (layer, row, col), so initialization does
// not depend on evaluation or construction order.
struct MlpParams {
  std::vector<int> sizes;
  Activation activation = Activation::Celu;
  std::uint64_t seed = 0;
  std::vector<MlpLayer> layers;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
};

// Glorot-normal weights (std = sqrt(2 / (fan_in + fan_out))), zero biases.
MlpParams mlp_init(const std::vector<int>& sizes, Activation activation, std::uint64_t seed);

// Affine + activation composition; the final layer is affine.
template <typename S>
void mlp_eval(const MlpParams& p, std::span<const S> x, std::span<S> out) {
  if (static_cast<int>(x.size()) != p.input_dim() ||
      static_cast<int>(out.size()) != p.output_dim()) {
    throw ConfigError("mlp_eval shape mismatch");
  }
  std::vector<S> cur(x.begin(), x.end());
  std::vector<S> next;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const MlpLayer& layer = p.layers[l];
    next.assign(static_cast<std::size_t>(layer.fan_out), S(0.0));
    for (int o = 0; o < layer.fan_out; ++o) {
      S acc(layer.b[static_cast<std::size_t>(o)]);
      const double* wrow = layer.w.data() + static_cast<std::size_t>(o) * layer.fan_in;
      for (int i = 0; i < layer.fan_in; ++i) acc += S(wrow[i]) * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] =
          (l + 1 < p.layers.size()) ? activate(p.activation, acc) : acc;
    }
    cur.swap(next);
  }
  for (std::size_t j = 0; j < cur.size(); ++j) out[j] = cur[j];
}

// Dual-mode evaluation runs value and tangent lanes as separate contiguous
// arrays so the matvec loops vectorize; results are identical to the
// generic path.
template <>
void mlp_eval<Dual>(const MlpParams& p, std::span<const Dual> x, std::span<Dual> out);

inline std::vector<double> mlp_eval(const MlpParams& p, std::span<const double> x) {
  std::vector<double> out(static_cast<std::size_t>(p.output_dim()));
  mlp_eval<double>(p, x, out);
  return out;
}

inline std::vector<Dual> mlp_eval_dual(const MlpParams& p, std::span<const Dual> x) {
  std::vector<Dual> out(static_cast<std::size_t>(p.output_dim()));
  mlp_eval<Dual>(p, x, out);
  return out;
}

// FNV-1a over the parameter bytes; used by determinism checks and `check`.
std::uint64_t mlp_checksum(const MlpParams& p);

// Plain-text dump: header (sizes, activation, seed) then row-major weights
// and biases per layer, full precision.
void mlp_save(const MlpParams& p, const std::string& path);
MlpParams mlp_load(const std::string& path);

}  // namespace polysde

#endif  // POLYSDE_MLP_HPP
