#include "polysde/mlp.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "polysde/philox.hpp"

namespace polysde {

Activation activation_from_string(const std::string& name) {
  if (name == "celu") return Activation::Celu;
  if (name == "gelu") return Activation::Gelu;
  if (name == "elu") return Activation::Elu;
  if (name == "selu") return Activation::Selu;
  if (name == "silu") return Activation::Silu;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Celu: return "celu";
    case Activation::Gelu: return "gelu";
    case Activation::Elu: return "elu";
    case Activation::Selu: return "selu";
    case Activation::Silu: return "silu";
  }
  return "celu";
}

MlpParams mlp_init(const std::vector<int>& sizes, Activation activation, std::uint64_t seed) {
  if (sizes.size() < 2) throw ConfigError("mlp needs at least input and output sizes");
  for (int s : sizes) {
    if (s < 1) throw ConfigError("mlp layer sizes must be >= 1");
  }
  MlpParams p;
  p.sizes = sizes;
  p.activation = activation;
  p.seed = seed;
  p.layers.resize(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    MlpLayer& layer = p.layers[l];
    layer.fan_in = sizes[l];
    layer.fan_out = sizes[l + 1];
    const double std_dev = std::sqrt(2.0 / (layer.fan_in + layer.fan_out));
    layer.w.resize(static_cast<std::size_t>(layer.fan_out) * layer.fan_in);
    layer.b.assign(static_cast<std::size_t>(layer.fan_out), 0.0);
    for (int r = 0; r < layer.fan_out; ++r) {
      for (int c = 0; c < layer.fan_in; ++c) {
        const double z = standard_normal(seed, static_cast<std::uint32_t>(l),
                                         static_cast<std::uint32_t>(r),
                                         static_cast<std::uint32_t>(c), rng_domain::kMlpInit);
        layer.w[static_cast<std::size_t>(r) * layer.fan_in + c] = std_dev * z;
      }
    }
  }
  return p;
}

template <>
void mlp_eval<Dual>(const MlpParams& p, std::span<const Dual> x, std::span<Dual> out) {
  if (static_cast<int>(x.size()) != p.input_dim() ||
      static_cast<int>(out.size()) != p.output_dim()) {
    throw ConfigError("mlp_eval shape mismatch");
  }
  thread_local std::vector<double> val, tan, next_val, next_tan;
  val.resize(x.size());
  tan.resize(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    val[j] = x[j].v;
    tan[j] = x[j].d;
  }
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const MlpLayer& layer = p.layers[l];
    const std::size_t fan_in = static_cast<std::size_t>(layer.fan_in);
    next_val.resize(static_cast<std::size_t>(layer.fan_out));
    next_tan.resize(static_cast<std::size_t>(layer.fan_out));
    const bool hidden = l + 1 < p.layers.size();
    const double* __restrict vp = val.data();
    const double* __restrict tp = tan.data();
    for (int o = 0; o < layer.fan_out; ++o) {
      const double* __restrict wrow = layer.w.data() + static_cast<std::size_t>(o) * fan_in;
      // Four-way accumulators break the FP add dependency chain (the
      // compiler cannot reassociate reductions itself). Fixed summation
      // order, so results stay deterministic.
      double av = layer.b[static_cast<std::size_t>(o)];
      double at = 0.0;
      {
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        std::size_t i = 0;
        for (; i + 4 <= fan_in; i += 4) {
          a0 += wrow[i] * vp[i];
          a1 += wrow[i + 1] * vp[i + 1];
          a2 += wrow[i + 2] * vp[i + 2];
          a3 += wrow[i + 3] * vp[i + 3];
        }
        av += (a0 + a1) + (a2 + a3);
        for (; i < fan_in; ++i) av += wrow[i] * vp[i];
      }
      {
        double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
        std::size_t i = 0;
        for (; i + 4 <= fan_in; i += 4) {
          a0 += wrow[i] * tp[i];
          a1 += wrow[i + 1] * tp[i + 1];
          a2 += wrow[i + 2] * tp[i + 2];
          a3 += wrow[i + 3] * tp[i + 3];
        }
        at = (a0 + a1) + (a2 + a3);
        for (; i < fan_in; ++i) at += wrow[i] * tp[i];
      }
      if (hidden) {
        const Dual activated = activate(p.activation, Dual(av, at));
        av = activated.v;
        at = activated.d;
      }
      next_val[static_cast<std::size_t>(o)] = av;
      next_tan[static_cast<std::size_t>(o)] = at;
    }
    val.swap(next_val);
    tan.swap(next_tan);
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = Dual(val[j], tan[j]);
}

std::uint64_t mlp_checksum(const MlpParams& p) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  for (const MlpLayer& layer : p.layers) {
    mix(layer.w.data(), layer.w.size() * sizeof(double));
    mix(layer.b.data(), layer.b.size() * sizeof(double));
  }
  return h;
}

void mlp_save(const MlpParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "polysde-mlp 1\n";
  out << "sizes";
  for (int s : p.sizes) out << ' ' << s;
  out << "\nactivation " << to_string(p.activation) << "\nseed " << p.seed << "\n";
  char buf[64];
  for (const MlpLayer& layer : p.layers) {
    for (double w : layer.w) {
      std::snprintf(buf, sizeof buf, "%.17g\n", w);
      out << buf;
    }
    for (double b : layer.b) {
      std::snprintf(buf, sizeof buf, "%.17g\n", b);
      out << buf;
    }
  }
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

MlpParams mlp_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "polysde-mlp" || version != 1) {
    throw ConfigError("'" + path + "' is not a polysde mlp dump");
  }
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream sizes_line(line);
  std::string tag;
  sizes_line >> tag;
  if (tag != "sizes") throw ConfigError("malformed mlp dump: missing sizes");
  std::vector<int> sizes;
  for (int s; sizes_line >> s;) sizes.push_back(s);
  std::string act_name;
  std::uint64_t seed = 0;
  in >> tag >> act_name;
  if (tag != "activation") throw ConfigError("malformed mlp dump: missing activation");
  in >> tag >> seed;
  if (tag != "seed") throw ConfigError("malformed mlp dump: missing seed");

  MlpParams p;
  p.sizes = sizes;
  p.activation = activation_from_string(act_name);
  p.seed = seed;
  if (sizes.size() < 2) throw ConfigError("malformed mlp dump: bad sizes");
  p.layers.resize(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    MlpLayer& layer = p.layers[l];
    layer.fan_in = sizes[l];
    layer.fan_out = sizes[l + 1];
    layer.w.resize(static_cast<std::size_t>(layer.fan_out) * layer.fan_in);
    layer.b.resize(static_cast<std::size_t>(layer.fan_out));
    for (double& w : layer.w) {
      if (!(in >> w)) throw ConfigError("malformed mlp dump: truncated weights");
    }
    for (double& b : layer.b) {
      if (!(in >> b)) throw ConfigError("malformed mlp dump: truncated biases");
    }
  }
  return p;
}

}  // namespace polysde
