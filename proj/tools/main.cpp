// Command-line experiment runner: simulates the configured SDE grids,
// renders figures, and runs the verification suites.
//
// Exit codes: 0 success, 1 assertion failure, 2 config error, 3 numeric
// abort during simulation.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polysde/config.hpp"
#include "polysde/errors.hpp"
#include "polysde/experiment.hpp"
#include "polysde/mlp.hpp"

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& arg) {
  std::vector<std::uint64_t> seeds;
  std::string cur;
  for (char c : arg + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        seeds.push_back(std::stoull(cur));
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  return seeds;
}

int cmd_check(const std::string& path) {
  const polysde::MlpParams net = polysde::mlp_load(path);
  std::printf("file        %s\n", path.c_str());
  std::printf("sizes      ");
  for (int s : net.sizes) std::printf(" %d", s);
  std::printf("\nactivation  %s\n", polysde::to_string(net.activation).c_str());
  std::printf("seed        %llu\n", static_cast<unsigned long long>(net.seed));
  std::printf("checksum    %016llx\n",
              static_cast<unsigned long long>(polysde::mlp_checksum(net)));

  bool finite = true;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const polysde::MlpLayer& layer = net.layers[l];
    double sum = 0.0, sum_sq = 0.0;
    for (double w : layer.w) {
      if (!std::isfinite(w)) finite = false;
      sum += w;
      sum_sq += w * w;
    }
    const double n = static_cast<double>(layer.w.size());
    const double mean = sum / n;
    const double stddev = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
    const double glorot = std::sqrt(2.0 / (layer.fan_in + layer.fan_out));
    std::printf("layer %zu     %dx%d  weight std %.5f (glorot %.5f)\n", l, layer.fan_out,
                layer.fan_in, stddev, glorot);
  }

  // Derivative spot check: forward-mode tangent vs central differences.
  const std::size_t in_dim = static_cast<std::size_t>(net.input_dim());
  std::vector<polysde::Dual> x(in_dim), out_d(static_cast<std::size_t>(net.output_dim()));
  for (std::size_t j = 0; j < in_dim; ++j) x[j] = polysde::Dual(0.37, j == 0 ? 1.0 : 0.0);
  polysde::mlp_eval<polysde::Dual>(net, x, out_d);
  std::vector<double> xp(in_dim, 0.37), xm(in_dim, 0.37);
  xp[0] += 1e-5;
  xm[0] -= 1e-5;
  const std::vector<double> fp = polysde::mlp_eval(net, xp);
  const std::vector<double> fm = polysde::mlp_eval(net, xm);
  const double fd = (fp[0] - fm[0]) / 2e-5;
  const double gap = std::fabs(fd - out_d[0].d);
  std::printf("dual vs fd  %.3e (forward %.8f, central %.8f)\n", gap, out_d[0].d, fd);

  if (!finite || gap > 1e-5) {
    std::printf("status      FAIL\n");
    return 1;
  }
  std::printf("status      PASS\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDEs with provably viable dynamics on compact polyhedra"};
  app.require_subcommand(1);

  std::string config_arg;
  std::string out_dir;
  std::string seed_arg;
  bool quiet = false;
  bool dump_nets = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment (builtin name or config.json)");
  run->add_option("config", config_arg, "builtin name or path to a JSON config")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seeds", seed_arg, "comma-separated seed list override");
  run->add_flag("--quiet", quiet, "suppress progress output");
  run->add_flag("--dump-nets", dump_nets, "also dump the per-seed network parameters");

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a config without running it");
  validate_cmd->add_option("config", config_arg, "builtin name or path to a JSON config")
      ->required();

  CLI::App* list_cmd = app.add_subcommand("list", "list builtin experiments");

  std::string weights_path;
  CLI::App* check = app.add_subcommand("check", "re-examine a dumped network parameter file");
  check->add_option("file", weights_path, "path to a .mlp dump")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const std::string& name : polysde::list_builtins()) std::printf("%s\n", name.c_str());
      return 0;
    }
    if (validate_cmd->parsed()) {
      const polysde::ExperimentConfig cfg = polysde::resolve_config(config_arg);
      const std::vector<std::string> issues = polysde::validate(cfg);
      if (issues.empty()) {
        std::printf("ok\n");
        return 0;
      }
      for (const std::string& s : issues) std::printf("error: %s\n", s.c_str());
      return 2;
    }
    if (check->parsed()) return cmd_check(weights_path);

    const polysde::ExperimentConfig cfg = polysde::resolve_config(config_arg);
    polysde::RunOptions opts;
    opts.out_dir = out_dir;
    if (!seed_arg.empty()) opts.seeds = parse_seed_list(seed_arg);
    opts.quiet = quiet;
    opts.dump_nets = dump_nets;
    return polysde::run_experiment(cfg, opts);
  } catch (const polysde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const polysde::SimulationError& e) {
    std::cerr << "simulation aborted: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
