#include "polysde/csv.hpp"

#include <cstdio>
#include <fstream>

#include "polysde/errors.hpp"

namespace polysde {

std::string trajectories_csv(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw ConfigError("no trajectories to serialize");
  const int dim = trajectories.front().dim;
  std::string out = "seed,sample,t";
  for (int d = 1; d <= dim; ++d) out += ",z_" + std::to_string(d);
  out += ",in_k\n";

  char buf[64];
  for (const Trajectory& traj : trajectories) {
    if (traj.in_k.size() != traj.num_points()) {
      throw ConfigError("trajectory not membership-annotated before CSV export");
    }
    for (std::size_t i = 0; i < traj.num_points(); ++i) {
      out += std::to_string(traj.meta.seed);
      out += ',';
      out += std::to_string(traj.meta.sample);
      std::snprintf(buf, sizeof buf, ",%.17g", traj.times[i]);
      out += buf;
      const auto z = traj.state(i);
      for (int d = 0; d < dim; ++d) {
        std::snprintf(buf, sizeof buf, ",%.17g", z[static_cast<std::size_t>(d)]);
        out += buf;
      }
      out += traj.in_k[i] ? ",1\n" : ",0\n";
    }
  }
  return out;
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<Trajectory>& trajectories) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << trajectories_csv(trajectories);
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace polysde
