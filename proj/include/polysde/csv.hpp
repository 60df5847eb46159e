#ifndef POLYSDE_CSV_HPP
#define POLYSDE_CSV_HPP

#include <string>
#include <vector>

#include "polysde/solvers.hpp"

namespace polysde {

// Writes trajectories as `seed,sample,t,z_1..z_D,in_k` rows in (seed,
// sample, time) order. Values print with %.17g so reruns are byte-identical.
// Trajectories must be membership-annotated first.
void write_trajectories_csv(const std::string& path, const std::vector<Trajectory>& trajectories);

std::string trajectories_csv(const std::vector<Trajectory>& trajectories);

}  // namespace polysde

#endif  // POLYSDE_CSV_HPP
