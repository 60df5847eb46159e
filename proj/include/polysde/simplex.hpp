#ifndef POLYSDE_SIMPLEX_HPP
#define POLYSDE_SIMPLEX_HPP

#include <vector>

namespace polysde {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense two-phase tableau simplex for
//     maximize c.x  subject to  A x <= b,  x free.
// Free variables are split internally; Bland's rule guards against cycling.
// Problem sizes in this project are tiny (tens of rows), so no effort is
// spent on sparsity or revised-simplex updates.
LpResult simplex_maximize(const std::vector<double>& c,
                          const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b);

}  // namespace polysde

#endif  // POLYSDE_SIMPLEX_HPP
