#include "polysde/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace polysde {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

// Tableau layout: rows = constraints, columns = structural variables
// followed by RHS. Basis tracks which column is basic in each row.
struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;  // structural columns (without RHS)
  std::vector<double> t;  // (rows+1) x (cols+1); last row = objective
  std::vector<std::size_t> basis;

  double& at(std::size_t r, std::size_t c) { return t[r * (cols + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return t[r * (cols + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols); }
  double& obj(std::size_t c) { return at(rows, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  }

  // Runs simplex on the current objective row (stored as a maximization:
  // reduced costs in the row, iterate while some entry > tol). `allowed`
  // masks columns that may enter. Returns false if unbounded.
  bool iterate(const std::vector<bool>& allowed) {
    for (;;) {
      // Bland: smallest eligible column index.
      std::size_t pc = cols;
      for (std::size_t c = 0; c < cols; ++c) {
        if (allowed[c] && obj(c) > kPivotTol) {
          pc = c;
          break;
        }
      }
      if (pc == cols) return true;  // optimal

      std::size_t pr = rows;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows; ++r) {
        const double a = at(r, pc);
        if (a > kPivotTol) {
          const double ratio = rhs(r) / a;
          if (ratio < best_ratio - kPivotTol ||
              (ratio < best_ratio + kPivotTol && (pr == rows || basis[r] < basis[pr]))) {
            best_ratio = ratio;
            pr = r;
          }
        }
      }
      if (pr == rows) return false;  // unbounded
      pivot(pr, pc);
    }
  }
};

}  // namespace

LpResult simplex_maximize(const std::vector<double>& c,
                          const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b) {
  const std::size_t n = c.size();
  const std::size_t m = a.size();

  // Columns: x+ (n) | x- (n) | slack (m) | artificial (m).
  const std::size_t n_struct = 2 * n + m;
  Tableau tb;
  tb.rows = m;
  tb.cols = n_struct + m;
  tb.t.assign((m + 1) * (tb.cols + 1), 0.0);
  tb.basis.assign(m, 0);

  std::size_t n_art = 0;
  std::vector<bool> is_art(tb.cols, false);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = (b[r] < 0.0) ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      tb.at(r, j) = sign * a[r][j];
      tb.at(r, n + j) = -sign * a[r][j];
    }
    tb.at(r, 2 * n + r) = sign;  // slack
    tb.rhs(r) = sign * b[r];
    if (sign > 0.0) {
      tb.basis[r] = 2 * n + r;
    } else {
      const std::size_t art = n_struct + n_art++;
      tb.at(r, art) = 1.0;
      is_art[art] = true;
      tb.basis[r] = art;
    }
  }

  std::vector<bool> allowed(tb.cols, true);

  // Phase 1: drive artificial variables to zero.
  if (n_art > 0) {
    // maximize -(sum of artificials): objective row holds reduced costs.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[tb.basis[r]]) continue;
      for (std::size_t col = 0; col <= tb.cols; ++col) tb.obj(col) += tb.at(r, col);
    }
    for (std::size_t col = 0; col < tb.cols; ++col) {
      if (is_art[col]) tb.obj(col) -= 1.0;
    }
    if (!tb.iterate(allowed)) return {LpStatus::Infeasible, 0.0, {}};
    if (tb.obj(tb.cols) > kFeasTol) return {LpStatus::Infeasible, 0.0, {}};

    // Pivot any artificial still basic (at value zero) out of the basis.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[tb.basis[r]]) continue;
      for (std::size_t col = 0; col < n_struct; ++col) {
        if (std::fabs(tb.at(r, col)) > kPivotTol) {
          tb.pivot(r, col);
          break;
        }
      }
    }
    for (std::size_t col = 0; col < tb.cols; ++col) {
      if (is_art[col]) allowed[col] = false;
    }
  }

  // Phase 2: the real objective, priced for the current basis.
  for (std::size_t col = 0; col <= tb.cols; ++col) tb.obj(col) = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    tb.obj(j) = c[j];
    tb.obj(n + j) = -c[j];
  }
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bc = tb.basis[r];
    const double cost = bc < n ? c[bc] : (bc < 2 * n ? -c[bc - n] : 0.0);
    if (cost == 0.0) continue;
    for (std::size_t col = 0; col <= tb.cols; ++col) tb.obj(col) -= cost * tb.at(r, col);
  }
  if (!tb.iterate(allowed)) return {LpStatus::Unbounded, 0.0, {}};

  LpResult res;
  res.status = LpStatus::Optimal;
  res.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t bc = tb.basis[r];
    if (bc < n) res.x[bc] += tb.rhs(r);
    else if (bc < 2 * n) res.x[bc - n] -= tb.rhs(r);
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  return res;
}

}  // namespace polysde
