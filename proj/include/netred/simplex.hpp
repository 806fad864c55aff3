#pragma once

#include <vector>

#include "netred/linalg.hpp"

namespace netred {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  Vec x;
  double objective = 0.0;
};

// Dense two-phase tableau simplex with Bland's rule for
//   min c^T x  s.t.  A x >= b,  x >= 0.
// Sized for the cutting-plane master problems: tens of variables,
// hundreds of constraints.
class SimplexSolver {
 public:
  static LpResult solve(const Vec& c, const Mat& a, const Vec& b) {
    const Eigen::Index n = c.size();
    const Eigen::Index m = a.rows();
    if (a.cols() != n || b.size() != m)
      throw DimensionMismatch("LP dimension mismatch");
    if (m == 0) {
      LpResult res;
      res.x = Vec::Zero(n);
      return res;
    }

    // Equality form: A x - s = b with s >= 0; rows with negative rhs are
    // negated so the tableau rhs is nonnegative. Rows whose surplus column
    // ends up with coefficient +1 start basic; the rest get artificials.
    Mat eq(m, n + m);
    Vec rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      eq.row(i).head(n) = sign * a.row(i);
      eq.row(i).tail(m).setZero();
      eq(i, n + i) = -sign;
      rhs(i) = sign * b(i);
    }
    std::vector<Eigen::Index> artRows;
    for (Eigen::Index i = 0; i < m; ++i)
      if (eq(i, n + i) < 0.0) artRows.push_back(i);
    const auto nArt = static_cast<Eigen::Index>(artRows.size());
    const Eigen::Index total = n + m + nArt;

    Mat tab(m, total + 1);
    tab.setZero();
    tab.leftCols(n + m) = eq;
    tab.col(total) = rhs;
    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;  // surplus basic
    for (Eigen::Index k = 0; k < nArt; ++k) {
      tab(artRows[k], n + m + k) = 1.0;
      basis[artRows[k]] = n + m + k;
    }

    if (nArt > 0) {
      Vec phase1 = Vec::Zero(total);
      phase1.tail(nArt).setOnes();
      if (!runSimplex(tab, basis, phase1, total)) return {LpStatus::unbounded, {}, 0.0};
      double artVal = 0.0;
      for (Eigen::Index i = 0; i < m; ++i)
        if (basis[i] >= n + m) artVal += tab(i, total);
      if (artVal > 1e-8) return {LpStatus::infeasible, {}, 0.0};
      // Pivot any artificial still in the basis out on a non-artificial column.
      for (Eigen::Index i = 0; i < m; ++i) {
        if (basis[i] < n + m) continue;
        for (Eigen::Index jcol = 0; jcol < n + m; ++jcol) {
          if (std::abs(tab(i, jcol)) > 1e-9) {
            pivot(tab, basis, i, jcol);
            break;
          }
        }
      }
    }

    Vec cost = Vec::Zero(total);
    cost.head(n) = c;
    cost.tail(nArt).setConstant(1e30);  // keep artificials out
    if (!runSimplex(tab, basis, cost, total)) return {LpStatus::unbounded, {}, 0.0};

    LpResult res;
    res.x = Vec::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[i] < n) res.x(basis[i]) = tab(i, total);
    res.objective = c.dot(res.x);
    return res;
  }

 private:
  static void pivot(Mat& tab, std::vector<Eigen::Index>& basis, Eigen::Index row,
                    Eigen::Index col) {
    tab.row(row) /= tab(row, col);
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (i == row) continue;
      const double factor = tab(i, col);
      if (factor != 0.0) tab.row(i) -= factor * tab.row(row);
    }
    basis[row] = col;
  }

  // Returns false on unboundedness.
  static bool runSimplex(Mat& tab, std::vector<Eigen::Index>& basis,
                         const Vec& cost, Eigen::Index total) {
    const Eigen::Index m = tab.rows();
    const int maxIter = 20000;
    for (int iter = 0; iter < maxIter; ++iter) {
      // Reduced costs: c_j - c_B^T B^{-1} A_j over the current tableau.
      Vec cb(m);
      for (Eigen::Index i = 0; i < m; ++i) cb(i) = cost(basis[i]);
      Eigen::Index enter = -1;
      for (Eigen::Index jcol = 0; jcol < total; ++jcol) {
        const double reduced = cost(jcol) - cb.dot(tab.col(jcol));
        if (reduced < -1e-9) {  // Bland: first improving column
          enter = jcol;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double bestRatio = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (tab(i, enter) > 1e-11) {
          const double ratio = tab(i, total) / tab(i, enter);
          if (leave < 0 || ratio < bestRatio - 1e-12 ||
              (ratio < bestRatio + 1e-12 && basis[i] < basis[leave])) {
            leave = i;
            bestRatio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(tab, basis, leave, enter);
    }
    throw NumericalError("simplex iteration limit reached");
  }
};

inline LpResult solveLp(const Vec& c, const Mat& a, const Vec& b) {
  return SimplexSolver::solve(c, a, b);
}

}  // namespace netred
