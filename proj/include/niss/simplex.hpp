#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "niss/errors.hpp"

namespace niss {

enum class Sense { Le, Ge, Eq };

// Dense LP: optimize c^T x + constant subject to A x (sense) b, with each
// variable either free or nonnegative.
struct LpProblem {
  bool maximize = true;
  Eigen::VectorXd c;
  double constant = 0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<Sense> senses;
  std::vector<bool> free_vars;  // empty means all nonnegative
  std::vector<std::string> var_names;
  std::vector<std::string> row_names;
};

struct LpSolution {
  double objective = 0;  // includes the constant
  Eigen::VectorXd x;
  Eigen::VectorXd duals;  // one per original row, sign as d(objective)/d(b)
  int iterations = 0;
};

// Two-phase dense tableau simplex with Bland's rule. Throws InfeasibleLp or
// UnboundedLp.
LpSolution simplex_solve(const LpProblem& lp);

// Plain-text dump: objective, then one line per row with nonzero coefficients.
std::string dump_lp(const LpProblem& lp);

}  // namespace niss
