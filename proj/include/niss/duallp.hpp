#pragma once

#include <optional>
#include <vector>

#include "niss/distributions.hpp"
#include "niss/fourier.hpp"
#include "niss/simplex.hpp"

namespace niss {

inline constexpr std::size_t kDualSizeCap = 256;

// Biased maximal correlation under uniform input marginals in terms of the
// Fourier coefficients of the box multipliers. P is the d-fold cross kernel
// and chi(s, x) the uniform parities.
struct DualInstance {
  int q = 0;
  int d = 0;
  double q_u1 = 0;
  double q_v1 = 0;
  Eigen::MatrixXd p;
  Eigen::MatrixXd chi;
  bool p_invertible = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;

  double bias_u() const { return 2 * q_u1 - 1; }
  double bias_v() const { return 2 * q_v1 - 1; }
  std::size_t size() const { return static_cast<std::size_t>(p.rows()); }
};

// Refuses non-uniform marginals, q^d above kDualSizeCap, and kernels that
// are not symmetric.
DualInstance make_dual_instance(const JointPmf& joint, int d, double q_u1, double q_v1);

// Full multiplier LP for one pair of anchors. Variables are
// [lam+_f, lam-_f, lam+_g, lam-_g], each q^d coefficients. The stationarity
// rows pin lam+_f - lam-_f to P g_anchor and lam+_g - lam-_g to P^T f_anchor off
// the constant coordinate, so that the recovered f-bar equals g_anchor and
// g-bar equals f_anchor. Pointwise rows keep every multiplier function
// nonnegative; when P is invertible the recovered coefficients also carry
// explicit box rows (f-bar around the Q_V bias, g-bar around the Q_U bias).
// Minimizing the multiplier objective plus the bias product gives the mean
// of the two best-response values at the anchors.
LpProblem build_dual_lp(const DualInstance& inst, const std::vector<double>& f_anchor,
                        const std::vector<double>& g_anchor);

struct DualResult {
  double rho_b = 0;
  std::vector<double> f_anchor;  // best-responding coefficient vectors
  std::vector<double> g_anchor;
  LpSolution lp;                 // the combined LP at the best anchors
  int lps_solved = 0;
};

// Maximizes the LP optimum over anchor vertices of the two box polytopes.
DualResult solve_dual(const DualInstance& inst);

struct DualPrimalReport {
  double dual = 0;
  double primal = 0;  // F-PATH objective
  double gap = 0;     // dual - primal
  bool certificate = false;
};

DualPrimalReport dual_vs_primal_check(const JointPmf& joint, int d, double q_u1, double q_v1);

}  // namespace niss
