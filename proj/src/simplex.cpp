#include "niss/simplex.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace niss {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kMaxPivots = 200000;

class Tableau {
 public:
  Tableau(Eigen::MatrixXd body, std::vector<int> basis)
      : t_(std::move(body)), basis_(std::move(basis)) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  Eigen::MatrixXd& t() { return t_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int e) {
    t_.row(r) /= t_(r, e);
    for (int i = 0; i <= rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, e);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = e;
  }

  // Objective row from a cost vector: reduced costs and -c_B^T x_B.
  void price(const Eigen::VectorXd& cost) {
    const int m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cols()) = cost.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  // Bland's rule minimization over columns allowed[j]. Returns false when
  // unbounded.
  bool run(const std::vector<bool>& allowed, int& pivots) {
    const int m = rows();
    const int n = cols();
    for (;;) {
      int e = -1;
      for (int j = 0; j < n; ++j) {
        if (allowed[j] && t_(m, j) < -kPivotTol) {
          e = j;
          break;
        }
      }
      if (e < 0) return true;
      int r = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t_(i, e) <= kPivotTol) continue;
        const double ratio = t_(i, n) / t_(i, e);
        if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis_[i] < basis_[r])) {
          best = ratio;
          r = i;
        }
      }
      if (r < 0) return false;
      pivot(r, e);
      if (++pivots > kMaxPivots) throw Error("simplex_solve: pivot limit reached");
    }
  }

  void drop_row(int r) {
    const int keep = rows();  // objective row index before removal
    Eigen::MatrixXd nt(t_.rows() - 1, t_.cols());
    int k = 0;
    for (int i = 0; i <= keep; ++i) {
      if (i != r) nt.row(k++) = t_.row(i);
    }
    t_ = std::move(nt);
    basis_.erase(basis_.begin() + r);
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution simplex_solve(const LpProblem& lp) {
  const int m = static_cast<int>(lp.a.rows());
  const int nv = static_cast<int>(lp.a.cols());
  if (lp.c.size() != nv || lp.b.size() != m || static_cast<int>(lp.senses.size()) != m ||
      (!lp.free_vars.empty() && static_cast<int>(lp.free_vars.size()) != nv)) {
    throw DimensionError("simplex_solve: inconsistent LP dimensions");
  }
  if (!lp.a.allFinite() || !lp.b.allFinite() || !lp.c.allFinite()) {
    throw InvalidInput("simplex_solve: non-finite LP data");
  }

  // Column layout: structural columns (free variables split in two), then one
  // slack/surplus per inequality row, then one artificial per row needing it.
  std::vector<int> plus_col(nv), minus_col(nv, -1);
  int n = 0;
  for (int j = 0; j < nv; ++j) {
    plus_col[j] = n++;
    if (!lp.free_vars.empty() && lp.free_vars[j]) minus_col[j] = n++;
  }
  const int n_struct = n;
  std::vector<double> flip(m, 1.0);
  std::vector<Sense> sense(lp.senses);
  for (int i = 0; i < m; ++i) {
    if (lp.b(i) < 0) {
      flip[i] = -1.0;
      if (sense[i] == Sense::Le) sense[i] = Sense::Ge;
      else if (sense[i] == Sense::Ge) sense[i] = Sense::Le;
    }
  }
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  for (int i = 0; i < m; ++i) {
    if (sense[i] != Sense::Eq) slack_col[i] = n++;
  }
  const int first_art = n;
  for (int i = 0; i < m; ++i) {
    if (sense[i] != Sense::Le) art_col[i] = n++;
  }

  Eigen::MatrixXd std_a = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd std_b(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double v = flip[i] * lp.a(i, j);
      std_a(i, plus_col[j]) = v;
      if (minus_col[j] >= 0) std_a(i, minus_col[j]) = -v;
    }
    if (slack_col[i] >= 0) std_a(i, slack_col[i]) = sense[i] == Sense::Le ? 1.0 : -1.0;
    if (art_col[i] >= 0) std_a(i, art_col[i]) = 1.0;
    std_b(i) = flip[i] * lp.b(i);
  }
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < nv; ++j) {
    const double cj = lp.maximize ? -lp.c(j) : lp.c(j);
    cost(plus_col[j]) = cj;
    if (minus_col[j] >= 0) cost(minus_col[j]) = -cj;
  }

  Eigen::MatrixXd body = Eigen::MatrixXd::Zero(m + 1, n + 1);
  body.topLeftCorner(m, n) = std_a;
  body.col(n).head(m) = std_b;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = art_col[i] >= 0 ? art_col[i] : slack_col[i];
  Tableau tab(std::move(body), std::move(basis));
  std::vector<int> row_of(m);  // tableau row -> original row
  for (int i = 0; i < m; ++i) row_of[i] = i;

  LpSolution sol;
  std::vector<bool> allowed(n, true);
  if (first_art < n) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n);
    phase1.tail(n - first_art).setOnes();
    tab.price(phase1);
    tab.run(allowed, sol.iterations);
    const double infeas = -tab.t()(tab.rows(), n);
    if (infeas > 1e-8 * (1.0 + std_b.cwiseAbs().maxCoeff())) {
      throw InfeasibleLp("simplex_solve: LP is infeasible");
    }
    // Drive remaining artificials out of the basis, dropping redundant rows.
    for (int i = tab.rows() - 1; i >= 0; --i) {
      if (tab.basis()[i] < first_art) continue;
      int e = -1;
      for (int j = 0; j < first_art; ++j) {
        if (std::abs(tab.t()(i, j)) > kPivotTol) {
          e = j;
          break;
        }
      }
      if (e >= 0) {
        tab.pivot(i, e);
      } else {
        tab.drop_row(i);
        row_of.erase(row_of.begin() + i);
      }
    }
    for (int j = first_art; j < n; ++j) allowed[j] = false;
  }
  tab.price(cost);
  if (!tab.run(allowed, sol.iterations)) throw UnboundedLp("simplex_solve: LP is unbounded");

  Eigen::VectorXd xs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < tab.rows(); ++i) xs(tab.basis()[i]) = tab.t()(i, n);
  sol.x.resize(nv);
  for (int j = 0; j < nv; ++j) {
    sol.x(j) = xs(plus_col[j]) - (minus_col[j] >= 0 ? xs(minus_col[j]) : 0.0);
  }
  sol.objective = lp.c.dot(sol.x) + lp.constant;

  // Duals from the final basis: B^T y = c_B on the surviving rows.
  const int mr = tab.rows();
  sol.duals = Eigen::VectorXd::Zero(m);
  if (mr > 0) {
    Eigen::MatrixXd bmat(mr, mr);
    Eigen::VectorXd cb(mr);
    for (int k = 0; k < mr; ++k) {
      for (int i = 0; i < mr; ++i) bmat(i, k) = std_a(row_of[i], tab.basis()[k]);
      cb(k) = cost(tab.basis()[k]);
    }
    const Eigen::VectorXd y = bmat.transpose().fullPivLu().solve(cb);
    for (int i = 0; i < mr; ++i) {
      const int orig = row_of[i];
      sol.duals(orig) = (lp.maximize ? -y(i) : y(i)) * flip[orig];
    }
  }
  return sol;
}

std::string dump_lp(const LpProblem& lp) {
  std::ostringstream os;
  os.precision(12);
  const auto var = [&](int j) {
    return j < static_cast<int>(lp.var_names.size()) ? lp.var_names[j] : "x" + std::to_string(j);
  };
  os << (lp.maximize ? "maximize" : "minimize");
  for (int j = 0; j < lp.c.size(); ++j) {
    if (lp.c(j) != 0.0) os << ' ' << (lp.c(j) >= 0 ? "+" : "") << lp.c(j) << ' ' << var(j);
  }
  if (lp.constant != 0.0) os << " + const " << lp.constant;
  os << "\nsubject to\n";
  for (int i = 0; i < lp.a.rows(); ++i) {
    os << "  " << (i < static_cast<int>(lp.row_names.size()) ? lp.row_names[i] : "r" + std::to_string(i))
       << ':';
    for (int j = 0; j < lp.a.cols(); ++j) {
      if (lp.a(i, j) != 0.0) os << ' ' << (lp.a(i, j) >= 0 ? "+" : "") << lp.a(i, j) << ' ' << var(j);
    }
    os << (lp.senses[i] == Sense::Le ? " <= " : lp.senses[i] == Sense::Ge ? " >= " : " = ")
       << lp.b(i) << '\n';
  }
  os << "free:";
  for (int j = 0; j < lp.c.size(); ++j) {
    if (!lp.free_vars.empty() && lp.free_vars[j]) os << ' ' << var(j);
  }
  os << '\n';
  return os.str();
}

}  // namespace niss
