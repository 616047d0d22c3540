#include "niss/duallp.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "niss/fpath.hpp"
#include "niss/indexing.hpp"
#include "niss/oracle.hpp"

namespace niss {

DualInstance make_dual_instance(const JointPmf& joint, int d, double q_u1, double q_v1) {
  const int q = joint.rows();
  if (joint.cols() != q) throw DimensionError("make_dual_instance: square alphabet required");
  if (d < 1) throw DimensionError("make_dual_instance: d must be positive");
  if (q_u1 < 0 || q_u1 > 1 || q_v1 < 0 || q_v1 > 1) {
    throw InvalidInput("make_dual_instance: output probabilities must lie in [0,1]");
  }
  const Eigen::VectorXd mx = joint.row_marginal(), my = joint.col_marginal();
  for (int x = 0; x < q; ++x) {
    if (std::abs(mx(x) - 1.0 / q) > 1e-12 || std::abs(my(x) - 1.0 / q) > 1e-12) {
      throw InvalidInput("make_dual_instance: input marginals must be uniform");
    }
  }
  const std::size_t n = table_size(q, d);
  if (n > kDualSizeCap) throw CapExceeded("make_dual_instance: q^d exceeds 256");

  DualInstance inst;
  inst.q = q;
  inst.d = d;
  inst.q_u1 = q_u1;
  inst.q_v1 = q_v1;
  const OrthonormalBasis basis = default_basis(Eigen::VectorXd::Constant(q, 1.0 / q));
  const Eigen::MatrixXd rho = cross_correlation(joint, basis, basis);
  inst.p.resize(n, n);
  inst.chi.resize(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto sd = digits_of(s, q, d);
    for (std::size_t t = 0; t < n; ++t) {
      const auto td = digits_of(t, q, d);
      double pv = 1, cv = 1;
      for (int i = 0; i < d; ++i) {
        pv *= rho(sd[i], td[i]);
        cv *= basis.psi(sd[i], td[i]);  // t plays the role of the point x here
      }
      inst.p(s, t) = pv;
      inst.chi(s, t) = cv;
    }
  }
  if ((inst.p - inst.p.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInput("make_dual_instance: cross kernel is not symmetric");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> rank_check(inst.p);
  rank_check.setThreshold(1e-12);
  inst.p_invertible = rank_check.isInvertible();
  if (inst.p_invertible) inst.lu.compute(inst.p);
  return inst;
}

LpProblem build_dual_lp(const DualInstance& inst, const std::vector<double>& f_anchor,
                        const std::vector<double>& g_anchor) {
  const int n = static_cast<int>(inst.size());
  if (static_cast<int>(f_anchor.size()) != n || static_cast<int>(g_anchor.size()) != n) {
    throw DimensionError("build_dual_lp: anchor length must be q^d");
  }
  const Eigen::Map<const Eigen::VectorXd> fa(f_anchor.data(), n), ga(g_anchor.data(), n);
  const Eigen::VectorXd lf = inst.p * ga;
  const Eigen::VectorXd lg = inst.p.transpose() * fa;

  const int nv = 4 * n;
  const int n_box = inst.p_invertible ? 4 * n : 0;
  const int m = 2 * (n - 1) + 4 * n + n_box;
  LpProblem lp;
  lp.maximize = false;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.c(0) = 1 - inst.q_u1;
  lp.c(n) = inst.q_u1;
  lp.c(2 * n) = 1 - inst.q_v1;
  lp.c(3 * n) = inst.q_v1;
  lp.constant = inst.bias_u() * inst.bias_v();
  lp.a = Eigen::MatrixXd::Zero(m, nv);
  lp.b = Eigen::VectorXd::Zero(m);
  lp.senses.assign(m, Sense::Ge);
  lp.free_vars.assign(nv, true);
  const char* blocks[4] = {"lf+", "lf-", "lg+", "lg-"};
  for (int k = 0; k < 4; ++k) {
    for (int s = 0; s < n; ++s) lp.var_names.push_back(std::string(blocks[k]) + "_" + std::to_string(s));
  }

  int r = 0;
  for (int side = 0; side < 2; ++side) {
    const int plus = 2 * side * n, minus = plus + n;
    const Eigen::VectorXd& rhs = side == 0 ? lf : lg;
    for (int s = 1; s < n; ++s, ++r) {
      lp.a(r, plus + s) = 1;
      lp.a(r, minus + s) = -1;
      lp.b(r) = rhs(s);
      lp.senses[r] = Sense::Eq;
      lp.row_names.push_back(std::string(side == 0 ? "stat_f_" : "stat_g_") + std::to_string(s));
    }
  }
  for (int k = 0; k < 4; ++k) {
    for (int x = 0; x < n; ++x, ++r) {
      for (int s = 0; s < n; ++s) lp.a(r, k * n + s) = inst.chi(s, x);
      lp.row_names.push_back(std::string("nonneg_") + blocks[k] + "_" + std::to_string(x));
    }
  }
  if (inst.p_invertible) {
    // Recovered coefficients bar = P^{-1} (lam+ - lam-); value at x without the
    // constant term is sum_{s != 0} bar_s chi(s, x).
    const Eigen::MatrixXd pinv = inst.lu.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd eval = inst.chi.transpose();
    eval.col(0).setZero();
    const Eigen::MatrixXd row_map = eval * pinv;  // x -> coefficients on L
    const Eigen::MatrixXd row_map_t = eval * pinv.transpose();
    for (int side = 0; side < 2; ++side) {
      const int plus = 2 * side * n, minus = plus + n;
      const double offset = side == 0 ? inst.bias_v() : inst.bias_u();
      const Eigen::MatrixXd& map = side == 0 ? row_map : row_map_t;
      for (int bound = 0; bound < 2; ++bound) {
        for (int x = 0; x < n; ++x, ++r) {
          for (int s = 0; s < n; ++s) {
            lp.a(r, plus + s) = map(x, s);
            lp.a(r, minus + s) = -map(x, s);
          }
          if (bound == 0) {
            lp.senses[r] = Sense::Le;
            lp.b(r) = 1 - offset;
          } else {
            lp.senses[r] = Sense::Ge;
            lp.b(r) = -1 - offset;
          }
          lp.row_names.push_back(std::string(side == 0 ? "box_f_" : "box_g_") +
                                 (bound == 0 ? "hi_" : "lo_") + std::to_string(x));
        }
      }
    }
  }
  return lp;
}

namespace {

std::vector<std::vector<double>> anchors(const DualInstance& inst, double bias) {
  const std::size_t n = inst.size();
  const std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<std::vector<double>> out;
  for (const auto& v : box_polytope_vertices(w, bias)) {
    std::vector<double> c(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t x = 0; x < n; ++x) c[s] += w[x] * inst.chi(s, x) * v[x];
    }
    c[0] = bias;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

DualResult solve_dual(const DualInstance& inst) {
  const auto fa = anchors(inst, inst.bias_u());
  const auto ga = anchors(inst, inst.bias_v());
  DualResult res;
  // The LP separates into an f block depending only on the g anchor and a g
  // block depending only on the f anchor, so the two maximizations decouple.
  double best = -std::numeric_limits<double>::infinity();
  std::size_t bg = 0;
  for (std::size_t j = 0; j < ga.size(); ++j) {
    const auto sol = simplex_solve(build_dual_lp(inst, fa.front(), ga[j]));
    ++res.lps_solved;
    if (sol.objective > best + 1e-12) {
      best = sol.objective;
      bg = j;
    }
  }
  best = -std::numeric_limits<double>::infinity();
  std::size_t bf = 0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const auto sol = simplex_solve(build_dual_lp(inst, fa[i], ga[bg]));
    ++res.lps_solved;
    if (sol.objective > best + 1e-12) {
      best = sol.objective;
      bf = i;
      res.lp = sol;
    }
  }
  res.rho_b = res.lp.objective;
  res.f_anchor = fa[bf];
  res.g_anchor = ga[bg];
  return res;
}

DualPrimalReport dual_vs_primal_check(const JointPmf& joint, int d, double q_u1, double q_v1) {
  if (joint.rows() != 2 || joint.cols() != 2 || d > 3) {
    throw DimensionError("dual_vs_primal_check: binary inputs with d <= 3 only");
  }
  DualPrimalReport rep;
  rep.dual = solve_dual(make_dual_instance(joint, d, q_u1, q_v1)).rho_b;
  const auto state = fpath_solve(make_primal_instance(joint, d, q_u1, q_v1));
  rep.primal = state.objective;
  rep.gap = rep.dual - rep.primal;
  rep.certificate = state.certificate.has_value();
  return rep;
}

}  // namespace niss
