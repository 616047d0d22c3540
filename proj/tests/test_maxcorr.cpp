#include <doctest.h>

#include <cmath>
#include <random>

#include "niss/indexing.hpp"
#include "niss/lexico.hpp"
#include "niss/maxcorr.hpp"
#include "niss/oracle.hpp"

using namespace niss;

namespace {

JointPmf ternary_joint() {
  Eigen::MatrixXd p(3, 3);
  p << 2.0 / 15, 2.0 / 15, 2.0 / 15, 0.2, 0.1, 0.0, 1.0 / 15, 1.0 / 15, 1.0 / 6;
  return JointPmf(p);
}

// Grid oracle for binary inputs: zero-mean f with |f| <= 1 is fixed by f(+1).
double bounded_grid_oracle(const JointPmf& j) {
  const Eigen::VectorXd px = j.row_marginal(), py = j.col_marginal();
  double best = 0;
  const int n = 2000;
  for (int a = 0; a <= n; ++a) {
    const double f1 = -1 + 2.0 * a / n, f0 = -px(1) * f1 / px(0);
    if (std::abs(f0) > 1) continue;
    for (int b = 0; b <= n; b += 4) {
      const double g1 = -1 + 2.0 * b / n, g0 = -py(1) * g1 / py(0);
      if (std::abs(g0) > 1) continue;
      const double v = j(0, 0) * f0 * g0 + j(0, 1) * f0 * g1 + j(1, 0) * f1 * g0 + j(1, 1) * f1 * g1;
      best = std::max(best, v);
    }
  }
  return best;
}

double direct_expectation(const std::vector<double>& f, const std::vector<double>& g, const JointPmf& j, int d) {
  const RealTable ft{j.rows(), d, f}, gt{j.cols(), d, g};
  return exact_expectation(ft, gt, j);
}

}  // namespace

TEST_CASE("single-letter maximal correlation") {
  const SingleLetterCorrelation ind = maximal_correlation_single_letter(
      product_joint(Eigen::Vector2d(0.3, 0.7), Eigen::Vector2d(0.5, 0.5)));
  CHECK(std::abs(ind.bounded) < 1e-14);
  CHECK(std::abs(ind.hgr) < 1e-12);

  Eigen::MatrixXd same(2, 2);
  same << 0.5, 0, 0, 0.5;
  const SingleLetterCorrelation id = maximal_correlation_single_letter(JointPmf(same));
  CHECK(id.bounded == doctest::Approx(1.0));
  CHECK(id.f_coeffs[1] == doctest::Approx(1.0));
  CHECK(id.g_coeffs[1] == doctest::Approx(1.0));

  const SingleLetterCorrelation ds = maximal_correlation_single_letter(dsbs(0.3));
  CHECK(ds.hgr == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(ds.bounded == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(std::abs(ds.bounded - bounded_grid_oracle(dsbs(0.3))) < 1e-9);

  const JointPmf biased = binary_joint(0.6, 0.7, 0.4);
  const SingleLetterCorrelation b = maximal_correlation_single_letter(biased);
  CHECK(std::abs(b.bounded - bounded_grid_oracle(biased)) < 2e-3);
  CHECK(b.bounded <= bounded_grid_oracle(biased) + 1e-12 + 2e-3);
  CHECK(b.bounded <= b.hgr + 1e-12);
}

TEST_CASE("single-letter ternary bounded correlation against the vertex oracle") {
  const JointPmf t = ternary_joint();
  const SingleLetterCorrelation s = maximal_correlation_single_letter(t);
  const PrimalInstance inst = make_primal_instance(t, 1, 0.5, 0.5);
  double best = -2;
  for (const auto& a : box_polytope_vertices(inst.x_space.weights(), 0.0)) {
    for (const auto& b : box_polytope_vertices(inst.y_space.weights(), 0.0)) {
      best = std::max(best, exact_expectation(RealTable{3, 1, a}, RealTable{3, 1, b}, t));
    }
  }
  CHECK(s.bounded == doctest::Approx(best).epsilon(1e-9));
  CHECK(s.bounded <= s.hgr + 1e-9);
}

TEST_CASE("primal objective") {
  const PrimalInstance inst = make_primal_instance(dsbs(0.3), 1, 0.25, 0.5);
  CHECK(primal_objective(bias_only(2, -0.5), bias_only(2, 0.0), inst) == doctest::Approx(0.0));
  const PrimalInstance u = make_primal_instance(dsbs(0.3), 1, 0.5, 0.5);
  CHECK(primal_objective(std::vector<double>{0, 1}, std::vector<double>{0, 1}, u) == doctest::Approx(0.4));
  CHECK_THROWS_AS(primal_objective(std::vector<double>{0.2, 1}, std::vector<double>{0, 1}, u), ConstraintViolation);

  const JointPmf j = binary_joint(0.6, 0.7, 0.4);
  const PrimalInstance p2 = make_primal_instance(j, 2, 0.5, 0.25);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> fv(4, -1.0), gv(4, -1.0);
    for (double& v : fv) v = (rng() & 1) ? 1.0 : -1.0;
    for (double& v : gv) v = (rng() & 1) ? 1.0 : -1.0;
    const auto fc = p2.x_space.analyze(fv), gc = p2.y_space.analyze(gv);
    const PrimalInstance pinned = make_primal_instance(j, 2, (1 + fc[0]) / 2, (1 + gc[0]) / 2);
    CHECK(std::abs(primal_objective(fc, gc, pinned) - direct_expectation(fv, gv, j, 2)) < 1e-12);
  }
}

TEST_CASE("membership of coefficient vectors") {
  const FourierSpace sp = FourierSpace::product(default_basis(Eigen::Vector2d(0.4, 0.6)), 2);
  const std::vector<double> table{1, -1, -1, 1};
  const auto c = sp.analyze(table);
  const MembershipReport m = check_membership(c, sp, c[0]);
  CHECK(m.feasible);
  CHECK(m.max_abs_value == doctest::Approx(1.0));
  const MembershipReport h = check_membership(bias_only(4, 0.5), sp, 0.5);
  CHECK(h.feasible);
  std::vector<double> big{0, 1.5, 0, 0};
  const MembershipReport bad = check_membership(big, sp, 0.0);
  CHECK_FALSE(bad.feasible);
  CHECK(bad.box_violation > 0.1);
  CHECK_FALSE(check_membership(bias_only(4, 0.5), sp, 0.3).feasible);
}

TEST_CASE("equi-biased objective equals the general objective") {
  const double rho = 0.4;
  const PrimalInstance inst = make_primal_instance(dsbs((1 - rho) / 2), 2, 0.25, 0.25);
  const LexPair lp = lex_pair(2, 0.25, 0.25);
  const FourierVector f{2, 2, inst.x_space.analyze(lp.f.values)};
  CHECK(equibiased_objective(f, rho) == doctest::Approx(primal_objective(f.coeffs, f.coeffs, inst)).epsilon(1e-13));
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> v(8);
    for (double& x : v) x = (rng() & 1) ? 1.0 : -1.0;
    const FourierVector fr = fourier_transform(RealTable{2, 3, v}, default_basis(Eigen::Vector2d(0.5, 0.5)));
    const PrimalInstance p3 = make_primal_instance(dsbs((1 - rho) / 2), 3, (1 + fr.coeffs[0]) / 2, (1 + fr.coeffs[0]) / 2);
    CHECK(equibiased_objective(fr, rho) == doctest::Approx(primal_objective(fr.coeffs, fr.coeffs, p3)).epsilon(1e-12));
    CHECK(equibiased_objective(fr, 1.0) <= 1 + 1e-12);
  }
  CHECK(equibiased_objective(FourierVector{2, 2, bias_only(4, 0.3)}, rho) == doctest::Approx(0.09));
}

TEST_CASE("target directions") {
  CHECK_FALSE(direction_of_target(TargetPmf(Eigen::Vector2d(0.3, 0.7) * Eigen::RowVector2d(0.5, 0.5))));
  Eigen::MatrixXd q(2, 2);
  const double c = 0.05;
  q << 0.3 * 0.4 + c, 0.3 * 0.6 - c, 0.7 * 0.4 - c, 0.7 * 0.6 + c;
  const auto dir = direction_of_target(TargetPmf(q));
  REQUIRE(dir);
  CHECK(dir->t == doctest::Approx(16 * c * c));
  CHECK(dir->alpha(0, 0) == doctest::Approx(1.0));

  std::mt19937_64 rng(21);
  std::exponential_distribution<double> e(1.0);
  for (int k = 0; k < 30; ++k) {
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 9; ++i) m.data()[i] = e(rng);
    const TargetPmf t(m / m.sum());
    const auto d = direction_of_target(t);
    REQUIRE(d);
    CHECK(d->alpha.squaredNorm() == doctest::Approx(1.0));
    const TargetPmf back = target_from_direction(d->alpha, d->t, t.row_marginal(), t.col_marginal());
    CHECK((back.matrix() - t.matrix()).cwiseAbs().maxCoeff() < 1e-12);
    // Consistency with the centered expectations.
    const ExpectationVector ev = psi_map(t);
    for (int u = 1; u < 3; ++u) {
      for (int v = 1; v < 3; ++v) {
        CHECK(ev.e(u, v) - ev.mu(u) * ev.nu(v) == doctest::Approx(std::sqrt(d->t) * d->alpha(u - 1, v - 1)));
      }
    }
  }
}

TEST_CASE("directional objective") {
  const JointPmf j = binary_joint(0.6, 0.7, 0.4);
  const PrimalInstance prim = make_primal_instance(j, 2, 0.25, 0.5);
  const auto f = prim.x_space.analyze(std::vector<double>{1, -1, -1, -1});
  const auto g = prim.y_space.analyze(std::vector<double>{1, 1, -1, -1});
  const PrimalInstance pinned = make_primal_instance(j, 2, (1 + f[0]) / 2, (1 + g[0]) / 2);
  const DirectionalInstance bin2 =
      make_directional_instance(j, 2, Eigen::Vector2d((1 - f[0]) / 2, (1 + f[0]) / 2),
                                Eigen::Vector2d((1 - g[0]) / 2, (1 + g[0]) / 2));
  const DirectionalReport r = directional_objective_and_constraints({f}, {g}, bin2, Eigen::MatrixXd::Ones(1, 1));
  CHECK(r.objective == doctest::Approx(primal_objective(f, g, pinned) - f[0] * g[0]).epsilon(1e-13));
  CHECK(r.residuals.cwiseAbs().maxCoeff() < 1e-14);

  const Eigen::Vector3d qu(0.4, 0.3, 0.3), qv(0.2, 0.3, 0.5);
  const JointPmf t = ternary_joint();
  const DirectionalInstance tern = make_directional_instance(t, 1, qu, qv);
  std::vector<std::vector<double>> fp, gp;
  for (int u = 1; u < 3; ++u) fp.push_back(bias_only(3, 2 * qu(u) - 1));
  for (int v = 1; v < 3; ++v) gp.push_back(bias_only(3, 2 * qv(v) - 1));
  Eigen::MatrixXd alpha(2, 2);
  alpha << 0.5, 0.5, 0.5, 0.5;
  const DirectionalReport prod = directional_objective_and_constraints(fp, gp, tern, alpha);
  CHECK(std::abs(prod.objective) < 1e-14);
  CHECK(prod.residuals.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(prod.box_violation == 0.0);
  CHECK(prod.aggregate_violation == 0.0);

  // Deterministic ternary-output tables at d = 1: residuals must agree with
  // centered expectations computed by enumeration.
  const TruthTable ft{3, 1, 3, {0, 1, 2}}, gt{3, 1, 3, {2, 0, 1}};
  const auto fi = indicator_decompose(ft), gi = indicator_decompose(gt);
  const Eigen::Vector3d pu = t.row_marginal(), pv(t.col_marginal()(1), t.col_marginal()(2), t.col_marginal()(0));
  const DirectionalInstance inst = make_directional_instance(t, 1, pu, pv);
  std::vector<std::vector<double>> fc, gc;
  for (int u = 1; u < 3; ++u) fc.push_back(inst.x_space.analyze(fi[u].values));
  for (int v = 1; v < 3; ++v) gc.push_back(inst.y_space.analyze(gi[v].values));
  Eigen::MatrixXd centered(2, 2);
  for (int u = 1; u < 3; ++u) {
    for (int v = 1; v < 3; ++v) {
      centered(u - 1, v - 1) = exact_expectation(fi[u], gi[v], t) - (2 * pu(u) - 1) * (2 * pv(v) - 1);
    }
  }
  const Eigen::MatrixXd a = centered / centered.norm();
  const DirectionalReport rep = directional_objective_and_constraints(fc, gc, inst, a);
  CHECK(rep.objective == doctest::Approx(centered.norm()).epsilon(1e-12));
  CHECK(rep.residuals.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(rep.f_bias_errors.maxCoeff() < 1e-12);
  CHECK(rep.g_bias_errors.maxCoeff() < 1e-12);
  CHECK(rep.box_violation < 1e-12);
  CHECK(rep.aggregate_violation < 1e-12);
}

TEST_CASE("data processing: output correlation of derandomized pairs stays below HGR") {
  std::mt19937_64 rng(17);
  const std::vector<JointPmf> joints{dsbs(0.3), binary_joint(0.6, 0.7, 0.4), ternary_joint()};
  for (const auto& j : joints) {
    const double hgr = maximal_correlation_single_letter(j).hgr;
    for (int d = 1; d <= 3; ++d) {
      for (int k = 0; k < 30; ++k) {
        TruthTable f{j.rows(), d, 2, std::vector<int>(table_size(j.rows(), d))};
        TruthTable g{j.cols(), d, 2, std::vector<int>(table_size(j.cols(), d))};
        for (int& v : f.values) v = static_cast<int>(rng() & 1);
        for (int& v : g.values) v = static_cast<int>(rng() & 1);
        const Eigen::MatrixXd out = exact_output_joint(f, g, j);
        const double pu = out.row(1).sum(), pv = out.col(1).sum();
        if (pu < 1e-12 || pu > 1 - 1e-12 || pv < 1e-12 || pv > 1 - 1e-12) continue;
        const double corr = (out(1, 1) - pu * pv) / std::sqrt(pu * (1 - pu) * pv * (1 - pv));
        CHECK(std::abs(corr) <= hgr + 1e-9);
      }
    }
  }
}

TEST_CASE("tensorization: best output correlation at d = 2 equals d = 1") {
  for (const auto& j : {dsbs(0.3), binary_joint(0.6, 0.7, 0.4)}) {
    // Exhaustive over every pair of non-constant binary-output tables.
    const auto best_corr = [&](int d) {
      const int n = 1 << d;
      double best = -1;
      for (int a = 1; a + 1 < (1 << n); ++a) {
        for (int b = 1; b + 1 < (1 << n); ++b) {
          TruthTable f{2, d, 2, std::vector<int>(n)}, g{2, d, 2, std::vector<int>(n)};
          for (int x = 0; x < n; ++x) {
            f.values[x] = (a >> x) & 1;
            g.values[x] = (b >> x) & 1;
          }
          const Eigen::MatrixXd out = exact_output_joint(f, g, j);
          const double pu = out.row(1).sum(), pv = out.col(1).sum();
          best = std::max(best, (out(1, 1) - pu * pv) / std::sqrt(pu * (1 - pu) * pv * (1 - pv)));
        }
      }
      return best;
    };
    const double d1 = best_corr(1);
    CHECK(d1 == doctest::Approx(binary_pearson(j.matrix())).epsilon(1e-12));
    CHECK(best_corr(2) == doctest::Approx(d1).epsilon(1e-9));
  }
}
