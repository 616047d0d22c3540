#include <doctest.h>

#include <cmath>
#include <random>

#include "niss/fpath.hpp"
#include "niss/indexing.hpp"
#include "niss/lexico.hpp"
#include "niss/oracle.hpp"
#include "niss/protocol.hpp"

using namespace niss;

namespace {

double e_uv(const Eigen::MatrixXd& p) { return p(0, 0) + p(1, 1) - p(0, 1) - p(1, 0); }

double three_sigma(double p, long long n) { return 3 * std::sqrt(p * (1 - p) / static_cast<double>(n)) + 1e-12; }

// Random valid family: f~_u = 2 p_u(x) - 1 for a random pmf p(x) on U.
RandomizedFamily random_family(std::mt19937_64& rng, int q, int d, int k) {
  std::exponential_distribution<double> e(1.0);
  RandomizedFamily fam{q, d, std::vector<std::vector<double>>(k, std::vector<double>(table_size(q, d)))};
  for (std::size_t x = 0; x < fam.points(); ++x) {
    std::vector<double> p(k);
    double s = 0;
    for (double& v : p) s += (v = e(rng));
    for (int u = 0; u < k; ++u) fam.f[u][x] = 2 * p[u] / s - 1;
  }
  return fam;
}

JointPmf ternary_joint() {
  Eigen::MatrixXd p(3, 3);
  p << 2.0 / 15, 2.0 / 15, 2.0 / 15, 0.2, 0.1, 0.0, 1.0 / 15, 1.0 / 15, 1.0 / 6;
  return JointPmf(p);
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(42, 1), b(42, 1), c(42, 2), e(43, 1);
  bool differ_stream = false, differ_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differ_stream = differ_stream || x != c.uniform();
    differ_seed = differ_seed || x != e.uniform();
  }
  CHECK(differ_stream);
  CHECK(differ_seed);
  Rng vn(7, 0);
  vn.enable_von_neumann(0.8);
  long long heads = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) heads += vn.coin(0.3) ? 1 : 0;
  CHECK(std::abs(heads / double(n) - 0.3) < three_sigma(0.3, n));
  CHECK(vn.raw_bits_used() > static_cast<std::uint64_t>(n));
}

TEST_CASE("binary derandomization") {
  Rng rng(1, 0);
  const FiniteSampler one = derandomize_binary(RealTable{2, 1, {1.0, 1.0}});
  for (int i = 0; i < 100; ++i) CHECK(one.sample(i % 2, rng) == 1);
  const FiniteSampler half = derandomize_binary(RealTable{2, 1, {0.0, 0.0}});
  CHECK(half.conditional_law(0)[1] == doctest::Approx(0.5));
  const int n = 100000;
  long long ones = 0;
  for (int i = 0; i < n; ++i) ones += half.sample(0, rng);
  CHECK(std::abs(ones / double(n) - 0.5) < three_sigma(0.5, n));
  CHECK_THROWS_AS(derandomize_binary(RealTable{2, 1, {1.5, 0.0}}), ConstraintViolation);
}

TEST_CASE("derandomizing an F-PATH iterate preserves its mean") {
  const PrimalInstance inst = make_primal_instance(binary_joint(0.6, 0.7, 0.4), 2, 0.25, 0.125);
  const FPathState st = fpath_solve(inst);
  auto values = inst.x_space.synthesize(st.iterate.f);
  for (double& v : values) v = std::clamp(v, -1.0, 1.0);
  const FiniteSampler s = derandomize_binary(RealTable{2, 2, values});
  const auto& w = inst.x_space.weights();
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::mt19937_64 eng(9);
  Rng rng(9, 1);
  const int n = 200000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += s.sample(pick(eng), rng) == 1 ? 1.0 : -1.0;
  const double p = (1 + inst.bias_f) / 2;
  CHECK(std::abs((sum / n + 1) / 2 - p) < three_sigma(p, n));
}

TEST_CASE("finite derandomization") {
  std::mt19937_64 rng(4);
  // |U| = 2 reduces to the binary rule.
  const RealTable f1{2, 2, {0.2, -0.6, 1.0, -1.0}};
  const FiniteSampler two = derandomize_finite(binary_family(f1));
  for (std::size_t x = 0; x < 4; ++x) CHECK(two.coin_biases(x)[0] == doctest::Approx((1 + f1.values[x]) / 2));
  for (int k : {3, 4}) {
    const RandomizedFamily fam = random_family(rng, 3, 2, k);
    const FiniteSampler s = derandomize_finite(fam);
    for (std::size_t x = 0; x < fam.points(); ++x) {
      const auto law = s.conditional_law(x);
      for (int u = 0; u < k; ++u) CHECK(law[u] == doctest::Approx((1 + fam.f[u][x]) / 2).epsilon(1e-12));
      for (double b : s.coin_biases(x)) {
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
      }
    }
  }
  const Eigen::Vector3d q(0.2, 0.5, 0.3);
  const FiniteSampler c = derandomize_finite(constant_family(2, 1, q));
  Rng r(3, 0);
  const int n = 100000;
  std::vector<long long> counts(3, 0);
  for (int i = 0; i < n; ++i) ++counts[c.sample(i & 1, r)];
  for (int u = 0; u < 3; ++u) CHECK(std::abs(counts[u] / double(n) - q(u)) < three_sigma(q(u), n));
  const TruthTable det{2, 2, 3, {0, 2, 1, 2}};
  const FiniteSampler ds = derandomize_finite(deterministic_family(det));
  for (std::size_t x = 0; x < 4; ++x) {
    for (int i = 0; i < 5; ++i) CHECK(ds.sample(x, r) == det.values[x]);
  }
  RandomizedFamily bad = random_family(rng, 2, 1, 3);
  bad.f[0][0] += 0.1;
  CHECK_THROWS_AS(validate_family(bad), ConstraintViolation);
}

TEST_CASE("RD preservation under exact conditional laws") {
  std::mt19937_64 rng(8);
  for (int d = 1; d <= 2; ++d) {
    for (int k : {2, 3}) {
      const JointPmf j = k == 2 ? binary_joint(0.6, 0.7, 0.4) : ternary_joint();
      const int q = j.rows();
      const FiniteSampler a = derandomize_finite(random_family(rng, q, d, k));
      const FiniteSampler b = derandomize_finite(random_family(rng, q, d, k));
      const PreservationReport r = rd_preservation(a, b, j);
      CHECK(r.max_error < 1e-12);
      // Independent recomputation of one cross-expectation.
      const RealTable fu{q, d, a.family().f[k - 1]}, gv{q, d, b.family().f[0]};
      CHECK(r.cross_tilde(k - 1, 0) == doctest::Approx(exact_expectation(fu, gv, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("coin-mixture identity") {
  std::mt19937_64 rng(6);
  const JointPmf j = binary_joint(0.6, 0.7, 0.4);
  for (int d = 1; d <= 2; ++d) {
    const RandomizedFamily f = random_family(rng, 2, d, 2), g = random_family(rng, 2, d, 2);
    const CoinProtocol p = gated_protocol(1.0, f, g, Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.5, 0.5), "test");
    const Eigen::MatrixXd law = exact_protocol_law(p, j);
    CHECK(e_uv(law) == doctest::Approx(exact_expectation(RealTable{2, d, f.f[1]}, RealTable{2, d, g.f[1]}, j)).epsilon(1e-12));
  }
}

TEST_CASE("uniform-output protocol") {
  const JointPmf j = dsbs(0.3);
  CHECK(coin_protocol_uniform_output(j, 0.0).lambda == 0.0);
  const CoinProtocol full = coin_protocol_uniform_output(j, 0.4);
  CHECK(full.lambda == doctest::Approx(1.0));
  const CoinProtocol mid = coin_protocol_uniform_output(j, 0.2);
  CHECK(mid.lambda == doctest::Approx(std::sqrt(0.5)));
  CHECK(e_uv(exact_protocol_law(mid, j)) == doctest::Approx(0.2).epsilon(1e-12));
  const long long n = 1000000;
  for (const auto& [proto, target] : {std::pair{full, 0.4}, std::pair{mid, 0.2}}) {
    const EmpiricalJoint emp = monte_carlo_eval(proto, j, n, 11);
    const Eigen::MatrixXd p = emp.pmf();
    const double agree = p(0, 0) + p(1, 1), want = (1 + target) / 2;
    CHECK(std::abs(agree - want) < three_sigma(want, n));
  }
  CHECK_THROWS_AS(coin_protocol_uniform_output(j, 0.5), InfeasibleError);
  const CoinProtocol neg = coin_protocol_uniform_output(j, -0.3);
  CHECK(e_uv(exact_protocol_law(neg, j)) == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("FB protocol") {
  const JointPmf j = binary_joint(0.6, 0.7, 0.4);
  const PrimalInstance inst = make_primal_instance(j, 2, 0.25, 0.125);
  const FPathState st = fpath_solve(inst);
  const double bu = inst.bias_f, bv = inst.bias_g;
  const Eigen::Vector2d qu(0.75, 0.25), qv(0.875, 0.125);
  const Eigen::MatrixXd prod = qu * qv.transpose();
  const CoinProtocol p0 = coin_protocol_fb(inst, st, prod(0, 1) + prod(1, 0));
  CHECK(p0.lambda == doctest::Approx(0.0));
  CHECK((exact_protocol_law(p0, j) - prod).cwiseAbs().maxCoeff() < 1e-12);

  const auto target_at = [&](double eu) {
    const double p11 = (eu - 1 + 2 * 0.25 + 2 * 0.125) / 4;
    Eigen::Matrix2d t;
    t << 1 - 0.25 - 0.125 + p11, 0.125 - p11, 0.25 - p11, p11;
    return Eigen::MatrixXd(t);
  };
  const long long n = 1000000;
  for (double frac : {1.0, 0.5}) {
    const double eu = bu * bv + frac * (st.objective - bu * bv);
    const Eigen::MatrixXd t = target_at(eu);
    const CoinProtocol p = coin_protocol_fb(inst, st, t(0, 1) + t(1, 0));
    CHECK(p.lambda == doctest::Approx(std::sqrt(frac)).epsilon(1e-9));
    CHECK((exact_protocol_law(p, j) - t).cwiseAbs().sum() < 1e-9);
    const EmpiricalJoint emp = monte_carlo_eval(p, j, n, 5);
    CHECK(emp.tv_to(t) <= emp.tv_tolerance(t));
  }
  CHECK_THROWS_AS(coin_protocol_fb(inst, st, 0.0), InfeasibleError);
}

TEST_CASE("FF protocol") {
  const JointPmf t = ternary_joint();
  const TruthTable f{3, 1, 3, {0, 1, 2}}, g{3, 1, 3, {0, 1, 2}};
  const TargetPmf extreme(exact_output_joint(f, g, t));
  const TargetPmf prod = product_of_marginals(extreme);
  CHECK(coin_protocol_ff(t, prod, f, g).lambda == 0.0);
  const TargetPmf target = star_mix(extreme, 0.6);
  const CoinProtocol p = coin_protocol_ff(t, target, f, g);
  CHECK(p.lambda * p.lambda == doctest::Approx(0.6).epsilon(1e-12));
  CHECK((exact_protocol_law(p, t) - target.matrix()).cwiseAbs().sum() < 1e-12);
  const EmpiricalJoint emp = monte_carlo_eval(p, t, 1000000, 2);
  CHECK(emp.tv_to(target.matrix()) <= emp.tv_tolerance(target.matrix()));
  CHECK_THROWS_AS(coin_protocol_ff(t, star_mix(extreme, 1.0), f, TruthTable{3, 1, 3, {1, 0, 2}}), InfeasibleError);

  // Binary targets: FF with the dictator extreme agrees with FB.
  const JointPmf j = dsbs(0.3);
  const TruthTable dict{2, 1, 2, {0, 1}};
  const TargetPmf ext(exact_output_joint(dict, dict, j));
  const TargetPmf tb = star_mix(ext, 0.5);
  const CoinProtocol ff = coin_protocol_ff(j, tb, dict, dict);
  const PrimalInstance inst = make_primal_instance(j, 1, 0.5, 0.5);
  const CoinProtocol fb = coin_protocol_fb(inst, fpath_solve(inst), tb(0, 1) + tb(1, 0));
  CHECK((exact_protocol_law(ff, j) - exact_protocol_law(fb, j)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Monte-Carlo evaluation of deterministic pairs") {
  const JointPmf j = dsbs(0.3);
  const TruthTable c1{2, 2, 2, {1, 1, 1, 1}}, c0{2, 2, 2, {0, 0, 0, 0}};
  const EmpiricalJoint pt = monte_carlo_eval(c1, c0, j, 1000, 1);
  CHECK(pt.counts(1, 0) == 1000);
  Eigen::MatrixXd same(2, 2);
  same << 0.5, 0, 0, 0.5;
  const TruthTable first{2, 2, 2, {0, 0, 1, 1}};
  const EmpiricalJoint id = monte_carlo_eval(first, first, JointPmf(same), 10000, 1);
  CHECK(id.counts(0, 1) + id.counts(1, 0) == 0);

  const LexPair lp = lex_pair(4, 5.0 / 16, 9.0 / 16);
  TruthTable f{2, 4, 2, {}}, g{2, 4, 2, {}};
  for (double v : lp.f.values) f.values.push_back(v > 0 ? 1 : 0);
  for (double v : lp.g.values) g.values.push_back(v > 0 ? 1 : 0);
  const Eigen::MatrixXd exact = exact_output_joint(f, g, j);
  const EmpiricalJoint emp = monte_carlo_eval(f, g, j, 1000000, 3);
  CHECK(emp.tv_to(exact) <= emp.tv_tolerance(exact));
  CHECK(emp.counts.sum() == 1000000);
  const EmpiricalJoint again = monte_carlo_eval(f, g, j, 1000000, 3);
  CHECK(again.counts == emp.counts);
  const EmpiricalJoint vn = monte_carlo_eval(f, g, j, 200000, 3, MonteCarloOptions{true});
  CHECK(vn.tv_to(exact) <= vn.tv_tolerance(exact));
  CHECK(emp.csv(exact).rfind("u,v,count,phat,target,absdiff\n", 0) == 0);
}
