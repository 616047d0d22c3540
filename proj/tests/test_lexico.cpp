#include <doctest.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>

#include "niss/lexico.hpp"
#include "niss/oracle.hpp"

using namespace niss;

namespace {

RealTable random_pm1(std::mt19937_64& rng, int d) {
  RealTable t{2, d, std::vector<double>(std::size_t{1} << d)};
  for (double& v : t.values) v = (rng() & 1) ? 1.0 : -1.0;
  return t;
}

RealTable with_count(std::mt19937_64& rng, int d, int k) {
  std::vector<std::size_t> idx(std::size_t{1} << d);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  RealTable t{2, d, std::vector<double>(idx.size(), -1.0)};
  for (int i = 0; i < k; ++i) t.values[idx[i]] = 1.0;
  return t;
}

int accepted(const RealTable& t) {
  return static_cast<int>(std::count(t.values.begin(), t.values.end(), 1.0));
}

double bias1(const RealTable& t) { return accepted(t) / static_cast<double>(t.values.size()); }

// Independent oracle: explicit pair enumeration of the spectrum.
std::vector<long long> spectrum_oracle(const RealTable& f, const RealTable& g) {
  std::vector<long long> n(f.d + 1, 0);
  for (std::size_t x = 0; x < f.values.size(); ++x) {
    for (std::size_t y = 0; y < g.values.size(); ++y) {
      if (f.values[x] > 0 && g.values[y] > 0) ++n[std::popcount(x ^ y)];
    }
  }
  return n;
}

double corr(const RealTable& f, const RealTable& g, double rho) {
  return exact_expectation(f, g, dsbs((1 - rho) / 2));
}

}  // namespace

TEST_CASE("lex pair acceptance sets") {
  const LexPair all = lex_pair(3, 1.0, 1.0);
  CHECK(accepted(all.f) == 8);
  const LexPair one = lex_pair(1, 0.5, 0.5);
  CHECK(one.f.values == std::vector<double>{1, -1});
  for (int k = 0; k <= 16; ++k) {
    const LexPair p = lex_pair(4, k / 16.0, 0.5);
    CHECK(p.n_u == k);
    for (int x = 0; x < 16; ++x) CHECK(p.f.values[x] == (x < k ? 1.0 : -1.0));
  }
  CHECK(lex_pair(4, 1.0 / 3, 0.5).n_u == 6);
}

TEST_CASE("time-domain correlation") {
  const RealTable one{2, 2, {1, 1, 1, 1}};
  CHECK(time_domain_correlation(one, one, 0.4, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  const RealTable ind{2, 1, {1, -1}};
  CHECK(time_domain_correlation(ind, ind, 0.4, 0.5, 0.5) == doctest::Approx(0.4).epsilon(1e-14));
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int d = 1; d <= 4; ++d) {
    for (double rho : {0.3, -0.6, 0.9}) {
      const JointPmf j = dsbs((1 - rho) / 2);
      const OrthonormalBasis b = default_basis(j.row_marginal());
      const Eigen::MatrixXd r = cross_correlation(j, b, b);
      for (int k = 0; k < 10; ++k, ++checked) {
        const RealTable f = random_pm1(rng, d), g = random_pm1(rng, d);
        const double td = time_domain_correlation(f, g, rho, bias1(f), bias1(g));
        const double direct = exact_expectation(f, g, j);
        const double fourier = inner_product_fourier(fourier_transform(f, b), fourier_transform(g, b), r);
        CHECK(std::abs(td - direct) < 1e-12);
        CHECK(std::abs(fourier - direct) < 1e-12);
        CHECK(std::abs(time_domain_correlation(f, g, j) - direct) < 1e-12);
      }
    }
  }
  CHECK(checked == 120);
  CHECK_THROWS_AS(time_domain_correlation(ind, ind, binary_joint(0.6, 0.5, 0.1)), InvalidInput);
}

TEST_CASE("distance spectrum") {
  const RealTable neg{2, 2, {-1, -1, -1, -1}};
  CHECK(distance_spectrum(neg, neg).n == std::vector<long long>{0, 0, 0});
  const RealTable pos{2, 1, {1, 1}};
  CHECK(distance_spectrum(pos, pos).n == std::vector<long long>{2, 2});
  // Lex pair at d=2 with bias one half accepts {(-1,-1), (-1,+1)}.
  const LexPair lp = lex_pair(2, 0.5, 0.5);
  CHECK(distance_spectrum(lp.f, lp.g).n == std::vector<long long>{2, 2, 0});
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const RealTable f = random_pm1(rng, 4), g = random_pm1(rng, 4);
    const DistanceSpectrum s = distance_spectrum(f, g);
    CHECK(s.n == spectrum_oracle(f, g));
    CHECK(s.total() == static_cast<long long>(accepted(f)) * accepted(g));
  }
}

TEST_CASE("spectrum dominance") {
  const DistanceSpectrum a{{0, 4}}, b{{1, 3}};
  CHECK(spectrum_dominates(a, a));
  CHECK(spectrum_dominates(b, a));
  CHECK_FALSE(spectrum_dominates(a, b));
  std::mt19937_64 rng(6);
  int comparable = 0;
  for (int k = 0; k < 400; ++k) {
    const int d = 3, nu = 1 + static_cast<int>(rng() % 7), nv = 1 + static_cast<int>(rng() % 7);
    const RealTable f1 = with_count(rng, d, nu), g1 = with_count(rng, d, nv);
    const RealTable f2 = with_count(rng, d, nu), g2 = with_count(rng, d, nv);
    const DistanceSpectrum s1 = distance_spectrum(f1, g1), s2 = distance_spectrum(f2, g2);
    if (!spectrum_dominates(s1, s2)) continue;
    ++comparable;
    for (double rho : {0.1, 0.4, 0.9}) CHECK(corr(f1, g1, rho) >= corr(f2, g2, rho) - 1e-12);
  }
  CHECK(comparable > 20);
}

TEST_CASE("projection operator") {
  const RealTable c{2, 2, {1, 1, 1, 1}};
  CHECK(project(c, 0).values == c.values);
  CHECK(project(RealTable{2, 1, {-1, 1}}, 0).values == std::vector<double>{1, -1});
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int d = 1; d <= 4; ++d) {
    const int reps = d == 4 ? 250 : 60;
    for (int rep = 0; rep < reps; ++rep) {
      const RealTable f = random_pm1(rng, d), g = random_pm1(rng, d);
      const int k = static_cast<int>(rng() % d);
      const RealTable pf = project(f, k), pg = project(g, k);
      // Rule oracle.
      const std::size_t bit = std::size_t{1} << (d - 1 - k);
      for (std::size_t x = 0; x < f.values.size(); ++x) {
        const bool a = f.values[x] > 0, b = f.values[x ^ bit] > 0;
        CHECK(pf.values[x] == (((x & bit) == 0 ? (a || b) : (a && b)) ? 1.0 : -1.0));
      }
      CHECK(accepted(pf) == accepted(f));
      CHECK(spectrum_dominates(distance_spectrum(pf, pg), distance_spectrum(f, g)));
      CHECK(corr(pf, pg, 0.4) >= corr(f, g, 0.4) - 1e-12);
      ++checked;
    }
  }
  CHECK(checked >= 200);
}

TEST_CASE("shuffle operator") {
  std::mt19937_64 rng(8);
  const RealTable f = random_pm1(rng, 3);
  CHECK(shuffle(f, {0, 1, 2}).values == f.values);
  CHECK(shuffle(shuffle(f, {1, 0, 2}), {1, 0, 2}).values == f.values);
  CHECK_THROWS(shuffle(f, {0, 0, 2}));
  for (int k = 0; k < 50; ++k) {
    const RealTable a = random_pm1(rng, 4), b = random_pm1(rng, 4);
    std::vector<int> pi{0, 1, 2, 3};
    std::shuffle(pi.begin(), pi.end(), rng);
    const RealTable sa = shuffle(a, pi), sb = shuffle(b, pi);
    CHECK(distance_spectrum(sa, sb).n == distance_spectrum(a, b).n);
    CHECK(std::abs(corr(sa, sb, 0.3) - corr(a, b, 0.3)) < 1e-14);
  }
}

TEST_CASE("Hamming matrix recursion") {
  const Eigen::MatrixXi d1 = hamming_matrix(1);
  CHECK(d1(0, 0) == 0);
  CHECK(d1(0, 1) == 1);
  CHECK(d1(1, 0) == 1);
  CHECK(d1(1, 1) == 0);
  for (int d = 1; d <= 6; ++d) {
    const Eigen::MatrixXi h = hamming_matrix(d);
    for (int x = 0; x < h.rows(); ++x) {
      for (int y = 0; y < h.cols(); ++y) CHECK(h(x, y) == std::popcount(static_cast<unsigned>(x ^ y)));
    }
  }
  CHECK_THROWS_AS(hamming_matrix(13), CapExceeded);
}

TEST_CASE("TV decay of the lex pair") {
  const auto dy = tv_decay_experiment(0.25, 0.25, 0.4, 8);
  for (const auto& row : dy) {
    if (row.d >= 2) CHECK(row.tv < 1e-12);
  }
  CHECK(dy.front().tv > 0);
  for (double b : {0.0, 1.0}) {
    for (const auto& row : tv_decay_experiment(b, b, 0.4, 6)) CHECK(row.tv < 1e-12);
  }
  const auto third = tv_decay_experiment(1.0 / 3, 1.0 / 3, 0.4, 12);
  for (const auto& row : third) {
    CHECK(std::abs(row.joint.sum() - 1) < 1e-12);
    CHECK(row.joint(1, 0) + row.joint(1, 1) == doctest::Approx(std::ceil((1 << row.d) / 3.0) / (1 << row.d)));
  }
}

TEST_CASE("lex pair optimality at d <= 3") {
  for (double rho : {0.1, 0.4, 0.8}) {
    const JointPmf j = dsbs((1 - rho) / 2);
    for (int d = 1; d <= 3; ++d) {
      const int n = 1 << d;
      for (int nu = 0; nu <= n; ++nu) {
        for (int nv = 0; nv <= n; ++nv) {
          const LexPair lp = lex_pair(d, double(nu) / n, double(nv) / n);
          const double lex = exact_expectation(lp.f, lp.g, j);
          const double best = brute_force_biased_maxcorr(j, d, nu, nv).value;
          const bool ball = d == 3 && ((std::min(nu, nv) == 1 && std::max(nu, nv) == 4) ||
                                       (std::min(nu, nv) == 4 && std::max(nu, nv) == 7));
          if (ball) {
            CHECK(lex < best - 1e-6);
          } else {
            CHECK(std::abs(lex - best) < 1e-12);
          }
        }
      }
    }
  }
  // A point against its radius-1 Hamming ball beats the point against a 2-subcube.
  const double rho = 0.4, beta = (1 - rho) / (1 + rho);
  const RealTable point{2, 3, {1, -1, -1, -1, -1, -1, -1, -1}};
  const RealTable ball{2, 3, {1, 1, 1, -1, 1, -1, -1, -1}};
  const LexPair lp = lex_pair(3, 1.0 / 8, 0.5);
  const JointPmf j = dsbs((1 - rho) / 2);
  CHECK(distance_spectrum(point, ball).n == std::vector<long long>{1, 3, 0, 0});
  CHECK(distance_spectrum(lp.f, lp.g).n == std::vector<long long>{1, 2, 1, 0});
  CHECK(exact_expectation(point, ball, j) - exact_expectation(lp.f, lp.g, j) ==
        doctest::Approx(4 * std::pow((1 + rho) / 4, 3) * (beta - beta * beta)));
}
