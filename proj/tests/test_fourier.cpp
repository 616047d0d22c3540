#include <doctest.h>

#include <cmath>
#include <random>

#include "niss/fourier.hpp"
#include "niss/indexing.hpp"

using namespace niss;

namespace {

const Eigen::Vector3d kTernaryMarginal(0.4, 0.3, 0.3);

JointPmf ternary_joint() {
  Eigen::MatrixXd p(3, 3);
  p << 2.0 / 15, 2.0 / 15, 2.0 / 15, 0.2, 0.1, 0.0, 1.0 / 15, 1.0 / 15, 1.0 / 6;
  return JointPmf(p);
}

double gram_error(const OrthonormalBasis& b) {
  const Eigen::MatrixXd g = b.psi * b.weights.asDiagonal() * b.psi.transpose();
  return (g - Eigen::MatrixXd::Identity(b.q, b.q)).cwiseAbs().maxCoeff();
}

// Independent oracle: sum over all (x^d, y^d) of f g prod P(x_i, y_i).
double direct_expectation(const RealTable& f, const RealTable& g, const Eigen::MatrixXd& p) {
  double acc = 0;
  for (std::size_t x = 0; x < f.values.size(); ++x) {
    for (std::size_t y = 0; y < g.values.size(); ++y) {
      double w = 1;
      for (int i = 0; i < f.d; ++i) w *= p(digit_at(x, f.q, f.d, i), digit_at(y, g.q, g.d, i));
      acc += f.values[x] * g.values[y] * w;
    }
  }
  return acc;
}

RealTable random_table(std::mt19937_64& rng, int q, int d, bool pm1) {
  RealTable t{q, d, std::vector<double>(table_size(q, d))};
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : t.values) v = pm1 ? (u(rng) < 0 ? -1.0 : 1.0) : u(rng);
  return t;
}

}  // namespace

TEST_CASE("Gram-Schmidt reproduces the ternary basis") {
  const OrthonormalBasis b = default_basis(kTernaryMarginal);
  CHECK(gram_error(b) < 1e-10);
  for (int x = 0; x < 3; ++x) CHECK(b.psi(0, x) == doctest::Approx(1.0));
  // psi_1 = (1(x=0) - 0.4) / sqrt(0.24), psi_2 the normalized remainder of 1(x=1).
  const double s = std::sqrt(0.24);
  CHECK(b.psi(1, 0) == doctest::Approx(0.6 / s).epsilon(1e-12));
  CHECK(b.psi(1, 1) == doctest::Approx(-0.4 / s).epsilon(1e-12));
  CHECK(std::abs(b.psi(1, 0) - 1.225) < 1e-3);
  CHECK(std::abs(b.psi(1, 1) + 0.816) < 1e-3);
  CHECK(std::abs(b.psi(2, 0)) < 1e-12);
  CHECK(std::abs(b.psi(2, 1) - 1.290) < 1e-3);
  CHECK(std::abs(b.psi(2, 2) + 1.290) < 1e-3);
}

TEST_CASE("binary default basis is the standardized symbol") {
  const OrthonormalBasis u = default_basis(Eigen::Vector2d(0.5, 0.5));
  CHECK(u.psi(1, 0) == doctest::Approx(-1.0));
  CHECK(u.psi(1, 1) == doctest::Approx(1.0));
  const double p = 0.6, mu = 2 * p - 1, sigma = 2 * std::sqrt(p * (1 - p));
  const OrthonormalBasis b = default_basis(Eigen::Vector2d(1 - p, p));
  CHECK(b.psi(1, 0) == doctest::Approx((-1 - mu) / sigma).epsilon(1e-13));
  CHECK(b.psi(1, 1) == doctest::Approx((1 - mu) / sigma).epsilon(1e-13));
  CHECK(gram_error(b) < 1e-12);
}

TEST_CASE("Gram-Schmidt refuses dependent seeds") {
  const std::vector<SeedFunction> seeds{[](int) { return 1.0; }, [](int x) { return x == 0 ? 1.0 : 0.0; },
                                        [](int x) { return x == 0 ? 2.0 : 0.0; }};
  CHECK_THROWS_AS(gram_schmidt_basis(kTernaryMarginal, seeds), DegenerateError);
}

TEST_CASE("cross-correlation structure") {
  const JointPmf j = binary_joint(0.6, 0.7, 0.4);
  const Eigen::MatrixXd r = cross_correlation(j, default_basis(j.row_marginal()), default_basis(j.col_marginal()));
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(r(0, 1)) < 1e-14);
  CHECK(std::abs(r(1, 0)) < 1e-14);
  CHECK(r(1, 1) == doctest::Approx(0.4).epsilon(1e-13));
  const JointPmf t = ternary_joint();
  const Eigen::MatrixXd rt = cross_correlation(t, default_basis(t.row_marginal()), default_basis(t.col_marginal()));
  CHECK(rt.block(0, 1, 1, 2).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(rt.block(1, 0, 2, 1).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(rt.cwiseAbs().maxCoeff() <= 1 + 1e-12);
}

TEST_CASE("transform of constants and basis functions") {
  const OrthonormalBasis b = default_basis(kTernaryMarginal);
  const RealTable one{3, 2, std::vector<double>(9, 1.0)};
  const FourierVector c = fourier_transform(one, b);
  CHECK(c.coeffs[0] == doctest::Approx(1.0));
  for (std::size_t i = 1; i < 9; ++i) CHECK(std::abs(c.coeffs[i]) < 1e-13);
  RealTable psi2{3, 2, std::vector<double>(9)};
  for (std::size_t x = 0; x < 9; ++x) psi2.values[x] = b.psi(2, digit_at(x, 3, 2, 0));
  const FourierVector v = fourier_transform(psi2, b);
  for (std::size_t i = 0; i < 9; ++i) CHECK(v.coeffs[i] == doctest::Approx(i == 6 ? 1.0 : 0.0));
}

TEST_CASE("Parseval and roundtrip on random tables") {
  std::mt19937_64 rng(5);
  const OrthonormalBasis b = default_basis(Eigen::Vector2d(0.4, 0.6));
  const auto w = product_weights(b.weights, 3);
  for (int k = 0; k < 50; ++k) {
    const RealTable f = random_table(rng, 2, 3, true);
    const FourierVector v = fourier_transform(f, b);
    double energy = 0;
    for (double c : v.coeffs) energy += c * c;
    CHECK(std::abs(energy - 1.0) < 1e-10);
    const RealTable back = inverse_transform(v, b);
    for (std::size_t x = 0; x < f.values.size(); ++x) CHECK(std::abs(back.values[x] - f.values[x]) < 1e-10);
  }
  const OrthonormalBasis t = default_basis(kTernaryMarginal);
  const auto wt = product_weights(t.weights, 3);
  for (int k = 0; k < 20; ++k) {
    const RealTable f = random_table(rng, 3, 3, false);
    const FourierVector v = fourier_transform(f, t);
    double energy = 0, direct = 0;
    for (double c : v.coeffs) energy += c * c;
    for (std::size_t x = 0; x < f.values.size(); ++x) direct += wt[x] * f.values[x] * f.values[x];
    CHECK(std::abs(energy - direct) < 1e-10);
  }
  (void)w;
}

TEST_CASE("Plancherel for the identity channel") {
  std::mt19937_64 rng(9);
  const OrthonormalBasis b = default_basis(kTernaryMarginal);
  const auto w = product_weights(b.weights, 2);
  for (int k = 0; k < 20; ++k) {
    const RealTable f = random_table(rng, 3, 2, false), g = random_table(rng, 3, 2, false);
    const FourierVector fv = fourier_transform(f, b), gv = fourier_transform(g, b);
    double direct = 0, coeff = 0;
    for (std::size_t x = 0; x < 9; ++x) direct += w[x] * f.values[x] * g.values[x];
    for (std::size_t s = 0; s < 9; ++s) coeff += fv.coeffs[s] * gv.coeffs[s];
    CHECK(std::abs(direct - coeff) < 1e-12);
    CHECK(std::abs(inner_product_fourier(fv, gv, Eigen::MatrixXd::Identity(3, 3)) - direct) < 1e-12);
  }
}

TEST_CASE("Fourier cross-expectation equals the direct double sum") {
  std::mt19937_64 rng(13);
  struct Case {
    JointPmf joint;
    int d;
  };
  const std::vector<Case> cases{{binary_joint(0.5, 0.5, 0.4), 2}, {binary_joint(0.6, 0.7, 0.4), 3},
                                {ternary_joint(), 2}, {ternary_joint(), 3}};
  int total = 0;
  for (const auto& c : cases) {
    const OrthonormalBasis bx = default_basis(c.joint.row_marginal()), by = default_basis(c.joint.col_marginal());
    const Eigen::MatrixXd rho = cross_correlation(c.joint, bx, by);
    for (int k = 0; k < 30; ++k, ++total) {
      const RealTable f = random_table(rng, c.joint.rows(), c.d, k % 2 == 0);
      const RealTable g = random_table(rng, c.joint.cols(), c.d, k % 3 == 0);
      const double direct = direct_expectation(f, g, c.joint.matrix());
      const FourierVector fv = fourier_transform(f, bx), gv = fourier_transform(g, by);
      CHECK(std::abs(inner_product_fourier(fv, gv, rho) - direct) < 1e-12);
      CHECK(std::abs(inner_product_fourier_general(fv, gv, rho) - direct) < 1e-12);
    }
  }
  CHECK(total >= 100);
}

TEST_CASE("indicator decomposition satisfies the sum condition") {
  const TruthTable bin{2, 1, 2, {0, 1}};
  const auto fb = indicator_decompose(bin);
  REQUIRE(fb.size() == 2);
  CHECK(fb[1].values == std::vector<double>{-1, 1});
  CHECK(fb[0].values == std::vector<double>{1, -1});
  const TruthTable two{3, 1, 3, {2, 2, 2}};
  const auto ft = indicator_decompose(two);
  CHECK(ft[2].values == std::vector<double>{1, 1, 1});
  CHECK(ft[0].values == std::vector<double>{-1, -1, -1});
  std::mt19937_64 rng(1);
  TruthTable r{3, 2, 3, std::vector<int>(9)};
  for (int& v : r.values) v = static_cast<int>(rng() % 3);
  const auto fr = indicator_decompose(r);
  for (std::size_t x = 0; x < 9; ++x) {
    double s = 0;
    for (const auto& t : fr) {
      CHECK(std::abs(t.values[x]) == 1.0);
      s += t.values[x];
    }
    CHECK(s == -1.0);
  }
}

TEST_CASE("kron_apply matches the explicit Kronecker product") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd a(2, 3), b(3, 2);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
  for (int i = 0; i < b.size(); ++i) b.data()[i] = u(rng);
  Eigen::MatrixXd k(6, 6);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) k.block(i * 3, j * 2, 3, 2) = a(i, j) * b;
  }
  std::vector<double> v(6);
  for (double& x : v) x = u(rng);
  const auto out = kron_apply({a, b}, v);
  const Eigen::VectorXd ref = k * Eigen::Map<Eigen::VectorXd>(v.data(), 6);
  REQUIRE(out.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(out[i] - ref(i)) < 1e-14);
}
