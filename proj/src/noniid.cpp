#include "niss/noniid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "niss/indexing.hpp"

namespace niss {

CommonRandomnessRegion cr_region(double a, double b) {
  if (!(a >= 0 && a <= 1 && b >= 0 && b <= 1)) throw InvalidInput("cr_region: a, b must lie in [0,1]");
  CommonRandomnessRegion r;
  r.a = a;
  r.b = b;
  r.zeta = 1 - (2 * a - 1) * (2 * b - 1);
  r.beta = std::min(2 * a, 2 * (1 - a)) * std::min(2 * b, 2 * (1 - b));
  r.agree_lo = (2 - r.zeta - r.beta) / 2;
  r.agree_hi = (2 - r.zeta + r.beta) / 2;
  r.f1_lo = std::max(-2 * a, -2 * (1 - a));
  r.f1_hi = std::min(2 * (1 - a), 2 * a);
  r.g1_lo = std::max(-2 * b, -2 * (1 - b));
  r.g1_hi = std::min(2 * (1 - b), 2 * b);
  return r;
}

CoinProtocol cr_endpoint_protocol(const CommonRandomnessRegion& region, bool upper) {
  // Index 0 is the symbol -1 of the shared bit.
  const double fa = 2 * region.a - 1, gb = 2 * region.b - 1;
  const double g1 = upper ? region.g1_hi : -region.g1_hi;
  const RealTable f{2, 1, {std::clamp(fa - region.f1_hi, -1.0, 1.0), std::clamp(fa + region.f1_hi, -1.0, 1.0)}};
  const RealTable g{2, 1, {std::clamp(gb - g1, -1.0, 1.0), std::clamp(gb + g1, -1.0, 1.0)}};
  const Eigen::Vector2d fu(1 - region.a, region.a), fv(1 - region.b, region.b);
  return gated_protocol(1.0, binary_family(f), binary_family(g), fu, fv,
                        upper ? "shared-bit-upper" : "shared-bit-lower");
}

JointPmf bell_measurement_joint(double theta, double theta_prime) {
  const double c = std::cos(theta_prime - theta), s = std::sin(theta - theta_prime);
  Eigen::Matrix2d p;
  p << c * c / 2, s * s / 2, s * s / 2, c * c / 2;
  return JointPmf(p);
}

double bsc_convolve(double p, double q) { return p * (1 - q) + q * (1 - p); }

namespace {

void check_source(const MarkovSource& src, int cap) {
  if (!(src.delta_x >= 0 && src.delta_x <= 1 && src.delta_y >= 0 && src.delta_y <= 1)) {
    throw InvalidInput("MarkovSource: flip probabilities must lie in [0,1]");
  }
  if (src.d < 1) throw DimensionError("MarkovSource: d must be positive");
  if (src.d > cap) throw CapExceeded("MarkovSource: d exceeds " + std::to_string(cap));
}

// Law of one chain started from a fair bit with flip probability delta.
std::vector<double> chain_weights(int d, double delta) {
  const std::size_t n = std::size_t{1} << d;
  std::vector<double> w(n);
  for (std::size_t x = 0; x < n; ++x) {
    const int flips = std::popcount((x ^ (x >> 1)) & ((std::size_t{1} << (d - 1)) - 1));
    w[x] = 0.5 * std::pow(delta, flips) * std::pow(1 - delta, d - 1 - flips);
  }
  return w;
}

// Symbol of coordinate i (0-based, first most significant) as -1/+1.
double sym(std::size_t x, int d, int i) { return ((x >> (d - 1 - i)) & 1u) ? 1.0 : -1.0; }

}  // namespace

Eigen::MatrixXd markov_joint_pmf(const MarkovSource& src) {
  check_source(src, 12);
  const int d = src.d;
  const std::size_t n = std::size_t{1} << d;
  const double dx = src.delta_x, dy = src.delta_y;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (sym(x, d, 0) != sym(y, d, 0)) continue;
      double v = 0.5;
      for (int i = 1; i < d && v > 0; ++i) {
        const bool fx = sym(x, d, i) != sym(x, d, i - 1);
        const bool fy = sym(y, d, i) != sym(y, d, i - 1);
        v *= fx ? (fy ? dx * (1 - dy) : dx * dy) : (fy ? (1 - dx) * dy : (1 - dx) * (1 - dy));
      }
      p(x, y) = v;
    }
  }
  return p;
}

MarkovBasis markov_basis(const MarkovSource& src) {
  check_source(src, 12);
  const int d = src.d;
  const std::size_t n = std::size_t{1} << d;
  const double dx = src.delta_x;
  const double dz = bsc_convolve(src.delta_x, src.delta_y);
  MarkovBasis b;
  b.d = d;
  b.sigma1 = 2 * std::sqrt(dx * (1 - dx));
  b.sigma2 = 2 * std::sqrt(dz * (1 - dz));
  if (d > 1 && (b.sigma1 < 1e-12 || b.sigma2 < 1e-12)) {
    throw DegenerateError("markov_basis: a chain with flip probability 0 or 1 has no variance");
  }
  b.rho_prime = d > 1 ? 4 * dx * (1 - dx) * (1 - 2 * src.delta_y) / (b.sigma1 * b.sigma2) : 0.0;
  b.rho.assign(d, b.rho_prime);
  b.rho[0] = 1.0;
  b.weights_x = chain_weights(d, dx);
  b.weights_y = chain_weights(d, dz);

  const auto table = [&](double sigma, double delta) {
    Eigen::MatrixXd phi(n, n);
    for (std::size_t x = 0; x < n; ++x) {
      std::vector<double> psi(d);
      psi[0] = sym(x, d, 0);
      for (int i = 1; i < d; ++i) psi[i] = (sym(x, d, i - 1) * sym(x, d, i) - (1 - 2 * delta)) / sigma;
      for (std::size_t s = 0; s < n; ++s) {
        double v = 1;
        for (int i = 0; i < d; ++i) {
          if ((s >> (d - 1 - i)) & 1u) v *= psi[i];
        }
        phi(s, x) = v;
      }
    }
    return phi;
  };
  b.phi_x = table(b.sigma1, dx);
  b.phi_y = table(b.sigma2, dz);

  if (d <= 10) {
    const auto gram_error = [&](const Eigen::MatrixXd& phi, const std::vector<double>& w) {
      const Eigen::Map<const Eigen::VectorXd> wv(w.data(), n);
      const Eigen::MatrixXd g = phi * wv.asDiagonal() * phi.transpose();
      return (g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    };
    b.orthonormality_error = std::max(gram_error(b.phi_x, b.weights_x), gram_error(b.phi_y, b.weights_y));
    const Eigen::MatrixXd cross = b.phi_x * markov_joint_pmf(src) * b.phi_y.transpose();
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < n; ++s) {
      double v = 1;
      for (int i = 0; i < d; ++i) {
        if ((s >> (d - 1 - i)) & 1u) v *= b.rho[i];
      }
      expect(s, s) = v;
    }
    b.cross_error = (cross - expect).cwiseAbs().maxCoeff();
  }
  return b;
}

Eigen::MatrixXd markov_gram_schmidt(const MarkovSource& src, bool y_side) {
  check_source(src, 10);
  const int d = src.d;
  const std::size_t n = std::size_t{1} << d;
  const auto w = chain_weights(d, y_side ? bsc_convolve(src.delta_x, src.delta_y) : src.delta_x);
  Eigen::MatrixXd phi(n, n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t x = 0; x < n; ++x) {
      double v = 1;
      for (int i = 0; i < d; ++i) {
        if ((s >> (d - 1 - i)) & 1u) v *= sym(x, d, i);
      }
      phi(s, x) = v;
    }
  }
  const auto inner = [&](const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& c) {
    double acc = 0;
    for (std::size_t x = 0; x < n; ++x) acc += w[x] * a(x) * c(x);
    return acc;
  };
  for (std::size_t s = 0; s < n; ++s) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t t = 0; t < s; ++t) phi.row(s) -= inner(phi.row(s), phi.row(t)) * phi.row(t);
    }
    const double nrm = std::sqrt(inner(phi.row(s), phi.row(s)));
    if (nrm < kBasisDegeneracyTol) {
      throw DegenerateError("markov_gram_schmidt: parities are linearly dependent under the chain law");
    }
    phi.row(s) /= nrm;
  }
  return phi;
}

PrimalInstance make_markov_instance(const MarkovSource& src, double q_u1, double q_v1) {
  if (!(q_u1 >= 0 && q_u1 <= 1 && q_v1 >= 0 && q_v1 <= 1)) {
    throw InvalidInput("make_markov_instance: output probabilities must lie in [0,1]");
  }
  MarkovBasis b = markov_basis(src);
  std::vector<Eigen::MatrixXd> factors;
  for (double r : b.rho) {
    Eigen::Matrix2d k;
    k << 1, 0, 0, r;
    factors.push_back(k);
  }
  return PrimalInstance{FourierSpace::dense(2, src.d, std::move(b.phi_x), std::move(b.weights_x)),
                        FourierSpace::dense(2, src.d, std::move(b.phi_y), std::move(b.weights_y)),
                        CrossKernel(std::move(factors)), 2 * q_u1 - 1, 2 * q_v1 - 1};
}

}  // namespace niss
