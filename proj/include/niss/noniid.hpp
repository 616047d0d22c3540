#pragma once

#include <Eigen/Dense>

#include "niss/distributions.hpp"
#include "niss/maxcorr.hpp"
#include "niss/protocol.hpp"

namespace niss {

// Binary outputs with P(U=1)=a, P(V=1)=b generated from one shared fair bit.
struct CommonRandomnessRegion {
  double a = 0;
  double b = 0;
  double zeta = 0;  // 1 - (2a-1)(2b-1)
  double beta = 0;  // min(2a, 2(1-a)) min(2b, 2(1-b))
  double agree_lo = 0;  // bounds on Q(U=V)
  double agree_hi = 0;
  double f1_lo = 0;  // range of the coefficient of the shared bit in f~
  double f1_hi = 0;
  double g1_lo = 0;
  double g1_hi = 0;
};

CommonRandomnessRegion cr_region(double a, double b);

// Gated protocol on the shared-bit source (X = Y uniform, d = 1) reaching the
// upper (or lower) end of the agreement interval.
CoinProtocol cr_endpoint_protocol(const CommonRandomnessRegion& region, bool upper);

// Outcomes of measuring a maximally entangled pair at angles theta, theta'.
JointPmf bell_measurement_joint(double theta, double theta_prime);

struct MarkovSource {
  double delta_x = 0;
  double delta_y = 0;
  int d = 1;
};

// p(1-q) + q(1-p).
double bsc_convolve(double p, double q);

// Exact law of (X^d, Y^d) as a 2^d x 2^d matrix over lexicographic indices.
// X_1 = Y_1 is a fair bit; each later step flips X with probability delta_x and
// flips Y exactly when X flips, except with probability delta_y. d <= 12.
Eigen::MatrixXd markov_joint_pmf(const MarkovSource& src);

// Product basis phi_S = prod_{i in S} psi_i with psi_1 the first symbol and
// psi_i the normalized centered product of neighbours. rho(i) is the
// correlation of the i-th pair of basis functions: 1 for the first, and
// 4 delta_x (1 - delta_x)(1 - 2 delta_y) / (sigma_1 sigma_2) afterwards.
struct MarkovBasis {
  int d = 0;
  Eigen::MatrixXd phi_x;  // row S (multi-index), column x
  Eigen::MatrixXd phi_y;
  std::vector<double> weights_x;
  std::vector<double> weights_y;
  std::vector<double> rho;
  double sigma1 = 0;
  double sigma2 = 0;
  double rho_prime = 0;
  double orthonormality_error = 0;  // max over both sides, exhaustive (d <= 10)
  double cross_error = 0;           // max |E phi_S phi'_T - 1(S=T) prod rho|
};

MarkovBasis markov_basis(const MarkovSource& src);

// Alternative basis: Gram-Schmidt of the uniform parities prod_{i in S} x_i
// under the Markov law of one side. Returns the parity table (row S, column x).
Eigen::MatrixXd markov_gram_schmidt(const MarkovSource& src, bool y_side);

// Biased maximal correlation problem on the Markov source: dense Markov bases
// and the diagonal kernel diag(1, rho_i) per coordinate.
PrimalInstance make_markov_instance(const MarkovSource& src, double q_u1, double q_v1);

}  // namespace niss
