#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "niss/distributions.hpp"
#include "niss/fourier.hpp"

// Binary-input machinery for uniform marginals. Tables are +-1 valued
// RealTables over {-1,+1}^d in lexicographic index order (digit 0 = -1,
// first coordinate most significant).
namespace niss {

struct LexPair {
  int d = 0;
  int n_u = 0;  // ceil(2^d Q_U(1)) accepted strings
  int n_v = 0;
  RealTable f;
  RealTable g;
};

// Threshold functions accepting the n lexicographically smallest strings.
LexPair lex_pair(int d, double q_u1, double q_v1);
RealTable lex_function(int d, int accepted);

// E[f g] for uniform binary inputs with correlation rho from the pair-count
// form 4 ((1+rho)/4)^d sum_{A x B} beta^{d_H} - 2 Q_U(1) - 2 Q_V(1) + 1, with
// beta = (1-rho)/(1+rho) and A, B the accepted sets. The biases must match
// the tables.
double time_domain_correlation(const RealTable& f, const RealTable& g, double rho, double q_u1,
                               double q_v1);
// Same, reading rho from a joint; throws InvalidInput unless both marginals
// are uniform.
double time_domain_correlation(const RealTable& f, const RealTable& g, const JointPmf& joint);

struct DistanceSpectrum {
  std::vector<long long> n;  // n[k]: accepted pairs at Hamming distance k
  long long total() const;
};

DistanceSpectrum distance_spectrum(const RealTable& f, const RealTable& g);

// True when a dominates b: every prefix sum of a is at least that of b.
bool spectrum_dominates(const DistanceSpectrum& a, const DistanceSpectrum& b);

// Projection toward x_k = -1 (k is 0-based). At x with x_k = -1 the output is
// +1 when f(x) or f(flip_k x) is +1; at x_k = +1 it is +1 only when both are.
RealTable project(const RealTable& f, int k);

// (shuffle f)(x) = f(x_pi(1), ..., x_pi(d)); pi is a 0-based permutation.
RealTable shuffle(const RealTable& f, const std::vector<int>& pi);

// Pairwise Hamming distances on {-1,+1}^d by the Kronecker recursion
// D_d = J_2 (x) D_{d-1} + D_1 (x) J_{2^{d-1}}, J all-ones. d <= 12.
Eigen::MatrixXi hamming_matrix(int d);

struct TvDecayRow {
  int d = 0;
  Eigen::Matrix2d joint;  // (U, V) law, index 1 = output +1
  double tv = 0;          // to the largest-d joint
  double ratio = 0;       // tv(d) / tv(d-1); 0 when undefined
};

// Exact output laws of the lex pair for d = 1..d_max (d_max <= 14) by the
// pair-count sum, measured against the d_max law as a proxy for the limit.
std::vector<TvDecayRow> tv_decay_experiment(double q_u1, double q_v1, double rho, int d_max);

}  // namespace niss
