#pragma once

#include <cstdint>
#include <vector>

#include "niss/distributions.hpp"
#include "niss/fourier.hpp"

namespace niss {

inline constexpr std::uint64_t kExpectationCap = std::uint64_t{1} << 24;
inline constexpr double kPairCap = 1e8;

// Sum over (x^d, y^d) of f(x) g(y) prod_i P(x_i, y_i), by direct enumeration.
double exact_expectation(const RealTable& f, const RealTable& g, const JointPmf& joint);

// Dense P^d(x^d, y^d), capped at 2^24 entries.
Eigen::MatrixXd block_joint(const JointPmf& joint, int d);

// Output law P(U=u, V=v) of a deterministic finite-output pair.
Eigen::MatrixXd exact_output_joint(const TruthTable& f, const TruthTable& g,
                                   const JointPmf& joint);

// ceil(q^d * prob) with a small guard against rounding just above an integer.
int acceptance_count(double prob, int q, int d);

struct BiasedMaxcorr {
  double value = 0;
  RealTable f;  // +-1 tables, +1 on the accepted points
  RealTable g;
  double pairs = 0;
};

// Exhaustive maximum of E[f g] over +-1 tables with |f^-1(1)| = n_u and
// |g^-1(1)| = n_v. Ties keep the lexicographically smallest (A, B) pair of
// acceptance sets, compared as sorted index lists.
BiasedMaxcorr brute_force_biased_maxcorr(const JointPmf& joint, int d, int n_u, int n_v);

struct ExtremePoint {
  std::size_t bucket = 0;
  double t = 0;
  Eigen::MatrixXd q;  // output pmf
  TruthTable f;
  TruthTable g;
};

// Enumerates every deterministic pair f: X^d -> U, g: Y^d -> V whose output
// marginals equal q_u, q_v (within 1e-12), assigns each non-product output to
// the grid direction of largest cosine, and keeps the largest t per bucket.
std::vector<ExtremePoint> brute_force_extremes(const JointPmf& joint, int d,
                                               const Eigen::VectorXd& q_u,
                                               const Eigen::VectorXd& q_v,
                                               const std::vector<Eigen::MatrixXd>& direction_grid);

// Vertices of {v in [-1,1]^n : sum_i w_i v_i = bias}: +-1 points on the
// hyperplane plus points with exactly one coordinate strictly inside.
std::vector<std::vector<double>> box_polytope_vertices(std::span<const double> weights,
                                                       double bias);

}  // namespace niss
