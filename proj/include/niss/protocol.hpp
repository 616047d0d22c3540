#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "niss/distributions.hpp"
#include "niss/fourier.hpp"
#include "niss/fpath.hpp"
#include "niss/rng.hpp"

namespace niss {

// Randomized indicator family (f~_u)_{u in U} on {0..q-1}^d: every value in
// [-1,1] and sum_u f~_u(x) = 2 - |U| at every point. Binary outputs use
// f~_0 = -f~_1.
struct RandomizedFamily {
  int q = 0;
  int d = 0;
  std::vector<std::vector<double>> f;  // f[u][x]

  int out_size() const { return static_cast<int>(f.size()); }
  std::size_t points() const { return f.empty() ? 0 : f.front().size(); }
};

// Throws ConstraintViolation when a value leaves [-1,1] or the pointwise sum
// misses 2 - |U| by more than 1e-9.
void validate_family(const RandomizedFamily& fam);

RandomizedFamily binary_family(const RealTable& f1);
RandomizedFamily deterministic_family(const TruthTable& f);
// Constant family f~_u = 2 q(u) - 1.
RandomizedFamily constant_family(int q, int d, const Eigen::VectorXd& pmf);

// Sequential coins: coin u >= 1 has bias (1 + f~_u) / (3 - u - sum_{1<=u'<u} f~_u');
// the output is the first u whose coin lands +1, or 0 when none does.
class FiniteSampler {
 public:
  explicit FiniteSampler(RandomizedFamily fam);

  int sample(std::size_t x, Rng& rng) const;
  // Coin biases at point x, entry u - 1 for u = 1..|U|-1.
  std::vector<double> coin_biases(std::size_t x) const;
  // Exact law of the output at x from the coin biases alone.
  std::vector<double> conditional_law(std::size_t x) const;
  const RandomizedFamily& family() const { return fam_; }

 private:
  RandomizedFamily fam_;
};

// Binary case: P(output 1 | x) = (1 + f~(x)) / 2.
FiniteSampler derandomize_binary(const RealTable& f1);
FiniteSampler derandomize_finite(const RandomizedFamily& fam);

// E[f_u] and E[f_u g_v] of the derandomized pair under the exact coin laws,
// alongside the same quantities for the randomized family.
struct PreservationReport {
  Eigen::VectorXd mean_f, mean_f_tilde;
  Eigen::VectorXd mean_g, mean_g_tilde;
  Eigen::MatrixXd cross, cross_tilde;
  double max_error = 0;
};
PreservationReport rd_preservation(const FiniteSampler& a, const FiniteSampler& b,
                                   const JointPmf& joint);

// One agent of a gated protocol: with probability gate the output comes from
// the inner sampler at the observed block, otherwise from the fallback pmf.
struct AgentRule {
  double gate = 1;
  FiniteSampler inner;
  Eigen::VectorXd fallback;
};

struct CoinProtocol {
  int d = 1;
  AgentRule alice;
  AgentRule bob;
  double lambda = 1;
  std::string kind;
};

CoinProtocol gated_protocol(double gate, const RandomizedFamily& f, const RandomizedFamily& g,
                            const Eigen::VectorXd& fallback_u, const Eigen::VectorXd& fallback_v,
                            std::string kind);

// Uniform binary outputs with E[UV] = target_rho (U, V as +-1). Inner
// functions depend on the first symbol only.
CoinProtocol coin_protocol_uniform_output(const JointPmf& joint, double target_rho);

// Binary outputs with marginals fixed by the instance biases and
// P(U != V) = target_disagreement. The gate is chosen so that
// E[UV] - b_u b_v = lambda^2 (rho_b - b_u b_v), rho_b being the solver's
// objective.
CoinProtocol coin_protocol_fb(const PrimalInstance& inst, const FPathState& solver,
                              double target_disagreement);

// Finite outputs: the deterministic pair (f, g) realizes Q' exactly; gating
// both agents with lambda^2 = sqrt(t(Q) / t(Q')) realizes star_mix(Q', lambda^2),
// which equals Q whenever Q lies on the segment from its product to Q'.
CoinProtocol coin_protocol_ff(const JointPmf& joint, const TargetPmf& target,
                              const TruthTable& f, const TruthTable& g);

// Exact output law of a protocol by enumeration of the block joint.
Eigen::MatrixXd exact_protocol_law(const CoinProtocol& proto, const JointPmf& joint);

struct EmpiricalJoint {
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;
  long long n = 0;

  Eigen::MatrixXd pmf() const;
  double tv_to(const Eigen::MatrixXd& target) const;
  // Sum over cells of 3 sqrt(q(1-q)/n): the 3-sigma band for the unhalved TV.
  double tv_tolerance(const Eigen::MatrixXd& target) const;
  // Columns u, v, count, phat, target, absdiff with 12 significant digits.
  std::string csv(const Eigen::MatrixXd& target) const;
};

struct MonteCarloOptions {
  bool von_neumann = false;
};

EmpiricalJoint monte_carlo_eval(const CoinProtocol& proto, const JointPmf& joint,
                                long long n_samples, std::uint64_t seed,
                                const MonteCarloOptions& opts = {});
EmpiricalJoint monte_carlo_eval(const TruthTable& f, const TruthTable& g, const JointPmf& joint,
                                long long n_samples, std::uint64_t seed,
                                const MonteCarloOptions& opts = {});

}  // namespace niss
