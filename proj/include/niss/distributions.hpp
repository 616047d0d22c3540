#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "niss/errors.hpp"

namespace niss {

inline constexpr double kSimplexTol = 1e-12;

// Probability matrix over a finite product alphabet, validated on
// construction: entries nonnegative and summing to one within kSimplexTol.
// No renormalization is attempted. Tag distinguishes input sources P_XY from
// output targets Q_UV at the type level.
template <class Tag>
class PmfMatrix {
 public:
  explicit PmfMatrix(Eigen::MatrixXd p);

  int rows() const { return static_cast<int>(p_.rows()); }
  int cols() const { return static_cast<int>(p_.cols()); }
  double operator()(int r, int c) const { return p_(r, c); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  Eigen::VectorXd row_marginal() const { return p_.rowwise().sum(); }
  Eigen::VectorXd col_marginal() const { return p_.colwise().sum().transpose(); }

 private:
  Eigen::MatrixXd p_;
};

struct InputTag {
  static constexpr int kMinAlphabet = 2;
  static constexpr const char* kName = "JointPmf";
};
struct OutputTag {
  static constexpr int kMinAlphabet = 1;
  static constexpr const char* kName = "TargetPmf";
};

using JointPmf = PmfMatrix<InputTag>;
using TargetPmf = PmfMatrix<OutputTag>;

// Centered expectations e_{u,v} = E[f_u g_v] of the indicator families with
// the biases mu_u = E[f_u], nu_v = E[g_v].
struct ExpectationVector {
  Eigen::MatrixXd e;
  Eigen::VectorXd mu;
  Eigen::VectorXd nu;
};

JointPmf product_joint(const Eigen::VectorXd& px, const Eigen::VectorXd& py);

// Binary source over {-1,+1}^2 (index 0 = -1) with P(X=+1)=px1, P(Y=+1)=py1 and
// Pearson correlation rho.
JointPmf binary_joint(double px1, double py1, double rho);

// Doubly symmetric binary source with flip probability delta.
JointPmf dsbs(double delta);

// Unhalved total variation: sum of absolute cell differences, range [0, 2].
double tv_distance(const TargetPmf& p, const TargetPmf& q);

double pearson_correlation(const JointPmf& p, std::span<const double> embed_x,
                           std::span<const double> embed_y);

// Pearson correlation of a binary pmf under the {-1,+1} embedding.
double binary_pearson(const Eigen::MatrixXd& p);

ExpectationVector psi_map(const TargetPmf& q);
TargetPmf psi_inverse(const ExpectationVector& e);

// lambda * q + (1 - lambda) * (Q_U x Q_V).
TargetPmf star_mix(const TargetPmf& q, double lambda);

TargetPmf product_of_marginals(const TargetPmf& q);

}  // namespace niss
