#include "niss/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace niss {

template <class Tag>
PmfMatrix<Tag>::PmfMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
  if (p_.rows() < Tag::kMinAlphabet || p_.cols() < Tag::kMinAlphabet) {
    throw DimensionError(std::string(Tag::kName) + ": alphabet too small");
  }
  if (!p_.allFinite()) throw InvalidInput(std::string(Tag::kName) + ": non-finite entry");
  if (p_.minCoeff() < -kSimplexTol) {
    throw InvalidInput(std::string(Tag::kName) + ": negative probability");
  }
  const double total = p_.sum();
  if (std::abs(total - 1.0) > kSimplexTol) {
    std::ostringstream msg;
    msg.precision(15);
    msg << Tag::kName << ": entries sum to " << total << ", not 1";
    throw InvalidInput(msg.str());
  }
  p_ = p_.cwiseMax(0.0);
}

template class PmfMatrix<InputTag>;
template class PmfMatrix<OutputTag>;

JointPmf product_joint(const Eigen::VectorXd& px, const Eigen::VectorXd& py) {
  return JointPmf(px * py.transpose());
}

JointPmf binary_joint(double px1, double py1, double rho) {
  if (px1 <= 0 || px1 >= 1 || py1 <= 0 || py1 >= 1) {
    throw InvalidInput("binary_joint: marginals must lie strictly inside (0,1)");
  }
  const double p11 = px1 * py1 + rho * std::sqrt(px1 * (1 - px1) * py1 * (1 - py1));
  Eigen::MatrixXd p(2, 2);
  p(1, 1) = p11;
  p(1, 0) = px1 - p11;
  p(0, 1) = py1 - p11;
  p(0, 0) = 1 - px1 - py1 + p11;
  if (p.minCoeff() < -kSimplexTol) {
    throw InvalidInput("binary_joint: correlation not attainable with these marginals");
  }
  return JointPmf(p.cwiseMax(0.0));
}

JointPmf dsbs(double delta) {
  if (delta < 0 || delta > 1) throw InvalidInput("dsbs: flip probability outside [0,1]");
  Eigen::MatrixXd p(2, 2);
  p << (1 - delta) / 2, delta / 2, delta / 2, (1 - delta) / 2;
  return JointPmf(p);
}

double tv_distance(const TargetPmf& p, const TargetPmf& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw DimensionError("tv_distance: output alphabets differ");
  }
  return (p.matrix() - q.matrix()).cwiseAbs().sum();
}

double pearson_correlation(const JointPmf& p, std::span<const double> embed_x,
                           std::span<const double> embed_y) {
  if (static_cast<int>(embed_x.size()) != p.rows() ||
      static_cast<int>(embed_y.size()) != p.cols()) {
    throw DimensionError("pearson_correlation: embedding size mismatch");
  }
  double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
  for (int x = 0; x < p.rows(); ++x) {
    for (int y = 0; y < p.cols(); ++y) {
      const double w = p(x, y);
      mx += w * embed_x[x];
      my += w * embed_y[y];
      sxx += w * embed_x[x] * embed_x[x];
      syy += w * embed_y[y] * embed_y[y];
      sxy += w * embed_x[x] * embed_y[y];
    }
  }
  const double vx = sxx - mx * mx;
  const double vy = syy - my * my;
  if (vx <= 1e-15 || vy <= 1e-15) {
    throw DegenerateError("pearson_correlation: zero-variance marginal");
  }
  const double r = (sxy - mx * my) / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

double binary_pearson(const Eigen::MatrixXd& p) {
  static const double pm[2] = {-1.0, 1.0};
  return pearson_correlation(JointPmf(p), pm, pm);
}

ExpectationVector psi_map(const TargetPmf& q) {
  const Eigen::VectorXd qu = q.row_marginal();
  const Eigen::VectorXd qv = q.col_marginal();
  ExpectationVector out;
  out.e.resize(q.rows(), q.cols());
  for (int u = 0; u < q.rows(); ++u) {
    for (int v = 0; v < q.cols(); ++v) {
      out.e(u, v) = 4 * q(u, v) - 2 * qu(u) - 2 * qv(v) + 1;
    }
  }
  out.mu = (2 * qu.array() - 1).matrix();
  out.nu = (2 * qv.array() - 1).matrix();
  return out;
}

TargetPmf psi_inverse(const ExpectationVector& e) {
  const auto nu_rows = e.e.rows();
  const auto nv_cols = e.e.cols();
  if (e.mu.size() != nu_rows || e.nu.size() != nv_cols) {
    throw DimensionError("psi_inverse: bias vectors do not match expectation matrix");
  }
  const Eigen::VectorXd qu = ((e.mu.array() + 1) / 2).matrix();
  const Eigen::VectorXd qv = ((e.nu.array() + 1) / 2).matrix();
  Eigen::MatrixXd q(nu_rows, nv_cols);
  for (Eigen::Index u = 0; u < nu_rows; ++u) {
    for (Eigen::Index v = 0; v < nv_cols; ++v) {
      q(u, v) = (e.e(u, v) + 2 * qu(u) + 2 * qv(v) - 1) / 4;
    }
  }
  const double marginal_gap = std::max((q.rowwise().sum() - qu).cwiseAbs().maxCoeff(),
                                       (q.colwise().sum().transpose() - qv).cwiseAbs().maxCoeff());
  if (q.minCoeff() < -kSimplexTol || std::abs(q.sum() - 1) > kSimplexTol ||
      marginal_gap > kSimplexTol) {
    throw InfeasibleError("psi_inverse: expectation vector induces no valid pmf");
  }
  return TargetPmf(q.cwiseMax(0.0));
}

TargetPmf product_of_marginals(const TargetPmf& q) {
  return TargetPmf(q.row_marginal() * q.col_marginal().transpose());
}

TargetPmf star_mix(const TargetPmf& q, double lambda) {
  if (lambda < 0 || lambda > 1) throw InvalidInput("star_mix: lambda outside [0,1]");
  return TargetPmf(lambda * q.matrix() + (1 - lambda) * product_of_marginals(q).matrix());
}

}  // namespace niss
