#include "niss/maxcorr.hpp"

#include <cmath>

namespace niss {

PrimalInstance make_primal_instance(const JointPmf& joint, int d, double q_u1, double q_v1,
                                    const OrthonormalBasis& bx, const OrthonormalBasis& by) {
  if (d < 1) throw DimensionError("make_primal_instance: block length must be positive");
  if (q_u1 < 0 || q_u1 > 1 || q_v1 < 0 || q_v1 > 1) {
    throw InvalidInput("make_primal_instance: output probabilities outside [0,1]");
  }
  if ((bx.weights - joint.row_marginal()).cwiseAbs().maxCoeff() > 1e-10 ||
      (by.weights - joint.col_marginal()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidInput("make_primal_instance: basis weights differ from the joint's marginals");
  }
  const Eigen::MatrixXd rho = cross_correlation(joint, bx, by);
  if (rho.cwiseAbs().maxCoeff() > 1 + 1e-10) {
    throw InvalidInput("make_primal_instance: correlation entry above 1");
  }
  return PrimalInstance{FourierSpace::product(bx, d), FourierSpace::product(by, d),
                        CrossKernel::iid(rho, d), 2 * q_u1 - 1, 2 * q_v1 - 1};
}

PrimalInstance make_primal_instance(const JointPmf& joint, int d, double q_u1, double q_v1) {
  return make_primal_instance(joint, d, q_u1, q_v1, default_basis(joint.row_marginal()),
                              default_basis(joint.col_marginal()));
}

std::vector<double> bias_only(std::size_t n, double b) {
  std::vector<double> v(n, 0.0);
  v[0] = b;
  return v;
}

double primal_objective(std::span<const double> f, std::span<const double> g,
                        const PrimalInstance& inst) {
  if (f.size() != inst.kernel.size() || g.size() != inst.kernel.size()) {
    throw DimensionError("primal_objective: coefficient length mismatch");
  }
  if (std::abs(f[0] - inst.bias_f) > kFeasibilityTol ||
      std::abs(g[0] - inst.bias_g) > kFeasibilityTol) {
    throw ConstraintViolation("primal_objective: constant coefficient differs from the bias");
  }
  return inst.kernel.bilinear(f, g);
}

MembershipReport check_membership(std::span<const double> v, const FourierSpace& space,
                                  double bias) {
  MembershipReport rep;
  const auto values = space.synthesize(v);
  for (double x : values) rep.max_abs_value = std::max(rep.max_abs_value, std::abs(x));
  rep.box_violation = std::max(0.0, rep.max_abs_value - 1.0);
  rep.bias_error = std::abs(v[0] - bias);
  rep.feasible = rep.box_violation <= kFeasibilityTol && rep.bias_error <= kFeasibilityTol;
  return rep;
}

double equibiased_objective(const FourierVector& f, double rho) {
  if (f.q != 2) throw DimensionError("equibiased_objective: binary inputs only");
  double acc = 0;
  for (std::size_t s = 0; s < f.coeffs.size(); ++s) {
    int w = 0;
    for (std::size_t m = s; m; m >>= 1) w += static_cast<int>(m & 1u);
    acc += f.coeffs[s] * f.coeffs[s] * std::pow(rho, w);
  }
  return acc;
}

std::optional<TargetDirection> direction_of_target(const TargetPmf& q) {
  const Eigen::VectorXd qu = q.row_marginal();
  const Eigen::VectorXd qv = q.col_marginal();
  if (q.rows() < 2 || q.cols() < 2) return std::nullopt;
  Eigen::MatrixXd beta(q.rows() - 1, q.cols() - 1);
  for (int u = 1; u < q.rows(); ++u) {
    for (int v = 1; v < q.cols(); ++v) beta(u - 1, v - 1) = 4 * (q(u, v) - qu(u) * qv(v));
  }
  const double t = beta.squaredNorm();
  if (std::sqrt(t) < 1e-14) return std::nullopt;
  return TargetDirection{beta / std::sqrt(t), t};
}

TargetPmf target_from_direction(const Eigen::MatrixXd& alpha, double t,
                                const Eigen::VectorXd& q_u, const Eigen::VectorXd& q_v) {
  const Eigen::Index nu = q_u.size(), nv = q_v.size();
  if (alpha.rows() != nu - 1 || alpha.cols() != nv - 1) {
    throw DimensionError("target_from_direction: direction shape does not match marginals");
  }
  if (t < 0) throw InvalidInput("target_from_direction: negative magnitude");
  Eigen::MatrixXd q(nu, nv);
  const double scale = std::sqrt(t);
  for (Eigen::Index u = 1; u < nu; ++u) {
    for (Eigen::Index v = 1; v < nv; ++v) q(u, v) = q_u(u) * q_v(v) + scale * alpha(u - 1, v - 1) / 4;
  }
  for (Eigen::Index v = 1; v < nv; ++v) q(0, v) = q_v(v) - q.col(v).tail(nu - 1).sum();
  for (Eigen::Index u = 1; u < nu; ++u) q(u, 0) = q_u(u) - q.row(u).tail(nv - 1).sum();
  q(0, 0) = q_u(0) - q.row(0).tail(nv - 1).sum();
  try {
    return TargetPmf(q);
  } catch (const InvalidInput&) {
    throw InfeasibleError("target_from_direction: direction and magnitude leave the simplex");
  }
}

DirectionalInstance make_directional_instance(const JointPmf& joint, int d,
                                              const Eigen::VectorXd& q_u,
                                              const Eigen::VectorXd& q_v) {
  const auto bx = default_basis(joint.row_marginal());
  const auto by = default_basis(joint.col_marginal());
  const Eigen::MatrixXd rho = cross_correlation(joint, bx, by);
  if (q_u.size() < 2 || q_v.size() < 2) {
    throw DimensionError("make_directional_instance: outputs need at least two symbols");
  }
  return DirectionalInstance{FourierSpace::product(bx, d), FourierSpace::product(by, d),
                             CrossKernel::iid(rho, d), q_u, q_v};
}

DirectionalReport directional_objective_and_constraints(
    const std::vector<std::vector<double>>& f_family,
    const std::vector<std::vector<double>>& g_family, const DirectionalInstance& inst,
    const Eigen::MatrixXd& alpha) {
  const auto nu = static_cast<Eigen::Index>(f_family.size());
  const auto nv = static_cast<Eigen::Index>(g_family.size());
  if (nu != inst.q_u.size() - 1 || nv != inst.q_v.size() - 1 || alpha.rows() != nu ||
      alpha.cols() != nv) {
    throw DimensionError("directional_objective_and_constraints: family sizes mismatch");
  }
  DirectionalReport rep;
  rep.f_bias_errors.resize(nu);
  rep.g_bias_errors.resize(nv);
  Eigen::MatrixXd centered(nu, nv);
  for (Eigen::Index u = 0; u < nu; ++u) {
    const double bu = 2 * inst.q_u(u + 1) - 1;
    rep.f_bias_errors(u) = std::abs(f_family[u][0] - bu);
    for (Eigen::Index v = 0; v < nv; ++v) {
      const double bv = 2 * inst.q_v(v + 1) - 1;
      centered(u, v) = inst.kernel.bilinear(f_family[u], g_family[v]) - bu * bv;
    }
  }
  for (Eigen::Index v = 0; v < nv; ++v) {
    rep.g_bias_errors(v) = std::abs(g_family[v][0] - (2 * inst.q_v(v + 1) - 1));
  }

  rep.ref_u = -1;
  for (Eigen::Index u = 0; u < nu && rep.ref_u < 0; ++u) {
    for (Eigen::Index v = 0; v < nv; ++v) {
      if (std::abs(alpha(u, v)) > 1e-14) {
        rep.ref_u = static_cast<int>(u) + 1;
        rep.ref_v = static_cast<int>(v) + 1;
        break;
      }
    }
  }
  if (rep.ref_u < 0) throw InvalidInput("directional_objective_and_constraints: zero direction");
  rep.objective = centered(rep.ref_u - 1, rep.ref_v - 1) / alpha(rep.ref_u - 1, rep.ref_v - 1);
  rep.residuals = centered - rep.objective * alpha;

  const auto check_side = [&](const std::vector<std::vector<double>>& family,
                              const FourierSpace& space, Eigen::Index out_size) {
    std::vector<double> sum(space.size(), 0.0);
    for (const auto& coeffs : family) {
      const auto values = space.synthesize(coeffs);
      for (std::size_t x = 0; x < values.size(); ++x) {
        rep.box_violation = std::max(rep.box_violation, std::abs(values[x]) - 1.0);
        sum[x] += values[x];
      }
    }
    for (double s : sum) {
      const double implied = 2.0 - static_cast<double>(out_size) - s;
      rep.aggregate_violation = std::max(rep.aggregate_violation, std::abs(implied) - 1.0);
    }
  };
  check_side(f_family, inst.x_space, inst.q_u.size());
  check_side(g_family, inst.y_space, inst.q_v.size());
  rep.box_violation = std::max(rep.box_violation, 0.0);
  rep.aggregate_violation = std::max(rep.aggregate_violation, 0.0);
  return rep;
}

}  // namespace niss
