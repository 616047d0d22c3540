#pragma once

#include <optional>
#include <vector>

#include "niss/distributions.hpp"
#include "niss/fourier.hpp"

namespace niss {

inline constexpr double kFeasibilityTol = 1e-9;

// Binary-output biased maximal correlation problem: maximize f^T K g over
// coefficient pairs whose reconstructions lie in [-1,1] and whose constant
// coefficients are pinned to bias_f = 2Q_U(1)-1, bias_g = 2Q_V(1)-1.
struct PrimalInstance {
  FourierSpace x_space;
  FourierSpace y_space;
  CrossKernel kernel;
  double bias_f = 0;
  double bias_g = 0;
};

// IID instance on joint^d with default bases on both sides.
PrimalInstance make_primal_instance(const JointPmf& joint, int d, double q_u1, double q_v1);
PrimalInstance make_primal_instance(const JointPmf& joint, int d, double q_u1, double q_v1,
                                    const OrthonormalBasis& bx, const OrthonormalBasis& by);

// Coefficient vector of the constant function b.
std::vector<double> bias_only(std::size_t n, double b);

struct SingleLetterCorrelation {
  double hgr = 0;      // Hirschfeld-Gebelein-Renyi maximal correlation
  double bounded = 0;  // max of sum f_i g_j rho_ij over zero-mean [-1,1]-valued pairs
  std::vector<double> f_coeffs;
  std::vector<double> g_coeffs;
};

// For q = 2 on both sides uses f(X) = (X - E X)/(1 + |E X|) and its Y analogue;
// otherwise the bounded pair comes from the path-following solver at d = 1,
// cross-checked against enumeration of the polytope vertices.
SingleLetterCorrelation maximal_correlation_single_letter(const JointPmf& joint);

double primal_objective(std::span<const double> f, std::span<const double> g,
                        const PrimalInstance& inst);

struct MembershipReport {
  bool feasible = false;
  double max_abs_value = 0;
  double box_violation = 0;   // max(0, max |value| - 1)
  double bias_error = 0;
};

MembershipReport check_membership(std::span<const double> v, const FourierSpace& space,
                                  double bias);

// sum_S f_S^2 rho^|S| for Boolean coefficient vectors.
double equibiased_objective(const FourierVector& f, double rho);

// Direction alpha = beta / |beta| with beta_{u,v} = 4(Q(u,v) - Q_U(u)Q_V(v))
// over (u,v) in {1..|U|-1} x {1..|V|-1}, and t = sum beta^2. Empty for
// product targets.
struct TargetDirection {
  Eigen::MatrixXd alpha;
  double t = 0;
};
std::optional<TargetDirection> direction_of_target(const TargetPmf& q);

// The pmf with the given marginals whose beta equals sqrt(t) * alpha.
TargetPmf target_from_direction(const Eigen::MatrixXd& alpha, double t,
                                const Eigen::VectorXd& q_u, const Eigen::VectorXd& q_v);

// Finite-output variant: coefficient families over U_phi, V_phi whose constant
// coefficients are 2Q_U(u)-1 and 2Q_V(v)-1.
struct DirectionalInstance {
  FourierSpace x_space;
  FourierSpace y_space;
  CrossKernel kernel;
  Eigen::VectorXd q_u;
  Eigen::VectorXd q_v;
};

DirectionalInstance make_directional_instance(const JointPmf& joint, int d,
                                              const Eigen::VectorXd& q_u,
                                              const Eigen::VectorXd& q_v);

struct DirectionalReport {
  double objective = 0;
  int ref_u = 1;
  int ref_v = 1;
  Eigen::MatrixXd residuals;  // (t_ref - t_uv) scaled as in the directionality constraint
  Eigen::VectorXd f_bias_errors;
  Eigen::VectorXd g_bias_errors;
  double box_violation = 0;
  // Violation of the implied f_0 = 2 - |U| - sum_u f_u staying in [-1, 1].
  double aggregate_violation = 0;
};

DirectionalReport directional_objective_and_constraints(
    const std::vector<std::vector<double>>& f_family,
    const std::vector<std::vector<double>>& g_family, const DirectionalInstance& inst,
    const Eigen::MatrixXd& alpha);

}  // namespace niss
