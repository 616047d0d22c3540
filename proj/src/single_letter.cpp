#include <cmath>

#include "niss/fpath.hpp"
#include "niss/maxcorr.hpp"
#include "niss/oracle.hpp"

namespace niss {

SingleLetterCorrelation maximal_correlation_single_letter(const JointPmf& joint) {
  const Eigen::VectorXd px = joint.row_marginal();
  const Eigen::VectorXd py = joint.col_marginal();
  if (px.minCoeff() <= 1e-15 || py.minCoeff() <= 1e-15) {
    throw DegenerateError("maximal_correlation_single_letter: marginal with an empty symbol");
  }
  SingleLetterCorrelation out;
  const Eigen::MatrixXd normalized =
      px.cwiseSqrt().cwiseInverse().asDiagonal() * joint.matrix() *
      py.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalized);
  out.hgr = svd.singularValues().size() > 1 ? svd.singularValues()(1) : 0.0;

  if (joint.rows() == 2 && joint.cols() == 2) {
    const double mx = px(1) - px(0), my = py(1) - py(0);
    const double sx = 2 * std::sqrt(px(0) * px(1)), sy = 2 * std::sqrt(py(0) * py(1));
    const double rho = binary_pearson(joint.matrix());
    const double f1 = sx / (1 + std::abs(mx));
    const double g1 = (rho < 0 ? -1.0 : 1.0) * sy / (1 + std::abs(my));
    out.f_coeffs = {0.0, f1};
    out.g_coeffs = {0.0, g1};
    out.bounded = f1 * g1 * rho;
    return out;
  }

  const PrimalInstance inst = make_primal_instance(joint, 1, 0.5, 0.5);
  const FPathState state = fpath_solve(inst);
  out.f_coeffs = state.iterate.f;
  out.g_coeffs = state.iterate.g;
  out.bounded = state.objective;

  // Bilinear maximum over a product of polytopes sits at a vertex pair.
  const auto vx = box_polytope_vertices(inst.x_space.weights(), 0.0);
  const auto vy = box_polytope_vertices(inst.y_space.weights(), 0.0);
  double best = -1;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < vx.size(); ++i) {
    const Eigen::Map<const Eigen::VectorXd> a(vx[i].data(), vx[i].size());
    const Eigen::RowVectorXd left = a.transpose() * joint.matrix();
    for (std::size_t j = 0; j < vy.size(); ++j) {
      const Eigen::Map<const Eigen::VectorXd> b(vy[j].data(), vy[j].size());
      const double v = left * b;
      if (v > best + 1e-13) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  if (best > out.bounded + 1e-9) {
    out.bounded = best;
    out.f_coeffs = inst.x_space.analyze(vx[bi]);
    out.g_coeffs = inst.y_space.analyze(vy[bj]);
    out.f_coeffs[0] = 0.0;
    out.g_coeffs[0] = 0.0;
  }
  return out;
}

}  // namespace niss
