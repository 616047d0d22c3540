#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "niss/distributions.hpp"

namespace niss {

inline constexpr double kBasisDegeneracyTol = 1e-10;

// q functions psi_s on {0..q-1}, orthonormal under the weights. Row s of psi
// tabulates psi_s; psi_0 is the constant 1.
struct OrthonormalBasis {
  int q = 0;
  Eigen::MatrixXd psi;
  Eigen::VectorXd weights;
};

using SeedFunction = std::function<double(int)>;

// Gram-Schmidt under <f,g> = sum_x w(x) f(x) g(x). Each psi_s keeps the
// orientation of its seed (positive inner product with it). The first seed must
// be the constant function.
OrthonormalBasis gram_schmidt_basis(const Eigen::VectorXd& marginal,
                                    const std::vector<SeedFunction>& seeds);

// Seeds {1, x} for q = 2 (binary symbols -1, +1), which gives
// psi_1 = (x - mu) / sigma; seeds {1, 1(x=0), ..., 1(x=q-2)} otherwise.
OrthonormalBasis default_basis(const Eigen::VectorXd& marginal);

// rho(s,t) = E[psi_s(X) psi'_t(Y)].
Eigen::MatrixXd cross_correlation(const JointPmf& joint, const OrthonormalBasis& bx,
                                  const OrthonormalBasis& by);

struct FourierVector {
  int q = 0;
  int d = 0;
  std::vector<double> coeffs;
};

// Real-valued function on {0..q-1}^d (flat index, first coordinate most significant).
struct RealTable {
  int q = 0;
  int d = 0;
  std::vector<double> values;
};

// Finite-output function on {0..q-1}^d with outputs in {0..out_size-1}.
struct TruthTable {
  int q = 0;
  int d = 0;
  int out_size = 0;
  std::vector<int> values;
};

// Applies one matrix per coordinate of a length-prod(cols) tensor (coordinate 0
// most significant). Factors may be rectangular.
std::vector<double> kron_apply(const std::vector<Eigen::MatrixXd>& factors,
                               std::span<const double> in);

// Per-point weights prod_i w(x_i) of the product measure.
std::vector<double> product_weights(const Eigen::VectorXd& marginal, int d);

FourierVector fourier_transform(const RealTable& f, const OrthonormalBasis& basis);
RealTable inverse_transform(const FourierVector& v, const OrthonormalBasis& basis);

// E[f(X^d) g(Y^d)] from coefficients: the single-letter kernel rho applied
// d-fold. Uses sum_S f_S g_S rho^|S| when rho is diag(1, r) (Boolean case).
double inner_product_fourier(const FourierVector& f, const FourierVector& g,
                             const Eigen::MatrixXd& rho);

// Literal double sum over (s^d, t^d) of f g prod rho_{s,t}^{n(s,t)}; O(q^{2d}).
double inner_product_fourier_general(const FourierVector& f, const FourierVector& g,
                                     const Eigen::MatrixXd& rho);

// Family (f_u) of +-1 indicator tables, f_u = 2 * 1(f = u) - 1.
std::vector<RealTable> indicator_decompose(const TruthTable& f);

// Cross kernel K = R_1 (x) ... (x) R_d acting on coefficient vectors.
class CrossKernel {
 public:
  explicit CrossKernel(std::vector<Eigen::MatrixXd> factors);
  static CrossKernel iid(const Eigen::MatrixXd& rho, int d);

  int d() const { return static_cast<int>(factors_.size()); }
  int q() const { return static_cast<int>(factors_.front().rows()); }
  std::size_t size() const { return size_; }
  const std::vector<Eigen::MatrixXd>& factors() const { return factors_; }

  std::vector<double> apply(std::span<const double> g) const;            // K g
  std::vector<double> apply_transpose(std::span<const double> f) const;  // K^T f
  double bilinear(std::span<const double> f, std::span<const double> g) const;

  // Largest singular value of K restricted to the non-constant coordinates,
  // i.e. max_i of the top singular value of R_i without its constant row and
  // column. Requires the block structure R_i(0,t) = R_i(s,0) = 0 for s,t != 0.
  double free_spectral_norm() const;

  // Index of the coordinate attaining free_spectral_norm (first on ties) and
  // its top singular pair, lifted to full coefficient vectors.
  struct TopPair {
    double sigma = 0;
    std::vector<double> left;
    std::vector<double> right;
  };
  TopPair free_top_singular_pair() const;

 private:
  std::vector<Eigen::MatrixXd> factors_;
  std::vector<Eigen::MatrixXd> transposed_;
  std::size_t size_ = 0;
};

// The function space of one agent: coefficient <-> value maps and the point
// weights. Product spaces use per-coordinate factors; dense spaces carry an
// explicit parity table phi(s, x) (used for non-product sources).
class FourierSpace {
 public:
  static FourierSpace product(const OrthonormalBasis& basis, int d);
  static FourierSpace dense(int q, int d, Eigen::MatrixXd phi, std::vector<double> weights);

  int q() const { return q_; }
  int d() const { return d_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }

  std::vector<double> synthesize(std::span<const double> coeffs) const;
  std::vector<double> analyze(std::span<const double> values) const;

 private:
  int q_ = 0;
  int d_ = 0;
  std::vector<double> weights_;
  std::vector<Eigen::MatrixXd> synth_factors_;
  std::vector<Eigen::MatrixXd> analysis_factors_;
  std::optional<Eigen::MatrixXd> phi_;
};

}  // namespace niss
