#include "niss/fourier.hpp"

#include <cmath>

#include "niss/indexing.hpp"

namespace niss {

OrthonormalBasis gram_schmidt_basis(const Eigen::VectorXd& marginal,
                                    const std::vector<SeedFunction>& seeds) {
  const int q = static_cast<int>(marginal.size());
  if (q < 2) throw DimensionError("gram_schmidt_basis: alphabet must have at least 2 symbols");
  if (static_cast<int>(seeds.size()) != q) {
    throw DimensionError("gram_schmidt_basis: need exactly q seed functions");
  }
  if (marginal.minCoeff() < 0 || std::abs(marginal.sum() - 1) > kSimplexTol) {
    throw InvalidInput("gram_schmidt_basis: marginal is not a pmf");
  }
  for (int x = 0; x < q; ++x) {
    if (std::abs(seeds[0](x) - 1.0) > 1e-15) {
      throw InvalidInput("gram_schmidt_basis: first seed must be the constant 1");
    }
  }
  const auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (marginal.array() * a.array() * b.array()).sum();
  };
  OrthonormalBasis basis{q, Eigen::MatrixXd(q, q), marginal};
  for (int s = 0; s < q; ++s) {
    Eigen::VectorXd seed(q);
    for (int x = 0; x < q; ++x) seed(x) = seeds[s](x);
    Eigen::VectorXd v = seed;
    // Two passes of modified Gram-Schmidt keep orthogonality near machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (int t = 0; t < s; ++t) {
        const Eigen::VectorXd prev = basis.psi.row(t).transpose();
        v -= inner(v, prev) * prev;
      }
    }
    const double norm = std::sqrt(inner(v, v));
    if (norm < kBasisDegeneracyTol) {
      throw DegenerateError("gram_schmidt_basis: seed functions are linearly dependent in L2(P)");
    }
    v /= norm;
    if (inner(v, seed) < 0) v = -v;
    basis.psi.row(s) = v.transpose();
  }
  return basis;
}

OrthonormalBasis default_basis(const Eigen::VectorXd& marginal) {
  const int q = static_cast<int>(marginal.size());
  std::vector<SeedFunction> seeds;
  seeds.emplace_back([](int) { return 1.0; });
  if (q == 2) {
    seeds.emplace_back([](int x) { return binary_symbol(x); });
  } else {
    for (int k = 0; k + 1 < q; ++k) {
      seeds.emplace_back([k](int x) { return x == k ? 1.0 : 0.0; });
    }
  }
  return gram_schmidt_basis(marginal, seeds);
}

Eigen::MatrixXd cross_correlation(const JointPmf& joint, const OrthonormalBasis& bx,
                                  const OrthonormalBasis& by) {
  if (bx.q != joint.rows() || by.q != joint.cols()) {
    throw DimensionError("cross_correlation: basis and joint alphabets differ");
  }
  return bx.psi * joint.matrix() * by.psi.transpose();
}

std::vector<double> kron_apply(const std::vector<Eigen::MatrixXd>& factors,
                               std::span<const double> in) {
  std::vector<Eigen::Index> out_dims, in_dims;
  std::size_t expected = 1;
  for (const auto& f : factors) {
    out_dims.push_back(f.rows());
    in_dims.push_back(f.cols());
    expected *= static_cast<std::size_t>(f.cols());
  }
  if (in.size() != expected) throw DimensionError("kron_apply: input length mismatch");
  std::vector<double> cur(in.begin(), in.end());
  std::vector<double> next;
  const std::size_t d = factors.size();
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t left = 1, right = 1;
    for (std::size_t j = 0; j < i; ++j) left *= out_dims[j];
    for (std::size_t j = i + 1; j < d; ++j) right *= in_dims[j];
    const auto& m = factors[i];
    const std::size_t rows = m.rows(), cols = m.cols();
    next.assign(left * rows * right, 0.0);
    for (std::size_t l = 0; l < left; ++l) {
      const double* src = cur.data() + l * cols * right;
      double* dst = next.data() + l * rows * right;
      for (std::size_t a = 0; a < rows; ++a) {
        double* drow = dst + a * right;
        for (std::size_t b = 0; b < cols; ++b) {
          const double coef = m(a, b);
          if (coef == 0.0) continue;
          const double* srow = src + b * right;
          for (std::size_t r = 0; r < right; ++r) drow[r] += coef * srow[r];
        }
      }
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<double> product_weights(const Eigen::VectorXd& marginal, int d) {
  const int q = static_cast<int>(marginal.size());
  const std::size_t n = table_size(q, d);
  std::vector<double> w(n, 1.0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    double p = 1.0;
    for (int i = 0; i < d; ++i) {
      p *= marginal(static_cast<Eigen::Index>(rest % q));
      rest /= q;
    }
    w[idx] = p;
  }
  return w;
}

FourierVector fourier_transform(const RealTable& f, const OrthonormalBasis& basis) {
  if (f.q != basis.q || f.values.size() != table_size(f.q, f.d)) {
    throw DimensionError("fourier_transform: table does not match basis alphabet");
  }
  const FourierSpace space = FourierSpace::product(basis, f.d);
  return FourierVector{f.q, f.d, space.analyze(f.values)};
}

RealTable inverse_transform(const FourierVector& v, const OrthonormalBasis& basis) {
  if (v.q != basis.q || v.coeffs.size() != table_size(v.q, v.d)) {
    throw DimensionError("inverse_transform: coefficients do not match basis alphabet");
  }
  const FourierSpace space = FourierSpace::product(basis, v.d);
  return RealTable{v.q, v.d, space.synthesize(v.coeffs)};
}

namespace {

void check_pair(const FourierVector& f, const FourierVector& g, const Eigen::MatrixXd& rho) {
  if (f.d != g.d || f.q != rho.rows() || g.q != rho.cols() ||
      f.coeffs.size() != table_size(f.q, f.d) || g.coeffs.size() != table_size(g.q, g.d)) {
    throw DimensionError("inner_product_fourier: dimension mismatch");
  }
}

bool is_boolean_diagonal(const Eigen::MatrixXd& rho) {
  return rho.rows() == 2 && rho.cols() == 2 && rho(0, 1) == 0.0 && rho(1, 0) == 0.0 &&
         std::abs(rho(0, 0) - 1.0) < 1e-15;
}

}  // namespace

double inner_product_fourier(const FourierVector& f, const FourierVector& g,
                             const Eigen::MatrixXd& rho) {
  check_pair(f, g, rho);
  if (is_boolean_diagonal(rho)) {
    const double r = rho(1, 1);
    std::vector<double> pw(f.d + 1, 1.0);
    for (int k = 1; k <= f.d; ++k) pw[k] = pw[k - 1] * r;
    double acc = 0;
    for (std::size_t s = 0; s < f.coeffs.size(); ++s) {
      acc += f.coeffs[s] * g.coeffs[s] * pw[support_size(s, 2)];
    }
    return acc;
  }
  const CrossKernel kernel = CrossKernel::iid(rho, f.d);
  return kernel.bilinear(f.coeffs, g.coeffs);
}

double inner_product_fourier_general(const FourierVector& f, const FourierVector& g,
                                     const Eigen::MatrixXd& rho) {
  check_pair(f, g, rho);
  const int qs = f.q, qt = g.q, d = f.d;
  const std::size_t ns = f.coeffs.size(), nt = g.coeffs.size();
  std::vector<int> counts(static_cast<std::size_t>(qs * qt));
  double acc = 0;
  for (std::size_t s = 0; s < ns; ++s) {
    if (f.coeffs[s] == 0.0) continue;
    const auto sd = digits_of(s, qs, d);
    for (std::size_t t = 0; t < nt; ++t) {
      if (g.coeffs[t] == 0.0) continue;
      const auto td = digits_of(t, qt, d);
      std::fill(counts.begin(), counts.end(), 0);
      for (int i = 0; i < d; ++i) ++counts[sd[i] * qt + td[i]];
      double term = f.coeffs[s] * g.coeffs[t];
      for (int a = 0; a < qs && term != 0.0; ++a) {
        for (int b = 0; b < qt; ++b) {
          const int n = counts[a * qt + b];
          if (n) term *= std::pow(rho(a, b), n);
        }
      }
      acc += term;
    }
  }
  return acc;
}

std::vector<RealTable> indicator_decompose(const TruthTable& f) {
  if (f.values.size() != table_size(f.q, f.d)) {
    throw DimensionError("indicator_decompose: table length is not q^d");
  }
  std::vector<RealTable> family(f.out_size, RealTable{f.q, f.d, {}});
  for (int u = 0; u < f.out_size; ++u) {
    family[u].values.resize(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const int out = f.values[i];
      if (out < 0 || out >= f.out_size) {
        throw InvalidInput("indicator_decompose: output outside the alphabet");
      }
      family[u].values[i] = out == u ? 1.0 : -1.0;
    }
  }
  return family;
}

CrossKernel::CrossKernel(std::vector<Eigen::MatrixXd> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw DimensionError("CrossKernel: need at least one coordinate");
  size_ = 1;
  for (const auto& f : factors_) {
    if (f.rows() != f.cols() || f.rows() != factors_.front().rows()) {
      throw DimensionError("CrossKernel: factors must be square with a common size");
    }
    transposed_.push_back(f.transpose());
    size_ *= static_cast<std::size_t>(f.rows());
  }
}

CrossKernel CrossKernel::iid(const Eigen::MatrixXd& rho, int d) {
  return CrossKernel(std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(d), rho));
}

std::vector<double> CrossKernel::apply(std::span<const double> g) const {
  return kron_apply(factors_, g);
}

std::vector<double> CrossKernel::apply_transpose(std::span<const double> f) const {
  return kron_apply(transposed_, f);
}

double CrossKernel::bilinear(std::span<const double> f, std::span<const double> g) const {
  const auto kg = apply(g);
  double acc = 0;
  for (std::size_t i = 0; i < kg.size(); ++i) acc += f[i] * kg[i];
  return acc;
}

namespace {

Eigen::MatrixXd free_block(const Eigen::MatrixXd& r) {
  const Eigen::Index q = r.rows();
  for (Eigen::Index s = 1; s < q; ++s) {
    if (std::abs(r(0, s)) > 1e-10 || std::abs(r(s, 0)) > 1e-10) {
      throw InvalidInput("CrossKernel: factor couples the constant to a free coordinate");
    }
  }
  return r.bottomRightCorner(q - 1, q - 1);
}

}  // namespace

double CrossKernel::free_spectral_norm() const { return free_top_singular_pair().sigma; }

CrossKernel::TopPair CrossKernel::free_top_singular_pair() const {
  const int qq = q();
  const int dd = d();
  TopPair best;
  int best_coord = -1;
  Eigen::VectorXd bu, bv;
  for (int i = 0; i < dd; ++i) {
    const Eigen::MatrixXd block = free_block(factors_[i]);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double s = svd.singularValues()(0);
    if (best_coord < 0 || s > best.sigma + 1e-14) {
      best.sigma = s;
      best_coord = i;
      bu = svd.matrixU().col(0);
      bv = svd.matrixV().col(0);
    }
  }
  // Canonical orientation: first nonzero entry of the left vector positive.
  for (Eigen::Index k = 0; k < bu.size(); ++k) {
    if (std::abs(bu(k)) > 1e-12) {
      if (bu(k) < 0) {
        bu = -bu;
        bv = -bv;
      }
      break;
    }
  }
  best.left.assign(size_, 0.0);
  best.right.assign(size_, 0.0);
  std::size_t stride = 1;
  for (int j = best_coord + 1; j < dd; ++j) stride *= qq;
  for (int s = 1; s < qq; ++s) {
    best.left[s * stride] = bu(s - 1);
    best.right[s * stride] = bv(s - 1);
  }
  return best;
}

FourierSpace FourierSpace::product(const OrthonormalBasis& basis, int d) {
  FourierSpace space;
  space.q_ = basis.q;
  space.d_ = d;
  space.weights_ = product_weights(basis.weights, d);
  const Eigen::MatrixXd synth = basis.psi.transpose();
  const Eigen::MatrixXd analysis = basis.psi * basis.weights.asDiagonal();
  space.synth_factors_.assign(static_cast<std::size_t>(d), synth);
  space.analysis_factors_.assign(static_cast<std::size_t>(d), analysis);
  return space;
}

FourierSpace FourierSpace::dense(int q, int d, Eigen::MatrixXd phi, std::vector<double> weights) {
  const std::size_t n = table_size(q, d);
  if (static_cast<std::size_t>(phi.rows()) != n || static_cast<std::size_t>(phi.cols()) != n ||
      weights.size() != n) {
    throw DimensionError("FourierSpace::dense: parity table must be q^d by q^d");
  }
  FourierSpace space;
  space.q_ = q;
  space.d_ = d;
  space.weights_ = std::move(weights);
  space.phi_ = std::move(phi);
  return space;
}

std::vector<double> FourierSpace::synthesize(std::span<const double> coeffs) const {
  if (coeffs.size() != size()) throw DimensionError("synthesize: length mismatch");
  if (phi_) {
    const Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), coeffs.size());
    const Eigen::VectorXd v = phi_->transpose() * c;
    return {v.data(), v.data() + v.size()};
  }
  return kron_apply(synth_factors_, coeffs);
}

std::vector<double> FourierSpace::analyze(std::span<const double> values) const {
  if (values.size() != size()) throw DimensionError("analyze: length mismatch");
  if (phi_) {
    Eigen::VectorXd wv(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) wv(i) = weights_[i] * values[i];
    const Eigen::VectorXd c = (*phi_) * wv;
    return {c.data(), c.data() + c.size()};
  }
  return kron_apply(analysis_factors_, values);
}

}  // namespace niss
