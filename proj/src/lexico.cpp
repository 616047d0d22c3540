#include "niss/lexico.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "niss/indexing.hpp"
#include "niss/oracle.hpp"

namespace niss {

namespace {

void require_pm1(const RealTable& f, const char* what) {
  if (f.q != 2) throw DimensionError(std::string(what) + ": binary inputs required");
  if (f.values.size() != table_size(2, f.d)) throw DimensionError(std::string(what) + ": bad table length");
  for (double v : f.values) {
    if (v != 1.0 && v != -1.0) throw ConstraintViolation(std::string(what) + ": table must be +-1 valued");
  }
}

double accepted_fraction(const RealTable& f) {
  return static_cast<double>(std::count(f.values.begin(), f.values.end(), 1.0)) /
         static_cast<double>(f.values.size());
}

}  // namespace

RealTable lex_function(int d, int accepted) {
  const std::size_t n = table_size(2, d);
  if (accepted < 0 || static_cast<std::size_t>(accepted) > n) {
    throw InvalidInput("lex_function: accepted count outside [0, 2^d]");
  }
  RealTable f{2, d, std::vector<double>(n, -1.0)};
  std::fill(f.values.begin(), f.values.begin() + accepted, 1.0);
  return f;
}

LexPair lex_pair(int d, double q_u1, double q_v1) {
  if (!(q_u1 >= 0 && q_u1 <= 1 && q_v1 >= 0 && q_v1 <= 1)) {
    throw InvalidInput("lex_pair: output probabilities must lie in [0,1]");
  }
  LexPair p;
  p.d = d;
  p.n_u = acceptance_count(q_u1, 2, d);
  p.n_v = acceptance_count(q_v1, 2, d);
  p.f = lex_function(d, p.n_u);
  p.g = lex_function(d, p.n_v);
  return p;
}

double time_domain_correlation(const RealTable& f, const RealTable& g, double rho, double q_u1,
                               double q_v1) {
  require_pm1(f, "time_domain_correlation");
  require_pm1(g, "time_domain_correlation");
  if (f.d != g.d) throw DimensionError("time_domain_correlation: block lengths differ");
  if (!(rho > -1 && rho <= 1)) throw InvalidInput("time_domain_correlation: rho must lie in (-1, 1]");
  if (std::abs(accepted_fraction(f) - q_u1) > 1e-12 || std::abs(accepted_fraction(g) - q_v1) > 1e-12) {
    throw ConstraintViolation("time_domain_correlation: biases do not match the tables");
  }
  const double beta = (1 - rho) / (1 + rho);
  std::vector<double> beta_pow(f.d + 1, 1.0);
  for (int k = 1; k <= f.d; ++k) beta_pow[k] = beta_pow[k - 1] * beta;
  double sum = 0;
  for (std::size_t x = 0; x < f.values.size(); ++x) {
    if (f.values[x] != 1.0) continue;
    for (std::size_t y = 0; y < g.values.size(); ++y) {
      if (g.values[y] == 1.0) sum += beta_pow[std::popcount(x ^ y)];
    }
  }
  return 4 * std::pow((1 + rho) / 4, f.d) * sum - 2 * q_u1 - 2 * q_v1 + 1;
}

double time_domain_correlation(const RealTable& f, const RealTable& g, const JointPmf& joint) {
  if (joint.rows() != 2 || joint.cols() != 2) throw DimensionError("time_domain_correlation: binary joint required");
  const Eigen::VectorXd px = joint.row_marginal(), py = joint.col_marginal();
  if (std::abs(px(0) - 0.5) > 1e-12 || std::abs(py(0) - 0.5) > 1e-12) {
    throw InvalidInput("time_domain_correlation: requires uniform input marginals");
  }
  return time_domain_correlation(f, g, binary_pearson(joint.matrix()), accepted_fraction(f),
                                 accepted_fraction(g));
}

long long DistanceSpectrum::total() const {
  long long t = 0;
  for (long long v : n) t += v;
  return t;
}

DistanceSpectrum distance_spectrum(const RealTable& f, const RealTable& g) {
  require_pm1(f, "distance_spectrum");
  require_pm1(g, "distance_spectrum");
  if (f.d != g.d) throw DimensionError("distance_spectrum: block lengths differ");
  DistanceSpectrum s;
  s.n.assign(f.d + 1, 0);
  for (std::size_t x = 0; x < f.values.size(); ++x) {
    if (f.values[x] != 1.0) continue;
    for (std::size_t y = 0; y < g.values.size(); ++y) {
      if (g.values[y] == 1.0) ++s.n[std::popcount(x ^ y)];
    }
  }
  return s;
}

bool spectrum_dominates(const DistanceSpectrum& a, const DistanceSpectrum& b) {
  if (a.n.size() != b.n.size()) throw DimensionError("spectrum_dominates: lengths differ");
  long long pa = 0, pb = 0;
  for (std::size_t k = 0; k < a.n.size(); ++k) {
    pa += a.n[k];
    pb += b.n[k];
    if (pa < pb) return false;
  }
  return true;
}

RealTable project(const RealTable& f, int k) {
  require_pm1(f, "project");
  if (k < 0 || k >= f.d) throw InvalidInput("project: coordinate out of range");
  const std::size_t bit = std::size_t{1} << (f.d - 1 - k);
  RealTable out = f;
  for (std::size_t x = 0; x < f.values.size(); ++x) {
    const bool here = f.values[x] == 1.0, there = f.values[x ^ bit] == 1.0;
    const bool minus_side = (x & bit) == 0;
    out.values[x] = (minus_side ? (here || there) : (here && there)) ? 1.0 : -1.0;
  }
  return out;
}

RealTable shuffle(const RealTable& f, const std::vector<int>& pi) {
  if (static_cast<int>(pi.size()) != f.d) throw InvalidInput("shuffle: permutation length differs from d");
  std::vector<bool> seen(f.d, false);
  for (int p : pi) {
    if (p < 0 || p >= f.d || seen[p]) throw InvalidInput("shuffle: not a permutation");
    seen[p] = true;
  }
  RealTable out = f;
  for (std::size_t x = 0; x < f.values.size(); ++x) {
    const auto digits = digits_of(x, f.q, f.d);
    std::vector<int> moved(f.d);
    for (int i = 0; i < f.d; ++i) moved[i] = digits[pi[i]];
    out.values[x] = f.values[index_of(moved, f.q)];
  }
  return out;
}

Eigen::MatrixXi hamming_matrix(int d) {
  if (d < 1) throw DimensionError("hamming_matrix: d must be positive");
  if (d > 12) throw CapExceeded("hamming_matrix: 2^d exceeds 2^12");
  Eigen::MatrixXi dm(2, 2);
  dm << 0, 1, 1, 0;
  const Eigen::MatrixXi d1 = dm;
  for (int k = 2; k <= d; ++k) {
    const Eigen::Index m = dm.rows();
    Eigen::MatrixXi next(2 * m, 2 * m);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        next.block(a * m, b * m, m, m) = dm + Eigen::MatrixXi::Constant(m, m, d1(a, b));
      }
    }
    dm = std::move(next);
  }
  return dm;
}

std::vector<TvDecayRow> tv_decay_experiment(double q_u1, double q_v1, double rho, int d_max) {
  if (d_max < 1 || d_max > 14) throw CapExceeded("tv_decay_experiment: d_max must lie in [1, 14]");
  if (!(rho > -1 && rho <= 1)) throw InvalidInput("tv_decay_experiment: rho must lie in (-1, 1]");
  const double beta = (1 - rho) / (1 + rho);
  Eigen::Matrix2d kb;
  kb << 1, beta, beta, 1;
  std::vector<TvDecayRow> rows;
  for (int d = 1; d <= d_max; ++d) {
    const LexPair lp = lex_pair(d, q_u1, q_v1);
    // sum_{x in A, y in B} beta^{d_H(x,y)} = 1_A^T (kb (x) ... (x) kb) 1_B.
    std::vector<double> ind_b(lp.g.values.size());
    for (std::size_t y = 0; y < ind_b.size(); ++y) ind_b[y] = lp.g.values[y] == 1.0 ? 1.0 : 0.0;
    const auto kb_b = kron_apply(std::vector<Eigen::MatrixXd>(d, kb), ind_b);
    double pair_sum = 0;
    for (int x = 0; x < lp.n_u; ++x) pair_sum += kb_b[x];
    const double size = std::ldexp(1.0, d);
    const double pu = lp.n_u / size, pv = lp.n_v / size;
    const double p11 = std::pow((1 + rho) / 4, d) * pair_sum;
    TvDecayRow row;
    row.d = d;
    row.joint(1, 1) = p11;
    row.joint(1, 0) = pu - p11;
    row.joint(0, 1) = pv - p11;
    row.joint(0, 0) = 1 - pu - pv + p11;
    rows.push_back(row);
  }
  const Eigen::Matrix2d limit = rows.back().joint;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].tv = (rows[i].joint - limit).cwiseAbs().sum();
    if (i > 0 && rows[i - 1].tv > 0) rows[i].ratio = rows[i].tv / rows[i - 1].tv;
  }
  return rows;
}

}  // namespace niss
