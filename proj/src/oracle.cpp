#include "niss/oracle.hpp"

#include <cmath>

#include "niss/indexing.hpp"
#include "niss/maxcorr.hpp"

namespace niss {

double exact_expectation(const RealTable& f, const RealTable& g, const JointPmf& joint) {
  if (f.d != g.d || f.q != joint.rows() || g.q != joint.cols()) {
    throw DimensionError("exact_expectation: tables do not match the joint");
  }
  const std::size_t nx = table_size(f.q, f.d), ny = table_size(g.q, g.d);
  if (static_cast<double>(nx) * static_cast<double>(ny) > static_cast<double>(kExpectationCap)) {
    throw CapExceeded("exact_expectation: more than 2^24 terms");
  }
  double acc = 0;
  for (std::size_t x = 0; x < nx; ++x) {
    const auto xd = digits_of(x, f.q, f.d);
    for (std::size_t y = 0; y < ny; ++y) {
      const auto yd = digits_of(y, g.q, g.d);
      double p = 1;
      for (int i = 0; i < f.d; ++i) p *= joint(xd[i], yd[i]);
      acc += f.values[x] * g.values[y] * p;
    }
  }
  return acc;
}

Eigen::MatrixXd block_joint(const JointPmf& joint, int d) {
  const std::size_t nx = table_size(joint.rows(), d), ny = table_size(joint.cols(), d);
  if (static_cast<double>(nx) * static_cast<double>(ny) > static_cast<double>(kExpectationCap)) {
    throw CapExceeded("block_joint: more than 2^24 entries");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  for (int i = 0; i < d; ++i) {
    Eigen::MatrixXd next(w.rows() * joint.rows(), w.cols() * joint.cols());
    for (Eigen::Index a = 0; a < w.rows(); ++a) {
      for (Eigen::Index b = 0; b < w.cols(); ++b) {
        next.block(a * joint.rows(), b * joint.cols(), joint.rows(), joint.cols()) =
            w(a, b) * joint.matrix();
      }
    }
    w.swap(next);
  }
  return w;
}

Eigen::MatrixXd exact_output_joint(const TruthTable& f, const TruthTable& g,
                                   const JointPmf& joint) {
  if (f.d != g.d) throw DimensionError("exact_output_joint: block lengths differ");
  const Eigen::MatrixXd w = block_joint(joint, f.d);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(f.out_size, g.out_size);
  for (Eigen::Index x = 0; x < w.rows(); ++x) {
    for (Eigen::Index y = 0; y < w.cols(); ++y) out(f.values[x], g.values[y]) += w(x, y);
  }
  return out;
}

int acceptance_count(double prob, int q, int d) {
  const double scaled = prob * static_cast<double>(table_size(q, d));
  return static_cast<int>(std::ceil(scaled - 1e-9));
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Advances a sorted k-subset of {0..n-1} to its lexicographic successor.
bool next_combination(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

std::vector<int> first_combination(int k) {
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  return c;
}

RealTable table_from_set(int q, int d, const std::vector<int>& accepted) {
  RealTable t{q, d, std::vector<double>(table_size(q, d), -1.0)};
  for (int i : accepted) t.values[i] = 1.0;
  return t;
}

}  // namespace

BiasedMaxcorr brute_force_biased_maxcorr(const JointPmf& joint, int d, int n_u, int n_v) {
  const int nx = static_cast<int>(table_size(joint.rows(), d));
  const int ny = static_cast<int>(table_size(joint.cols(), d));
  if (n_u < 0 || n_u > nx || n_v < 0 || n_v > ny) {
    throw InvalidInput("brute_force_biased_maxcorr: acceptance count out of range");
  }
  const double pairs = binomial(nx, n_u) * binomial(ny, n_v);
  if (pairs > kPairCap) {
    throw CapExceeded("brute_force_biased_maxcorr: " + std::to_string(pairs) +
                      " candidate pairs exceed the 1e8 cap");
  }
  const Eigen::MatrixXd w = block_joint(joint, d);
  BiasedMaxcorr best;
  best.pairs = pairs;
  bool have = false;
  std::vector<int> best_a, best_b;
  std::vector<int> a = first_combination(n_u);
  Eigen::VectorXd h(ny);
  do {
    // h(y) = sum_x W(x,y) f(x) for the +-1 table accepting a.
    h = -w.colwise().sum().transpose();
    for (int x : a) h += 2 * w.row(x).transpose();
    const double total = h.sum();
    std::vector<int> b = first_combination(n_v);
    do {
      double s = 0;
      for (int y : b) s += h(y);
      const double value = 2 * s - total;
      if (!have || value > best.value + 1e-13) {
        have = true;
        best.value = value;
        best_a = a;
        best_b = b;
      }
    } while (next_combination(b, ny));
  } while (next_combination(a, nx));
  best.f = table_from_set(joint.rows(), d, best_a);
  best.g = table_from_set(joint.cols(), d, best_b);
  return best;
}

namespace {

bool next_table(std::vector<int>& t, int base) {
  for (std::size_t i = t.size(); i-- > 0;) {
    if (++t[i] < base) return true;
    t[i] = 0;
  }
  return false;
}

}  // namespace

std::vector<ExtremePoint> brute_force_extremes(const JointPmf& joint, int d,
                                               const Eigen::VectorXd& q_u,
                                               const Eigen::VectorXd& q_v,
                                               const std::vector<Eigen::MatrixXd>& direction_grid) {
  const int nu = static_cast<int>(q_u.size()), nv = static_cast<int>(q_v.size());
  if (nu < 2 || nv < 2) throw DimensionError("brute_force_extremes: outputs need two symbols");
  for (const auto& dir : direction_grid) {
    if (dir.rows() != nu - 1 || dir.cols() != nv - 1) {
      throw DimensionError("brute_force_extremes: direction shape mismatch");
    }
  }
  const std::size_t nx = table_size(joint.rows(), d), ny = table_size(joint.cols(), d);
  const double count_f = std::pow(static_cast<double>(nu), static_cast<double>(nx));
  const double count_g = std::pow(static_cast<double>(nv), static_cast<double>(ny));
  if (count_f * count_g > 1e7) throw CapExceeded("brute_force_extremes: too many table pairs");

  const Eigen::MatrixXd w = block_joint(joint, d);
  const Eigen::VectorXd px = w.rowwise().sum();
  const Eigen::VectorXd py = w.colwise().sum().transpose();

  const auto marginal_ok = [](const std::vector<int>& t, const Eigen::VectorXd& p,
                              const Eigen::VectorXd& target) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(target.size());
    for (std::size_t i = 0; i < t.size(); ++i) m(t[i]) += p(static_cast<Eigen::Index>(i));
    return (m - target).cwiseAbs().maxCoeff() <= 1e-12;
  };
  std::vector<std::vector<int>> fs, gs;
  std::vector<int> t(nx, 0);
  do {
    if (marginal_ok(t, px, q_u)) fs.push_back(t);
  } while (next_table(t, nu));
  t.assign(ny, 0);
  do {
    if (marginal_ok(t, py, q_v)) gs.push_back(t);
  } while (next_table(t, nv));

  std::vector<ExtremePoint> best(direction_grid.size());
  std::vector<bool> filled(direction_grid.size(), false);
  for (const auto& f : fs) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nu, static_cast<Eigen::Index>(ny));
    for (std::size_t x = 0; x < nx; ++x) a.row(f[x]) += w.row(static_cast<Eigen::Index>(x));
    for (const auto& g : gs) {
      Eigen::MatrixXd q = Eigen::MatrixXd::Zero(nu, nv);
      for (std::size_t y = 0; y < ny; ++y) q.col(g[y]) += a.col(static_cast<Eigen::Index>(y));
      const auto dir = direction_of_target(TargetPmf(q));
      if (!dir) continue;
      std::size_t bucket = 0;
      double best_cos = -2;
      for (std::size_t k = 0; k < direction_grid.size(); ++k) {
        const double c = (dir->alpha.array() * direction_grid[k].array()).sum() /
                         direction_grid[k].norm();
        if (c > best_cos + 1e-12) {
          best_cos = c;
          bucket = k;
        }
      }
      if (!filled[bucket] || dir->t > best[bucket].t + 1e-13) {
        filled[bucket] = true;
        best[bucket] = ExtremePoint{bucket, dir->t, q,
                                    TruthTable{joint.rows(), d, nu, f},
                                    TruthTable{joint.cols(), d, nv, g}};
      }
    }
  }
  std::vector<ExtremePoint> out;
  for (std::size_t k = 0; k < best.size(); ++k) {
    if (filled[k]) out.push_back(best[k]);
  }
  return out;
}

std::vector<std::vector<double>> box_polytope_vertices(std::span<const double> weights,
                                                       double bias) {
  const std::size_t n = weights.size();
  if (n == 0 || n > 16) throw CapExceeded("box_polytope_vertices: supports 1..16 coordinates");
  std::vector<std::vector<double>> out;
  const std::uint32_t patterns = 1u << n;
  for (std::uint32_t m = 0; m < patterns; ++m) {
    std::vector<double> v(n);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = (m >> i) & 1u ? 1.0 : -1.0;
      s += weights[i] * v[i];
    }
    if (std::abs(s - bias) <= 1e-12) out.push_back(v);
    for (std::size_t j = 0; j < n; ++j) {
      // Coordinate j free: only patterns with bit j clear, to avoid duplicates.
      if ((m >> j) & 1u || weights[j] <= 0) continue;
      const double rest = s - weights[j] * v[j];
      const double vj = (bias - rest) / weights[j];
      if (vj > -1 + 1e-12 && vj < 1 - 1e-12) {
        auto u = v;
        u[j] = vj;
        out.push_back(std::move(u));
      }
    }
  }
  return out;
}

}  // namespace niss
