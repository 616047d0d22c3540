#include "niss/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "niss/indexing.hpp"
#include "niss/maxcorr.hpp"
#include "niss/oracle.hpp"

namespace niss {

namespace {

constexpr double kCoinTol = 1e-12;

void validate_pmf(const Eigen::VectorXd& p, const char* what) {
  if (p.size() < 1 || p.minCoeff() < -kSimplexTol || std::abs(p.sum() - 1) > 1e-9) {
    throw InvalidInput(std::string(what) + ": not a probability vector");
  }
}

}  // namespace

void validate_family(const RandomizedFamily& fam) {
  const int k = fam.out_size();
  if (k < 1) throw DimensionError("validate_family: empty family");
  const std::size_t n = fam.points();
  if (n != table_size(fam.q, fam.d)) throw DimensionError("validate_family: table length is not q^d");
  for (const auto& row : fam.f) {
    if (row.size() != n) throw DimensionError("validate_family: ragged family");
  }
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0;
    for (int u = 0; u < k; ++u) {
      const double v = fam.f[u][x];
      if (!(std::abs(v) <= 1 + 1e-9)) {
        throw ConstraintViolation("randomized family value outside [-1,1] at point " + std::to_string(x));
      }
      sum += v;
    }
    if (std::abs(sum - (2 - k)) > 1e-9) {
      throw ConstraintViolation("randomized family does not sum to 2-|U| at point " + std::to_string(x));
    }
  }
}

RandomizedFamily binary_family(const RealTable& f1) {
  RandomizedFamily fam{f1.q, f1.d, {f1.values, f1.values}};
  for (double& v : fam.f[0]) v = -v;
  return fam;
}

RandomizedFamily deterministic_family(const TruthTable& f) {
  RandomizedFamily fam{f.q, f.d, std::vector<std::vector<double>>(f.out_size)};
  for (int u = 0; u < f.out_size; ++u) {
    fam.f[u].resize(f.values.size());
    for (std::size_t x = 0; x < f.values.size(); ++x) fam.f[u][x] = f.values[x] == u ? 1.0 : -1.0;
  }
  return fam;
}

RandomizedFamily constant_family(int q, int d, const Eigen::VectorXd& pmf) {
  validate_pmf(pmf, "constant_family");
  const std::size_t n = table_size(q, d);
  RandomizedFamily fam{q, d, {}};
  for (Eigen::Index u = 0; u < pmf.size(); ++u) fam.f.emplace_back(n, 2 * pmf(u) - 1);
  return fam;
}

FiniteSampler::FiniteSampler(RandomizedFamily fam) : fam_(std::move(fam)) {
  validate_family(fam_);
  for (std::size_t x = 0; x < fam_.points(); ++x) coin_biases(x);
}

std::vector<double> FiniteSampler::coin_biases(std::size_t x) const {
  const int k = fam_.out_size();
  std::vector<double> b(std::max(k - 1, 0));
  double prefix = 0;
  for (int u = 1; u < k; ++u) {
    const double fu = fam_.f[u][x];
    const double denom = 3 - u - prefix;
    double bias = denom <= 1e-15 ? 0.0 : (1 + fu) / denom;
    if (bias < -kCoinTol || bias > 1 + kCoinTol) {
      throw ConstraintViolation("coin bias outside [0,1] at point " + std::to_string(x));
    }
    b[u - 1] = std::clamp(bias, 0.0, 1.0);
    prefix += fu;
  }
  return b;
}

std::vector<double> FiniteSampler::conditional_law(std::size_t x) const {
  const auto b = coin_biases(x);
  std::vector<double> law(fam_.out_size(), 0.0);
  double none = 1;
  for (std::size_t i = 0; i < b.size(); ++i) {
    law[i + 1] = none * b[i];
    none *= 1 - b[i];
  }
  law[0] = none;
  return law;
}

int FiniteSampler::sample(std::size_t x, Rng& rng) const {
  const auto b = coin_biases(x);
  // All coins are tossed; the output is the smallest u whose coin is +1.
  int chosen = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const bool up = rng.coin(b[i]);
    if (up && chosen == 0) chosen = static_cast<int>(i) + 1;
  }
  return chosen;
}

FiniteSampler derandomize_binary(const RealTable& f1) { return FiniteSampler(binary_family(f1)); }

FiniteSampler derandomize_finite(const RandomizedFamily& fam) { return FiniteSampler(fam); }

PreservationReport rd_preservation(const FiniteSampler& a, const FiniteSampler& b,
                                   const JointPmf& joint) {
  const auto& fa = a.family();
  const auto& fb = b.family();
  if (fa.d != fb.d || fa.q != joint.rows() || fb.q != joint.cols()) {
    throw DimensionError("rd_preservation: family dimensions do not match the joint");
  }
  const Eigen::MatrixXd w = block_joint(joint, fa.d);
  const int ku = fa.out_size(), kv = fb.out_size();
  Eigen::MatrixXd fu(w.rows(), ku), fu_t(w.rows(), ku), gv(w.cols(), kv), gv_t(w.cols(), kv);
  for (Eigen::Index x = 0; x < w.rows(); ++x) {
    const auto law = a.conditional_law(x);
    for (int u = 0; u < ku; ++u) {
      fu(x, u) = 2 * law[u] - 1;
      fu_t(x, u) = fa.f[u][x];
    }
  }
  for (Eigen::Index y = 0; y < w.cols(); ++y) {
    const auto law = b.conditional_law(y);
    for (int v = 0; v < kv; ++v) {
      gv(y, v) = 2 * law[v] - 1;
      gv_t(y, v) = fb.f[v][y];
    }
  }
  PreservationReport r;
  const Eigen::VectorXd px = w.rowwise().sum(), py = w.colwise().sum().transpose();
  r.mean_f = fu.transpose() * px;
  r.mean_f_tilde = fu_t.transpose() * px;
  r.mean_g = gv.transpose() * py;
  r.mean_g_tilde = gv_t.transpose() * py;
  // Given the blocks the two agents' coins are independent, so E[f_u g_v]
  // sums products of conditional means.
  r.cross = fu.transpose() * w * gv;
  r.cross_tilde = fu_t.transpose() * w * gv_t;
  r.max_error = std::max({(r.mean_f - r.mean_f_tilde).cwiseAbs().maxCoeff(),
                          (r.mean_g - r.mean_g_tilde).cwiseAbs().maxCoeff(),
                          (r.cross - r.cross_tilde).cwiseAbs().maxCoeff()});
  return r;
}

CoinProtocol gated_protocol(double gate, const RandomizedFamily& f, const RandomizedFamily& g,
                            const Eigen::VectorXd& fallback_u, const Eigen::VectorXd& fallback_v,
                            std::string kind) {
  if (!(gate >= 0 && gate <= 1)) throw InvalidInput("gated_protocol: gate must lie in [0,1]");
  if (f.d != g.d) throw DimensionError("gated_protocol: block lengths differ");
  validate_pmf(fallback_u, "gated_protocol fallback");
  validate_pmf(fallback_v, "gated_protocol fallback");
  if (fallback_u.size() != f.out_size() || fallback_v.size() != g.out_size()) {
    throw DimensionError("gated_protocol: fallback size differs from the output alphabet");
  }
  return CoinProtocol{f.d, AgentRule{gate, FiniteSampler(f), fallback_u},
                      AgentRule{gate, FiniteSampler(g), fallback_v}, gate, std::move(kind)};
}

CoinProtocol coin_protocol_uniform_output(const JointPmf& joint, double target_rho) {
  const SingleLetterCorrelation sl = maximal_correlation_single_letter(joint);
  if (std::abs(target_rho) > sl.bounded + 1e-12) {
    throw InfeasibleError("target correlation " + std::to_string(target_rho) +
                          " exceeds the achievable " + std::to_string(sl.bounded));
  }
  const double lambda = sl.bounded > 1e-15 ? std::sqrt(std::min(1.0, std::abs(target_rho) / sl.bounded)) : 0.0;
  const auto fx = FourierSpace::product(default_basis(joint.row_marginal()), 1).synthesize(sl.f_coeffs);
  auto gy = FourierSpace::product(default_basis(joint.col_marginal()), 1).synthesize(sl.g_coeffs);
  if (target_rho < 0) {
    for (double& v : gy) v = -v;
  }
  const auto clip = [](std::vector<double> v) {
    for (double& x : v) x = std::clamp(x, -1.0, 1.0);
    return v;
  };
  const RealTable ft{joint.rows(), 1, clip(fx)};
  const RealTable gt{joint.cols(), 1, clip(gy)};
  const Eigen::Vector2d fair(0.5, 0.5);
  return gated_protocol(lambda, binary_family(ft), binary_family(gt), fair, fair, "uniform-output");
}

CoinProtocol coin_protocol_fb(const PrimalInstance& inst, const FPathState& solver,
                              double target_disagreement) {
  if (!(target_disagreement >= 0 && target_disagreement <= 1)) {
    throw InvalidInput("coin_protocol_fb: disagreement probability must lie in [0,1]");
  }
  const double bu = inst.bias_f, bv = inst.bias_g;
  const double rho_b = solver.objective;
  const double num = (1 - 2 * target_disagreement) - bu * bv;
  const double den = rho_b - bu * bv;
  double lam2 = 0;
  if (std::abs(num) <= 1e-12) {
    lam2 = 0;
  } else if (num < 0 || den <= 1e-12 || num > den * (1 + 1e-9) + 1e-12) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "target E[UV] = " << 1 - 2 * target_disagreement
        << " lies outside the segment from the product point " << bu * bv
        << " to the achieved rho_b = " << rho_b;
    throw InfeasibleError(msg.str());
  } else {
    lam2 = std::min(1.0, num / den);
  }
  const double lambda = std::sqrt(lam2);
  const auto clip = [](std::vector<double> v) {
    for (double& x : v) x = std::clamp(x, -1.0, 1.0);
    return v;
  };
  const RealTable ft{inst.x_space.q(), inst.x_space.d(), clip(inst.x_space.synthesize(solver.iterate.f))};
  const RealTable gt{inst.y_space.q(), inst.y_space.d(), clip(inst.y_space.synthesize(solver.iterate.g))};
  const Eigen::Vector2d fu((1 - bu) / 2, (1 + bu) / 2), fv((1 - bv) / 2, (1 + bv) / 2);
  return gated_protocol(lambda, binary_family(ft), binary_family(gt), fu, fv, "fb");
}

CoinProtocol coin_protocol_ff(const JointPmf& joint, const TargetPmf& target, const TruthTable& f,
                              const TruthTable& g) {
  const TargetPmf extreme(exact_output_joint(f, g, joint));
  if (extreme.rows() != target.rows() || extreme.cols() != target.cols()) {
    throw DimensionError("coin_protocol_ff: output alphabets differ from the target");
  }
  if ((extreme.row_marginal() - target.row_marginal()).cwiseAbs().maxCoeff() > 1e-9 ||
      (extreme.col_marginal() - target.col_marginal()).cwiseAbs().maxCoeff() > 1e-9) {
    throw InfeasibleError("coin_protocol_ff: extreme pair has different output marginals");
  }
  const auto dt = direction_of_target(target);
  double lambda = 0;
  if (dt) {
    const auto de = direction_of_target(extreme);
    if (!de) throw InfeasibleError("coin_protocol_ff: extreme pair has independent outputs");
    if ((dt->alpha - de->alpha).cwiseAbs().maxCoeff() > 1e-6) {
      throw InfeasibleError("coin_protocol_ff: target direction differs from the extreme direction");
    }
    if (dt->t > de->t * (1 + 1e-9)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "target magnitude t = " << dt->t << " exceeds the extreme t = " << de->t;
      throw InfeasibleError(msg.str());
    }
    lambda = std::sqrt(std::sqrt(std::min(1.0, dt->t / de->t)));
  }
  return gated_protocol(lambda, deterministic_family(f), deterministic_family(g),
                        extreme.row_marginal(), extreme.col_marginal(), "ff");
}

Eigen::MatrixXd exact_protocol_law(const CoinProtocol& proto, const JointPmf& joint) {
  const Eigen::MatrixXd w = block_joint(joint, proto.d);
  const auto agent = [&](const AgentRule& r, Eigen::Index n) {
    Eigen::MatrixXd a(n, r.fallback.size());
    for (Eigen::Index x = 0; x < n; ++x) {
      const auto law = r.inner.conditional_law(x);
      for (Eigen::Index u = 0; u < a.cols(); ++u) a(x, u) = r.gate * law[u] + (1 - r.gate) * r.fallback(u);
    }
    return a;
  };
  const Eigen::MatrixXd a = agent(proto.alice, w.rows());
  const Eigen::MatrixXd b = agent(proto.bob, w.cols());
  return a.transpose() * w * b;
}

Eigen::MatrixXd EmpiricalJoint::pmf() const {
  return counts.cast<double>() / static_cast<double>(n);
}

double EmpiricalJoint::tv_to(const Eigen::MatrixXd& target) const {
  return (pmf() - target).cwiseAbs().sum();
}

double EmpiricalJoint::tv_tolerance(const Eigen::MatrixXd& target) const {
  double tol = 0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double q = target(i);
    tol += 3 * std::sqrt(std::max(q * (1 - q), 0.0) / static_cast<double>(n));
  }
  return tol;
}

std::string EmpiricalJoint::csv(const Eigen::MatrixXd& target) const {
  std::ostringstream os;
  os << "u,v,count,phat,target,absdiff\n";
  const Eigen::MatrixXd p = pmf();
  char buf[256];
  for (Eigen::Index u = 0; u < counts.rows(); ++u) {
    for (Eigen::Index v = 0; v < counts.cols(); ++v) {
      std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.12g,%.12g,%.12g\n", static_cast<long long>(u),
                    static_cast<long long>(v), counts(u, v), p(u, v), target(u, v),
                    std::abs(p(u, v) - target(u, v)));
      os << buf;
    }
  }
  return os.str();
}

EmpiricalJoint monte_carlo_eval(const CoinProtocol& proto, const JointPmf& joint,
                                long long n_samples, std::uint64_t seed,
                                const MonteCarloOptions& opts) {
  if (n_samples < 1) throw InvalidInput("monte_carlo_eval: need at least one sample");
  const int qx = joint.rows(), qy = joint.cols(), d = proto.d;
  std::vector<double> cdf;
  double acc = 0;
  for (int x = 0; x < qx; ++x) {
    for (int y = 0; y < qy; ++y) cdf.push_back(acc += joint(x, y));
  }
  cdf.back() = 1.0;

  Rng source(seed, 0);
  Rng a_gate(seed, 1), a_inner(seed, 2), a_fall(seed, 3);
  Rng b_gate(seed, 4), b_inner(seed, 5), b_fall(seed, 6);
  if (opts.von_neumann) {
    // Agent coins are extracted from extra samples of that agent's source.
    const double pa = joint.row_marginal()(qx - 1), pb = joint.col_marginal()(qy - 1);
    for (Rng* r : {&a_gate, &a_inner, &a_fall}) r->enable_von_neumann(pa);
    for (Rng* r : {&b_gate, &b_inner, &b_fall}) r->enable_von_neumann(pb);
  }
  const FiniteSampler fall_a(constant_family(1, 0, proto.alice.fallback));
  const FiniteSampler fall_b(constant_family(1, 0, proto.bob.fallback));

  EmpiricalJoint out;
  out.n = n_samples;
  out.counts.setZero(proto.alice.fallback.size(), proto.bob.fallback.size());
  for (long long s = 0; s < n_samples; ++s) {
    std::size_t xi = 0, yi = 0;
    for (int i = 0; i < d; ++i) {
      const double r = source.uniform();
      const int cell = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
      const int c = std::min(cell, qx * qy - 1);
      xi = xi * qx + c / qy;
      yi = yi * qy + c % qy;
    }
    const int u = a_gate.coin(proto.alice.gate) ? proto.alice.inner.sample(xi, a_inner)
                                                 : fall_a.sample(0, a_fall);
    const int v = b_gate.coin(proto.bob.gate) ? proto.bob.inner.sample(yi, b_inner)
                                               : fall_b.sample(0, b_fall);
    ++out.counts(u, v);
  }
  return out;
}

EmpiricalJoint monte_carlo_eval(const TruthTable& f, const TruthTable& g, const JointPmf& joint,
                                long long n_samples, std::uint64_t seed,
                                const MonteCarloOptions& opts) {
  const Eigen::VectorXd fu = Eigen::VectorXd::Constant(f.out_size, 1.0 / f.out_size);
  const Eigen::VectorXd fv = Eigen::VectorXd::Constant(g.out_size, 1.0 / g.out_size);
  const CoinProtocol proto =
      gated_protocol(1.0, deterministic_family(f), deterministic_family(g), fu, fv, "tables");
  return monte_carlo_eval(proto, joint, n_samples, seed, opts);
}

}  // namespace niss
