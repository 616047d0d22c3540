#include "niss/fpath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace niss {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sumsq(std::span<const double> a) { return dot(a, a); }

double max_abs(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Largest step t >= 0 keeping values + t * dir inside [-1, 1].
double max_feasible_step(std::span<const double> values, std::span<const double> dir) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (dir[i] > 1e-15) t = std::min(t, (1.0 - values[i]) / dir[i]);
    if (dir[i] < -1e-15) t = std::min(t, (-1.0 - values[i]) / dir[i]);
  }
  return std::max(t, 0.0);
}

}  // namespace

QuadraticObjective lambda_objective(const FPathConfig& cfg, double lambda) {
  QuadraticObjective o;
  o.a = lambda * cfg.alpha1 - (1 - lambda) * cfg.alpha0;
  o.b = lambda * cfg.beta1 - (1 - lambda) * cfg.beta0;
  o.c = -lambda * (cfg.alpha1 + cfg.beta1) + (1 - lambda) * (cfg.alpha0 + cfg.beta0);
  return o;
}

double evaluate(const QuadraticObjective& obj, std::span<const double> f,
                std::span<const double> g, const PrimalInstance& inst) {
  return inst.kernel.bilinear(f, g) + obj.a * sumsq(f) + obj.b * sumsq(g) + obj.c;
}

double objective_lambda(std::span<const double> f, std::span<const double> g,
                        const PrimalInstance& inst, const FPathConfig& cfg, double lambda) {
  const double bil = inst.kernel.bilinear(f, g);
  const double nf = sumsq(f), ng = sumsq(g);
  const double l1 = bil + cfg.alpha1 * nf + cfg.beta1 * ng - cfg.alpha1 - cfg.beta1;
  const double l0 = bil - cfg.alpha0 * nf - cfg.beta0 * ng + cfg.alpha0 + cfg.beta0;
  return lambda * l1 + (1 - lambda) * l0;
}

std::vector<double> box_vertex(std::span<const double> h, std::span<const double> weights,
                               double bias) {
  const std::size_t n = h.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Quantized keys so that gradient entries equal up to rounding tie, and ties
  // go to the lexicographically first point.
  std::vector<long long> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = std::llround(h[i] * 1e11);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  std::vector<double> v(n, -1.0);
  double remaining = bias + 1.0;  // weighted mass still to raise, in units of 2w
  for (std::size_t idx : order) {
    if (remaining <= 0) break;
    const double w = weights[idx];
    if (w <= 0) continue;
    if (remaining >= 2 * w) {
      v[idx] = 1.0;
      remaining -= 2 * w;
    } else {
      v[idx] = -1.0 + remaining / w;
      remaining = 0;
    }
  }
  return v;
}

namespace {

std::vector<double> lmo(std::span<const double> grad, const FourierSpace& space, double bias) {
  std::vector<double> c(grad.begin(), grad.end());
  c[0] = 0.0;
  const auto h = space.synthesize(c);
  auto s = space.analyze(box_vertex(h, space.weights(), bias));
  s[0] = bias;
  return s;
}

struct Direction {
  std::vector<double> df, dg;
};

// phi(t) = value + t * slope + t^2 * curv along a direction.
struct LineModel {
  double slope = 0;
  double curv = 0;
};

LineModel line_model(const QuadraticObjective& obj, const PrimalInstance& inst,
                     std::span<const double> grad_f, std::span<const double> grad_g,
                     const Direction& d) {
  LineModel m;
  m.slope = dot(grad_f, d.df) + dot(grad_g, d.dg);
  m.curv = inst.kernel.bilinear(d.df, d.dg) + obj.a * sumsq(d.df) + obj.b * sumsq(d.dg);
  return m;
}

// Best step in [0, tmax] for the quadratic model.
double best_step(const LineModel& m, double tmax) {
  const auto phi = [&](double t) { return t * m.slope + t * t * m.curv; };
  if (std::abs(m.curv) <= 1e-14) {
    // Armijo halving on the (numerically) linear model.
    double t = tmax;
    while (t > 1e-12 && phi(t) < 1e-4 * t * m.slope) t *= 0.5;
    return t > 1e-12 ? t : 0.0;
  }
  if (m.curv < 0) return std::clamp(-m.slope / (2 * m.curv), 0.0, tmax);
  return phi(tmax) > 0 ? tmax : 0.0;
}

void axpy(std::vector<double>& y, double t, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += t * x[i];
}

}  // namespace

FwResult frank_wolfe_maximize(const QuadraticObjective& obj, const PrimalInstance& inst,
                              const IteratePair& start, const FPathConfig& cfg,
                              const FwOptions& opts) {
  const auto mf = check_membership(start.f, inst.x_space, inst.bias_f);
  const auto mg = check_membership(start.g, inst.y_space, inst.bias_g);
  if (!mf.feasible || !mg.feasible) {
    throw ConstraintViolation("frank_wolfe_maximize: infeasible start");
  }
  FwResult res;
  res.p = start;
  auto& f = res.p.f;
  auto& g = res.p.g;
  const auto top = inst.kernel.free_top_singular_pair();

  for (;;) {
    bool stalled = false;
    while (res.iterations < cfg.fw_max_iters) {
      ++res.iterations;
      auto grad_f = inst.kernel.apply(g);
      auto grad_g = inst.kernel.apply_transpose(f);
      axpy(grad_f, 2 * obj.a, f);
      axpy(grad_g, 2 * obj.b, g);
      const auto sf = lmo(grad_f, inst.x_space, inst.bias_f);
      const auto sg = lmo(grad_g, inst.y_space, inst.bias_g);
      Direction d{sf, sg};
      for (std::size_t i = 0; i < f.size(); ++i) d.df[i] -= f[i];
      for (std::size_t i = 0; i < g.size(); ++i) d.dg[i] -= g[i];
      d.df[0] = 0.0;
      d.dg[0] = 0.0;
      const LineModel m = line_model(obj, inst, grad_f, grad_g, d);
      res.gap = m.slope;
      // A closed gap only ends the run when the quadratic is not convex along
      // the vertex direction; otherwise the full step still ascends.
      if (res.gap < cfg.fw_tol && m.curv <= 1e-12) {
        stalled = true;
        break;
      }
      const double t = best_step(m, 1.0);
      if (t <= 0) {
        stalled = true;
        break;
      }
      axpy(f, t, d.df);
      axpy(g, t, d.dg);
    }
    res.converged = stalled;
    if (!stalled || !opts.escape_saddles || res.escapes >= opts.max_escapes) break;

    // Second-order check at an interior stationary point: the top eigenvector of
    // [[a, s/2], [s/2, b]] combines the kernel's top free singular pair.
    const auto fv = inst.x_space.synthesize(f);
    const auto gv = inst.y_space.synthesize(g);
    if (max_abs(fv) >= 1 - 1e-9 || max_abs(gv) >= 1 - 1e-9) break;
    const double half = top.sigma / 2;
    const double mid = (obj.a + obj.b) / 2;
    const double rad = std::sqrt((obj.a - obj.b) * (obj.a - obj.b) / 4 + half * half);
    const double eig = mid + rad;
    if (eig <= 1e-12) break;
    double cf = half, cg = eig - obj.a;
    if (std::abs(cf) < 1e-15 && std::abs(cg) < 1e-15) {
      cf = obj.a >= obj.b ? 1.0 : 0.0;
      cg = obj.a >= obj.b ? 0.0 : 1.0;
    }
    const double nrm = std::hypot(cf, cg);
    cf /= nrm;
    cg /= nrm;

    auto grad_f = inst.kernel.apply(g);
    auto grad_g = inst.kernel.apply_transpose(f);
    axpy(grad_f, 2 * obj.a, f);
    axpy(grad_g, 2 * obj.b, g);
    double best_gain = 0, best_t = 0;
    Direction best_dir;
    for (double sign : {1.0, -1.0}) {
      Direction d;
      d.df.assign(f.size(), 0.0);
      d.dg.assign(g.size(), 0.0);
      axpy(d.df, sign * cf, top.left);
      axpy(d.dg, sign * cg, top.right);
      const auto dfv = inst.x_space.synthesize(d.df);
      const auto dgv = inst.y_space.synthesize(d.dg);
      const double tmax = std::min(max_feasible_step(fv, dfv), max_feasible_step(gv, dgv));
      const LineModel m = line_model(obj, inst, grad_f, grad_g, d);
      const double t = best_step(m, tmax);
      const double gain = t * m.slope + t * t * m.curv;
      // Ties go to the orientation that raises the lexicographically first point.
      const bool prefer = dfv[0] + dgv[0] > 0;
      if (gain > best_gain + 1e-12 || (std::abs(gain - best_gain) <= 1e-12 && prefer && t > 0)) {
        best_gain = gain;
        best_t = t;
        best_dir = std::move(d);
      }
    }
    if (best_t <= 0 || best_gain <= 1e-14) break;
    axpy(f, best_t, best_dir.df);
    axpy(g, best_t, best_dir.dg);
    ++res.escapes;
  }
  res.value = evaluate(obj, f, g, inst);
  return res;
}

FPathConfig validate_config(const FPathConfig& cfg, double sigma, std::vector<std::string>* notes) {
  if (cfg.alpha0 <= 0 || cfg.beta0 <= 0 || cfg.alpha1 <= 0 || cfg.beta1 <= 0 ||
      cfg.d_lambda <= 0 || cfg.eps_lambda <= 0 || cfg.fw_max_iters <= 0 || cfg.fw_tol <= 0) {
    throw InvalidInput("FPathConfig: all parameters must be positive");
  }
  if (cfg.d_lambda > cfg.eps_lambda) {
    throw InvalidInput("FPathConfig: d_lambda must not exceed eps_lambda");
  }
  FPathConfig out = cfg;
  const double need = sigma * sigma / 4;
  const auto widen = [&](double& a, double& b, const char* which) {
    if (a * b >= need) return;
    const double k = std::sqrt(need / (a * b)) * (1 + 1e-9);
    a *= k;
    b *= k;
    if (notes) {
      std::ostringstream msg;
      msg << which << " weights widened by factor " << k << " to dominate kernel norm " << sigma;
      notes->push_back(msg.str());
    }
  };
  widen(out.alpha0, out.beta0, "concave");
  widen(out.alpha1, out.beta1, "convex");
  return out;
}

double lambda_concave(const FPathConfig& cfg, double sigma) {
  const auto concave = [&](double lam) {
    const auto o = lambda_objective(cfg, lam);
    return o.a <= 0 && o.b <= 0 && 4 * o.a * o.b >= sigma * sigma;
  };
  if (!concave(0)) return 0;
  double lo = 0, hi = 1;
  if (concave(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2;
    (concave(mid) ? lo : hi) = mid;
  }
  return lo;
}

FPathState fpath_solve(const PrimalInstance& inst, const FPathConfig& cfg) {
  FPathState state;
  const double sigma = inst.kernel.free_spectral_norm();
  state.config = validate_config(cfg, sigma, &state.notes);
  const FPathConfig& c = state.config;

  const std::size_t n = inst.kernel.size();
  IteratePair p{bias_only(n, inst.bias_f), bias_only(n, inst.bias_g)};
  double bil = 0, nf = 0, ng = 0;
  const auto refresh = [&] {
    bil = inst.kernel.bilinear(p.f, p.g);
    nf = sumsq(p.f);
    ng = sumsq(p.g);
  };
  const auto value_at = [&](double lam) {
    const auto o = lambda_objective(c, lam);
    return bil + o.a * nf + o.b * ng + o.c;
  };
  const auto solve_at = [&](double lam) {
    const FwResult fw = frank_wolfe_maximize(lambda_objective(c, lam), inst, p, c);
    p = fw.p;
    state.fw_iterations += fw.iterations;
    ++state.resolves;
    if (!fw.converged) ++state.unconverged_solves;
    refresh();
    state.snapshots.push_back({lam, p});
  };

  solve_at(0.0);
  double anchor = value_at(0.0);
  state.trace.push_back({0.0, anchor, nf, ng, true});
  const auto steps = static_cast<long long>(std::ceil(1.0 / c.d_lambda - 1e-9));
  for (long long k = 1; k <= steps; ++k) {
    const double lam = std::min(1.0, static_cast<double>(k) * c.d_lambda);
    const double val = value_at(lam);
    if (std::abs(val - anchor) < c.eps_lambda) {
      state.trace.push_back({lam, val, nf, ng, false});
      continue;
    }
    solve_at(lam);
    anchor = value_at(lam);
    state.trace.push_back({lam, anchor, nf, ng, true});
  }
  state.lambda = 1.0;
  state.iterate = p;
  state.objective = bil;
  state.f_norm = nf;
  state.g_norm = ng;
  state.certificate = optimality_certificate(state, inst);
  return state;
}

std::optional<Certificate> optimality_certificate(const FPathState& state,
                                                  const PrimalInstance& inst) {
  constexpr double kBoundaryTol = 1e-6;
  const FPathConfig& c = state.config;
  const double sigma = inst.kernel.free_spectral_norm();
  const double lam_c = lambda_concave(c, sigma);

  const TraceRow* hit = nullptr;
  for (const auto& row : state.trace) {
    if (std::abs(row.f_norm - 1) <= kBoundaryTol && std::abs(row.g_norm - 1) <= kBoundaryTol) {
      hit = &row;
      break;
    }
  }
  if (!hit) return std::nullopt;
  const Snapshot* snap = nullptr;
  for (const auto& s : state.snapshots) {
    if (s.lambda <= hit->lambda + 1e-15) snap = &s;
  }
  if (!snap) return std::nullopt;
  const double primal = inst.kernel.bilinear(snap->p.f, snap->p.g);
  if (hit->lambda <= lam_c) return Certificate{hit->lambda, primal, false};

  // L at the threshold is concave, so a Frank-Wolfe run there bounds its
  // maximum by value + gap. A boundary point reaching that bound maximizes
  // L_{lam_c}, and on the boundary L_{lam_c} equals the primal objective.
  const auto obj_c = lambda_objective(c, lam_c);
  const std::size_t n = inst.kernel.size();
  const IteratePair start{bias_only(n, inst.bias_f), bias_only(n, inst.bias_g)};
  FwOptions no_escape;
  no_escape.escape_saddles = false;
  const FwResult fw = frank_wolfe_maximize(obj_c, inst, start, c, no_escape);
  const double upper = fw.value + std::max(fw.gap, 0.0);
  if (evaluate(obj_c, snap->p.f, snap->p.g, inst) >= upper - 1e-9) {
    return Certificate{lam_c, primal, true};
  }
  return std::nullopt;
}

}  // namespace niss
