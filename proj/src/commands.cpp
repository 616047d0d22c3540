#include "niss/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "niss/distributions.hpp"
#include "niss/duallp.hpp"
#include "niss/fpath.hpp"
#include "niss/instance_io.hpp"
#include "niss/lexico.hpp"
#include "niss/maxcorr.hpp"
#include "niss/oracle.hpp"
#include "niss/protocol.hpp"

namespace niss {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

namespace fs = std::filesystem;

class Output {
 public:
  explicit Output(const std::string& dir, CommandResult* res) : dir_(dir), res_(res) {
    fs::create_directories(dir_);
  }
  void write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + p.string() + "'");
    f << text;
    res_->files.push_back(p.string());
  }

 private:
  fs::path dir_;
  CommandResult* res_;
};

template <class F>
CommandResult guarded(F&& body) {
  CommandResult res;
  try {
    body(res);
  } catch (const ParseError& e) {
    res.exit_code = kExitParse;
    res.report += std::string("parse error: ") + e.what() + "\n";
  } catch (const InvalidInput& e) {
    res.exit_code = kExitParse;
    res.report += std::string("invalid instance: ") + e.what() + "\n";
  } catch (const DimensionError& e) {
    res.exit_code = kExitParse;
    res.report += std::string("invalid instance: ") + e.what() + "\n";
  } catch (const CapExceeded& e) {
    res.exit_code = kExitInfeasible;
    res.report += std::string("size cap: ") + e.what() + "\n";
  } catch (const InfeasibleError& e) {
    res.exit_code = kExitInfeasible;
    res.report += std::string("infeasible: ") + e.what() + "\n";
  } catch (const Error& e) {
    res.exit_code = kExitInfeasible;
    res.report += std::string("solver failure: ") + e.what() + "\n";
  } catch (const fs::filesystem_error& e) {
    res.exit_code = kExitInfeasible;
    res.report += std::string("output error: ") + e.what() + "\n";
  }
  return res;
}

struct BinaryTarget {
  double q_u1 = 0;
  double q_v1 = 0;
  std::optional<double> disagreement;
};

BinaryTarget binary_target(const TargetSection& t) {
  BinaryTarget b;
  if (t.pmf) {
    const Eigen::MatrixXd& m = *t.pmf;
    if (m.rows() != 2 || m.cols() != 2) {
      throw InfeasibleError("only binary-output targets are supported (got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ")");
    }
    b.q_u1 = m.row(1).sum();
    b.q_v1 = m.col(1).sum();
    b.disagreement = m(0, 1) + m(1, 0);
    return b;
  }
  if (!t.q_u1 || !t.q_v1) throw InvalidInput("[target] needs q_u1 and q_v1, or a pmf");
  b.q_u1 = *t.q_u1;
  b.q_v1 = *t.q_v1;
  b.disagreement = t.disagreement;
  return b;
}

std::string kv(const std::string& k, const std::string& v) { return k + " = " + v + "\n"; }

void solve_fpath(const InstanceFile& file, const JointPmf& joint, const BinaryTarget& bt, int d, bool trace,
                 Output& out, CommandResult& res) {
  const PrimalInstance inst = make_primal_instance(joint, d, bt.q_u1, bt.q_v1);
  const FPathState st = fpath_solve(inst, file.solver.fpath);
  std::ostringstream s;
  s << kv("solver", "fpath") << kv("d", std::to_string(d)) << kv("q_u1", fmt12(bt.q_u1))
    << kv("q_v1", fmt12(bt.q_v1)) << kv("rho_b", fmt12(st.objective))
    << kv("certificate", st.certificate ? (st.certificate->via_threshold ? "threshold" : "direct") : "none");
  if (st.certificate) s << kv("lambda_star", fmt12(st.certificate->lambda_star));
  s << kv("f_norm", fmt12(st.f_norm)) << kv("g_norm", fmt12(st.g_norm))
    << kv("resolves", std::to_string(st.resolves)) << kv("fw_iterations", std::to_string(st.fw_iterations))
    << kv("unconverged_solves", std::to_string(st.unconverged_solves));
  for (const auto& n : st.notes) s << kv("note", n);
  out.write("summary.txt", s.str());
  res.report += s.str();

  std::ostringstream c;
  c << "side,index,value\n";
  for (std::size_t i = 0; i < st.iterate.f.size(); ++i) c << "f," << i << ',' << fmt12(st.iterate.f[i]) << '\n';
  for (std::size_t i = 0; i < st.iterate.g.size(); ++i) c << "g," << i << ',' << fmt12(st.iterate.g[i]) << '\n';
  out.write("coefficients.csv", c.str());

  if (trace) {
    std::ostringstream t;
    t << "lambda,objective,f_norm,g_norm,resolved\n";
    for (const auto& r : st.trace) {
      t << fmt12(r.lambda) << ',' << fmt12(r.objective) << ',' << fmt12(r.f_norm) << ',' << fmt12(r.g_norm) << ','
        << (r.resolved ? 1 : 0) << '\n';
    }
    out.write("trace.csv", t.str());
  }
}

void solve_dual_cmd(const JointPmf& joint, const BinaryTarget& bt, int d, Output& out, CommandResult& res) {
  const DualInstance inst = make_dual_instance(joint, d, bt.q_u1, bt.q_v1);
  const DualResult r = solve_dual(inst);
  std::ostringstream s;
  s << kv("solver", "dual") << kv("d", std::to_string(d)) << kv("q_u1", fmt12(bt.q_u1))
    << kv("q_v1", fmt12(bt.q_v1)) << kv("rho_b", fmt12(r.rho_b)) << kv("lps_solved", std::to_string(r.lps_solved))
    << kv("lp_iterations", std::to_string(r.lp.iterations));
  out.write("summary.txt", s.str());
  res.report += s.str();
  std::ostringstream c;
  c << "side,index,value\n";
  for (std::size_t i = 0; i < r.f_anchor.size(); ++i) c << "f," << i << ',' << fmt12(r.f_anchor[i]) << '\n';
  for (std::size_t i = 0; i < r.g_anchor.size(); ++i) c << "g," << i << ',' << fmt12(r.g_anchor[i]) << '\n';
  out.write("coefficients.csv", c.str());
}

void solve_oracle_cmd(const JointPmf& joint, const BinaryTarget& bt, int d, Output& out, CommandResult& res) {
  const int n_u = acceptance_count(bt.q_u1, joint.rows(), d);
  const int n_v = acceptance_count(bt.q_v1, joint.cols(), d);
  const BiasedMaxcorr r = brute_force_biased_maxcorr(joint, d, n_u, n_v);
  std::ostringstream s;
  s << kv("solver", "oracle") << kv("d", std::to_string(d)) << kv("n_u", std::to_string(n_u))
    << kv("n_v", std::to_string(n_v)) << kv("rho_b", fmt12(r.value)) << kv("pairs", fmt12(r.pairs));
  out.write("summary.txt", s.str());
  res.report += s.str();
  std::ostringstream c;
  c << "side,index,value\n";
  for (std::size_t i = 0; i < r.f.values.size(); ++i) c << "f," << i << ',' << fmt12(r.f.values[i]) << '\n';
  for (std::size_t i = 0; i < r.g.values.size(); ++i) c << "g," << i << ',' << fmt12(r.g.values[i]) << '\n';
  out.write("coefficients.csv", c.str());
}

}  // namespace

CommandResult cmd_solve(const SolveOptions& opts) {
  return guarded([&](CommandResult& res) {
    if (opts.dual && opts.oracle) throw InvalidInput("--dual and --oracle are exclusive");
    const InstanceFile file = load_instance(opts.instance);
    if (!file.input) throw ParseError(1, 1, "missing [input] section");
    if (!file.target) throw ParseError(1, 1, "missing [target] section");
    const JointPmf joint(file.input->pmf);
    const BinaryTarget bt = binary_target(*file.target);
    const int d = opts.d.value_or(file.solver.d);
    if (d < 1) throw InvalidInput("d must be positive");
    Output out(opts.out_dir, &res);
    if (opts.dual) {
      solve_dual_cmd(joint, bt, d, out, res);
    } else if (opts.oracle) {
      solve_oracle_cmd(joint, bt, d, out, res);
    } else {
      solve_fpath(file, joint, bt, d, opts.trace, out, res);
    }
  });
}

CommandResult cmd_simulate(const SimulateOptions& opts) {
  return guarded([&](CommandResult& res) {
    const InstanceFile file = load_instance(opts.instance);
    if (!file.input) throw ParseError(1, 1, "missing [input] section");
    const InstanceFile tfile = load_instance(opts.target);
    const std::optional<TargetSection>& ts = tfile.target ? tfile.target : file.target;
    if (!ts) throw ParseError(1, 1, "missing [target] section");
    if (opts.samples < 1) throw InvalidInput("--samples must be positive");
    const JointPmf joint(file.input->pmf);
    const int d = opts.d.value_or(file.solver.d);

    Eigen::Matrix2d target;
    std::optional<CoinProtocol> proto;
    std::optional<double> rho_b;
    if (ts->rho) {
      const double r = *ts->rho;
      target << (1 + r) / 4, (1 - r) / 4, (1 - r) / 4, (1 + r) / 4;
      proto = coin_protocol_uniform_output(joint, r);
    } else {
      const BinaryTarget bt = binary_target(*ts);
      if (!bt.disagreement) throw InvalidInput("[target] needs disagreement, rho, or a pmf");
      const double p11 = (bt.q_u1 + bt.q_v1 - *bt.disagreement) / 2;
      target << 1 - bt.q_u1 - bt.q_v1 + p11, bt.q_v1 - p11, bt.q_u1 - p11, p11;
      if (target.minCoeff() < -1e-12) {
        throw InfeasibleError("marginals and disagreement probability admit no output pmf");
      }
      const PrimalInstance inst = make_primal_instance(joint, d, bt.q_u1, bt.q_v1);
      const FPathState st = fpath_solve(inst, file.solver.fpath);
      rho_b = st.objective;
      proto = coin_protocol_fb(inst, st, *bt.disagreement);
    }
    const Eigen::MatrixXd exact = exact_protocol_law(*proto, joint);
    const EmpiricalJoint emp = monte_carlo_eval(*proto, joint, opts.samples, opts.seed,
                                                MonteCarloOptions{opts.von_neumann});
    const double tv = emp.tv_to(target), tol = emp.tv_tolerance(target);

    Output out(opts.out_dir, &res);
    std::ostringstream s;
    s << kv("protocol", proto->kind) << kv("d", std::to_string(proto->d)) << kv("lambda", fmt12(proto->lambda));
    if (rho_b) s << kv("rho_b", fmt12(*rho_b));
    s << kv("samples", std::to_string(opts.samples)) << kv("seed", std::to_string(opts.seed))
      << kv("von_neumann", opts.von_neumann ? "1" : "0") << kv("tv_exact", fmt12((exact - target).cwiseAbs().sum()))
      << kv("tv_empirical", fmt12(tv)) << kv("tv_tolerance", fmt12(tol))
      << kv("within_band", tv <= tol ? "1" : "0");
    out.write("summary.txt", s.str());
    out.write("empirical.csv", emp.csv(target));
    res.report += s.str();
  });
}

namespace {

void figure2(Output& out, int d_max, CommandResult& res) {
  const JointPmf joint = binary_joint(0.5, 0.5, 0.4);
  for (int k : {1, 2, 3, 4, 8}) {
    std::ostringstream c;
    c << "d,rho_b,certified,f_norm,g_norm\n";
    for (int d = 1; d <= d_max; ++d) {
      const FPathState st = fpath_solve(make_primal_instance(joint, d, k / 16.0, k / 16.0));
      c << d << ',' << fmt12(st.objective) << ',' << (st.certificate ? 1 : 0) << ',' << fmt12(st.f_norm) << ','
        << fmt12(st.g_norm) << '\n';
    }
    out.write("fig2_p" + std::to_string(k) + "_16.csv", c.str());
  }
  res.report += "fig2: rho_XY = 0.4, P(1) in {1,2,3,4,8}/16, d = 1.." + std::to_string(d_max) + "\n";
}

FPathState figure56_run(int d) {
  return fpath_solve(make_primal_instance(binary_joint(0.6, 0.7, 0.4), d, 0.25, 0.125));
}

void figure5(Output& out, int d, CommandResult& res) {
  const FPathState st = figure56_run(d);
  std::ostringstream c;
  c << "lambda,side,index,value\n";
  for (const auto& snap : st.snapshots) {
    for (std::size_t i = 0; i < snap.p.f.size(); ++i) c << fmt12(snap.lambda) << ",f," << i << ',' << fmt12(snap.p.f[i]) << '\n';
    for (std::size_t i = 0; i < snap.p.g.size(); ++i) c << fmt12(snap.lambda) << ",g," << i << ',' << fmt12(snap.p.g[i]) << '\n';
  }
  out.write("fig5.csv", c.str());
  res.report += "fig5: " + std::to_string(st.snapshots.size()) + " re-solves at d = " + std::to_string(d) + "\n";
}

void figure6(Output& out, int d, CommandResult& res) {
  const FPathState st = figure56_run(d);
  std::ostringstream c;
  c << "lambda,objective,shifted_objective,f_norm,g_norm,resolved\n";
  for (std::size_t i = 0; i < st.trace.size(); ++i) {
    const TraceRow& r = st.trace[i];
    if (!r.resolved && i % 50 != 0 && i + 1 != st.trace.size()) continue;
    const double shift = lambda_objective(st.config, r.lambda).c;
    c << fmt12(r.lambda) << ',' << fmt12(r.objective) << ',' << fmt12(r.objective - shift) << ','
      << fmt12(r.f_norm) << ',' << fmt12(r.g_norm) << ',' << (r.resolved ? 1 : 0) << '\n';
  }
  out.write("fig6.csv", c.str());
  res.report += "fig6: final objective " + fmt12(st.objective) + " at d = " + std::to_string(d) + "\n";
}

void lexdecay(Output& out, int d_max, CommandResult& res) {
  const auto rows = tv_decay_experiment(1.0 / 3, 1.0 / 3, 0.4, d_max);
  std::ostringstream c;
  c << "d,p00,p01,p10,p11,tv,ratio\n";
  for (const auto& r : rows) {
    c << r.d << ',' << fmt12(r.joint(0, 0)) << ',' << fmt12(r.joint(0, 1)) << ',' << fmt12(r.joint(1, 0)) << ','
      << fmt12(r.joint(1, 1)) << ',' << fmt12(r.tv) << ',' << fmt12(r.ratio) << '\n';
  }
  out.write("lexdecay.csv", c.str());
  res.report += "lexdecay: Q_U(1) = Q_V(1) = 1/3, rho = 0.4, d = 1.." + std::to_string(d_max) + "\n";
}

}  // namespace

CommandResult cmd_figures(const FiguresOptions& opts) {
  return guarded([&](CommandResult& res) {
    Output out(opts.out_dir, &res);
    if (opts.which == "fig2") {
      figure2(out, opts.d.value_or(8), res);
    } else if (opts.which == "fig5") {
      figure5(out, opts.d.value_or(2), res);
    } else if (opts.which == "fig6") {
      figure6(out, opts.d.value_or(2), res);
    } else if (opts.which == "lexdecay") {
      lexdecay(out, opts.d.value_or(14), res);
    } else {
      throw InvalidInput("unknown figure '" + opts.which + "' (fig2, fig5, fig6, lexdecay)");
    }
  });
}

}  // namespace niss
