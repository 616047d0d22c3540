#include <CLI11.hpp>
#include <iostream>

#include "niss/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Non-interactive source simulation solver"};
  app.require_subcommand(1);

  niss::SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Biased maximal correlation of an instance");
  s->add_option("instance", solve.instance, "Instance file")->required();
  s->add_flag("--dual", solve.dual, "Dual LP (uniform input marginals)");
  s->add_flag("--oracle", solve.oracle, "Exhaustive search (size-capped)");
  s->add_option("--d", solve.d, "Block length (overrides [solver] d)");
  s->add_option("--out", solve.out_dir, "Output directory");
  s->add_flag("--trace", solve.trace, "Write the lambda trace");

  niss::SimulateOptions sim;
  auto* m = app.add_subcommand("simulate", "Monte-Carlo run of the coin protocol for a target");
  m->add_option("instance", sim.instance, "Instance file with [input]")->required();
  m->add_option("target", sim.target, "File with a [target] section")->required();
  m->add_option("--samples", sim.samples, "Number of blocks");
  m->add_option("--seed", sim.seed, "Random seed");
  m->add_option("--d", sim.d, "Block length for the solver");
  m->add_option("--out", sim.out_dir, "Output directory");
  m->add_flag("--von-neumann", sim.von_neumann, "Draw coin bits from simulated unused source samples");

  niss::FiguresOptions fig;
  auto* f = app.add_subcommand("figures", "Regenerate figure data as CSV");
  f->add_option("which", fig.which, "fig2, fig5, fig6 or lexdecay")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig5", "fig6", "lexdecay"}));
  f->add_option("--d", fig.d, "Largest (fig2, lexdecay) or fixed (fig5, fig6) block length");
  f->add_option("--out", fig.out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  niss::CommandResult res;
  if (*s) {
    res = niss::cmd_solve(solve);
  } else if (*m) {
    res = niss::cmd_simulate(sim);
  } else {
    res = niss::cmd_figures(fig);
  }
  (res.exit_code == niss::kExitOk ? std::cout : std::cerr) << res.report;
  return res.exit_code;
}
