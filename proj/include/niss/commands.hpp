#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Entry points behind the niss executable. Each command writes its files into
// out_dir (created if missing) and returns an exit code plus a human-readable
// report; library errors are caught and mapped to codes, never rethrown.
namespace niss {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;       // malformed or unusable instance
inline constexpr int kExitInfeasible = 3;  // infeasible target, size cap, solver failure

struct CommandResult {
  int exit_code = kExitOk;
  std::string report;
  std::vector<std::string> files;
};

struct SolveOptions {
  std::string instance;
  bool dual = false;
  bool oracle = false;
  std::optional<int> d;
  std::string out_dir = ".";
  bool trace = false;
};

// summary.txt, coefficients.csv, and trace.csv with --trace (F-PATH only).
CommandResult cmd_solve(const SolveOptions& opts);

struct SimulateOptions {
  std::string instance;
  std::string target;
  long long samples = 1000000;
  std::uint64_t seed = 1;
  std::optional<int> d;
  std::string out_dir = ".";
  bool von_neumann = false;
};

// summary.txt and empirical.csv.
CommandResult cmd_simulate(const SimulateOptions& opts);

struct FiguresOptions {
  std::string which;  // fig2, fig5, fig6, lexdecay
  std::string out_dir = ".";
  std::optional<int> d;
};

CommandResult cmd_figures(const FiguresOptions& opts);

// printf("%.12g").
std::string fmt12(double v);

}  // namespace niss
