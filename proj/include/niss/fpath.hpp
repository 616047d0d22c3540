#pragma once

#include <optional>
#include <string>
#include <vector>

#include "niss/maxcorr.hpp"

namespace niss {

struct FPathConfig {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double alpha1 = 1.1;
  double beta1 = 1.1;
  double d_lambda = 2e-5;
  double eps_lambda = 0.04;
  int fw_max_iters = 10000;
  double fw_tol = 1e-8;
};

struct IteratePair {
  std::vector<double> f;
  std::vector<double> g;
};

// f^T K g + a sum f^2 + b sum g^2 + c. Every L_lambda has this form.
struct QuadraticObjective {
  double a = 0;
  double b = 0;
  double c = 0;
};

QuadraticObjective lambda_objective(const FPathConfig& cfg, double lambda);

double objective_lambda(std::span<const double> f, std::span<const double> g,
                        const PrimalInstance& inst, const FPathConfig& cfg, double lambda);

double evaluate(const QuadraticObjective& obj, std::span<const double> f,
                std::span<const double> g, const PrimalInstance& inst);

struct FwOptions {
  // Leave interior stationary points along the top positive-curvature
  // direction of the quadratic once the Frank-Wolfe gap has closed.
  bool escape_saddles = true;
  int max_escapes = 4;
};

struct FwResult {
  IteratePair p;
  double value = 0;
  double gap = 0;
  int iterations = 0;
  int escapes = 0;
  bool converged = false;
};

FwResult frank_wolfe_maximize(const QuadraticObjective& obj, const PrimalInstance& inst,
                              const IteratePair& start, const FPathConfig& cfg,
                              const FwOptions& opts = {});

// Linear maximization of sum_x w(x) h(x) v(x) over v in [-1,1] with weighted
// mean pinned to bias; returns the maximizing value table.
std::vector<double> box_vertex(std::span<const double> h, std::span<const double> weights,
                               double bias);

struct TraceRow {
  double lambda = 0;
  double objective = 0;
  double f_norm = 0;
  double g_norm = 0;
  bool resolved = false;
};

struct Snapshot {
  double lambda = 0;
  IteratePair p;
};

struct Certificate {
  double lambda_star = 0;
  double objective = 0;
  // True when the boundary iterate was shown optimal for the concave
  // objective at the concavity threshold rather than at its own lambda.
  bool via_threshold = false;
};

struct FPathState {
  double lambda = 0;
  IteratePair iterate;
  double objective = 0;  // primal objective of the final iterate
  double f_norm = 0;
  double g_norm = 0;
  std::vector<TraceRow> trace;
  std::vector<Snapshot> snapshots;  // iterate after every re-solve
  std::optional<Certificate> certificate;
  FPathConfig config;  // weights actually used
  std::vector<std::string> notes;
  int resolves = 0;
  int fw_iterations = 0;
  int unconverged_solves = 0;
};

// Validates the weights against the kernel's free spectral norm and widens them
// when L0 is not concave or L1 not convex; notes describe any change.
FPathConfig validate_config(const FPathConfig& cfg, double sigma, std::vector<std::string>* notes);

// Largest lambda in [0,1] for which L_lambda is concave (negative semidefinite
// quadratic part on the free coordinates).
double lambda_concave(const FPathConfig& cfg, double sigma);

FPathState fpath_solve(const PrimalInstance& inst, const FPathConfig& cfg = {});

std::optional<Certificate> optimality_certificate(const FPathState& state,
                                                  const PrimalInstance& inst);

}  // namespace niss
