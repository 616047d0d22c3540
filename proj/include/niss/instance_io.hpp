#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "niss/errors.hpp"
#include "niss/fpath.hpp"

// Line-oriented instance files:
//
//   [input]
//   rows = 2
//   cols = 2
//   pmf = 0.35 0.15 0.15 0.35     # row-major P_XY
//   [target]
//   q_u1 = 0.25
//   q_v1 = 0.125
//   [solver]
//   d = 3
//
// Keys may appear once per section; '#' starts a comment. An indented line
// without '=' continues the values of the key above it.
namespace niss {

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct InputSection {
  Eigen::MatrixXd pmf;
};

// Either marginals (binary outputs, optional disagreement probability), a
// correlation for uniform binary outputs, or a full output pmf.
struct TargetSection {
  std::optional<double> q_u1;
  std::optional<double> q_v1;
  std::optional<double> disagreement;
  std::optional<double> rho;
  std::optional<Eigen::MatrixXd> pmf;
};

struct SolverSection {
  int d = 1;
  FPathConfig fpath;
};

struct InstanceFile {
  std::optional<InputSection> input;
  std::optional<TargetSection> target;
  SolverSection solver;
};

bool operator==(const InstanceFile& a, const InstanceFile& b);

// Throws ParseError with 1-based line and column of the offending token.
// Pmfs are checked for nonnegativity and unit sum (within 1e-9).
InstanceFile parse_instance(const std::string& text);
InstanceFile load_instance(const std::string& path);

// Writes every present field with round-trip precision.
std::string serialize_instance(const InstanceFile& inst);

}  // namespace niss
