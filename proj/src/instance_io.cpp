#include "niss/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace niss {

ParseError::ParseError(int line, int column, const std::string& msg)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  int line = 0;
  int column = 0;
};

struct Entry {
  int line = 0;
  int key_column = 0;
  std::vector<Token> values;
};

using Section = std::map<std::string, Entry>;

double to_double(const Token& t, int line) {
  double v = 0;
  const char* end = t.text.data() + t.text.size();
  const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(t.line ? t.line : line, t.column, "expected a number, found '" + t.text + "'");
  }
  return v;
}

int to_int(const Token& t, int line) {
  int v = 0;
  const char* end = t.text.data() + t.text.size();
  const auto [ptr, ec] = std::from_chars(t.text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ParseError(line, t.column, "expected an integer, found '" + t.text + "'");
  return v;
}

const Entry* find(const Section& s, const std::string& key) {
  const auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

const Token& single(const Entry& e, const std::string& key) {
  if (e.values.size() != 1) {
    throw ParseError(e.line, e.key_column, "'" + key + "' takes exactly one value");
  }
  return e.values.front();
}

std::optional<double> opt_double(const Section& s, const std::string& key) {
  const Entry* e = find(s, key);
  if (!e) return std::nullopt;
  return to_double(single(*e, key), e->line);
}

double probability(const Section& s, const std::string& key, std::optional<double> v) {
  if (v && !(*v >= 0 && *v <= 1)) {
    const Entry* e = find(s, key);
    throw ParseError(e->line, e->values.front().column, "'" + key + "' must lie in [0,1]");
  }
  return v.value_or(0);
}

Eigen::MatrixXd read_pmf(const Section& s, const std::string& section_name, int header_line) {
  const Entry* rows = find(s, "rows");
  const Entry* cols = find(s, "cols");
  const Entry* pmf = find(s, "pmf");
  if (!rows || !cols || !pmf) {
    throw ParseError(header_line, 1, "[" + section_name + "] needs rows, cols and pmf");
  }
  const int r = to_int(single(*rows, "rows"), rows->line);
  const int c = to_int(single(*cols, "cols"), cols->line);
  if (r < 1) throw ParseError(rows->line, rows->values.front().column, "rows must be positive");
  if (c < 1) throw ParseError(cols->line, cols->values.front().column, "cols must be positive");
  if (pmf->values.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {
    throw ParseError(pmf->line, pmf->key_column,
                     "pmf has " + std::to_string(pmf->values.size()) + " entries, expected " +
                         std::to_string(r * c));
  }
  Eigen::MatrixXd m(r, c);
  double sum = 0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const Token& t = pmf->values[static_cast<std::size_t>(i * c + j)];
      const double v = to_double(t, pmf->line);
      if (v < 0) throw ParseError(t.line, t.column, "negative probability");
      m(i, j) = v;
      sum += v;
    }
  }
  if (std::abs(sum - 1) > 1e-9) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "pmf sums to " << sum << ", not 1";
    throw ParseError(pmf->line, pmf->values.front().column, msg.str());
  }
  return m;
}

void reject_unknown(const Section& s, const std::set<std::string>& allowed, const std::string& name) {
  for (const auto& [key, e] : s) {
    if (!allowed.count(key)) throw ParseError(e.line, e.key_column, "unknown key '" + key + "' in [" + name + "]");
  }
}

}  // namespace

InstanceFile parse_instance(const std::string& text) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> header_lines;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  Entry* last = nullptr;
  const auto tokenize = [&](const std::string& line, std::size_t pos, std::vector<Token>& out) {
    while (true) {
      const auto b = line.find_first_not_of(" \t\r,", pos);
      if (b == std::string::npos) break;
      auto end = line.find_first_of(" \t\r,", b);
      if (end == std::string::npos) end = line.size();
      out.push_back({line.substr(b, end - b), line_no, static_cast<int>(b) + 1});
      pos = end;
    }
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = raw.substr(0, raw.find('#'));
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const int col0 = static_cast<int>(first) + 1;
    if (line[first] == '[') {
      const auto close = line.find(']', first);
      if (close == std::string::npos) throw ParseError(line_no, col0, "unterminated section header");
      const auto rest = line.find_first_not_of(" \t\r", close + 1);
      if (rest != std::string::npos) throw ParseError(line_no, static_cast<int>(rest) + 1, "text after section header");
      current = line.substr(first + 1, close - first - 1);
      if (current != "input" && current != "target" && current != "solver") {
        throw ParseError(line_no, col0 + 1, "unknown section '" + current + "'");
      }
      if (header_lines.count(current)) throw ParseError(line_no, col0, "section [" + current + "] repeated");
      header_lines[current] = line_no;
      sections[current];
      last = nullptr;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos && first > 0 && last) {
      tokenize(line, first, last->values);
      continue;
    }
    if (eq == std::string::npos) throw ParseError(line_no, col0, "expected 'key = values'");
    if (current.empty()) throw ParseError(line_no, col0, "key outside any section");
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) throw ParseError(line_no, col0, "missing key");
    Entry e;
    e.line = line_no;
    e.key_column = col0;
    tokenize(line, eq + 1, e.values);
    if (e.values.empty()) throw ParseError(line_no, static_cast<int>(eq) + 2, "missing value for '" + key + "'");
    auto& sec = sections[current];
    if (sec.count(key)) throw ParseError(line_no, col0, "duplicate key '" + key + "'");
    last = &sec.emplace(key, std::move(e)).first->second;
  }

  InstanceFile out;
  if (sections.count("input")) {
    const Section& s = sections["input"];
    reject_unknown(s, {"rows", "cols", "pmf"}, "input");
    Eigen::MatrixXd m = read_pmf(s, "input", header_lines["input"]);
    if (m.rows() < 2 || m.cols() < 2) {
      throw ParseError(find(s, "rows")->line, 1, "input alphabets need at least two symbols");
    }
    out.input = InputSection{std::move(m)};
  }
  if (sections.count("target")) {
    const Section& s = sections["target"];
    reject_unknown(s, {"q_u1", "q_v1", "disagreement", "rho", "rows", "cols", "pmf"}, "target");
    TargetSection t;
    if (auto v = opt_double(s, "q_u1")) t.q_u1 = probability(s, "q_u1", v);
    if (auto v = opt_double(s, "q_v1")) t.q_v1 = probability(s, "q_v1", v);
    if (auto v = opt_double(s, "disagreement")) t.disagreement = probability(s, "disagreement", v);
    if (auto v = opt_double(s, "rho")) {
      if (!(*v >= -1 && *v <= 1)) throw ParseError(find(s, "rho")->line, find(s, "rho")->values.front().column, "rho must lie in [-1,1]");
      t.rho = v;
    }
    if (find(s, "pmf") || find(s, "rows") || find(s, "cols")) t.pmf = read_pmf(s, "target", header_lines["target"]);
    out.target = std::move(t);
  }
  if (sections.count("solver")) {
    const Section& s = sections["solver"];
    reject_unknown(s, {"d", "alpha0", "beta0", "alpha1", "beta1", "d_lambda", "eps_lambda", "fw_max_iters", "fw_tol"},
                   "solver");
    if (const Entry* e = find(s, "d")) {
      out.solver.d = to_int(single(*e, "d"), e->line);
      if (out.solver.d < 1) throw ParseError(e->line, e->values.front().column, "d must be positive");
    }
    FPathConfig& c = out.solver.fpath;
    const std::pair<const char*, double*> reals[] = {{"alpha0", &c.alpha0}, {"beta0", &c.beta0},
                                                     {"alpha1", &c.alpha1}, {"beta1", &c.beta1},
                                                     {"d_lambda", &c.d_lambda}, {"eps_lambda", &c.eps_lambda},
                                                     {"fw_tol", &c.fw_tol}};
    for (const auto& [key, dst] : reals) {
      if (auto v = opt_double(s, key)) *dst = *v;
    }
    if (!(c.d_lambda > 0 && c.d_lambda <= 1)) {
      const Entry* e = find(s, "d_lambda");
      throw ParseError(e ? e->line : header_lines["solver"], e ? e->values.front().column : 1, "d_lambda must lie in (0,1]");
    }
    if (const Entry* e = find(s, "fw_max_iters")) c.fw_max_iters = to_int(single(*e, "fw_max_iters"), e->line);
  }
  return out;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(0, 0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_instance(ss.str());
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_pmf(std::ostringstream& o, const Eigen::MatrixXd& m) {
  o << "rows = " << m.rows() << "\ncols = " << m.cols() << "\npmf =";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) o << ' ' << num(m(i, j));
  }
  o << '\n';
}

}  // namespace

std::string serialize_instance(const InstanceFile& inst) {
  std::ostringstream o;
  if (inst.input) {
    o << "[input]\n";
    write_pmf(o, inst.input->pmf);
  }
  if (inst.target) {
    const TargetSection& t = *inst.target;
    o << "[target]\n";
    if (t.q_u1) o << "q_u1 = " << num(*t.q_u1) << '\n';
    if (t.q_v1) o << "q_v1 = " << num(*t.q_v1) << '\n';
    if (t.disagreement) o << "disagreement = " << num(*t.disagreement) << '\n';
    if (t.rho) o << "rho = " << num(*t.rho) << '\n';
    if (t.pmf) write_pmf(o, *t.pmf);
  }
  const FPathConfig& c = inst.solver.fpath;
  o << "[solver]\n"
    << "d = " << inst.solver.d << '\n'
    << "alpha0 = " << num(c.alpha0) << '\n'
    << "beta0 = " << num(c.beta0) << '\n'
    << "alpha1 = " << num(c.alpha1) << '\n'
    << "beta1 = " << num(c.beta1) << '\n'
    << "d_lambda = " << num(c.d_lambda) << '\n'
    << "eps_lambda = " << num(c.eps_lambda) << '\n'
    << "fw_max_iters = " << c.fw_max_iters << '\n'
    << "fw_tol = " << num(c.fw_tol) << '\n';
  return o.str();
}

bool operator==(const InstanceFile& a, const InstanceFile& b) {
  const auto same_matrix = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  if (a.input.has_value() != b.input.has_value()) return false;
  if (a.input && !same_matrix(a.input->pmf, b.input->pmf)) return false;
  if (a.target.has_value() != b.target.has_value()) return false;
  if (a.target) {
    const TargetSection &x = *a.target, &y = *b.target;
    if (x.q_u1 != y.q_u1 || x.q_v1 != y.q_v1 || x.disagreement != y.disagreement || x.rho != y.rho) return false;
    if (x.pmf.has_value() != y.pmf.has_value()) return false;
    if (x.pmf && !same_matrix(*x.pmf, *y.pmf)) return false;
  }
  const FPathConfig &c = a.solver.fpath, &e = b.solver.fpath;
  return a.solver.d == b.solver.d && c.alpha0 == e.alpha0 && c.beta0 == e.beta0 && c.alpha1 == e.alpha1 &&
         c.beta1 == e.beta1 && c.d_lambda == e.d_lambda && c.eps_lambda == e.eps_lambda &&
         c.fw_max_iters == e.fw_max_iters && c.fw_tol == e.fw_tol;
}

}  // namespace niss
