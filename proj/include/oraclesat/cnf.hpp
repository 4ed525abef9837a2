#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

using Var = std::uint32_t;

struct Literal {
  Var var = 0;          // 0-based
  bool negated = false;

  static Literal from_dimacs(long value);
  long to_dimacs() const { return negated ? -static_cast<long>(var) - 1 : static_cast<long>(var) + 1; }

  friend bool operator==(const Literal &, const Literal &) = default;
};

using Clause = std::vector<Literal>;

class FormulaError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string &detail, const std::string &source = {})
      : std::runtime_error((source.empty() ? "" : source + ": ") + "line " + std::to_string(line) + ": " + detail),
        line_(line), detail_(detail) {}
  std::size_t line() const { return line_; }
  const std::string &detail() const { return detail_; }

private:
  std::size_t line_;
  std::string detail_;
};

// Truth assignment x in {0,1}^n.
class Assignment {
public:
  Assignment() = default;
  explicit Assignment(std::size_t n, std::uint8_t fill = 0) : bits_(n, fill) {}
  explicit Assignment(std::vector<std::uint8_t> bits);

  // "0110..." with character i giving x_{i+1}.
  static Assignment from_string(std::string_view text);
  std::string to_string() const;

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const Assignment &, const Assignment &) = default;
  friend auto operator<=>(const Assignment &, const Assignment &) = default;

private:
  std::vector<std::uint8_t> bits_;
};

inline bool literal_true(const Literal &lit, const Assignment &x) {
  return (x[lit.var] != 0) != lit.negated;
}

// Immutable canonical CNF. Construction deduplicates repeated literals and
// rejects empty clauses, tautologies and out-of-range variables.
class Formula {
public:
  Formula() = default;
  Formula(std::size_t num_vars, std::vector<Clause> clauses);

  std::size_t num_vars() const { return num_vars_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  double alpha() const { return num_vars_ == 0 ? 0.0 : static_cast<double>(clauses_.size()) / num_vars_; }

  const Clause &clause(std::size_t j) const { return clauses_[j]; }
  const std::vector<Clause> &clauses() const { return clauses_; }

  // Clause indices in which the variable occurs positively / negatively.
  std::span<const std::uint32_t> positive_occurrences(Var v) const { return pos_occ_[v]; }
  std::span<const std::uint32_t> negative_occurrences(Var v) const { return neg_occ_[v]; }
  std::size_t occurrences(Var v) const { return pos_occ_[v].size() + neg_occ_[v].size(); }

  friend bool operator==(const Formula &a, const Formula &b) {
    return a.num_vars_ == b.num_vars_ && a.clauses_ == b.clauses_;
  }

private:
  std::size_t num_vars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<std::vector<std::uint32_t>> pos_occ_;
  std::vector<std::vector<std::uint32_t>> neg_occ_;
};

Formula parse_dimacs(std::string_view text);
Formula read_dimacs_file(const std::string &path);
std::string write_dimacs(const Formula &formula);

bool clause_violated(const Clause &clause, const Assignment &x);
std::size_t count_violated(const Formula &formula, const Assignment &x);

} // namespace oraclesat
