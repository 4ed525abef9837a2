#include "oraclesat/cnf.hpp"

#include "oraclesat/text_io.hpp"

#include <algorithm>

namespace oraclesat {

Literal Literal::from_dimacs(long value) {
  if (value == 0)
    throw FormulaError("literal 0 is not a variable");
  return value > 0 ? Literal{static_cast<Var>(value - 1), false} : Literal{static_cast<Var>(-value - 1), true};
}

Assignment::Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto &b : bits_)
    if (b > 1)
      throw std::invalid_argument("assignment bits must be 0 or 1");
}

Assignment Assignment::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1')
      throw std::invalid_argument("assignment string must consist of 0/1 characters");
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return Assignment(std::move(bits));
}

std::string Assignment::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i])
      s[i] = '1';
  return s;
}

Formula::Formula(std::size_t num_vars, std::vector<Clause> clauses)
    : num_vars_(num_vars), clauses_(std::move(clauses)), pos_occ_(num_vars), neg_occ_(num_vars) {
  for (std::size_t j = 0; j < clauses_.size(); ++j) {
    Clause &c = clauses_[j];
    if (c.empty())
      throw FormulaError("clause " + std::to_string(j + 1) + " is empty");
    Clause canonical;
    canonical.reserve(c.size());
    for (const Literal &lit : c) {
      if (lit.var >= num_vars_)
        throw FormulaError("clause " + std::to_string(j + 1) + " references variable " +
                           std::to_string(lit.var + 1) + " > n = " + std::to_string(num_vars_));
      auto same_var = std::find_if(canonical.begin(), canonical.end(),
                                   [&](const Literal &o) { return o.var == lit.var; });
      if (same_var == canonical.end())
        canonical.push_back(lit);
      else if (same_var->negated != lit.negated)
        throw FormulaError("clause " + std::to_string(j + 1) + " is tautological in variable " +
                           std::to_string(lit.var + 1));
    }
    c = std::move(canonical);
    for (const Literal &lit : c)
      (lit.negated ? neg_occ_ : pos_occ_)[lit.var].push_back(static_cast<std::uint32_t>(j));
  }
}

Formula parse_dimacs(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  long long declared_vars = 0;
  long long declared_clauses = 0;
  std::vector<Clause> clauses;
  Clause current;
  std::size_t clause_start_line = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos)
      eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;

    if (line.empty() || line.front() == 'c')
      continue;
    if (line.front() == '%')
      break; // SATLIB end marker
    if (line.front() == 'p') {
      if (have_header)
        throw ParseError(line_no, "duplicate header");
      auto tok = split_whitespace(line);
      if (tok.size() != 4 || tok[0] != "p" || tok[1] != "cnf")
        throw ParseError(line_no, "malformed header, expected 'p cnf <n> <m>'");
      try {
        declared_vars = parse_int(tok[2]);
        declared_clauses = parse_int(tok[3]);
      } catch (const std::invalid_argument &) {
        throw ParseError(line_no, "malformed header, expected 'p cnf <n> <m>'");
      }
      if (declared_vars < 0 || declared_clauses < 0)
        throw ParseError(line_no, "negative count in header");
      have_header = true;
      continue;
    }
    if (!have_header)
      throw ParseError(line_no, "clause data before 'p cnf' header");
    for (auto tok : split_whitespace(line)) {
      long long value = 0;
      try {
        value = parse_int(tok);
      } catch (const std::invalid_argument &) {
        throw ParseError(line_no, "invalid token '" + std::string(tok) + "'");
      }
      if (value == 0) {
        if (current.empty())
          throw ParseError(line_no, "empty clause");
        for (std::size_t a = 0; a < current.size(); ++a)
          for (std::size_t b = a + 1; b < current.size(); ++b)
            if (current[a].var == current[b].var && current[a].negated != current[b].negated)
              throw ParseError(clause_start_line, "tautological clause " + std::to_string(clauses.size() + 1) +
                                                      " (variable " + std::to_string(current[a].var + 1) + ")");
        clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (value > declared_vars || value < -declared_vars)
        throw ParseError(line_no, "literal " + std::to_string(value) + " exceeds declared n = " +
                                      std::to_string(declared_vars));
      if (current.empty())
        clause_start_line = line_no;
      current.push_back(Literal::from_dimacs(static_cast<long>(value)));
    }
  }
  if (!have_header)
    throw ParseError(line_no, "missing 'p cnf' header");
  if (!current.empty())
    throw ParseError(line_no, "last clause is not terminated by 0");
  if (static_cast<long long>(clauses.size()) != declared_clauses)
    throw ParseError(line_no, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                  std::to_string(clauses.size()));
  return Formula(static_cast<std::size_t>(declared_vars), std::move(clauses));
}

Formula read_dimacs_file(const std::string &path) {
  try {
    return parse_dimacs(read_text_file(path));
  } catch (const ParseError &e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

std::string write_dimacs(const Formula &formula) {
  std::string out = "p cnf " + std::to_string(formula.num_vars()) + " " + std::to_string(formula.num_clauses()) + "\n";
  for (const Clause &c : formula.clauses()) {
    for (const Literal &lit : c) {
      out += std::to_string(lit.to_dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

bool clause_violated(const Clause &clause, const Assignment &x) {
  for (const Literal &lit : clause)
    if (literal_true(lit, x))
      return false;
  return true;
}

std::size_t count_violated(const Formula &formula, const Assignment &x) {
  if (x.size() != formula.num_vars())
    throw std::invalid_argument("assignment length " + std::to_string(x.size()) + " does not match n = " +
                                std::to_string(formula.num_vars()));
  std::size_t count = 0;
  for (const Clause &c : formula.clauses())
    count += clause_violated(c, x) ? 1 : 0;
  return count;
}

} // namespace oraclesat
