#include "oraclesat/oracle.hpp"

#include "oraclesat/text_io.hpp"

#include <cmath>

namespace oraclesat {

namespace {

void validate_mu(std::span<const double> mu) {
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (!std::isfinite(mu[j]) || mu[j] < 0)
      throw std::invalid_argument("mu_" + std::to_string(j + 1) + " = " + format_double(mu[j]) +
                                  " is not a finite nonnegative number");
}

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  // Next non-empty, non-comment line split into tokens; empty at end.
  std::vector<std::string_view> next() {
    while (pos < text.size()) {
      auto eol = text.find('\n', pos);
      if (eol == std::string_view::npos)
        eol = text.size();
      auto line = trim(text.substr(pos, eol - pos));
      pos = eol + 1;
      ++line_no;
      if (line.empty() || line.front() == '#')
        continue;
      return split_whitespace(line);
    }
    return {};
  }
};

[[noreturn]] void format_error(const LineReader &r, const std::string &what) {
  throw OracleFormatError("line " + std::to_string(r.line_no) + ": " + what);
}

std::size_t expect_count(LineReader &r, std::string_view key) {
  auto tok = r.next();
  if (tok.size() != 2 || tok[0] != key)
    format_error(r, "expected '" + std::string(key) + " <count>'");
  long long v = 0;
  try {
    v = parse_int(tok[1]);
  } catch (const std::invalid_argument &e) {
    format_error(r, e.what());
  }
  if (v < 0)
    format_error(r, "negative count");
  return static_cast<std::size_t>(v);
}

// Reads `key <index> <value>` lines into values (1-based, each index once).
void read_indexed(LineReader &r, std::vector<std::string_view> first, std::string_view key,
                  std::vector<double> &values, std::size_t count) {
  values.assign(count, std::nan(""));
  std::vector<bool> seen(count, false);
  auto tok = std::move(first);
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0)
      tok = r.next();
    if (tok.size() != 3 || tok[0] != key)
      format_error(r, "expected " + std::to_string(count) + " '" + std::string(key) + " <index> <value>' lines, got " +
                          std::to_string(k));
    long long idx = 0;
    double value = 0;
    try {
      idx = parse_int(tok[1]);
      value = parse_double(tok[2]);
    } catch (const std::invalid_argument &e) {
      format_error(r, e.what());
    }
    if (idx < 1 || static_cast<std::size_t>(idx) > count)
      format_error(r, std::string(key) + " index " + std::to_string(idx) + " out of range 1.." + std::to_string(count));
    if (seen[idx - 1])
      format_error(r, "duplicate " + std::string(key) + " index " + std::to_string(idx));
    seen[idx - 1] = true;
    values[idx - 1] = value;
  }
}

} // namespace

ProductOracle::ProductOracle(std::vector<double> w, std::optional<std::vector<double>> mu)
    : w_(std::move(w)), mu_(std::move(mu)) {
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (!(w_[i] >= 0.0 && w_[i] <= 1.0))
      throw std::invalid_argument("w_" + std::to_string(i + 1) + " = " + format_double(w_[i]) + " is outside [0, 1]");
  if (mu_)
    validate_mu(*mu_);
}

std::span<const double> ProductOracle::mu() const {
  if (!mu_)
    throw std::logic_error("oracle carries no mu vector");
  return *mu_;
}

ProductOracle uniform_oracle(std::size_t n) {
  if (n == 0)
    throw std::invalid_argument("uniform oracle needs n >= 1");
  return ProductOracle(std::vector<double>(n, 0.5));
}

ProductOracle point_oracle(const Assignment &x) {
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    w[i] = x[i] ? 1.0 : 0.0;
  return ProductOracle(std::move(w));
}

Assignment sample(const ProductOracle &oracle, RngStream &rng) {
  Assignment x(oracle.num_vars());
  for (std::size_t i = 0; i < oracle.num_vars(); ++i)
    x.set(i, rng.bernoulli(oracle.w(i)));
  return x;
}

double flip_marginal(const ProductOracle &oracle, const Assignment &x, Var v) {
  if (v >= oracle.num_vars() || v >= x.size())
    throw std::out_of_range("variable " + std::to_string(v + 1) + " out of range");
  return x[v] ? 1.0 - oracle.w(v) : oracle.w(v);
}

double log_probability(const ProductOracle &oracle, const Assignment &x) {
  if (x.size() != oracle.num_vars())
    throw std::invalid_argument("assignment length does not match oracle");
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = x[i] ? oracle.w(i) : 1.0 - oracle.w(i);
    if (p <= 0)
      return -HUGE_VAL;
    total += std::log(p);
  }
  return total;
}

ProductOracle read_oracle(std::string_view text) {
  LineReader r{text};
  auto tok = r.next();
  if (tok.size() != 2 || tok[0] != "ORACLE")
    format_error(r, "missing 'ORACLE <version>' header");
  if (tok[1] != "1")
    format_error(r, "unsupported oracle file version '" + std::string(tok[1]) + "'");
  const std::size_t n = expect_count(r, "n");
  const std::size_t m = expect_count(r, "m");

  std::vector<double> w;
  read_indexed(r, n > 0 ? r.next() : std::vector<std::string_view>{}, "w", w, n);
  for (std::size_t i = 0; i < n; ++i)
    if (!(w[i] >= 0.0 && w[i] <= 1.0))
      throw OracleFormatError("w " + std::to_string(i + 1) + " = " + format_double(w[i]) + " is outside [0, 1]");

  std::optional<std::vector<double>> mu;
  tok = r.next();
  if (!tok.empty()) {
    if (tok[0] != "mu")
      format_error(r, "unexpected '" + std::string(tok[0]) + "' after w section");
    std::vector<double> values;
    read_indexed(r, std::move(tok), "mu", values, m);
    if (!r.next().empty())
      format_error(r, "mu section longer than m = " + std::to_string(m));
    for (std::size_t j = 0; j < m; ++j)
      if (!std::isfinite(values[j]) || values[j] < 0)
        throw OracleFormatError("mu " + std::to_string(j + 1) + " = " + format_double(values[j]) + " is negative or not finite");
    mu = std::move(values);
  }
  return ProductOracle(std::move(w), std::move(mu));
}

std::string write_oracle(const ProductOracle &oracle) {
  const std::size_t m = oracle.has_mu() ? oracle.mu().size() : 0;
  std::string out = "ORACLE 1\nn " + std::to_string(oracle.num_vars()) + "\nm " + std::to_string(m) + "\n";
  for (std::size_t i = 0; i < oracle.num_vars(); ++i)
    out += "w " + std::to_string(i + 1) + " " + format_double17(oracle.w(i)) + "\n";
  if (oracle.has_mu())
    for (std::size_t j = 0; j < m; ++j)
      out += "mu " + std::to_string(j + 1) + " " + format_double17(oracle.mu()[j]) + "\n";
  return out;
}

ProductOracle read_oracle_file(const std::string &path) {
  try {
    return read_oracle(read_text_file(path));
  } catch (const OracleFormatError &e) {
    throw OracleFormatError(path + ": " + e.what());
  }
}

void write_oracle_file(const std::string &path, const ProductOracle &oracle) {
  write_text_file_atomic(path, write_oracle(oracle));
}

void check_compatible(const ProductOracle &oracle, const Formula &formula) {
  if (oracle.num_vars() != formula.num_vars())
    throw std::invalid_argument("oracle has n = " + std::to_string(oracle.num_vars()) + " but formula has n = " +
                                std::to_string(formula.num_vars()));
  if (oracle.has_mu() && oracle.mu().size() != formula.num_clauses())
    throw std::invalid_argument("oracle mu has length " + std::to_string(oracle.mu().size()) +
                                " but formula has m = " + std::to_string(formula.num_clauses()));
}

std::vector<double> read_mu(std::string_view text) {
  LineReader r{text};
  auto tok = r.next();
  if (tok.size() != 2 || tok[0] != "MU" || tok[1] != "1")
    format_error(r, "missing 'MU 1' header");
  const std::size_t m = expect_count(r, "m");
  std::vector<double> mu;
  read_indexed(r, m > 0 ? r.next() : std::vector<std::string_view>{}, "mu", mu, m);
  if (!r.next().empty())
    format_error(r, "trailing data after mu section");
  for (std::size_t j = 0; j < m; ++j)
    if (!std::isfinite(mu[j]) || mu[j] < 0)
      throw OracleFormatError("mu " + std::to_string(j + 1) + " is negative or not finite");
  return mu;
}

std::string write_mu(std::span<const double> mu) {
  std::string out = "MU 1\nm " + std::to_string(mu.size()) + "\n";
  for (std::size_t j = 0; j < mu.size(); ++j)
    out += "mu " + std::to_string(j + 1) + " " + format_double17(mu[j]) + "\n";
  return out;
}

std::vector<double> read_mu_file(const std::string &path) {
  try {
    return read_mu(read_text_file(path));
  } catch (const OracleFormatError &e) {
    throw OracleFormatError(path + ": " + e.what());
  }
}

} // namespace oraclesat
