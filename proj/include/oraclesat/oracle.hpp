#pragma once

#include "oraclesat/cnf.hpp"
#include "oraclesat/rng.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

class OracleFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Product-Bernoulli sampling oracle: x_i ~ Bernoulli(w_i) independently.
// mu optionally carries per-clause LLL weights produced alongside w.
class ProductOracle {
public:
  ProductOracle() = default;
  explicit ProductOracle(std::vector<double> w, std::optional<std::vector<double>> mu = std::nullopt);

  std::size_t num_vars() const { return w_.size(); }
  double w(std::size_t i) const { return w_[i]; }
  std::span<const double> weights() const { return w_; }

  bool has_mu() const { return mu_.has_value(); }
  std::span<const double> mu() const;

  friend bool operator==(const ProductOracle &, const ProductOracle &) = default;

private:
  std::vector<double> w_;
  std::optional<std::vector<double>> mu_;
};

ProductOracle uniform_oracle(std::size_t n);

// Deterministic oracle that always returns x.
ProductOracle point_oracle(const Assignment &x);

Assignment sample(const ProductOracle &oracle, RngStream &rng);

// P_O(not x_v): probability that the oracle proposes the flipped value of v.
double flip_marginal(const ProductOracle &oracle, const Assignment &x, Var v);

// log P_O(x) as a sum of per-bit log terms; -inf if some bit has probability 0.
double log_probability(const ProductOracle &oracle, const Assignment &x);

ProductOracle read_oracle(std::string_view text);
std::string write_oracle(const ProductOracle &oracle);
ProductOracle read_oracle_file(const std::string &path);
void write_oracle_file(const std::string &path, const ProductOracle &oracle);

// Checks that the oracle can be used with the formula (n, and m when mu is present).
void check_compatible(const ProductOracle &oracle, const Formula &formula);

// Standalone mu vector file:
//   MU 1
//   m <m>
//   mu <j> <u_j>    (m lines)
std::vector<double> read_mu(std::string_view text);
std::string write_mu(std::span<const double> mu);
std::vector<double> read_mu_file(const std::string &path);

} // namespace oraclesat
