#pragma once

#include "brute_force.hpp"
#include "oraclesat/cnf.hpp"
#include "oraclesat/oracle.hpp"

#include <vector>

namespace fixtures {

inline oraclesat::Formula to_formula(int n, const brute::IntFormula &f) {
  std::vector<oraclesat::Clause> clauses;
  for (const auto &c : f) {
    oraclesat::Clause clause;
    for (int lit : c)
      clause.push_back(oraclesat::Literal::from_dimacs(lit));
    clauses.push_back(clause);
  }
  return oraclesat::Formula(static_cast<std::size_t>(n), std::move(clauses));
}

inline oraclesat::Assignment to_assignment(const brute::Bits &x) {
  std::vector<std::uint8_t> bits(x.begin(), x.end());
  return oraclesat::Assignment(std::move(bits));
}

inline brute::Bits to_bits(const oraclesat::Assignment &x) { return brute::Bits(x.bits().begin(), x.bits().end()); }

} // namespace fixtures
