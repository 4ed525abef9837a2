#pragma once

#include "oraclesat/cnf.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace oraclesat {

enum class ExactStatus { Sat, Unsat, BudgetExceeded };
std::string_view to_string(ExactStatus s);

struct ExactResult {
  ExactStatus status = ExactStatus::BudgetExceeded;
  std::optional<Assignment> witness; // present iff status == Sat
  std::uint64_t decisions = 0;
};

// DPLL with unit propagation, pure-literal elimination and most-occurrences
// branching. budget caps the number of branching decisions.
ExactResult solve_exact(const Formula &formula, std::uint64_t budget = UINT64_MAX);

struct MinViolation {
  std::size_t min_violated = 0;
  std::vector<Assignment> argmin; // sorted
};

constexpr std::size_t kMaxExhaustiveVars = 20;

// Exhaustive search over all 2^n assignments; n <= kMaxExhaustiveVars.
MinViolation min_violation_set(const Formula &formula);

} // namespace oraclesat
