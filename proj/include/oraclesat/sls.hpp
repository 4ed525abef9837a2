#pragma once

#include "oraclesat/cnf.hpp"
#include "oraclesat/oracle.hpp"
#include "oraclesat/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

enum class Solver { MT, WalkSAT };

// uniform: uniform oracle throughout; hybrid: oracle for initialization only;
// boosted: oracle for initialization and every step.
enum class Mode { Uniform, Hybrid, Boosted };

std::string_view to_string(Solver s);
std::string_view to_string(Mode m);
Solver parse_solver(std::string_view text);
Mode parse_mode(std::string_view text);

struct RunConfig {
  std::uint64_t max_steps = 1'000'000;
  Solver variant = Solver::MT;
  Mode mode = Mode::Boosted;
  bool trace_violations = false;
  // Steps (ascending) at which phi(x) is recorded; cheaper than a full trace.
  std::vector<std::uint64_t> checkpoints;
};

struct RunRecord {
  std::uint64_t steps = 0;
  bool solved = false;
  Assignment final_assignment;
  // phi(x) after initialization and after each step (length steps + 1).
  std::optional<std::vector<std::uint32_t>> violation_trace;
  // phi(x) at each RunConfig::checkpoints entry.
  std::vector<std::uint32_t> checkpoint_violations;
  // WalkSAT picks where every flip weight in the clause was 0.
  std::uint64_t degenerate_picks = 0;
};

// Incrementally maintained set of violated clauses under single-bit flips.
class ViolationTracker {
public:
  ViolationTracker(const Formula &formula, Assignment x);

  const Assignment &assignment() const { return x_; }
  std::size_t num_violated() const { return violated_.size(); }
  std::uint32_t violated_at(std::size_t i) const { return violated_[i]; }
  bool is_violated(std::uint32_t clause) const { return position_[clause] != kAbsent; }

  void flip(Var v);

private:
  static constexpr std::uint32_t kAbsent = 0xffffffffu;
  void add(std::uint32_t clause);
  void remove(std::uint32_t clause);

  const Formula &formula_;
  Assignment x_;
  std::vector<std::uint32_t> true_count_;
  std::vector<std::uint32_t> violated_;
  std::vector<std::uint32_t> position_;
};

// Oracle-based Moser-Tardos: resample V(c) of a uniformly chosen violated clause.
RunRecord run_mt(const Formula &formula, const ProductOracle &oracle, const RunConfig &cfg, RngStream &rng);

// Oracle-based WalkSAT: flip v in a uniformly chosen violated clause with
// probability proportional to P_O(not x_v).
RunRecord run_walksat(const Formula &formula, const ProductOracle &oracle, const RunConfig &cfg, RngStream &rng);

// Dispatches on cfg.variant; hybrid and boosted modes require an oracle.
RunRecord run_variant(const Formula &formula, const ProductOracle *oracle, const RunConfig &cfg, RngStream &rng);

} // namespace oraclesat
