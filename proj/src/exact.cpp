#include "oraclesat/exact.hpp"

#include "oraclesat/sls.hpp"

#include <algorithm>
#include <stdexcept>

namespace oraclesat {

std::string_view to_string(ExactStatus s) {
  switch (s) {
  case ExactStatus::Sat:
    return "SAT";
  case ExactStatus::Unsat:
    return "UNSAT";
  case ExactStatus::BudgetExceeded:
    break;
  }
  return "BUDGET_EXCEEDED";
}

namespace {

class Dpll {
public:
  explicit Dpll(const Formula &f)
      : f_(f), value_(f.num_vars(), kUnassigned), sat_count_(f.num_clauses(), 0), false_count_(f.num_clauses(), 0) {}

  ExactResult run(std::uint64_t budget) {
    ExactResult result;
    for (std::uint32_t j = 0; j < f_.num_clauses(); ++j)
      if (f_.clause(j).size() == 1)
        queue_.push_back(j);

    for (;;) {
      if (!propagate()) {
        if (!backtrack()) {
          result.status = ExactStatus::Unsat;
          result.decisions = decisions_;
          return result;
        }
        continue;
      }
      const auto pick = choose();
      if (pick.pure_assigned)
        continue;
      if (!pick.branch) {
        Assignment x(f_.num_vars());
        for (std::size_t v = 0; v < f_.num_vars(); ++v)
          x.set(v, value_[v] == 1);
        if (count_violated(f_, x) != 0)
          throw std::logic_error("DPLL produced a non-satisfying witness");
        result.status = ExactStatus::Sat;
        result.witness = std::move(x);
        result.decisions = decisions_;
        return result;
      }
      if (decisions_ >= budget) {
        result.status = ExactStatus::BudgetExceeded;
        result.decisions = decisions_;
        return result;
      }
      ++decisions_;
      stack_.push_back({trail_.size(), *pick.branch, false});
      assign(*pick.branch);
    }
  }

private:
  static constexpr std::int8_t kUnassigned = -1;

  struct Decision {
    std::size_t trail_pos;
    Literal lit;
    bool flipped;
  };

  struct Choice {
    bool pure_assigned = false;
    std::optional<Literal> branch;
  };

  std::span<const std::uint32_t> occ(const Literal &lit) const {
    return lit.negated ? f_.negative_occurrences(lit.var) : f_.positive_occurrences(lit.var);
  }

  void assign(const Literal &lit) {
    value_[lit.var] = lit.negated ? 0 : 1;
    trail_.push_back(lit);
    for (std::uint32_t j : occ(lit))
      ++sat_count_[j];
    for (std::uint32_t j : occ(Literal{lit.var, !lit.negated})) {
      ++false_count_[j];
      if (sat_count_[j] == 0 && false_count_[j] + 1 >= f_.clause(j).size())
        queue_.push_back(j);
    }
  }

  void unassign_to(std::size_t trail_pos) {
    while (trail_.size() > trail_pos) {
      const Literal lit = trail_.back();
      trail_.pop_back();
      for (std::uint32_t j : occ(lit))
        --sat_count_[j];
      for (std::uint32_t j : occ(Literal{lit.var, !lit.negated}))
        --false_count_[j];
      value_[lit.var] = kUnassigned;
    }
    queue_.clear();
  }

  // false on conflict
  bool propagate() {
    while (!queue_.empty()) {
      const std::uint32_t j = queue_.back();
      queue_.pop_back();
      if (sat_count_[j] > 0)
        continue;
      const Clause &c = f_.clause(j);
      if (false_count_[j] == c.size()) {
        queue_.clear();
        return false;
      }
      for (const Literal &lit : c)
        if (value_[lit.var] == kUnassigned) {
          assign(lit);
          break;
        }
    }
    return true;
  }

  bool backtrack() {
    while (!stack_.empty()) {
      Decision d = stack_.back();
      stack_.pop_back();
      unassign_to(d.trail_pos);
      if (!d.flipped) {
        const Literal other{d.lit.var, !d.lit.negated};
        stack_.push_back({d.trail_pos, other, true});
        assign(other);
        return true;
      }
    }
    return false;
  }

  Choice choose() {
    pos_.assign(f_.num_vars(), 0);
    neg_.assign(f_.num_vars(), 0);
    for (std::size_t j = 0; j < f_.num_clauses(); ++j) {
      if (sat_count_[j] > 0)
        continue;
      for (const Literal &lit : f_.clause(j))
        if (value_[lit.var] == kUnassigned)
          ++(lit.negated ? neg_ : pos_)[lit.var];
    }
    Choice choice;
    std::uint32_t best = 0;
    for (Var v = 0; v < f_.num_vars(); ++v) {
      if (value_[v] != kUnassigned)
        continue;
      const std::uint32_t p = pos_[v];
      const std::uint32_t n = neg_[v];
      if ((p == 0) != (n == 0)) {
        assign(Literal{v, p == 0});
        choice.pure_assigned = true;
        continue;
      }
      if (!choice.pure_assigned && p + n > best) {
        best = p + n;
        choice.branch = Literal{v, n > p};
      }
    }
    if (choice.pure_assigned)
      choice.branch.reset();
    return choice;
  }

  const Formula &f_;
  std::vector<std::int8_t> value_;
  std::vector<std::uint32_t> sat_count_;
  std::vector<std::uint32_t> false_count_;
  std::vector<Literal> trail_;
  std::vector<Decision> stack_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::uint32_t> pos_, neg_;
  std::uint64_t decisions_ = 0;
};

} // namespace

ExactResult solve_exact(const Formula &formula, std::uint64_t budget) { return Dpll(formula).run(budget); }

MinViolation min_violation_set(const Formula &formula) {
  const std::size_t n = formula.num_vars();
  if (n > kMaxExhaustiveVars)
    throw std::invalid_argument("exhaustive search supports n <= " + std::to_string(kMaxExhaustiveVars) + ", got " +
                                std::to_string(n));
  MinViolation out;
  out.min_violated = SIZE_MAX;
  ViolationTracker tracker(formula, Assignment(n));
  const std::uint64_t total = std::uint64_t{1} << n;
  // Gray-code order: consecutive assignments differ in one bit.
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i > 0)
      tracker.flip(static_cast<Var>(__builtin_ctzll(i)));
    const std::size_t v = tracker.num_violated();
    if (v < out.min_violated) {
      out.min_violated = v;
      out.argmin.clear();
    }
    if (v == out.min_violated)
      out.argmin.push_back(tracker.assignment());
  }
  std::sort(out.argmin.begin(), out.argmin.end());
  return out;
}

} // namespace oraclesat
