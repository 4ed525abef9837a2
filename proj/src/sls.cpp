#include "oraclesat/sls.hpp"

#include <stdexcept>

namespace oraclesat {

std::string_view to_string(Solver s) { return s == Solver::MT ? "mt" : "walksat"; }

std::string_view to_string(Mode m) {
  switch (m) {
  case Mode::Uniform:
    return "uniform";
  case Mode::Hybrid:
    return "hybrid";
  case Mode::Boosted:
    return "boosted";
  }
  return "?";
}

Solver parse_solver(std::string_view text) {
  if (text == "mt")
    return Solver::MT;
  if (text == "walksat")
    return Solver::WalkSAT;
  throw std::invalid_argument("unknown solver variant '" + std::string(text) + "' (expected mt or walksat)");
}

Mode parse_mode(std::string_view text) {
  if (text == "uniform")
    return Mode::Uniform;
  if (text == "hybrid")
    return Mode::Hybrid;
  if (text == "boosted")
    return Mode::Boosted;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "' (expected uniform, hybrid or boosted)");
}

ViolationTracker::ViolationTracker(const Formula &formula, Assignment x)
    : formula_(formula), x_(std::move(x)), true_count_(formula.num_clauses(), 0),
      position_(formula.num_clauses(), kAbsent) {
  for (std::size_t j = 0; j < formula.num_clauses(); ++j) {
    std::uint32_t count = 0;
    for (const Literal &lit : formula.clause(j))
      count += literal_true(lit, x_) ? 1 : 0;
    true_count_[j] = count;
    if (count == 0)
      add(static_cast<std::uint32_t>(j));
  }
}

void ViolationTracker::add(std::uint32_t clause) {
  position_[clause] = static_cast<std::uint32_t>(violated_.size());
  violated_.push_back(clause);
}

void ViolationTracker::remove(std::uint32_t clause) {
  const std::uint32_t pos = position_[clause];
  const std::uint32_t last = violated_.back();
  violated_[pos] = last;
  position_[last] = pos;
  violated_.pop_back();
  position_[clause] = kAbsent;
}

void ViolationTracker::flip(Var v) {
  x_.flip(v);
  const bool now_true = x_[v] != 0;
  auto gained = now_true ? formula_.positive_occurrences(v) : formula_.negative_occurrences(v);
  auto lost = now_true ? formula_.negative_occurrences(v) : formula_.positive_occurrences(v);
  for (std::uint32_t j : gained)
    if (true_count_[j]++ == 0)
      remove(j);
  for (std::uint32_t j : lost)
    if (--true_count_[j] == 0)
      add(j);
}

namespace {

class Recorder {
public:
  Recorder(const RunConfig &cfg, RunRecord &rec) : cfg_(cfg), rec_(rec) {
    if (cfg.trace_violations)
      rec.violation_trace.emplace();
    rec.checkpoint_violations.reserve(cfg.checkpoints.size());
  }

  void record(std::uint64_t step, std::size_t violations) {
    if (rec_.violation_trace)
      rec_.violation_trace->push_back(static_cast<std::uint32_t>(violations));
    while (next_ < cfg_.checkpoints.size() && cfg_.checkpoints[next_] == step) {
      rec_.checkpoint_violations.push_back(static_cast<std::uint32_t>(violations));
      ++next_;
    }
  }

  std::uint64_t next_checkpoint() const { return next_ < cfg_.checkpoints.size() ? cfg_.checkpoints[next_] : UINT64_MAX; }

  // Checkpoints past the end of the run keep the final violation count.
  void finish(std::size_t violations) {
    while (next_ < cfg_.checkpoints.size()) {
      rec_.checkpoint_violations.push_back(static_cast<std::uint32_t>(violations));
      ++next_;
    }
  }

private:
  const RunConfig &cfg_;
  RunRecord &rec_;
  std::size_t next_ = 0;
};

void check_run_inputs(const Formula &formula, const ProductOracle &oracle, const RunConfig &cfg) {
  if (oracle.num_vars() != formula.num_vars())
    throw std::invalid_argument("oracle has n = " + std::to_string(oracle.num_vars()) + " but formula has n = " +
                                std::to_string(formula.num_vars()));
  if (cfg.max_steps < 1)
    throw std::invalid_argument("max_steps must be >= 1");
  for (std::size_t i = 1; i < cfg.checkpoints.size(); ++i)
    if (cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
      throw std::invalid_argument("checkpoints must be strictly ascending");
}

template <class Step>
RunRecord run_loop(const Formula &formula, const ProductOracle &init_oracle, const RunConfig &cfg, RngStream &rng,
                   Step &&step) {
  RunRecord rec;
  Recorder recorder(cfg, rec);
  ViolationTracker tracker(formula, sample(init_oracle, rng));
  std::uint64_t steps = 0;
  const bool tracing = cfg.trace_violations;
  recorder.record(0, tracker.num_violated());
  std::uint64_t next_cp = recorder.next_checkpoint();
  while (tracker.num_violated() > 0 && steps < cfg.max_steps) {
    const std::uint32_t clause = tracker.violated_at(rng.below(tracker.num_violated()));
    step(tracker, clause, rec);
    ++steps;
    if (tracing || steps == next_cp) {
      recorder.record(steps, tracker.num_violated());
      next_cp = recorder.next_checkpoint();
    }
  }
  recorder.finish(tracker.num_violated());
  rec.solved = tracker.num_violated() == 0;
  rec.steps = rec.solved ? steps : cfg.max_steps;
  rec.final_assignment = tracker.assignment();
  return rec;
}

const ProductOracle &pick(Mode mode, bool for_init, const ProductOracle &oracle, const ProductOracle &uniform) {
  if (mode == Mode::Boosted)
    return oracle;
  if (mode == Mode::Hybrid && for_init)
    return oracle;
  return uniform;
}

} // namespace

RunRecord run_mt(const Formula &formula, const ProductOracle &oracle, const RunConfig &cfg, RngStream &rng) {
  check_run_inputs(formula, oracle, cfg);
  const ProductOracle uniform(std::vector<double>(formula.num_vars(), 0.5));
  const ProductOracle &init = pick(cfg.mode, true, oracle, uniform);
  const ProductOracle &resample = pick(cfg.mode, false, oracle, uniform);
  return run_loop(formula, init, cfg, rng, [&](ViolationTracker &t, std::uint32_t clause, RunRecord &) {
    // x' ~ O restricted to V(c); coordinates outside V(c) are never read.
    for (const Literal &lit : formula.clause(clause)) {
      const bool bit = rng.bernoulli(resample.w(lit.var));
      if (bit != (t.assignment()[lit.var] != 0))
        t.flip(lit.var);
    }
  });
}

RunRecord run_walksat(const Formula &formula, const ProductOracle &oracle, const RunConfig &cfg, RngStream &rng) {
  check_run_inputs(formula, oracle, cfg);
  const ProductOracle uniform(std::vector<double>(formula.num_vars(), 0.5));
  const ProductOracle &init = pick(cfg.mode, true, oracle, uniform);
  const ProductOracle &flips = pick(cfg.mode, false, oracle, uniform);
  std::vector<double> weight;
  return run_loop(formula, init, cfg, rng, [&](ViolationTracker &t, std::uint32_t clause, RunRecord &rec) {
    const Clause &c = formula.clause(clause);
    weight.resize(c.size());
    double total = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      weight[i] = flip_marginal(flips, t.assignment(), c[i].var);
      total += weight[i];
    }
    std::size_t chosen = 0;
    if (total <= 0) {
      // 0/0 in the selection rule: fall back to a uniform pick.
      ++rec.degenerate_picks;
      chosen = static_cast<std::size_t>(rng.below(c.size()));
    } else {
      const double u = rng.next_double() * total;
      double acc = 0;
      chosen = c.size();
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (weight[i] > 0)
          last_positive = i;
        acc += weight[i];
        if (u < acc && weight[i] > 0) {
          chosen = i;
          break;
        }
      }
      if (chosen == c.size())
        chosen = last_positive;
    }
    t.flip(c[chosen].var);
  });
}

RunRecord run_variant(const Formula &formula, const ProductOracle *oracle, const RunConfig &cfg, RngStream &rng) {
  if (cfg.mode != Mode::Uniform && oracle == nullptr)
    throw std::invalid_argument(std::string("mode ") + std::string(to_string(cfg.mode)) + " requires an oracle");
  const ProductOracle uniform(std::vector<double>(formula.num_vars(), 0.5));
  const ProductOracle &o = cfg.mode == Mode::Uniform ? uniform : *oracle;
  return cfg.variant == Solver::MT ? run_mt(formula, o, cfg, rng) : run_walksat(formula, o, cfg, rng);
}

} // namespace oraclesat
