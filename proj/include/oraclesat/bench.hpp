#pragma once

#include "oraclesat/sls.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

struct VariantSpec {
  Solver solver = Solver::MT;
  Mode mode = Mode::Uniform;

  friend bool operator==(const VariantSpec &, const VariantSpec &) = default;
};

// "mt:uniform", "walksat:boosted", ...
VariantSpec parse_variant(std::string_view text);
std::string to_string(const VariantSpec &v);
std::vector<VariantSpec> parse_variant_list(std::string_view comma_separated);

struct BenchSpec {
  std::string manifest_path;
  std::vector<VariantSpec> variants;
  std::size_t runs_per_instance = 5;
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t master_seed = 0;
  std::optional<std::string> oracle_dir; // <dir>/<instance_id>.oracle
  double alpha_bin_width = 0;            // 0: one bin per distinct alpha
  bool trace = false;                    // record phi(x) at the step grid
  std::size_t threads = 0;               // 0: hardware concurrency
};

struct RunRow {
  std::string instance_id;
  std::string path;
  std::size_t n = 0;
  std::size_t m = 0;
  double alpha = 0;
  Solver variant = Solver::MT;
  Mode mode = Mode::Uniform;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  bool solved = false;
};

struct TracePoint {
  std::string instance_id;
  Solver variant = Solver::MT;
  Mode mode = Mode::Uniform;
  std::size_t run_index = 0;
  std::uint64_t step = 0;
  std::uint32_t violations = 0;
};

struct BenchResult {
  std::vector<RunRow> rows;
  std::vector<TracePoint> trace;
};

// 0, 1, 2, 5, 10, 20, 50, ... up to and including max_steps.
std::vector<std::uint64_t> step_grid(std::uint64_t max_steps);

// One row per (instance, variant, run), sorted; deterministic under master_seed.
BenchResult run_benchmark(const BenchSpec &spec);

std::string write_run_table(const std::vector<RunRow> &rows);
std::vector<RunRow> read_run_table(std::string_view text);
std::string write_trace_table(const std::vector<TracePoint> &trace);
std::vector<TracePoint> read_trace_table(std::string_view text);

struct AlphaBin {
  double alpha = 0;
  std::size_t instances = 0;
  double mean_steps = 0;
  double median_steps = 0; // median over instances of per-instance run medians
  double solve_rate = 0;   // any-run rule
};

struct StepPoint {
  std::uint64_t step = 0;
  std::optional<double> mean_violations; // needs a trace
  double solved_fraction = 0;            // runs finished within step
};

struct VariantMetrics {
  VariantSpec variant;
  std::size_t instances = 0;
  std::size_t runs = 0;
  double mean_steps = 0;       // censored: unsolved runs count max_steps
  double median_of_medians = 0;
  double fraction_solved = 0;  // instance solved if any run solved
  std::optional<double> mean_alpha_solved;
  std::vector<AlphaBin> per_alpha;
  std::vector<StepPoint> per_step;
};

struct MetricsOptions {
  std::uint64_t max_steps = 1'000'000;
  double alpha_bin_width = 0;
  std::vector<std::uint64_t> step_grid; // empty: step_grid(max_steps)
};

struct MetricsReport {
  MetricsOptions options;
  std::vector<VariantMetrics> variants; // in order of first appearance
};

// Median of a nonempty sample; even counts average the two middle values.
double median(std::vector<double> values);

MetricsReport compute_metrics(const std::vector<RunRow> &rows, const MetricsOptions &options,
                              const std::vector<TracePoint> *trace = nullptr);

std::string metrics_to_json(const MetricsReport &report);
std::string alpha_curves_csv(const MetricsReport &report);
std::string step_curves_csv(const MetricsReport &report);

struct ScatterPoint {
  std::string instance_id;
  double alpha = 0;
  double median_a = 0;
  double median_b = 0;
};

// Per-instance median steps of two variants joined on instance_id.
std::vector<ScatterPoint> scatter(const std::vector<RunRow> &rows, const VariantSpec &a, const VariantSpec &b,
                                  std::uint64_t max_steps);
std::string scatter_csv(const std::vector<ScatterPoint> &points);

// Writes runs.csv, metrics.json, alpha_curves.csv, step_curves.csv, traces.csv
// (when traced) and scatter_<solver>.csv for uniform/boosted pairs. Returns
// the file names written.
std::vector<std::string> write_bench_outputs(const std::string &out_dir, const BenchSpec &spec,
                                             const BenchResult &result);

} // namespace oraclesat
