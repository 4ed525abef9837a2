#include "oraclesat/bench.hpp"

#include "oraclesat/generator.hpp"
#include "oraclesat/oracle.hpp"
#include "oraclesat/rng.hpp"
#include "oraclesat/text_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace oraclesat {

namespace fs = std::filesystem;

VariantSpec parse_variant(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("variant '" + std::string(text) + "' must look like <mt|walksat>:<uniform|hybrid|boosted>");
  return VariantSpec{parse_solver(trim(text.substr(0, colon))), parse_mode(trim(text.substr(colon + 1)))};
}

std::string to_string(const VariantSpec &v) {
  return std::string(to_string(v.solver)) + ":" + std::string(to_string(v.mode));
}

std::vector<VariantSpec> parse_variant_list(std::string_view comma_separated) {
  std::vector<VariantSpec> out;
  for (const auto &item : split_char(comma_separated, ',')) {
    if (trim(item).empty())
      continue;
    auto v = parse_variant(trim(item));
    if (std::find(out.begin(), out.end(), v) != out.end())
      throw std::invalid_argument("variant '" + to_string(v) + "' listed twice");
    out.push_back(v);
  }
  if (out.empty())
    throw std::invalid_argument("no variants given");
  return out;
}

std::vector<std::uint64_t> step_grid(std::uint64_t max_steps) {
  std::vector<std::uint64_t> grid{0};
  for (std::uint64_t decade = 1; decade <= max_steps; decade *= 10) {
    for (std::uint64_t f : {1, 2, 5}) {
      const std::uint64_t s = decade * f;
      if (s <= max_steps)
        grid.push_back(s);
    }
    if (decade > UINT64_MAX / 10)
      break;
  }
  if (grid.back() != max_steps)
    grid.push_back(max_steps);
  return grid;
}

namespace {

auto row_key(const RunRow &r) { return std::tuple(r.instance_id, r.variant, r.mode, r.run_index); }

struct Instance {
  ManifestRow row;
  std::string path;
  Formula formula;
  std::unique_ptr<ProductOracle> oracle;
};

} // namespace

BenchResult run_benchmark(const BenchSpec &spec) {
  if (spec.runs_per_instance < 1)
    throw std::invalid_argument("runs_per_instance must be >= 1");
  if (spec.max_steps < 1)
    throw std::invalid_argument("max_steps must be >= 1");
  if (spec.variants.empty())
    throw std::invalid_argument("no variants to run");

  const auto manifest = read_manifest_file(spec.manifest_path);
  if (manifest.empty())
    throw std::runtime_error(spec.manifest_path + ": manifest lists no instances");
  const fs::path base = fs::path(spec.manifest_path).parent_path();
  const bool need_oracles = std::any_of(spec.variants.begin(), spec.variants.end(),
                                        [](const VariantSpec &v) { return v.mode != Mode::Uniform; });
  if (need_oracles && !spec.oracle_dir)
    throw std::invalid_argument("hybrid and boosted variants need an oracle directory");

  std::vector<Instance> instances;
  std::vector<std::string> failures;
  for (const auto &row : manifest) {
    Instance inst;
    inst.row = row;
    inst.path = (base / (row.instance_id + ".cnf")).string();
    try {
      inst.formula = read_dimacs_file(inst.path);
    } catch (const std::exception &e) {
      failures.push_back(e.what());
      continue;
    }
    if (need_oracles) {
      const std::string opath = (fs::path(*spec.oracle_dir) / (row.instance_id + ".oracle")).string();
      if (!fs::exists(opath)) {
        failures.push_back("missing oracle file " + opath);
        continue;
      }
      try {
        inst.oracle = std::make_unique<ProductOracle>(read_oracle_file(opath));
        check_compatible(*inst.oracle, inst.formula);
      } catch (const std::exception &e) {
        failures.push_back(opath + ": " + e.what());
        continue;
      }
    }
    instances.push_back(std::move(inst));
  }
  if (!failures.empty()) {
    std::string msg = "benchmark inputs rejected (" + std::to_string(failures.size()) + "):";
    for (const auto &f : failures)
      msg += "\n  " + f;
    throw std::runtime_error(msg);
  }

  const std::size_t per_instance = spec.variants.size() * spec.runs_per_instance;
  const std::size_t jobs = instances.size() * per_instance;
  const auto grid = spec.trace ? step_grid(spec.max_steps) : std::vector<std::uint64_t>{};
  std::vector<RunRow> rows(jobs);
  std::vector<std::vector<std::uint32_t>> traces(spec.trace ? jobs : 0);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs)
        return;
      const Instance &inst = instances[job / per_instance];
      const VariantSpec &variant = spec.variants[(job % per_instance) / spec.runs_per_instance];
      const std::size_t run = job % spec.runs_per_instance;
      try {
        RunConfig cfg;
        cfg.max_steps = spec.max_steps;
        cfg.variant = variant.solver;
        cfg.mode = variant.mode;
        cfg.checkpoints = grid;
        const std::uint64_t seed = derive_run_seed(spec.master_seed, inst.row.instance_id, run);
        RngStream rng(seed);
        RunRecord rec = run_variant(inst.formula, inst.oracle.get(), cfg, rng);
        rows[job] = RunRow{inst.row.instance_id, inst.path, inst.formula.num_vars(), inst.formula.num_clauses(),
                           inst.row.alpha, variant.solver, variant.mode, run, seed, rec.steps, rec.solved};
        if (spec.trace)
          traces[job] = std::move(rec.checkpoint_violations);
      } catch (const std::exception &e) {
        std::lock_guard lock(error_mutex);
        if (first_error.empty())
          first_error = inst.row.instance_id + ": " + e.what();
        next.store(jobs);
      }
    }
  };
  std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(jobs, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  if (!first_error.empty())
    throw std::runtime_error(first_error);

  BenchResult result;
  std::vector<std::size_t> order(jobs);
  for (std::size_t i = 0; i < jobs; ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row_key(rows[a]) < row_key(rows[b]); });
  result.rows.reserve(jobs);
  for (std::size_t i : order) {
    if (spec.trace)
      for (std::size_t c = 0; c < grid.size(); ++c)
        result.trace.push_back(
            TracePoint{rows[i].instance_id, rows[i].variant, rows[i].mode, rows[i].run_index, grid[c], traces[i][c]});
    result.rows.push_back(std::move(rows[i]));
  }
  return result;
}

static const char *kRunHeader = "instance_id,path,n,m,alpha,variant,mode,run_index,seed,steps,solved";
static const char *kTraceHeader = "instance_id,variant,mode,run_index,step,violations";

std::string write_run_table(const std::vector<RunRow> &rows) {
  std::string out = std::string(kRunHeader) + "\n";
  for (const auto &r : rows)
    out += r.instance_id + "," + r.path + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," +
           format_double(r.alpha) + "," + std::string(to_string(r.variant)) + "," + std::string(to_string(r.mode)) + "," +
           std::to_string(r.run_index) + "," + std::to_string(r.seed) + "," + std::to_string(r.steps) + "," +
           (r.solved ? "1" : "0") + "\n";
  return out;
}

namespace {

template <class F>
void for_each_csv_row(std::string_view text, const char *header, std::size_t columns, F &&f) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos)
      eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty())
      continue;
    if (!seen_header) {
      if (line != header)
        throw std::runtime_error("line 1: expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    auto cells = split_char(line, ',');
    if (cells.size() != columns)
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
    try {
      f(cells);
    } catch (const std::exception &e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!seen_header)
    throw std::runtime_error("table is empty");
}

bool parse_flag(const std::string &s) {
  if (s == "1")
    return true;
  if (s == "0")
    return false;
  throw std::invalid_argument("expected 0 or 1, got '" + s + "'");
}

} // namespace

std::vector<RunRow> read_run_table(std::string_view text) {
  std::vector<RunRow> rows;
  for_each_csv_row(text, kRunHeader, 11, [&](const std::vector<std::string> &c) {
    RunRow r;
    r.instance_id = c[0];
    r.path = c[1];
    r.n = static_cast<std::size_t>(parse_int(c[2]));
    r.m = static_cast<std::size_t>(parse_int(c[3]));
    r.alpha = parse_double(c[4]);
    r.variant = parse_solver(c[5]);
    r.mode = parse_mode(c[6]);
    r.run_index = static_cast<std::size_t>(parse_int(c[7]));
    r.seed = std::stoull(c[8]);
    r.steps = std::stoull(c[9]);
    r.solved = parse_flag(c[10]);
    rows.push_back(std::move(r));
  });
  return rows;
}

std::string write_trace_table(const std::vector<TracePoint> &trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto &t : trace)
    out += t.instance_id + "," + std::string(to_string(t.variant)) + "," + std::string(to_string(t.mode)) + "," +
           std::to_string(t.run_index) + "," + std::to_string(t.step) + "," + std::to_string(t.violations) + "\n";
  return out;
}

std::vector<TracePoint> read_trace_table(std::string_view text) {
  std::vector<TracePoint> trace;
  for_each_csv_row(text, kTraceHeader, 6, [&](const std::vector<std::string> &c) {
    trace.push_back(TracePoint{c[0], parse_solver(c[1]), parse_mode(c[2]), static_cast<std::size_t>(parse_int(c[3])),
                               std::stoull(c[4]), static_cast<std::uint32_t>(parse_int(c[5]))});
  });
  return trace;
}

double median(std::vector<double> values) {
  if (values.empty())
    throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1)
    return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

struct InstanceRuns {
  double alpha = 0;
  std::vector<double> steps;
  bool any_solved = false;
};

double censored(const RunRow &r, std::uint64_t max_steps) {
  return r.solved ? static_cast<double>(r.steps) : static_cast<double>(max_steps);
}

} // namespace

MetricsReport compute_metrics(const std::vector<RunRow> &rows, const MetricsOptions &options,
                              const std::vector<TracePoint> *trace) {
  if (rows.empty())
    throw std::invalid_argument("cannot compute metrics of an empty run table");
  MetricsReport report;
  report.options = options;
  if (report.options.step_grid.empty())
    report.options.step_grid = step_grid(options.max_steps);
  const auto &grid = report.options.step_grid;

  std::vector<VariantSpec> order;
  for (const auto &r : rows) {
    VariantSpec v{r.variant, r.mode};
    if (std::find(order.begin(), order.end(), v) == order.end())
      order.push_back(v);
  }

  for (const auto &variant : order) {
    VariantMetrics vm;
    vm.variant = variant;
    // Ordered by instance_id for reproducible summation.
    std::map<std::string, InstanceRuns> by_instance;
    std::vector<double> run_steps;
    double step_sum = 0;
    for (const auto &r : rows) {
      if (r.variant != variant.solver || r.mode != variant.mode)
        continue;
      auto &inst = by_instance[r.instance_id];
      inst.alpha = r.alpha;
      const double s = censored(r, options.max_steps);
      inst.steps.push_back(s);
      inst.any_solved = inst.any_solved || r.solved;
      run_steps.push_back(s);
    }
    vm.instances = by_instance.size();
    vm.runs = run_steps.size();
    for (double s : run_steps)
      step_sum += s;
    vm.mean_steps = step_sum / static_cast<double>(run_steps.size());

    std::vector<double> medians;
    std::size_t solved = 0;
    double alpha_sum = 0;
    std::map<double, std::vector<const InstanceRuns *>> bins;
    for (const auto &[id, inst] : by_instance) {
      medians.push_back(median(inst.steps));
      if (inst.any_solved) {
        ++solved;
        alpha_sum += inst.alpha;
      }
      const double key = options.alpha_bin_width > 0
                             ? static_cast<double>(std::llround(inst.alpha / options.alpha_bin_width)) * options.alpha_bin_width
                             : inst.alpha;
      bins[key].push_back(&inst);
    }
    vm.median_of_medians = median(medians);
    vm.fraction_solved = static_cast<double>(solved) / static_cast<double>(vm.instances);
    if (solved > 0)
      vm.mean_alpha_solved = alpha_sum / static_cast<double>(solved);

    for (const auto &[alpha, members] : bins) {
      AlphaBin bin;
      bin.alpha = alpha;
      bin.instances = members.size();
      double sum = 0;
      std::size_t count = 0;
      std::size_t bin_solved = 0;
      std::vector<double> bin_medians;
      for (const InstanceRuns *inst : members) {
        for (double s : inst->steps) {
          sum += s;
          ++count;
        }
        bin_medians.push_back(median(inst->steps));
        bin_solved += inst->any_solved ? 1 : 0;
      }
      bin.mean_steps = sum / static_cast<double>(count);
      bin.median_steps = median(bin_medians);
      bin.solve_rate = static_cast<double>(bin_solved) / static_cast<double>(members.size());
      vm.per_alpha.push_back(bin);
    }

    std::vector<double> violation_sum(grid.size(), 0.0);
    std::vector<std::size_t> violation_count(grid.size(), 0);
    if (trace) {
      std::map<std::uint64_t, std::size_t> index;
      for (std::size_t i = 0; i < grid.size(); ++i)
        index[grid[i]] = i;
      for (const auto &t : *trace) {
        if (t.variant != variant.solver || t.mode != variant.mode)
          continue;
        auto it = index.find(t.step);
        if (it == index.end())
          continue;
        violation_sum[it->second] += t.violations;
        ++violation_count[it->second];
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      StepPoint p;
      p.step = grid[i];
      std::size_t done = 0;
      for (const auto &r : rows)
        if (r.variant == variant.solver && r.mode == variant.mode && r.solved && r.steps <= grid[i])
          ++done;
      p.solved_fraction = static_cast<double>(done) / static_cast<double>(vm.runs);
      if (violation_count[i] > 0)
        p.mean_violations = violation_sum[i] / static_cast<double>(violation_count[i]);
      vm.per_step.push_back(p);
    }
    report.variants.push_back(std::move(vm));
  }
  return report;
}

namespace {

nlohmann::ordered_json metrics_json(const MetricsReport &report) {
  nlohmann::ordered_json j;
  j["conventions"] = {
      {"mean_steps", "censored mean over all (instance, run); unsolved runs count max_steps"},
      {"median_of_medians", "median over instances of the per-instance median over runs"},
      {"fraction_solved", "instance solved if any run solved"},
      {"mean_alpha_solved", "mean alpha over solved instances"},
      {"median_even_count", "mean of the two middle values"},
  };
  j["max_steps"] = report.options.max_steps;
  j["alpha_bin_width"] = report.options.alpha_bin_width;
  auto &vars = j["variants"] = nlohmann::ordered_json::array();
  for (const auto &vm : report.variants) {
    nlohmann::ordered_json v;
    v["variant"] = to_string(vm.variant.solver);
    v["mode"] = to_string(vm.variant.mode);
    v["instances"] = vm.instances;
    v["runs"] = vm.runs;
    v["mean_steps"] = vm.mean_steps;
    v["median_of_medians"] = vm.median_of_medians;
    v["fraction_solved"] = vm.fraction_solved;
    v["mean_alpha_solved"] = vm.mean_alpha_solved ? nlohmann::ordered_json(*vm.mean_alpha_solved) : nullptr;
    vars.push_back(std::move(v));
  }
  return j;
}

} // namespace

std::string metrics_to_json(const MetricsReport &report) { return metrics_json(report).dump(2) + "\n"; }

std::string alpha_curves_csv(const MetricsReport &report) {
  std::string out = "variant,mode,alpha,instances,mean_steps,median_steps,solve_rate\n";
  for (const auto &vm : report.variants)
    for (const auto &b : vm.per_alpha)
      out += std::string(to_string(vm.variant.solver)) + "," + std::string(to_string(vm.variant.mode)) + "," +
             format_double(b.alpha) + "," + std::to_string(b.instances) + "," + format_double(b.mean_steps) + "," +
             format_double(b.median_steps) + "," + format_double(b.solve_rate) + "\n";
  return out;
}

std::string step_curves_csv(const MetricsReport &report) {
  std::string out = "variant,mode,step,mean_violations,solved_fraction\n";
  for (const auto &vm : report.variants)
    for (const auto &p : vm.per_step)
      out += std::string(to_string(vm.variant.solver)) + "," + std::string(to_string(vm.variant.mode)) + "," +
             std::to_string(p.step) + "," + (p.mean_violations ? format_double(*p.mean_violations) : std::string()) + "," +
             format_double(p.solved_fraction) + "\n";
  return out;
}

std::vector<ScatterPoint> scatter(const std::vector<RunRow> &rows, const VariantSpec &a, const VariantSpec &b,
                                  std::uint64_t max_steps) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> runs;
  std::map<std::string, double> alpha;
  for (const auto &r : rows) {
    const VariantSpec v{r.variant, r.mode};
    if (v == a)
      runs[r.instance_id].first.push_back(censored(r, max_steps));
    else if (v == b)
      runs[r.instance_id].second.push_back(censored(r, max_steps));
    else
      continue;
    alpha[r.instance_id] = r.alpha;
  }
  std::vector<ScatterPoint> out;
  for (const auto &[id, pair] : runs)
    if (!pair.first.empty() && !pair.second.empty())
      out.push_back(ScatterPoint{id, alpha[id], median(pair.first), median(pair.second)});
  return out;
}

std::string scatter_csv(const std::vector<ScatterPoint> &points) {
  std::string out = "instance_id,alpha,median_steps_a,median_steps_b\n";
  for (const auto &p : points)
    out += p.instance_id + "," + format_double(p.alpha) + "," + format_double(p.median_a) + "," +
           format_double(p.median_b) + "\n";
  return out;
}

std::vector<std::string> write_bench_outputs(const std::string &out_dir, const BenchSpec &spec,
                                             const BenchResult &result) {
  fs::create_directories(out_dir);
  MetricsOptions options;
  options.max_steps = spec.max_steps;
  options.alpha_bin_width = spec.alpha_bin_width;
  const auto report = compute_metrics(result.rows, options, spec.trace ? &result.trace : nullptr);

  std::vector<std::string> written;
  auto emit = [&](const std::string &name, const std::string &contents) {
    write_text_file_atomic((fs::path(out_dir) / name).string(), contents);
    written.push_back(name);
  };
  emit("runs.csv", write_run_table(result.rows));
  if (spec.trace)
    emit("traces.csv", write_trace_table(result.trace));

  auto j = metrics_json(report);
  nlohmann::ordered_json bench;
  bench["manifest"] = spec.manifest_path;
  nlohmann::ordered_json variants = nlohmann::ordered_json::array();
  for (const auto &v : spec.variants)
    variants.push_back(to_string(v));
  bench["variants"] = variants;
  bench["runs_per_instance"] = spec.runs_per_instance;
  bench["master_seed"] = spec.master_seed;
  j["benchmark"] = bench;
  emit("metrics.json", j.dump(2) + "\n");
  emit("alpha_curves.csv", alpha_curves_csv(report));
  emit("step_curves.csv", step_curves_csv(report));

  for (Solver s : {Solver::MT, Solver::WalkSAT}) {
    const VariantSpec uni{s, Mode::Uniform};
    const VariantSpec boost{s, Mode::Boosted};
    if (std::find(spec.variants.begin(), spec.variants.end(), uni) != spec.variants.end() &&
        std::find(spec.variants.begin(), spec.variants.end(), boost) != spec.variants.end())
      emit("scatter_" + std::string(to_string(s)) + ".csv", scatter_csv(scatter(result.rows, uni, boost, spec.max_steps)));
  }
  return written;
}

} // namespace oraclesat
