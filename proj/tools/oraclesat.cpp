// oraclesat: command-line driver for generation, oracle-based local search,
// LLL analysis, loss evaluation, benchmarking and exact solving.

#include "oraclesat/bench.hpp"
#include "oraclesat/cnf.hpp"
#include "oraclesat/exact.hpp"
#include "oraclesat/generator.hpp"
#include "oraclesat/lll.hpp"
#include "oraclesat/oracle.hpp"
#include "oraclesat/sls.hpp"
#include "oraclesat/text_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace oraclesat;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitBudget = 30;
constexpr int kExitError = 1;

struct Globals {
  std::uint64_t seed = 0;
  bool quiet = false;
  bool json = false;
};

// JSON has no infinities; they are written as the strings "inf" / "-inf".
json number(double x) {
  if (std::isfinite(x))
    return x;
  return format_double(x);
}

json numbers(std::span<const double> xs) {
  json a = json::array();
  for (double x : xs)
    a.push_back(number(x));
  return a;
}

double parse_norm_order(const std::string &text) {
  if (text == "inf")
    return kInfNorm;
  const double z = parse_double(text);
  if (!(z >= 1))
    throw CLI::ValidationError("--z", "norm order must be >= 1 or 'inf'");
  return z;
}

std::string instance_id_of(const std::string &cnf_path) { return fs::path(cnf_path).stem().string(); }

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::size_t n = 0;
  std::optional<double> alpha;
  std::optional<std::size_t> m;
  std::size_t k = 3;
  std::size_t count = 1;
  std::optional<std::size_t> max_occurrence;
  std::string out_dir;
  std::string prefix;
  bool classify = false;
  std::uint64_t budget = 10'000'000;
};

int cmd_gen(const GenArgs &a, const Globals &g) {
  GenSpec spec;
  spec.n = a.n;
  spec.k = a.k;
  spec.alpha = a.alpha;
  spec.m = a.m;
  spec.max_occurrence = a.max_occurrence;
  spec.seed = g.seed;
  resolve_num_clauses(spec); // validate before touching the filesystem
  if (a.count == 0)
    throw std::invalid_argument("--count must be >= 1");

  auto batch = generate_batch(spec, a.count, a.prefix);
  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < batch.rows.size(); ++i) {
    if (a.classify) {
      const auto r = solve_exact(batch.formulas[i], a.budget);
      batch.rows[i].sat_status = r.status == ExactStatus::Sat     ? SatStatus::Sat
                                 : r.status == ExactStatus::Unsat ? SatStatus::Unsat
                                                                  : SatStatus::Unknown;
    }
    write_text_file_atomic((fs::path(a.out_dir) / (batch.rows[i].instance_id + ".cnf")).string(),
                           write_dimacs(batch.formulas[i]));
  }

  // Merge into an existing manifest; rows with the same id are replaced.
  const std::string manifest_path = (fs::path(a.out_dir) / "manifest.csv").string();
  std::vector<ManifestRow> rows;
  if (fs::exists(manifest_path))
    rows = read_manifest_file(manifest_path);
  for (auto &row : batch.rows) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ManifestRow &r) { return r.instance_id == row.instance_id; });
    if (it != rows.end())
      *it = row;
    else
      rows.push_back(row);
  }
  write_text_file_atomic(manifest_path, write_manifest(rows));

  if (g.json) {
    json out;
    out["manifest"] = manifest_path;
    out["instances"] = json::array();
    for (const auto &row : batch.rows)
      out["instances"].push_back({{"instance_id", row.instance_id},
                                  {"n", row.n},
                                  {"m", row.m},
                                  {"k", row.k},
                                  {"alpha", row.alpha},
                                  {"seed", row.seed},
                                  {"sat_status", to_string(row.sat_status)}});
    std::cout << out.dump() << "\n";
  } else if (!g.quiet) {
    std::cout << "wrote " << batch.rows.size() << " instance(s) to " << a.out_dir << " (manifest: " << manifest_path
              << ")\n";
  }
  return 0;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string cnf;
  std::string variant = "mt";
  std::string mode = "uniform";
  std::optional<std::string> oracle;
  std::uint64_t max_steps = 1'000'000;
  std::size_t runs = 1;
  bool trace = false;
};

int cmd_solve(const SolveArgs &a, const Globals &g) {
  RunConfig cfg;
  cfg.variant = parse_solver(a.variant);
  cfg.mode = parse_mode(a.mode);
  cfg.max_steps = a.max_steps;
  cfg.trace_violations = a.trace;
  if (cfg.mode != Mode::Uniform && !a.oracle)
    throw CLI::ValidationError("--oracle", "mode " + a.mode + " requires --oracle");
  if (a.runs < 1)
    throw CLI::ValidationError("--runs", "must be >= 1");
  if (a.max_steps < 1)
    throw CLI::ValidationError("--max-steps", "must be >= 1");

  const Formula formula = read_dimacs_file(a.cnf);
  std::optional<ProductOracle> oracle;
  if (a.oracle && cfg.mode != Mode::Uniform) {
    oracle = read_oracle_file(*a.oracle);
    check_compatible(*oracle, formula);
  }
  const std::string id = instance_id_of(a.cnf);
  bool any_solved = false;
  for (std::size_t run = 0; run < a.runs; ++run) {
    const std::uint64_t seed = derive_run_seed(g.seed, id, run);
    RngStream rng(seed);
    const RunRecord rec = run_variant(formula, oracle ? &*oracle : nullptr, cfg, rng);
    any_solved = any_solved || rec.solved;
    json line;
    line["instance_id"] = id;
    line["variant"] = to_string(cfg.variant);
    line["mode"] = to_string(cfg.mode);
    line["run_index"] = run;
    line["seed"] = seed;
    line["steps"] = rec.steps;
    line["solved"] = rec.solved;
    line["final_violations"] = count_violated(formula, rec.final_assignment);
    line["degenerate_picks"] = rec.degenerate_picks;
    line["assignment"] = rec.final_assignment.to_string();
    if (rec.violation_trace)
      line["trace"] = *rec.violation_trace;
    std::cout << line.dump() << "\n";
  }
  return any_solved ? kExitSat : kExitUnsat;
}

// ---------------------------------------------------------------- check-lll

struct MuArgs {
  bool from_oracle = false;
  std::optional<std::string> file;
  bool automatic = false;
  std::optional<double> constant;
};

struct CheckArgs {
  std::string cnf;
  std::optional<std::string> oracle;
  MuArgs mu;
  std::string z = "2";
};

ProductOracle load_oracle_or_uniform(const std::optional<std::string> &path, const Formula &formula) {
  if (!path)
    return ProductOracle(std::vector<double>(formula.num_vars(), 0.5));
  ProductOracle o = read_oracle_file(*path);
  check_compatible(o, formula);
  return o;
}

int cmd_check_lll(const CheckArgs &a, const Globals &g) {
  const double z = parse_norm_order(a.z);
  const int sources = int(a.mu.from_oracle) + int(a.mu.file.has_value()) + int(a.mu.automatic) + int(a.mu.constant.has_value());
  if (sources != 1)
    throw CLI::ValidationError("mu", "give exactly one of --mu-from-oracle, --mu-file, --mu-auto, --mu-const");
  const Formula formula = read_dimacs_file(a.cnf);
  const ProductOracle oracle = load_oracle_or_uniform(a.oracle, formula);
  const DependencyGraph graph = build_dependency_graph(formula);

  json out;
  std::vector<double> mu;
  if (a.mu.from_oracle) {
    if (!oracle.has_mu())
      throw std::invalid_argument("--mu-from-oracle: the oracle file carries no mu section");
    mu.assign(oracle.mu().begin(), oracle.mu().end());
    out["mu_source"] = "oracle";
  } else if (a.mu.file) {
    mu = read_mu_file(*a.mu.file);
    out["mu_source"] = "file";
  } else if (a.mu.constant) {
    if (!(*a.mu.constant >= 0) || !std::isfinite(*a.mu.constant))
      throw CLI::ValidationError("--mu-const", "must be finite and >= 0");
    mu.assign(formula.num_clauses(), *a.mu.constant);
    out["mu_source"] = "constant";
  } else {
    const auto search = find_mu_fixed_point(oracle, formula, graph);
    out["mu_source"] = "fixed_point";
    out["mu_search"] = {{"converged", search.converged},
                        {"iterations", search.iterations},
                        {"strictly_satisfied", search.strictly_satisfied}};
    if (!search.converged) {
      out["mu_search"]["failure"] = search.failure;
      out["satisfied"] = nullptr;
      std::cout << out.dump(g.json ? -1 : 2) << "\n";
      return 0;
    }
    mu = search.mu;
  }
  const LllReport report = check_lll(oracle, mu, formula, graph, z);
  double max_eps = -HUGE_VAL;
  for (double e : report.epsilon)
    max_eps = std::max(max_eps, e);
  out["n"] = formula.num_vars();
  out["m"] = formula.num_clauses();
  out["satisfied"] = report.satisfied;
  out["expected_steps_bound"] = number(report.expected_steps_bound);
  out["z"] = number(report.z);
  out["lll_loss"] = number(report.lll_loss);
  out["max_epsilon"] = formula.num_clauses() ? number(max_eps) : json(nullptr);
  out["dependency_edges"] = graph.num_edges();
  out["violation_probs"] = numbers(report.violation_probs);
  out["epsilon"] = numbers(report.epsilon);
  out["mu"] = numbers(mu);
  std::cout << out.dump(g.json ? -1 : 2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- loss

struct LossArgs {
  std::string cnf;
  std::string oracle;
  std::string samples;
  std::optional<std::string> mu_file;
  double beta = 1;
  std::string z = "2";
  double gamma1 = 1;
  double gamma2 = 1;
};

int cmd_loss(const LossArgs &a, const Globals &g) {
  LossParams params;
  params.beta = a.beta;
  params.z = parse_norm_order(a.z);
  params.gamma_gibbs = a.gamma1;
  params.gamma_lll = a.gamma2;
  if (!(a.beta > 0))
    throw CLI::ValidationError("--beta", "must be > 0");
  if (a.gamma1 < 0 || a.gamma2 < 0)
    throw CLI::ValidationError("--gamma1/--gamma2", "must be >= 0");

  const Formula formula = read_dimacs_file(a.cnf);
  const ProductOracle oracle = read_oracle_file(a.oracle);
  check_compatible(oracle, formula);
  std::vector<double> mu;
  if (a.mu_file)
    mu = read_mu_file(*a.mu_file);
  else if (oracle.has_mu())
    mu.assign(oracle.mu().begin(), oracle.mu().end());
  else
    throw std::invalid_argument("the oracle carries no mu section; pass --mu-file");
  const SampleSet samples = read_samples_file(a.samples, formula);
  const LossBreakdown loss = total_loss(oracle, mu, formula, samples, params);

  json out;
  out["total"] = number(loss.total);
  out["gibbs"] = number(loss.gibbs);
  out["lll"] = number(loss.lll);
  out["gamma1"] = params.gamma_gibbs;
  out["gamma2"] = params.gamma_lll;
  out["beta"] = params.beta;
  out["z"] = number(params.z);
  out["samples"] = samples.size();
  std::cout << out.dump(g.json ? -1 : 2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string manifest;
  std::string variants = "mt:uniform,walksat:uniform";
  std::optional<std::string> oracle_dir;
  std::size_t runs = 5;
  std::uint64_t max_steps = 1'000'000;
  std::string out;
  std::size_t threads = 0;
  double alpha_bin = 0;
  bool trace = false;
};

int cmd_bench(const BenchArgs &a, const Globals &g) {
  BenchSpec spec;
  spec.manifest_path = a.manifest;
  spec.variants = parse_variant_list(a.variants);
  spec.oracle_dir = a.oracle_dir;
  spec.runs_per_instance = a.runs;
  spec.max_steps = a.max_steps;
  spec.master_seed = g.seed;
  spec.threads = a.threads;
  spec.alpha_bin_width = a.alpha_bin;
  spec.trace = a.trace;
  if (a.runs < 1)
    throw CLI::ValidationError("--runs", "must be >= 1");
  if (a.alpha_bin < 0)
    throw CLI::ValidationError("--alpha-bin", "must be >= 0");
  if (spec.oracle_dir && !fs::is_directory(*spec.oracle_dir))
    throw std::invalid_argument("oracle directory '" + *spec.oracle_dir + "' does not exist");

  const BenchResult result = run_benchmark(spec);
  const auto files = write_bench_outputs(a.out, spec, result);
  if (g.json) {
    json out;
    out["out"] = a.out;
    out["rows"] = result.rows.size();
    out["files"] = files;
    std::cout << out.dump() << "\n";
  } else if (!g.quiet) {
    std::cout << "wrote " << result.rows.size() << " run rows to " << a.out << "\n";
    std::cout << read_text_file((fs::path(a.out) / "metrics.json").string());
  }
  return 0;
}

// ---------------------------------------------------------------- exact

struct ExactArgs {
  std::string cnf;
  std::uint64_t budget = 10'000'000;
};

int cmd_exact(const ExactArgs &a, const Globals &g) {
  const Formula formula = read_dimacs_file(a.cnf);
  const ExactResult r = solve_exact(formula, a.budget);
  json out;
  out["status"] = to_string(r.status);
  out["decisions"] = r.decisions;
  out["witness"] = r.witness ? json(r.witness->to_string()) : json(nullptr);
  std::cout << out.dump(g.json ? -1 : 2) << "\n";
  switch (r.status) {
  case ExactStatus::Sat:
    return kExitSat;
  case ExactStatus::Unsat:
    return kExitUnsat;
  case ExactStatus::BudgetExceeded:
    break;
  }
  return kExitBudget;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"oraclesat: oracle-based stochastic local search for SAT"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master random seed")->default_val(0);
  app.add_flag("--quiet", g.quiet, "suppress informational output");
  app.add_flag("--json", g.json, "compact machine-readable output");

  GenArgs gen;
  auto *gen_cmd = app.add_subcommand("gen", "generate random k-SAT instances and a manifest");
  gen_cmd->add_option("--n", gen.n, "number of variables")->required()->check(CLI::PositiveNumber);
  auto *alpha_opt = gen_cmd->add_option("--alpha", gen.alpha, "clause-to-variable ratio (m = round(alpha*n))");
  auto *m_opt = gen_cmd->add_option("--m", gen.m, "number of clauses");
  alpha_opt->excludes(m_opt);
  gen_cmd->add_option("--k", gen.k, "clause width")->default_val(3);
  gen_cmd->add_option("--count", gen.count, "number of instances")->default_val(1);
  gen_cmd->add_option("--max-occurrence", gen.max_occurrence, "per-variable occurrence cap");
  gen_cmd->add_option("--out-dir", gen.out_dir, "output directory")->required();
  gen_cmd->add_option("--prefix", gen.prefix, "instance id prefix");
  gen_cmd->add_flag("--classify", gen.classify, "fill sat_status with the exact solver");
  gen_cmd->add_option("--budget", gen.budget, "decision budget for --classify")->default_val(10'000'000);

  SolveArgs solve;
  auto *solve_cmd = app.add_subcommand("solve", "run oracle-based MT or WalkSAT");
  solve_cmd->add_option("--cnf", solve.cnf, "DIMACS file")->required();
  solve_cmd->add_option("--variant", solve.variant, "mt | walksat")->default_val("mt");
  solve_cmd->add_option("--mode", solve.mode, "uniform | hybrid | boosted")->default_val("uniform");
  solve_cmd->add_option("--oracle", solve.oracle, "oracle file");
  solve_cmd->add_option("--max-steps", solve.max_steps, "step cap per run")->default_val(1'000'000);
  solve_cmd->add_option("--runs", solve.runs, "number of runs")->default_val(1);
  solve_cmd->add_flag("--trace", solve.trace, "include the per-step violation trace");

  CheckArgs check;
  auto *check_cmd = app.add_subcommand("check-lll", "evaluate the LLL condition for an oracle");
  check_cmd->add_option("--cnf", check.cnf, "DIMACS file")->required();
  check_cmd->add_option("--oracle", check.oracle, "oracle file (uniform oracle when omitted)");
  check_cmd->add_flag("--mu-from-oracle", check.mu.from_oracle, "use the oracle file's mu section");
  check_cmd->add_option("--mu-file", check.mu.file, "mu vector file");
  check_cmd->add_flag("--mu-auto", check.mu.automatic, "search mu by fixed-point iteration");
  check_cmd->add_option("--mu-const", check.mu.constant, "same mu for every clause");
  check_cmd->add_option("--z", check.z, "norm order of the LLL loss (>= 1 or inf)")->default_val("2");

  LossArgs loss;
  auto *loss_cmd = app.add_subcommand("loss", "evaluate the Gibbs + LLL training loss");
  loss_cmd->add_option("--cnf", loss.cnf, "DIMACS file")->required();
  loss_cmd->add_option("--oracle", loss.oracle, "oracle file")->required();
  loss_cmd->add_option("--samples", loss.samples, "samples file")->required();
  loss_cmd->add_option("--mu-file", loss.mu_file, "mu vector file (default: oracle's mu)");
  loss_cmd->add_option("--beta", loss.beta, "inverse temperature")->default_val(1.0);
  loss_cmd->add_option("--z", loss.z, "norm order of the LLL loss")->default_val("2");
  loss_cmd->add_option("--gamma1", loss.gamma1, "weight of the Gibbs loss")->default_val(1.0);
  loss_cmd->add_option("--gamma2", loss.gamma2, "weight of the LLL loss")->default_val(1.0);

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "run a benchmark over a manifest and compute metrics");
  bench_cmd->add_option("--manifest", bench.manifest, "manifest.csv")->required();
  bench_cmd->add_option("--variants", bench.variants, "comma-separated solver:mode list")
      ->default_val("mt:uniform,walksat:uniform");
  bench_cmd->add_option("--oracle-dir", bench.oracle_dir, "directory of <instance_id>.oracle files");
  bench_cmd->add_option("--runs", bench.runs, "runs per instance")->default_val(5);
  bench_cmd->add_option("--max-steps", bench.max_steps, "step cap per run")->default_val(1'000'000);
  bench_cmd->add_option("--out", bench.out, "output directory")->required();
  bench_cmd->add_option("--threads", bench.threads, "worker threads (0: all cores)")->default_val(0);
  bench_cmd->add_option("--alpha-bin", bench.alpha_bin, "alpha bin width (0: exact values)")->default_val(0.0);
  bench_cmd->add_flag("--trace", bench.trace, "record violation counts on a log-spaced step grid");

  ExactArgs exact;
  auto *exact_cmd = app.add_subcommand("exact", "decide satisfiability with DPLL");
  exact_cmd->add_option("--cnf", exact.cnf, "DIMACS file")->required();
  exact_cmd->add_option("--budget", exact.budget, "decision budget")->default_val(10'000'000);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*gen_cmd)
      return cmd_gen(gen, g);
    if (*solve_cmd)
      return cmd_solve(solve, g);
    if (*check_cmd)
      return cmd_check_lll(check, g);
    if (*loss_cmd)
      return cmd_loss(loss, g);
    if (*bench_cmd)
      return cmd_bench(bench, g);
    if (*exact_cmd)
      return cmd_exact(exact, g);
  } catch (const CLI::ValidationError &e) {
    std::cerr << "oraclesat: usage error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception &e) {
    std::cerr << "oraclesat: error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
