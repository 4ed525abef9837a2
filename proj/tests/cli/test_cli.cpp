// End-to-end tests of the oraclesat executable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include "tempdir.hpp"
#include "oraclesat/cnf.hpp"
#include "oraclesat/generator.hpp"
#include "oraclesat/lll.hpp"
#include "oraclesat/oracle.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

using json = nlohmann::json;
using fixtures::slurp;
using fixtures::write_file;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result cli(const fixtures::TempDir &dir, const std::string &args) {
  const std::string out = dir.file("stdout.txt");
  const std::string err = dir.file("stderr.txt");
  const std::string cmd = std::string("\"") + ORACLESAT_CLI + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<json> json_lines(const std::string &text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty())
      out.push_back(json::parse(line));
  return out;
}

double as_double(const json &j) {
  if (j.is_string())
    return j.get<std::string>() == "inf" ? INFINITY : -INFINITY;
  return j.get<double>();
}

const char *kTiny = "p cnf 3 3\n1 2 0\n-2 3 0\n-1 -3 0\n";

} // namespace

TEST_CASE("help and bad usage") {
  fixtures::TempDir dir("cli");
  CHECK(cli(dir, "--help").code == 0);
  CHECK(cli(dir, "solve --help").code == 0);
  CHECK(cli(dir, "").code == 1);
  CHECK(cli(dir, "frobnicate").code == 1);
  CHECK(cli(dir, "solve").code == 1); // --cnf missing
}

TEST_CASE("gen: uniform, degree-bounded and invalid specs") {
  fixtures::TempDir dir("cli-gen");
  const auto uni = cli(dir, "--seed 3 --json gen --n 30 --alpha 2.0 --count 4 --out-dir " + dir.file("u"));
  REQUIRE(uni.code == 0);
  const auto j = json::parse(uni.out);
  REQUIRE(j["instances"].size() == 4);
  const auto rows = oraclesat::read_manifest_file(dir.file("u/manifest.csv"));
  REQUIRE(rows.size() == 4);
  for (const auto &row : rows) {
    const auto f = oraclesat::read_dimacs_file(dir.file("u/" + row.instance_id + ".cnf"));
    CHECK(f.num_vars() == 30);
    CHECK(f.num_clauses() == 60);
    CHECK(row.alpha == 2.0);
  }
  // Same seed, same files.
  const std::string first = slurp(dir.file("u/" + rows[0].instance_id + ".cnf"));
  REQUIRE(cli(dir, "--seed 3 --quiet gen --n 30 --alpha 2.0 --count 4 --out-dir " + dir.file("u2")).code == 0);
  CHECK(slurp(dir.file("u2/" + rows[0].instance_id + ".cnf")) == first);
  // A second batch merges into the manifest.
  REQUIRE(cli(dir, "--seed 4 --quiet gen --n 30 --m 45 --count 2 --out-dir " + dir.file("u")).code == 0);
  CHECK(oraclesat::read_manifest_file(dir.file("u/manifest.csv")).size() == 6);

  const auto bounded =
      cli(dir, "--quiet gen --n 70 --m 50 --k 7 --max-occurrence 5 --count 2 --classify --out-dir " + dir.file("d"));
  REQUIRE(bounded.code == 0);
  for (const auto &row : oraclesat::read_manifest_file(dir.file("d/manifest.csv"))) {
    const auto f = oraclesat::read_dimacs_file(dir.file("d/" + row.instance_id + ".cnf"));
    for (oraclesat::Var v = 0; v < 70; ++v)
      CHECK(f.occurrences(v) <= 5);
    CHECK(row.sat_status == oraclesat::SatStatus::Sat);
  }

  const auto infeasible = cli(dir, "gen --n 10 --m 50 --k 3 --max-occurrence 2 --out-dir " + dir.file("bad"));
  CHECK(infeasible.code == 1);
  CHECK(infeasible.err.find("infeasible") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir.file("bad")));
  CHECK(cli(dir, "gen --n 10 --k 3 --out-dir " + dir.file("bad")).code == 1);           // neither --alpha nor --m
  CHECK(cli(dir, "gen --n 10 --alpha 2 --m 20 --out-dir " + dir.file("bad")).code == 1); // both
  CHECK(cli(dir, "gen --n 5 --k 6 --m 3 --out-dir " + dir.file("bad")).code == 1);
}

TEST_CASE("solve") {
  fixtures::TempDir dir("cli-solve");
  write_file(dir.file("tiny.cnf"), kTiny);
  write_file(dir.file("witness.oracle"), oraclesat::write_oracle(oraclesat::point_oracle(
                                             oraclesat::Assignment::from_string("011"))));

  SUBCASE("perfect oracle solves at step 0") {
    for (const char *variant : {"mt", "walksat"}) {
      const auto r = cli(dir, std::string("solve --cnf ") + dir.file("tiny.cnf") + " --variant " + variant +
                                  " --mode boosted --oracle " + dir.file("witness.oracle") + " --runs 3");
      CHECK(r.code == 10);
      const auto lines = json_lines(r.out);
      REQUIRE(lines.size() == 3);
      for (const auto &l : lines) {
        CHECK(l["steps"] == 0);
        CHECK(l["solved"] == true);
        CHECK(l["assignment"] == "011");
        CHECK(l["instance_id"] == "tiny");
      }
    }
  }
  SUBCASE("uniform runs and traces") {
    const auto r = cli(dir, "--seed 9 solve --cnf " + dir.file("tiny.cnf") + " --variant walksat --runs 4 --trace");
    CHECK(r.code == 10);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(lines[i]["run_index"] == i);
      CHECK(lines[i]["final_violations"] == 0);
      CHECK(lines[i]["trace"].size() == lines[i]["steps"].get<std::size_t>() + 1);
      CHECK(lines[i]["trace"].back() == 0);
    }
    CHECK(cli(dir, "--seed 9 solve --cnf " + dir.file("tiny.cnf") + " --variant walksat --runs 4 --trace").out == r.out);
  }
  SUBCASE("unsatisfiable input exhausts the cap") {
    write_file(dir.file("contra.cnf"), "p cnf 1 2\n1 0\n-1 0\n");
    const auto r = cli(dir, "solve --cnf " + dir.file("contra.cnf") + " --max-steps 50");
    CHECK(r.code == 20);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["steps"] == 50);
    CHECK(lines[0]["solved"] == false);
  }
  SUBCASE("errors") {
    const auto missing = cli(dir, "solve --cnf " + dir.file("tiny.cnf") + " --mode boosted");
    CHECK(missing.code == 1);
    CHECK(missing.err.find("usage error") != std::string::npos);
    CHECK(cli(dir, "solve --cnf " + dir.file("nope.cnf")).code == 1);
    CHECK(cli(dir, "solve --cnf " + dir.file("tiny.cnf") + " --variant gsat").code == 1);
    write_file(dir.file("short.oracle"), "ORACLE 1\nn 2\nm 0\nw 1 0.5\nw 2 0.5\n");
    CHECK(cli(dir, "solve --cnf " + dir.file("tiny.cnf") + " --mode hybrid --oracle " + dir.file("short.oracle")).code == 1);
  }
}

TEST_CASE("check-lll") {
  fixtures::TempDir dir("cli-lll");
  oraclesat::GenSpec spec;
  spec.n = 700;
  spec.k = 7;
  spec.m = 500;
  spec.max_occurrence = 5;
  spec.seed = 1;
  write_file(dir.file("b.cnf"), oraclesat::write_dimacs(oraclesat::gen_degree_bounded_ksat(spec)));
  const std::string cnf = " --cnf " + dir.file("b.cnf");

  const auto ok = cli(dir, "--json check-lll" + cnf + " --mu-const " + std::to_string(std::exp(1.0) / 128));
  REQUIRE(ok.code == 0);
  auto j = json::parse(ok.out);
  CHECK(j["satisfied"] == true);
  CHECK(j["lll_loss"] == 0.0);
  CHECK(j["epsilon"].size() == 500);
  CHECK(j["violation_probs"][0] == 1.0 / 128);

  const auto tiny = json::parse(cli(dir, "--json check-lll" + cnf + " --mu-const 1e-9").out);
  CHECK(tiny["satisfied"] == false);
  CHECK(as_double(tiny["lll_loss"]) > 0);

  const auto autod = json::parse(cli(dir, "--json check-lll" + cnf + " --mu-auto --z inf").out);
  CHECK(autod["mu_search"]["converged"] == true);
  CHECK(autod["z"] == "inf");
  CHECK(as_double(autod["expected_steps_bound"]) <= 500 * std::exp(1.0) / 128);

  write_file(dir.file("tiny.cnf"), kTiny);
  const oraclesat::ProductOracle perfect({0.0, 1.0, 1.0}, std::vector<double>(3, 0.0));
  write_file(dir.file("p.oracle"), oraclesat::write_oracle(perfect));
  const auto p = json::parse(
      cli(dir, "--json check-lll --cnf " + dir.file("tiny.cnf") + " --oracle " + dir.file("p.oracle") + " --mu-from-oracle").out);
  CHECK(p["satisfied"] == true);
  CHECK(p["expected_steps_bound"] == 0.0);

  write_file(dir.file("mu.txt"), "MU 1\nm 3\nmu 1 0.5\nmu 2 0.5\nmu 3 0.5\n");
  const auto f = cli(dir, "--json check-lll --cnf " + dir.file("tiny.cnf") + " --mu-file " + dir.file("mu.txt"));
  CHECK(f.code == 0);
  CHECK(json::parse(f.out)["mu_source"] == "file");

  CHECK(cli(dir, "check-lll" + cnf).code == 1);                                // no mu source
  CHECK(cli(dir, "check-lll" + cnf + " --mu-auto --mu-const 1").code == 1);    // two mu sources
  CHECK(cli(dir, "check-lll" + cnf + " --mu-const 0.1 --z 0.5").code == 1);    // bad norm
  CHECK(cli(dir, "check-lll --cnf " + dir.file("tiny.cnf") + " --mu-file " + dir.file("nope")).code == 1);
}

TEST_CASE("loss") {
  fixtures::TempDir dir("cli-loss");
  write_file(dir.file("f.cnf"), kTiny);
  const oraclesat::ProductOracle o({0.3, 0.6, 0.8}, std::vector<double>{0.01, 0.02, 0.03});
  write_file(dir.file("o.oracle"), oraclesat::write_oracle(o));
  write_file(dir.file("s.txt"), "SAMPLES 1\nn 3\n011\n000\n111\n");
  const std::string base = "--json loss --cnf " + dir.file("f.cnf") + " --oracle " + dir.file("o.oracle") +
                           " --samples " + dir.file("s.txt");

  const auto defaults = cli(dir, base);
  REQUIRE(defaults.code == 0);
  const auto d = json::parse(defaults.out);
  CHECK(d["gamma1"] == 1.0);
  CHECK(d["gamma2"] == 1.0);
  CHECK(d["beta"] == 1.0);
  CHECK(d["z"] == 2.0);
  CHECK(d["samples"] == 3);

  // Library values for the same inputs.
  const auto formula = oraclesat::parse_dimacs(kTiny);
  const auto samples = oraclesat::read_samples("SAMPLES 1\nn 3\n011\n000\n111\n", formula);
  const auto expect = oraclesat::total_loss(o, o.mu(), formula, samples, oraclesat::LossParams{});
  CHECK(d["gibbs"].get<double>() == expect.gibbs);
  CHECK(d["lll"].get<double>() == expect.lll);
  CHECK(d["total"].get<double>() == expect.total);
  CHECK(expect.lll > 0);

  const auto g1 = json::parse(cli(dir, base + " --gamma1 0 --gamma2 2").out);
  CHECK(g1["total"].get<double>() == 2 * d["lll"].get<double>());
  const auto g2 = json::parse(cli(dir, base + " --gamma1 3 --gamma2 0").out);
  CHECK(g2["total"].get<double>() == 3 * d["gibbs"].get<double>());

  write_file(dir.file("nomu.oracle"), oraclesat::write_oracle(oraclesat::ProductOracle({0.3, 0.6, 0.8})));
  CHECK(cli(dir, "loss --cnf " + dir.file("f.cnf") + " --oracle " + dir.file("nomu.oracle") + " --samples " +
                     dir.file("s.txt"))
            .code == 1);
  CHECK(cli(dir, base + " --beta 0").code == 1);
  CHECK(cli(dir, base + " --gamma1 -1").code == 1);
}

TEST_CASE("bench") {
  fixtures::TempDir dir("cli-bench");
  REQUIRE(cli(dir, "--seed 2 --quiet gen --n 20 --alpha 2.0 --count 5 --out-dir " + dir.file("inst")).code == 0);
  const std::string manifest = dir.file("inst/manifest.csv");
  const std::string args = "--seed 11 --quiet bench --manifest " + manifest +
                           " --variants mt:uniform,walksat:uniform --runs 3 --max-steps 20000 --trace --out ";
  REQUIRE(cli(dir, args + dir.file("a")).code == 0);
  REQUIRE(cli(dir, args + dir.file("b") + " --threads 2").code == 0);
  for (const char *name : {"runs.csv", "traces.csv", "metrics.json", "alpha_curves.csv", "step_curves.csv"}) {
    const auto a = slurp(dir.file(std::string("a/") + name));
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir.file(std::string("b/") + name)));
  }
  const auto metrics = json::parse(slurp(dir.file("a/metrics.json")));
  CHECK(metrics["variants"].size() == 2);
  CHECK(metrics["benchmark"]["master_seed"] == 11);
  const std::string runs = slurp(dir.file("a/runs.csv"));
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 31);

  REQUIRE(cli(dir, "--seed 12 --quiet bench --manifest " + manifest + " --runs 3 --max-steps 20000 --out " + dir.file("c"))
              .code == 0);
  CHECK(slurp(dir.file("c/runs.csv")) != slurp(dir.file("a/runs.csv")));

  const auto no_dir = cli(dir, "bench --manifest " + manifest + " --variants mt:boosted --out " + dir.file("x"));
  CHECK(no_dir.code == 1);
  const auto missing = cli(dir, "bench --manifest " + manifest + " --variants mt:boosted --oracle-dir " +
                                    dir.file("none") + " --out " + dir.file("x"));
  CHECK(missing.code == 1);
  CHECK(missing.err.find("does not exist") != std::string::npos);
  std::filesystem::create_directories(dir.file("empty"));
  const auto absent = cli(dir, "bench --manifest " + manifest + " --variants mt:boosted --oracle-dir " +
                                   dir.file("empty") + " --out " + dir.file("x"));
  CHECK(absent.code == 1);
  CHECK(absent.err.find("missing oracle file") != std::string::npos);
}

TEST_CASE("bench with boosted variants reads one oracle per instance") {
  fixtures::TempDir dir("cli-bench-oracle");
  REQUIRE(cli(dir, "--seed 5 --quiet gen --n 15 --alpha 2.0 --count 3 --classify --out-dir " + dir.file("inst")).code == 0);
  std::filesystem::create_directories(dir.file("oracles"));
  for (const auto &row : oraclesat::read_manifest_file(dir.file("inst/manifest.csv"))) {
    REQUIRE(row.sat_status == oraclesat::SatStatus::Sat);
    const auto ex = json::parse(cli(dir, "--json exact --cnf " + dir.file("inst/" + row.instance_id + ".cnf")).out);
    const auto w = oraclesat::Assignment::from_string(ex["witness"].get<std::string>());
    write_file(dir.file("oracles/" + row.instance_id + ".oracle"), oraclesat::write_oracle(oraclesat::point_oracle(w)));
  }
  REQUIRE(cli(dir, "--quiet bench --manifest " + dir.file("inst/manifest.csv") +
                       " --variants mt:uniform,mt:boosted --runs 2 --max-steps 10000 --oracle-dir " + dir.file("oracles") +
                       " --out " + dir.file("out"))
              .code == 0);
  CHECK(std::filesystem::exists(dir.file("out/scatter_mt.csv")));
  const auto metrics = json::parse(slurp(dir.file("out/metrics.json")));
  for (const auto &v : metrics["variants"])
    if (v["mode"] == "boosted")
      CHECK(v["mean_steps"] == 0.0);
}

TEST_CASE("exact exit codes") {
  fixtures::TempDir dir("cli-exact");
  write_file(dir.file("sat.cnf"), kTiny);
  write_file(dir.file("unsat.cnf"), "p cnf 1 2\n1 0\n-1 0\n");
  oraclesat::GenSpec spec;
  spec.n = 150;
  spec.alpha = 4.26;
  spec.seed = 3;
  write_file(dir.file("hard.cnf"), oraclesat::write_dimacs(oraclesat::gen_uniform_ksat(spec)));

  const auto sat = cli(dir, "exact --cnf " + dir.file("sat.cnf"));
  CHECK(sat.code == 10);
  const auto js = json::parse(sat.out);
  CHECK(js["status"] == "SAT");
  CHECK(oraclesat::count_violated(oraclesat::parse_dimacs(kTiny),
                                  oraclesat::Assignment::from_string(js["witness"].get<std::string>())) == 0);
  const auto unsat = cli(dir, "exact --cnf " + dir.file("unsat.cnf"));
  CHECK(unsat.code == 20);
  CHECK(json::parse(unsat.out)["witness"].is_null());
  const auto budget = cli(dir, "exact --cnf " + dir.file("hard.cnf") + " --budget 3");
  CHECK(budget.code == 30);
  CHECK(json::parse(budget.out)["status"] == "BUDGET_EXCEEDED");
  CHECK(cli(dir, "exact --cnf " + dir.file("missing.cnf")).code == 1);
}
