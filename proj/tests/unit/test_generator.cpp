#include "oraclesat/exact.hpp"
#include "oraclesat/generator.hpp"

#include <doctest.h>

#include <set>

using namespace oraclesat;

namespace {

void check_structure(const Formula &f, std::size_t n, std::size_t m, std::size_t k) {
  CHECK(f.num_vars() == n);
  REQUIRE(f.num_clauses() == m);
  for (const auto &c : f.clauses()) {
    CHECK(c.size() == k);
    std::set<Var> vars;
    for (const auto &lit : c)
      vars.insert(lit.var);
    CHECK(vars.size() == k);
  }
}

} // namespace

TEST_SUITE("generator") {

TEST_CASE("uniform k-SAT structure") {
  GenSpec spec;
  spec.n = 50;
  spec.k = 3;
  spec.alpha = 4.26;
  spec.seed = 5;
  CHECK(resolve_num_clauses(spec) == 213);
  check_structure(gen_uniform_ksat(spec), 50, 213, 3);
  spec.m = 17;
  check_structure(generate(spec), 50, 17, 3);
}

TEST_CASE("generation is a pure function of the spec") {
  GenSpec spec;
  spec.n = 80;
  spec.k = 4;
  spec.alpha = 3.0;
  spec.seed = 99;
  CHECK(gen_uniform_ksat(spec) == gen_uniform_ksat(spec));
  auto other = spec;
  other.seed = 100;
  CHECK_FALSE(gen_uniform_ksat(spec) == gen_uniform_ksat(other));
  spec.max_occurrence = 12;
  CHECK(gen_degree_bounded_ksat(spec) == gen_degree_bounded_ksat(spec));
}

TEST_CASE("signs are roughly balanced") {
  GenSpec spec;
  spec.n = 200;
  spec.k = 3;
  spec.m = 2000;
  spec.seed = 3;
  const Formula f = gen_uniform_ksat(spec);
  std::size_t neg = 0;
  for (const auto &c : f.clauses())
    for (const auto &lit : c)
      neg += lit.negated ? 1 : 0;
  // 6000 fair signs: 3 sigma is about 116.
  CHECK(neg > 3000 - 120);
  CHECK(neg < 3000 + 120);
}

TEST_CASE("degree-bounded generator respects the occurrence cap") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenSpec spec;
    spec.n = 700;
    spec.k = 7;
    spec.m = 500;
    spec.max_occurrence = 5;
    spec.seed = seed;
    const Formula f = gen_degree_bounded_ksat(spec);
    check_structure(f, 700, 500, 7);
    for (Var v = 0; v < 700; ++v)
      CHECK(f.occurrences(v) <= 5);
  }
  // Tight packing: every slot is used.
  GenSpec tight;
  tight.n = 30;
  tight.k = 3;
  tight.m = 40;
  tight.max_occurrence = 4;
  tight.seed = 11;
  const Formula f = gen_degree_bounded_ksat(tight);
  check_structure(f, 30, 40, 3);
  for (Var v = 0; v < 30; ++v)
    CHECK(f.occurrences(v) == 4);
}

TEST_CASE("invalid specs are rejected") {
  GenSpec spec;
  spec.n = 10;
  spec.k = 3;
  CHECK_THROWS_AS(resolve_num_clauses(spec), std::invalid_argument); // neither alpha nor m
  spec.alpha = 0.0;
  CHECK_THROWS_AS(resolve_num_clauses(spec), std::invalid_argument);
  spec.alpha = -1.0;
  CHECK_THROWS_AS(resolve_num_clauses(spec), std::invalid_argument);
  spec.alpha = 0.01;
  CHECK_THROWS_AS(resolve_num_clauses(spec), std::invalid_argument); // rounds to m = 0
  spec.alpha = 2.0;
  spec.k = 11;
  CHECK_THROWS_AS(gen_uniform_ksat(spec), std::invalid_argument);
  spec.k = 0;
  CHECK_THROWS_AS(gen_uniform_ksat(spec), std::invalid_argument);
  spec.k = 3;
  spec.max_occurrence = 2;
  CHECK_THROWS_AS(gen_degree_bounded_ksat(spec), std::invalid_argument); // 60 > 20
  spec.max_occurrence = 0;
  CHECK_THROWS_AS(gen_degree_bounded_ksat(spec), std::invalid_argument);
  spec.max_occurrence.reset();
  CHECK_THROWS_AS(gen_degree_bounded_ksat(spec), std::invalid_argument);
  GenSpec empty;
  empty.m = 1;
  CHECK_THROWS_AS(gen_uniform_ksat(empty), std::invalid_argument);
}

TEST_CASE("manifest round trip") {
  GenSpec spec;
  spec.n = 20;
  spec.alpha = 2.5;
  spec.seed = 42;
  auto batch = generate_batch(spec, 3, "t-");
  REQUIRE(batch.rows.size() == 3);
  CHECK(batch.rows[0].instance_id == "t-k3-n20-m50-s42-0000");
  CHECK(batch.rows[2].instance_id == "t-k3-n20-m50-s42-0002");
  CHECK(batch.rows[1].alpha == 2.5);
  CHECK(batch.rows[0].seed != batch.rows[1].seed);
  CHECK_FALSE(batch.formulas[0] == batch.formulas[1]);
  batch.rows[1].sat_status = SatStatus::Sat;
  batch.rows[2].sat_status = SatStatus::Unsat;
  const auto text = write_manifest(batch.rows);
  const auto back = read_manifest(text);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].instance_id == batch.rows[i].instance_id);
    CHECK(back[i].n == 20);
    CHECK(back[i].m == 50);
    CHECK(back[i].k == 3);
    CHECK(back[i].alpha == batch.rows[i].alpha);
    CHECK(back[i].seed == batch.rows[i].seed);
    CHECK(back[i].sat_status == batch.rows[i].sat_status);
  }
  CHECK(write_manifest(back) == text);
  CHECK_THROWS(read_manifest(""));
  CHECK_THROWS(read_manifest("id,n\n"));
  CHECK_THROWS(read_manifest("instance_id,n,m,k,alpha,seed,sat_status\na,1,2,3\n"));
  CHECK_THROWS(read_manifest("instance_id,n,m,k,alpha,seed,sat_status\na,1,2,3,2,5,MAYBE\n"));
}

TEST_CASE("dense random 3-SAT is usually unsatisfiable") {
  GenSpec spec;
  spec.n = 40;
  spec.alpha = 6.0;
  int unsat = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    unsat += solve_exact(gen_uniform_ksat(spec)).status == ExactStatus::Unsat ? 1 : 0;
  }
  CHECK(unsat >= 9);
  spec.alpha = 1.0;
  int sat = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    sat += solve_exact(gen_uniform_ksat(spec)).status == ExactStatus::Sat ? 1 : 0;
  }
  CHECK(sat >= 9);
}

}
