#include "fixtures.hpp"
#include "oraclesat/exact.hpp"
#include "oraclesat/generator.hpp"

#include <doctest.h>

#include <random>

using namespace oraclesat;

TEST_SUITE("exact") {

TEST_CASE("small cases") {
  const auto unsat = solve_exact(parse_dimacs("p cnf 1 2\n1 0\n-1 0\n"));
  CHECK(unsat.status == ExactStatus::Unsat);
  CHECK_FALSE(unsat.witness);

  const auto sat = solve_exact(parse_dimacs("p cnf 2 2\n1 2 0\n-1 2 0\n"));
  REQUIRE(sat.status == ExactStatus::Sat);
  REQUIRE(sat.witness);
  CHECK((*sat.witness)[1] == 1);

  const auto empty = solve_exact(parse_dimacs("p cnf 3 0\n"));
  CHECK(empty.status == ExactStatus::Sat);
  CHECK(empty.witness->size() == 3);

  CHECK(to_string(ExactStatus::BudgetExceeded) == "BUDGET_EXCEEDED");
}

TEST_CASE("DPLL agrees with exhaustive enumeration") {
  std::mt19937_64 gen(83);
  int sat_seen = 0;
  int unsat_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 20);
    const int m = static_cast<int>(gen() % (5 * n + 1));
    const auto raw = brute::random_formula(gen, n, m, 3);
    const Formula f = fixtures::to_formula(n, raw);
    bool satisfiable = false;
    brute::for_each_assignment(n, [&](const brute::Bits &x) {
      satisfiable = satisfiable || brute::count_violated(raw, x) == 0;
    });
    const auto res = solve_exact(f);
    CHECK(res.status == (satisfiable ? ExactStatus::Sat : ExactStatus::Unsat));
    CHECK(res.witness.has_value() == satisfiable);
    if (res.witness)
      CHECK(brute::count_violated(raw, fixtures::to_bits(*res.witness)) == 0);
    (satisfiable ? sat_seen : unsat_seen)++;
  }
  CHECK(sat_seen > 50);
  CHECK(unsat_seen > 50);
}

TEST_CASE("decision budget") {
  GenSpec spec;
  spec.n = 120;
  spec.alpha = 4.26;
  spec.seed = 1;
  const Formula hard = gen_uniform_ksat(spec);
  const auto res = solve_exact(hard, 5);
  CHECK(res.status == ExactStatus::BudgetExceeded);
  CHECK_FALSE(res.witness);
  CHECK(res.decisions <= 6);
  // Pure propagation needs no decisions at all.
  CHECK(solve_exact(parse_dimacs("p cnf 2 2\n1 0\n-1 2 0\n"), 0).status == ExactStatus::Sat);
}

TEST_CASE("min_violation_set") {
  const auto contradiction = min_violation_set(parse_dimacs("p cnf 2 2\n1 0\n-1 0\n"));
  CHECK(contradiction.min_violated == 1);
  REQUIRE(contradiction.argmin.size() == 4);
  CHECK(std::is_sorted(contradiction.argmin.begin(), contradiction.argmin.end()));

  const auto one = min_violation_set(parse_dimacs("p cnf 2 2\n1 2 0\n-1 2 0\n"));
  CHECK(one.min_violated == 0);
  REQUIRE(one.argmin.size() == 2);
  CHECK(one.argmin[0] == Assignment::from_string("01"));
  CHECK(one.argmin[1] == Assignment::from_string("11"));

  std::mt19937_64 gen(89);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 12);
    const auto raw = brute::random_formula(gen, n, 4 * n, 3);
    const Formula f = fixtures::to_formula(n, raw);
    const auto mv = min_violation_set(f);
    int best = 1 << 30;
    std::size_t count = 0;
    brute::for_each_assignment(n, [&](const brute::Bits &x) {
      const int v = brute::count_violated(raw, x);
      if (v < best) {
        best = v;
        count = 0;
      }
      count += v == best ? 1 : 0;
    });
    CHECK(mv.min_violated == static_cast<std::size_t>(best));
    CHECK(mv.argmin.size() == count);
    const auto res = solve_exact(f);
    if (res.witness)
      CHECK(std::binary_search(mv.argmin.begin(), mv.argmin.end(), *res.witness));
  }
  CHECK_THROWS_AS(min_violation_set(Formula(21, {})), std::invalid_argument);
}

}
