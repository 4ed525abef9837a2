#pragma once

#include "oraclesat/cnf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

struct GenSpec {
  std::size_t n = 0;
  std::size_t k = 3;
  std::optional<double> alpha;      // m = round(alpha * n)
  std::optional<std::size_t> m;     // overrides alpha
  std::optional<std::size_t> max_occurrence;
  std::uint64_t seed = 0;
};

// Validates the spec and returns the clause count it asks for.
std::size_t resolve_num_clauses(const GenSpec &spec);

// Uniform random k-SAT: each clause draws k distinct variables uniformly and
// independent fair signs. Duplicate clauses are allowed.
Formula gen_uniform_ksat(const GenSpec &spec);

// Random k-SAT in which every variable occurs in at most max_occurrence clauses.
Formula gen_degree_bounded_ksat(const GenSpec &spec);

// Dispatches on spec.max_occurrence.
Formula generate(const GenSpec &spec);

enum class SatStatus { Unknown, Sat, Unsat };
std::string_view to_string(SatStatus s);
SatStatus parse_sat_status(std::string_view text);

struct ManifestRow {
  std::string instance_id;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  double alpha = 0;
  std::uint64_t seed = 0;
  SatStatus sat_status = SatStatus::Unknown;
};

// CSV with header: instance_id,n,m,k,alpha,seed,sat_status
std::vector<ManifestRow> read_manifest(std::string_view text);
std::vector<ManifestRow> read_manifest_file(const std::string &path);
std::string write_manifest(const std::vector<ManifestRow> &rows);

struct BatchResult {
  std::vector<ManifestRow> rows;
  std::vector<Formula> formulas;
};

// count instances; instance i uses seed derive_run_seed(spec.seed, "instance", i).
BatchResult generate_batch(const GenSpec &spec, std::size_t count, std::string_view id_prefix = {});

} // namespace oraclesat
