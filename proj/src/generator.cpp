#include "oraclesat/generator.hpp"

#include "oraclesat/rng.hpp"
#include "oraclesat/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace oraclesat {

std::size_t resolve_num_clauses(const GenSpec &spec) {
  if (spec.n == 0)
    throw std::invalid_argument("n must be >= 1");
  if (spec.k == 0 || spec.k > spec.n)
    throw std::invalid_argument("clause width k = " + std::to_string(spec.k) + " must lie in [1, n = " +
                                std::to_string(spec.n) + "]");
  std::size_t m = 0;
  if (spec.m) {
    m = *spec.m;
  } else if (spec.alpha) {
    if (!(*spec.alpha > 0) || !std::isfinite(*spec.alpha))
      throw std::invalid_argument("alpha must be positive");
    m = static_cast<std::size_t>(std::llround(*spec.alpha * static_cast<double>(spec.n)));
  } else {
    throw std::invalid_argument("either alpha or m must be given");
  }
  if (m == 0)
    throw std::invalid_argument("the spec yields m = 0 clauses");
  if (spec.max_occurrence) {
    if (*spec.max_occurrence == 0)
      throw std::invalid_argument("max_occurrence must be >= 1");
    if (spec.k * m > spec.n * *spec.max_occurrence)
      throw std::invalid_argument("infeasible degree bound: k*m = " + std::to_string(spec.k * m) + " > n*max_occurrence = " +
                                  std::to_string(spec.n * *spec.max_occurrence));
  }
  return m;
}

namespace {

Literal random_sign(Var v, RngStream &rng) { return Literal{v, (rng.next_u64() >> 63) != 0}; }

} // namespace

Formula gen_uniform_ksat(const GenSpec &spec) {
  const std::size_t m = resolve_num_clauses(spec);
  RngStream rng(spec.seed);
  std::vector<Clause> clauses(m);
  std::vector<Var> vars;
  for (auto &c : clauses) {
    vars.clear();
    while (vars.size() < spec.k) {
      const Var v = static_cast<Var>(rng.below(spec.n));
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
    }
    c.reserve(spec.k);
    for (Var v : vars)
      c.push_back(random_sign(v, rng));
  }
  return Formula(spec.n, std::move(clauses));
}

Formula gen_degree_bounded_ksat(const GenSpec &spec) {
  if (!spec.max_occurrence)
    throw std::invalid_argument("degree-bounded generation needs max_occurrence");
  const std::size_t m = resolve_num_clauses(spec);
  const std::size_t k = spec.k;
  const std::size_t cap = *spec.max_occurrence;
  RngStream rng(spec.seed);

  // Pool of variable slots, cap copies each. The first k*m slots (after a
  // shuffle) form the clauses, the rest are spares. Swaps keep the multiset,
  // so no variable ever exceeds its capacity.
  std::vector<Var> slot;
  slot.reserve(spec.n * cap);
  for (Var v = 0; v < spec.n; ++v)
    for (std::size_t r = 0; r < cap; ++r)
      slot.push_back(v);
  for (std::size_t i = slot.size(); i > 1; --i)
    std::swap(slot[i - 1], slot[rng.below(i)]);
  const std::size_t used = k * m;

  auto clause_has = [&](std::size_t clause, Var v, std::size_t skip) {
    for (std::size_t p = clause * k; p < clause * k + k; ++p)
      if (p != skip && slot[p] == v)
        return true;
    return false;
  };
  auto find_duplicate = [&](std::size_t clause) -> std::size_t {
    for (std::size_t p = clause * k; p < clause * k + k; ++p)
      if (clause_has(clause, slot[p], p))
        return p;
    return SIZE_MAX;
  };

  const std::size_t max_attempts = 1000 * (m + 10) * k;
  std::size_t attempts = 0;
  for (std::size_t clause = 0; clause < m; ++clause) {
    for (std::size_t p = find_duplicate(clause); p != SIZE_MAX; p = find_duplicate(clause)) {
      if (++attempts > max_attempts)
        throw std::runtime_error("degree-bounded generator failed to separate repeated variables");
      const std::size_t q = rng.below(slot.size());
      if (q / k == clause && q < used)
        continue;
      const Var mine = slot[p];
      const Var theirs = slot[q];
      if (theirs == mine || clause_has(clause, theirs, p))
        continue;
      if (q < used && clause_has(q / k, mine, q))
        continue;
      std::swap(slot[p], slot[q]);
    }
  }
  // Swaps into earlier clauses only ever exchange for a variable absent there,
  // so all clauses remain free of repeats.
  std::vector<Clause> clauses(m);
  for (std::size_t clause = 0; clause < m; ++clause) {
    clauses[clause].reserve(k);
    for (std::size_t p = clause * k; p < clause * k + k; ++p)
      clauses[clause].push_back(random_sign(slot[p], rng));
  }
  return Formula(spec.n, std::move(clauses));
}

Formula generate(const GenSpec &spec) {
  return spec.max_occurrence ? gen_degree_bounded_ksat(spec) : gen_uniform_ksat(spec);
}

std::string_view to_string(SatStatus s) {
  switch (s) {
  case SatStatus::Sat:
    return "SAT";
  case SatStatus::Unsat:
    return "UNSAT";
  case SatStatus::Unknown:
    break;
  }
  return "UNKNOWN";
}

SatStatus parse_sat_status(std::string_view text) {
  if (text == "SAT")
    return SatStatus::Sat;
  if (text == "UNSAT")
    return SatStatus::Unsat;
  if (text == "UNKNOWN" || text.empty())
    return SatStatus::Unknown;
  throw std::invalid_argument("unknown sat_status '" + std::string(text) + "'");
}

static const char *kManifestHeader = "instance_id,n,m,k,alpha,seed,sat_status";

std::vector<ManifestRow> read_manifest(std::string_view text) {
  std::vector<ManifestRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos)
      eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty())
      continue;
    if (!header) {
      if (line != kManifestHeader)
        throw std::runtime_error("manifest line 1: expected header '" + std::string(kManifestHeader) + "'");
      header = true;
      continue;
    }
    auto cells = split_char(line, ',');
    if (cells.size() != 7)
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": expected 7 columns");
    try {
      ManifestRow r;
      r.instance_id = cells[0];
      r.n = static_cast<std::size_t>(parse_int(cells[1]));
      r.m = static_cast<std::size_t>(parse_int(cells[2]));
      r.k = static_cast<std::size_t>(parse_int(cells[3]));
      r.alpha = parse_double(cells[4]);
      r.seed = std::stoull(cells[5]);
      r.sat_status = parse_sat_status(cells[6]);
      if (r.instance_id.empty())
        throw std::invalid_argument("empty instance_id");
      rows.push_back(std::move(r));
    } catch (const std::exception &e) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!header)
    throw std::runtime_error("manifest is empty");
  return rows;
}

std::vector<ManifestRow> read_manifest_file(const std::string &path) {
  try {
    return read_manifest(read_text_file(path));
  } catch (const std::exception &e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string write_manifest(const std::vector<ManifestRow> &rows) {
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto &r : rows)
    out += r.instance_id + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.k) + "," +
           format_double(r.alpha) + "," + std::to_string(r.seed) + "," + std::string(to_string(r.sat_status)) + "\n";
  return out;
}

BatchResult generate_batch(const GenSpec &spec, std::size_t count, std::string_view id_prefix) {
  const std::size_t m = resolve_num_clauses(spec);
  BatchResult out;
  for (std::size_t i = 0; i < count; ++i) {
    GenSpec one = spec;
    one.m = m;
    one.seed = derive_run_seed(spec.seed, "instance", i);
    char id[160];
    std::snprintf(id, sizeof id, "%sk%zu-n%zu-m%zu-s%llu-%04zu", std::string(id_prefix).c_str(), spec.k, spec.n, m,
                  static_cast<unsigned long long>(spec.seed), i);
    out.formulas.push_back(generate(one));
    out.rows.push_back(ManifestRow{id, spec.n, m, spec.k, static_cast<double>(m) / static_cast<double>(spec.n), one.seed,
                                   SatStatus::Unknown});
  }
  return out;
}

} // namespace oraclesat
