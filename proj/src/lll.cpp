#include "oraclesat/lll.hpp"

#include "oraclesat/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace oraclesat {

std::size_t DependencyGraph::num_edges() const {
  std::size_t total = 0;
  for (const auto &adj : adjacency_)
    total += adj.size();
  return total / 2;
}

DependencyGraph build_dependency_graph(const Formula &formula) {
  const std::size_t m = formula.num_clauses();
  std::vector<std::vector<std::uint32_t>> adjacency(m);
  std::vector<std::uint32_t> mark(m, UINT32_MAX);
  for (std::uint32_t j = 0; j < m; ++j) {
    mark[j] = j;
    auto &adj = adjacency[j];
    for (const Literal &lit : formula.clause(j)) {
      for (auto occ : {formula.positive_occurrences(lit.var), formula.negative_occurrences(lit.var)})
        for (std::uint32_t other : occ)
          if (mark[other] != j) {
            mark[other] = j;
            adj.push_back(other);
          }
    }
    std::sort(adj.begin(), adj.end());
  }
  return DependencyGraph(std::move(adjacency));
}

double clause_violation_prob(const ProductOracle &oracle, const Clause &clause) {
  double p = 1.0;
  for (const Literal &lit : clause)
    p *= lit.negated ? oracle.w(lit.var) : 1.0 - oracle.w(lit.var);
  return p;
}

std::vector<double> violation_probs(const ProductOracle &oracle, const Formula &formula) {
  if (oracle.num_vars() != formula.num_vars())
    throw std::invalid_argument("oracle and formula disagree on n");
  std::vector<double> p(formula.num_clauses());
  for (std::size_t j = 0; j < p.size(); ++j)
    p[j] = clause_violation_prob(oracle, formula.clause(j));
  return p;
}

namespace {

void check_mu(std::span<const double> mu, const Formula &formula) {
  if (mu.size() != formula.num_clauses())
    throw std::invalid_argument("mu has length " + std::to_string(mu.size()) + " but formula has m = " +
                                std::to_string(formula.num_clauses()));
  for (std::size_t j = 0; j < mu.size(); ++j)
    if (!(mu[j] >= 0) || !std::isfinite(mu[j]))
      throw std::invalid_argument("mu_" + std::to_string(j + 1) + " must be finite and nonnegative");
}

// P_j * prod_{Gamma+(j)} (1 + mu) for all j.
std::vector<double> lll_pressure(std::span<const double> probs, std::span<const double> log1p_mu,
                                 const DependencyGraph &graph) {
  std::vector<double> out(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (probs[j] == 0) {
      out[j] = 0;
      continue;
    }
    double s = log1p_mu[j];
    for (std::uint32_t o : graph.neighbors(j))
      s += log1p_mu[o];
    out[j] = probs[j] * std::exp(s);
  }
  return out;
}

std::vector<double> log1p_all(std::span<const double> mu) {
  std::vector<double> out(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j)
    out[j] = std::log1p(mu[j]);
  return out;
}

} // namespace

std::vector<double> epsilon(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula,
                            const DependencyGraph &graph) {
  check_mu(mu, formula);
  if (graph.num_clauses() != formula.num_clauses())
    throw std::invalid_argument("dependency graph does not match formula");
  const auto probs = violation_probs(oracle, formula);
  auto eps = lll_pressure(probs, log1p_all(mu), graph);
  for (std::size_t j = 0; j < eps.size(); ++j)
    eps[j] -= mu[j];
  return eps;
}

double clamped_norm(std::span<const double> eps, double z) {
  if (!(z >= 1))
    throw std::invalid_argument("norm order z must be >= 1");
  double largest = 0;
  for (double e : eps)
    largest = std::max(largest, e);
  if (largest == 0 || std::isinf(largest) || std::isinf(z))
    return largest;
  // Scaling by the largest entry keeps tiny positive slacks from underflowing to 0.
  double sum = 0;
  for (double e : eps)
    if (e > 0)
      sum += std::pow(e / largest, z);
  return largest * std::pow(sum, 1.0 / z);
}

LllReport check_lll(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula, double z) {
  return check_lll(oracle, mu, formula, build_dependency_graph(formula), z);
}

LllReport check_lll(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula,
                    const DependencyGraph &graph, double z) {
  LllReport report;
  report.epsilon = epsilon(oracle, mu, formula, graph);
  report.violation_probs = violation_probs(oracle, formula);
  report.satisfied = std::all_of(report.epsilon.begin(), report.epsilon.end(), [](double e) { return e <= 0; });
  for (double u : mu)
    report.expected_steps_bound += u;
  report.z = z;
  report.lll_loss = clamped_norm(report.epsilon, z);
  return report;
}

double lll_loss(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula, double z) {
  return clamped_norm(epsilon(oracle, mu, formula, build_dependency_graph(formula)), z);
}

MuSearchResult find_mu_fixed_point(const ProductOracle &oracle, const Formula &formula, const DependencyGraph &graph,
                                   std::size_t max_iters, double tol, double cap) {
  MuSearchResult result;
  const auto probs = violation_probs(oracle, formula);
  std::vector<double> mu(formula.num_clauses(), 0.0);
  for (std::size_t it = 1; it <= max_iters; ++it) {
    auto next = lll_pressure(probs, log1p_all(mu), graph);
    double change = 0;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      if (!std::isfinite(next[j]) || next[j] > cap) {
        result.iterations = it;
        result.failure = "diverged: mu_" + std::to_string(j + 1) + " exceeded " + format_double(cap);
        return result;
      }
      change = std::max(change, next[j] - mu[j]);
    }
    // The iteration is monotone from 0, so eps(mu) equals this step's increment.
    if (change <= tol) {
      result.converged = true;
      result.iterations = it;
      break;
    }
    mu = std::move(next);
  }
  if (!result.converged) {
    result.iterations = max_iters;
    result.failure = "no convergence within " + std::to_string(max_iters) + " iterations";
    return result;
  }
  result.mu = mu;
  for (double inflate : {0.0, 1e-12, 1e-9, 1e-6, 1e-3}) {
    std::vector<double> candidate(mu);
    for (double &u : candidate)
      u *= 1.0 + inflate;
    const auto eps = epsilon(oracle, candidate, formula, graph);
    if (std::all_of(eps.begin(), eps.end(), [](double e) { return e <= 0; })) {
      result.mu = std::move(candidate);
      result.strictly_satisfied = true;
      break;
    }
  }
  return result;
}

SampleSet SampleSet::make(const Formula &formula, std::vector<Assignment> assignments) {
  if (assignments.empty())
    throw std::invalid_argument("sample set is empty");
  std::set<Assignment> seen;
  SampleSet s;
  s.violations_.reserve(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i].size() != formula.num_vars())
      throw std::invalid_argument("sample " + std::to_string(i + 1) + " has length " +
                                  std::to_string(assignments[i].size()) + ", expected " +
                                  std::to_string(formula.num_vars()));
    if (!seen.insert(assignments[i]).second)
      throw std::invalid_argument("sample " + std::to_string(i + 1) + " duplicates an earlier sample");
    s.violations_.push_back(static_cast<std::uint32_t>(count_violated(formula, assignments[i])));
  }
  s.assignments_ = std::move(assignments);
  return s;
}

SampleSet read_samples(std::string_view text, const Formula &formula) {
  std::vector<Assignment> assignments;
  std::size_t line_no = 0;
  int state = 0; // 0: header, 1: n, 2: rows
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos)
      eol = text.size();
    auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#')
      continue;
    auto fail = [&](const std::string &what) {
      throw std::runtime_error("samples line " + std::to_string(line_no) + ": " + what);
    };
    if (state == 0) {
      if (line != "SAMPLES 1")
        fail("missing 'SAMPLES 1' header");
      state = 1;
    } else if (state == 1) {
      auto tok = split_whitespace(line);
      if (tok.size() != 2 || tok[0] != "n")
        fail("expected 'n <n>'");
      if (parse_int(tok[1]) != static_cast<long long>(formula.num_vars()))
        fail("n = " + std::string(tok[1]) + " does not match formula n = " + std::to_string(formula.num_vars()));
      state = 2;
    } else {
      if (line.size() != formula.num_vars())
        fail("assignment has length " + std::to_string(line.size()));
      try {
        assignments.push_back(Assignment::from_string(line));
      } catch (const std::invalid_argument &e) {
        fail(e.what());
      }
    }
  }
  if (state < 2)
    throw std::runtime_error("samples file is truncated");
  return SampleSet::make(formula, std::move(assignments));
}

SampleSet read_samples_file(const std::string &path, const Formula &formula) {
  try {
    return read_samples(read_text_file(path), formula);
  } catch (const std::exception &e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string write_samples(std::span<const Assignment> assignments) {
  std::string out = "SAMPLES 1\nn " + std::to_string(assignments.empty() ? 0 : assignments.front().size()) + "\n";
  for (const auto &x : assignments)
    out += x.to_string() + "\n";
  return out;
}

std::vector<double> gibbs_weights(std::span<const std::uint32_t> violations, double beta) {
  if (violations.empty())
    throw std::invalid_argument("no samples");
  if (!(beta > 0))
    throw std::invalid_argument("beta must be positive");
  const std::uint32_t lowest = *std::min_element(violations.begin(), violations.end());
  std::vector<double> w(violations.size());
  double z = 0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = std::exp(-beta * static_cast<double>(violations[j] - lowest));
    z += w[j];
  }
  for (double &x : w)
    x /= z;
  return w;
}

double gibbs_loss_estimate(const ProductOracle &oracle, std::span<const Assignment> samples,
                           std::span<const std::uint32_t> violations, double beta) {
  if (samples.size() != violations.size())
    throw std::invalid_argument("samples and violations differ in length");
  const auto weights = gibbs_weights(violations, beta);
  double loss = 0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    if (weights[j] == 0)
      continue;
    const double lp = log_probability(oracle, samples[j]);
    if (std::isinf(lp))
      return HUGE_VAL;
    loss -= weights[j] * lp;
  }
  return loss;
}

double gibbs_loss_estimate(const ProductOracle &oracle, const SampleSet &samples, double beta) {
  return gibbs_loss_estimate(oracle, samples.assignments(), samples.violations(), beta);
}

LossBreakdown total_loss(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula,
                         const SampleSet &samples, const LossParams &params) {
  if (params.gamma_gibbs < 0 || params.gamma_lll < 0)
    throw std::invalid_argument("loss weights must be nonnegative");
  LossBreakdown out;
  out.gibbs = gibbs_loss_estimate(oracle, samples, params.beta);
  out.lll = lll_loss(oracle, mu, formula, params.z);
  // A zero weight switches a term off entirely, including an infinite one.
  out.total = (params.gamma_gibbs == 0 ? 0 : params.gamma_gibbs * out.gibbs) +
              (params.gamma_lll == 0 ? 0 : params.gamma_lll * out.lll);
  return out;
}

} // namespace oraclesat
