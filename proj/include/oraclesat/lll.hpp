#pragma once

#include "oraclesat/cnf.hpp"
#include "oraclesat/oracle.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oraclesat {

// Structural dependency graph: clauses are adjacent iff their variable sets
// intersect. Symmetric and irreflexive; neighbor lists sorted.
class DependencyGraph {
public:
  DependencyGraph() = default;
  explicit DependencyGraph(std::vector<std::vector<std::uint32_t>> adjacency) : adjacency_(std::move(adjacency)) {}

  std::size_t num_clauses() const { return adjacency_.size(); }
  std::span<const std::uint32_t> neighbors(std::size_t j) const { return adjacency_[j]; }
  std::size_t num_edges() const;

private:
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

DependencyGraph build_dependency_graph(const Formula &formula);

// P_O(c violated) = prod_{v in V+(c)} (1 - w_v) * prod_{v in V-(c)} w_v.
double clause_violation_prob(const ProductOracle &oracle, const Clause &clause);
std::vector<double> violation_probs(const ProductOracle &oracle, const Formula &formula);

// eps_j = P_O(j) * prod_{j' in Gamma+(j)} (1 + mu_j') - mu_j, with the product
// evaluated as exp(sum log1p(mu)).
std::vector<double> epsilon(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula,
                            const DependencyGraph &graph);

constexpr double kInfNorm = std::numeric_limits<double>::infinity();

// z-norm of (max(0, eps_j))_j; z >= 1, z = kInfNorm for the max norm.
double clamped_norm(std::span<const double> eps, double z);

struct LllReport {
  std::vector<double> violation_probs;
  std::vector<double> epsilon;
  bool satisfied = false;  // every eps_j <= 0, compared exactly
  double expected_steps_bound = 0; // sum_j mu_j
  double z = 2;
  double lll_loss = 0;
};

LllReport check_lll(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula, double z = 2);
LllReport check_lll(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula,
                    const DependencyGraph &graph, double z = 2);

double lll_loss(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula, double z);

struct MuSearchResult {
  bool converged = false;
  // On convergence, eps(mu) <= tol componentwise.
  std::vector<double> mu;
  std::size_t iterations = 0;
  // A slightly inflated mu satisfying the condition exactly, when one was found.
  bool strictly_satisfied = false;
  std::string failure;
};

// Iterates mu <- P * prod_{Gamma+}(1 + mu) from mu = 0. Failure means the
// iteration diverged or stalled; it does not prove the condition unsatisfiable.
MuSearchResult find_mu_fixed_point(const ProductOracle &oracle, const Formula &formula, const DependencyGraph &graph,
                                   std::size_t max_iters = 10000, double tol = 1e-12, double cap = 1e6);

// Distinct assignments with violation counts recomputed against the formula.
class SampleSet {
public:
  static SampleSet make(const Formula &formula, std::vector<Assignment> assignments);

  std::size_t size() const { return assignments_.size(); }
  std::span<const Assignment> assignments() const { return assignments_; }
  std::span<const std::uint32_t> violations() const { return violations_; }

private:
  std::vector<Assignment> assignments_;
  std::vector<std::uint32_t> violations_;
};

// File format:
//   SAMPLES 1
//   n <n>
//   <n-character 0/1 string>   (one per line)
SampleSet read_samples(std::string_view text, const Formula &formula);
SampleSet read_samples_file(const std::string &path, const Formula &formula);
std::string write_samples(std::span<const Assignment> assignments);

// Self-normalized Gibbs weights exp(-beta e_j) / sum_k exp(-beta e_k).
std::vector<double> gibbs_weights(std::span<const std::uint32_t> violations, double beta);

// -sum_j w_j log P_O(x^j). Returns +inf when a weighted sample has probability 0.
double gibbs_loss_estimate(const ProductOracle &oracle, std::span<const Assignment> samples,
                           std::span<const std::uint32_t> violations, double beta);
double gibbs_loss_estimate(const ProductOracle &oracle, const SampleSet &samples, double beta);

struct LossParams {
  double beta = 1;
  double z = 2;
  double gamma_gibbs = 1;
  double gamma_lll = 1;
};

struct LossBreakdown {
  double gibbs = 0;
  double lll = 0;
  double total = 0;
};

LossBreakdown total_loss(const ProductOracle &oracle, std::span<const double> mu, const Formula &formula,
                         const SampleSet &samples, const LossParams &params);

} // namespace oraclesat
