#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oraclesat {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

// Seed of the private stream for one run; independent of scheduling order.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::string_view instance_id, std::uint64_t run_index);

// Reproducible random stream. All draws are defined in terms of raw 64-bit
// mt19937_64 output so sequences agree across standard libraries.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return next_double() < p; }

private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

} // namespace oraclesat
