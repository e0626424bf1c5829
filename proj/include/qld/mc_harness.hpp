#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qld/distributions.hpp"

namespace qld {

// Monte Carlo estimate of P((1/n) sum X_k >= x).
struct MCEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;  // sqrt(p_hat (1 - p_hat) / samples)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int n = 1;
  double x = 0.0;

  // Rule-of-three ceiling 3/samples when no exceedance was observed, else
  // p_hat + 3 std_error.
  double upper_3sigma() const;
  double lower_3sigma() const { return p_hat - 3.0 * std_error; }
};

struct MCOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// Batches (one batch = n draws) per chunk. Chunk c draws from
// Rng(derive_seed(seed, c)), so results do not depend on the worker count.
inline constexpr std::uint64_t kMCChunkBatches = 1u << 15;

MCEstimate estimate_tail_of_mean(const DistributionModel& model, int n, double x,
                                 const MCOptions& opts);

// One estimate per grid point from a single shared set of batches; the
// resulting p_hat sequence is non-increasing in x.
std::vector<MCEstimate> estimate_curve(const DistributionModel& model, int n,
                                       std::span<const double> x_grid, const MCOptions& opts);

}  // namespace qld
