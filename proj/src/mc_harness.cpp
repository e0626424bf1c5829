#include "qld/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qld/errors.hpp"
#include "qld/random.hpp"

namespace qld {

double MCEstimate::upper_3sigma() const {
  if (p_hat == 0.0) return 3.0 / static_cast<double>(samples);
  return p_hat + 3.0 * std_error;
}

namespace {

void validate(int n, std::span<const double> grid, const MCOptions& opts) {
  if (n < 1) throw DomainError("number of summands n must be >= 1");
  if (opts.samples < 1000) throw DomainError("Monte Carlo needs at least 1000 samples");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("x grid must be strictly increasing");
  }
}

// Counts per grid point for one chunk of batches.
void run_chunk(const DistributionModel& model, int n, std::span<const double> grid,
               std::uint64_t seed, std::uint64_t chunk, std::uint64_t batches,
               std::vector<double>& draws, std::vector<double>& means,
               std::vector<std::uint64_t>& counts) {
  Rng rng(derive_seed(seed, chunk));
  draws.resize(static_cast<std::size_t>(batches) * n);
  model.fill(rng, draws);
  means.resize(batches);
  for (std::uint64_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += draws[b * n + k];
    means[b] = s / n;
  }
  std::sort(means.begin(), means.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::lower_bound(means.begin(), means.end(), grid[i]);
    counts[i] += static_cast<std::uint64_t>(means.end() - it);
  }
}

}  // namespace

std::vector<MCEstimate> estimate_curve(const DistributionModel& model, int n,
                                       std::span<const double> x_grid, const MCOptions& opts) {
  validate(n, x_grid, opts);
  const std::uint64_t chunks = (opts.samples + kMCChunkBatches - 1) / kMCChunkBatches;
  const unsigned workers =
      std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(chunks)));

  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(x_grid.size(), 0));
  auto work = [&](unsigned w) {
    std::vector<double> draws, means;
    for (std::uint64_t c = w; c < chunks; c += workers) {
      const std::uint64_t first = c * kMCChunkBatches;
      const std::uint64_t batches = std::min(kMCChunkBatches, opts.samples - first);
      run_chunk(model, n, x_grid, opts.seed, c, batches, draws, means, partial[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<MCEstimate> out(x_grid.size());
  const double total = static_cast<double>(opts.samples);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    std::uint64_t hits = 0;
    for (const auto& p : partial) hits += p[i];
    MCEstimate& e = out[i];
    e.p_hat = static_cast<double>(hits) / total;
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / total);
    e.samples = opts.samples;
    e.seed = opts.seed;
    e.n = n;
    e.x = x_grid[i];
  }
  return out;
}

MCEstimate estimate_tail_of_mean(const DistributionModel& model, int n, double x,
                                 const MCOptions& opts) {
  const double grid[] = {x};
  return estimate_curve(model, n, grid, opts).front();
}

}  // namespace qld
