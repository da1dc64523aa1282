#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include <boost/random/normal_distribution.hpp>

namespace pickands {

using Rng = std::mt19937_64;
using NormalSampler = boost::random::normal_distribution<double>;

/// Sampling controls shared by every Monte Carlo routine.
///
/// Samples are split into consecutive batches of `batch_size`; batch k draws
/// from its own engine seeded by (seed, k). Results therefore depend only on
/// (seed, samples, batch_size), never on `threads`.
struct MCConfig {
  std::uint64_t seed = 0;
  std::uint64_t samples = 100000;
  std::uint64_t batch_size = 4096;
  unsigned threads = 0;  // 0: hardware concurrency
  double confidence = 0.99;
};

struct MCEstimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t hits = 0;
};

struct Interval {
  double low;
  double high;
};

/// Two-sided Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double confidence);

MCEstimate make_estimate(std::uint64_t hits, std::uint64_t trials, const MCConfig& cfg);

/// Engine seed for batch `index` (SplitMix64 finalizer over seed and index).
std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t index) noexcept;

struct Batch {
  std::uint64_t index;
  std::uint64_t count;
  Rng& rng;
};

/// Runs `fn(Batch&)` for every batch and returns the per-batch results in
/// batch order.
template <class Fn>
auto run_batches(const MCConfig& cfg, Fn&& fn) {
  using Result = decltype(fn(std::declval<Batch&>()));
  const std::uint64_t batch = std::max<std::uint64_t>(1, cfg.batch_size);
  const std::uint64_t nbatches = (cfg.samples + batch - 1) / batch;
  std::vector<Result> results(nbatches);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t k = next++; k < nbatches; k = next++) {
      Rng rng(batch_seed(cfg.seed, k));
      const std::uint64_t count = std::min(batch, cfg.samples - k * batch);
      Batch b{k, count, rng};
      results[k] = fn(b);
    }
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, nbatches));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return results;
}

/// Bernoulli estimator: `trial(rng)` returns true on a hit.
template <class Trial>
MCEstimate estimate_probability(const MCConfig& cfg, Trial&& trial) {
  const auto counts = run_batches(cfg, [&](Batch& b) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < b.count; ++i) hits += trial(b.rng) ? 1 : 0;
    return hits;
  });
  std::uint64_t hits = 0;
  for (auto c : counts) hits += c;
  return make_estimate(hits, cfg.samples, cfg);
}

/// Block estimator: `hits(rng, count)` simulates `count` trials at once.
template <class Block>
MCEstimate estimate_probability_block(const MCConfig& cfg, Block&& block) {
  const auto counts = run_batches(cfg, [&](Batch& b) -> std::uint64_t {
    return block(b.rng, static_cast<std::ptrdiff_t>(b.count));
  });
  std::uint64_t hits = 0;
  for (auto c : counts) hits += c;
  return make_estimate(hits, cfg.samples, cfg);
}

}  // namespace pickands
