#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "probesched/model.hpp"

namespace probesched {

// Counter-based generator: the k-th output is a SplitMix64 finalization of
// (key, k), so streams are reproducible from (seed, counter) alone and
// independent substreams come from fork(). Distribution code lives here
// rather than in <random> so that draws are identical across standard
// libraries.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  std::uint64_t counter() const noexcept { return counter_; }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  bool bernoulli(double prob) noexcept { return uniform() < prob; }

  // Independent generator derived from this one's key and the given stream id.
  CounterRng fork(std::uint64_t stream) const noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniformly random permutation of [0, n) (Fisher-Yates).
std::vector<NodeId> random_permutation(std::size_t n, CounterRng& rng);

// Draws indices from a discrete distribution by binary search over the
// cumulative weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights);
  std::size_t operator()(CounterRng& rng) const noexcept;

 private:
  std::vector<double> cumulative_;
};

}  // namespace probesched
