#include "probesched/rng.hpp"

#include <algorithm>

#include "probesched/error.hpp"

namespace probesched {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed) ^ (stream * kGolden + 0x632BE59BD9B4E019ull))) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

CounterRng CounterRng::fork(std::uint64_t stream) const noexcept {
  CounterRng child(0);
  child.key_ = mix64(key_ ^ mix64(stream + 1));
  return child;
}

std::vector<NodeId> random_permutation(std::size_t n, CounterRng& rng) {
  std::vector<NodeId> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<NodeId>(i);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights) : cumulative_(weights.size()) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw ValidationError("sampling weights must be non-negative");
    total += weights[i];
    cumulative_[i] = total;
  }
  if (!(total > 0.0)) throw ValidationError("sampling weights sum to zero");
}

std::size_t DiscreteSampler::operator()(CounterRng& rng) const noexcept {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i == cumulative_.size()) {
    // u rounded up to the total; take the last entry with positive weight.
    i = cumulative_.size() - 1;
    while (i > 0 && cumulative_[i] == cumulative_[i - 1]) --i;
  }
  return i;
}

}  // namespace probesched
