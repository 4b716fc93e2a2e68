#pragma once

// Online estimation of set frequencies from caught items, a staleness rule for
// detecting changes in the generating process, and the observe / re-solve loop.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "probesched/cost.hpp"
#include "probesched/model.hpp"
#include "probesched/rng.hpp"
#include "probesched/simulate.hpp"
#include "probesched/solver.hpp"

namespace probesched {

struct Observation {
  std::uint64_t born;
  NodeSet set;
};

struct PiRecord {
  std::size_t count;
  std::uint64_t first_seen;
  std::uint64_t last_seen;
  double pi_hat;
};

// Per-set occurrence counts keyed by canonical NodeSet. pi_hat is the count
// divided by the number of steps observed since the store's origin. Capacity
// is bounded; the set seen least recently is evicted first.
class PiEstimate {
 public:
  explicit PiEstimate(std::uint64_t origin = 0, std::size_t capacity = 1'000'000);

  // Estimates from a fully observed sample whose first step is `first_step`.
  static PiEstimate from_sample(const Sample& sample, std::uint64_t first_step, std::size_t capacity = 1'000'000);

  // Registers caught items and advances the clock to `now` (inclusive).
  // Throws ValidationError if `now` or an item's birth step goes backwards
  // past the clock, or if an item is born after `now`.
  void update(std::span<const Observation> caught, std::uint64_t now);

  std::uint64_t origin() const noexcept { return origin_; }
  std::uint64_t observed_steps() const noexcept { return clock_ ? *clock_ + 1 - origin_ : 0; }
  std::size_t size() const noexcept { return records_.size(); }
  std::size_t evictions() const noexcept { return evictions_; }

  std::optional<PiRecord> find(const NodeSet& set) const;
  std::vector<std::pair<NodeSet, PiRecord>> records() const;

 private:
  struct Entry {
    std::size_t count;
    std::uint64_t first_seen;
    std::uint64_t last_seen;
  };
  PiRecord snapshot(const Entry& e) const noexcept;
  void touch(const NodeSet& set, std::uint64_t born, std::size_t count);

  std::uint64_t origin_;
  std::size_t capacity_;
  std::optional<std::uint64_t> clock_;
  std::size_t evictions_ = 0;
  std::map<NodeSet, Entry> records_;
  std::set<std::pair<std::uint64_t, NodeSet>> by_last_seen_;
};

struct AdaptiveConfig {
  double staleness_factor = 3.0;  // K
  double epsilon = 0.5;
  unsigned r = 1;
  // Steps of full observation per re-sample; 0 means required_sample_length
  // for (n, epsilon, theta, r).
  std::size_t resample_length = 0;
  // Sets with pi_hat below min_count / observed_steps are never stale.
  double min_count = 10.0;
  // Number of stale sets needed to signal drift.
  std::size_t quorum = 1;
  std::size_t capacity = 1'000'000;

  void validate() const;
};

// Sets with (now - last_seen) > K / pi_hat, among those with enough support.
std::vector<NodeSet> detect_change(const PiEstimate& est, std::uint64_t now, const AdaptiveConfig& cfg);

enum class EventKind { perturb, drift, resolve, evict };

std::string_view to_string(EventKind kind) noexcept;

// Each event's step is the first step governed by what it announces: a
// perturbation applies from `step`, a drift starts sampling at `step`, a
// resolve switches schedules at `step`. Eviction events mark no boundary.
struct Event {
  std::uint64_t step;
  EventKind kind;
  std::string detail;
};

// "step=<t> event=<kind> detail=<detail>", one event per line; details
// contain no whitespace.
std::string format_event(const Event& e);
std::string format_event_log(std::span<const Event> events);
std::vector<Event> parse_event_log(std::string_view text);

struct AdaptivePlan {
  std::size_t total_steps = 0;
  std::vector<std::size_t> perturb_at;  // node labels are permuted at these steps
  std::vector<std::size_t> sample_at;   // scheduled re-sampling starts
  bool detect_drift = true;
};

struct PhaseSummary {
  std::size_t begin;
  std::size_t end;
  bool sampling;
  double average_load;
};

struct AdaptiveResult {
  LoadTrace trace;
  std::vector<Event> events;
  std::vector<PhaseSummary> phases;
  Schedule final_schedule;
};

// Phase boundaries are the steps of non-eviction events, plus 0 and the trace
// end. A drift opens a sampling phase and a resolve closes it; averages are
// taken over the trace.
std::vector<PhaseSummary> phases_from_events(const LoadTrace& trace, std::span<const Event> events);

// Probes with `initial` and adapts: perturbations relabel the source, drift
// or a scheduled start triggers full observation for the re-sample length,
// after which the schedule is re-solved on that sample. A failed solve keeps
// the previous schedule and is logged.
AdaptiveResult adaptive_loop(ItemSource src, const Schedule& initial, const CostParams& params,
                             const AdaptiveConfig& cfg, const SolverConfig& solver_cfg, const AdaptivePlan& plan,
                             CounterRng& rng);

}  // namespace probesched
