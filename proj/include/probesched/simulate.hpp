#pragma once

// Discrete-time simulation: items are generated, impose a theta-decaying load
// while uncaught, and are caught when a probe hits one of their nodes.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "probesched/cost.hpp"
#include "probesched/model.hpp"
#include "probesched/rng.hpp"

namespace probesched {

inline constexpr std::size_t kUnboundedDegree = std::numeric_limits<std::size_t>::max();

// Nodes with out-degree in [min_outdeg, max_outdeg) start an item with
// probability head_prob each step.
struct BiasBand {
  std::size_t min_outdeg;
  std::size_t max_outdeg;
  double head_prob;
};

// >=1000: 0.1, [500,1000): 0.05, [100,500): 0.01, <100: 0.
std::vector<BiasBand> default_bias_bands();
// Throws ValidationError unless the bands are disjoint, cover [0, inf) and
// have probabilities in [0, 1].
void validate_bands(std::span<const BiasBand> bands);

// Independent-Cascade item generator: each head node seeds a cascade in which
// every edge u->w fires once, with probability 1 / in_degree(w), when u is
// first reached.
class CascadeSource {
 public:
  CascadeSource(Graph graph, std::vector<BiasBand> bands);

  const Graph& graph() const noexcept { return graph_; }
  std::span<const BiasBand> bands() const noexcept { return bands_; }
  double head_prob(NodeId v) const noexcept { return head_probs_[v]; }
  // Nodes with positive head probability, ascending.
  std::span<const NodeId> seeds() const noexcept { return seeds_; }
  std::size_t band_size(std::size_t band) const noexcept { return band_sizes_[band]; }

 private:
  Graph graph_;
  std::vector<BiasBand> bands_;
  std::vector<double> head_probs_;
  std::vector<NodeId> seeds_;
  std::vector<std::size_t> band_sizes_;
};

using ItemSource = std::variant<GeneratingProcess, CascadeSource>;

std::size_t source_nodes(const ItemSource& src) noexcept;
ItemSource relabeled(const ItemSource& src, std::span<const NodeId> perm);

// Sets generated at one step.
std::vector<NodeSet> generate_items(const ItemSource& src, std::uint64_t t, CounterRng& rng);

// Expected number of heads per step: sum over bands of band size x head_prob.
double expected_generation_rate(const CascadeSource& src) noexcept;
// Variance of the per-step head count (Poisson-binomial).
double generation_rate_variance(const CascadeSource& src) noexcept;

enum class ProbeMode {
  // c independent draws from p, duplicates collapsed. Matches the
  // (1 - p(S))^c miss probability of the closed-form cost exactly.
  with_replacement,
  // c sequential draws without replacement; approximate for c > 1.
  without_replacement,
};

class ProbeDrawer {
 public:
  ProbeDrawer(const Schedule& p, unsigned c, ProbeMode mode = ProbeMode::with_replacement);
  NodeSet draw(CounterRng& rng) const;

 private:
  std::vector<double> probs_;
  DiscreteSampler sampler_;
  unsigned c_;
  ProbeMode mode_;
};

NodeSet draw_probe_set(const Schedule& p, unsigned c, CounterRng& rng,
                       ProbeMode mode = ProbeMode::with_replacement);

struct StepRecord {
  double load;
  std::uint32_t generated;
  std::uint32_t caught;
  std::uint32_t expired;
  std::uint32_t live;  // pool size after the step
};

struct LoadTrace {
  std::vector<StepRecord> steps;
  std::uint64_t generated_total = 0;
  std::uint64_t caught_total = 0;
  std::uint64_t expired_total = 0;

  void push(const StepRecord& r);
  std::size_t size() const noexcept { return steps.size(); }
  // Mean load over steps [begin, end).
  double average_load(std::size_t begin, std::size_t end) const;
  double average_load() const { return average_load(0, steps.size()); }
  // Trailing mean over at most `window` steps ending at each step.
  std::vector<double> running_average(std::size_t window) const;
  std::uint64_t live() const noexcept { return steps.empty() ? 0 : steps.back().live; }
};

// CSV with header "step,load,generated,caught".
std::string format_load_csv(const LoadTrace& trace);

struct LiveItem {
  std::uint64_t born;
  NodeSet set;
};

struct SimulationOptions {
  ProbeMode mode = ProbeMode::with_replacement;
  // Items whose novelty would fall below this are dropped from the pool.
  double novelty_floor = 1e-12;
};

// Step-level simulation state. Each step: (1) the given items join the pool,
// (2) the load sum theta^(t - born) over the pool is recorded, (3) the probe
// set is drawn and every pool item meeting it is caught.
class Simulator {
 public:
  Simulator(std::size_t n, double theta, double novelty_floor = 1e-12);

  std::uint64_t now() const noexcept { return t_; }
  std::span<const LiveItem> pool() const noexcept { return pool_; }

  // drawer == nullptr observes every node: all items are caught at birth.
  // Caught items are appended to *caught when given.
  StepRecord step(std::vector<NodeSet> items, const ProbeDrawer* drawer, CounterRng& probe_rng,
                  std::vector<LiveItem>* caught = nullptr);

 private:
  std::size_t n_;
  double theta_;
  double floor_;
  std::uint64_t t_ = 0;
  std::vector<LiveItem> pool_;
  std::vector<std::uint64_t> probed_stamp_;
};

// Generation and probing draw from independent substreams of rng.
LoadTrace run_simulation(const ItemSource& src, const Schedule& p, const CostParams& params, std::size_t steps,
                         CounterRng& rng, const SimulationOptions& opts = {});

// Full observation for `steps` steps; records generated sets verbatim.
Sample collect_sample(const ItemSource& src, std::size_t steps, CounterRng& rng);

}  // namespace probesched
