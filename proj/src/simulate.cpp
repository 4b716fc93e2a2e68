#include "probesched/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "probesched/error.hpp"
#include "probesched/io.hpp"

namespace probesched {

std::vector<BiasBand> default_bias_bands() {
  return {{1000, kUnboundedDegree, 0.1}, {500, 1000, 0.05}, {100, 500, 0.01}, {0, 100, 0.0}};
}

void validate_bands(std::span<const BiasBand> bands) {
  if (bands.empty()) throw ValidationError("no bias bands given");
  std::vector<BiasBand> sorted(bands.begin(), bands.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const BiasBand& a, const BiasBand& b) { return a.min_outdeg < b.min_outdeg; });
  std::size_t expected = 0;
  for (const BiasBand& b : sorted) {
    if (!(b.head_prob >= 0.0 && b.head_prob <= 1.0)) throw ValidationError("band head probability outside [0, 1]");
    if (b.max_outdeg <= b.min_outdeg) throw ValidationError("empty bias band");
    if (b.min_outdeg != expected) throw ValidationError("bias bands must be disjoint and cover [0, inf)");
    expected = b.max_outdeg;
  }
  if (expected != kUnboundedDegree) throw ValidationError("bias bands must be disjoint and cover [0, inf)");
}

CascadeSource::CascadeSource(Graph graph, std::vector<BiasBand> bands)
    : graph_(std::move(graph)), bands_(std::move(bands)) {
  validate_bands(bands_);
  head_probs_.assign(graph_.n(), 0.0);
  band_sizes_.assign(bands_.size(), 0);
  for (NodeId v = 0; v < graph_.n(); ++v) {
    const std::size_t d = graph_.out_degree(v);
    for (std::size_t b = 0; b < bands_.size(); ++b) {
      if (d >= bands_[b].min_outdeg && d < bands_[b].max_outdeg) {
        head_probs_[v] = bands_[b].head_prob;
        ++band_sizes_[b];
        break;
      }
    }
    if (head_probs_[v] > 0.0) seeds_.push_back(v);
  }
}

std::size_t source_nodes(const ItemSource& src) noexcept {
  return std::visit(
      [](const auto& s) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GeneratingProcess>) {
          return s.n();
        } else {
          return s.graph().n();
        }
      },
      src);
}

ItemSource relabeled(const ItemSource& src, std::span<const NodeId> perm) {
  if (const auto* process = std::get_if<GeneratingProcess>(&src)) return process->relabeled(perm);
  const auto& cascade = std::get<CascadeSource>(src);
  return CascadeSource(cascade.graph().relabeled(perm), std::vector<BiasBand>(cascade.bands().begin(),
                                                                               cascade.bands().end()));
}

namespace {

NodeSet run_cascade(const Graph& g, NodeId seed, CounterRng& rng) {
  thread_local std::vector<std::uint64_t> stamp;
  thread_local std::uint64_t epoch = 0;
  if (stamp.size() < g.n()) stamp.assign(g.n(), 0);
  ++epoch;

  std::vector<NodeId> reached{seed};
  stamp[seed] = epoch;
  for (std::size_t head = 0; head < reached.size(); ++head) {
    for (NodeId w : g.out_neighbors(reached[head])) {
      if (stamp[w] == epoch) continue;
      if (rng.uniform() * static_cast<double>(g.in_degree(w)) < 1.0) {
        stamp[w] = epoch;
        reached.push_back(w);
      }
    }
  }
  return NodeSet(std::move(reached));
}

}  // namespace

std::vector<NodeSet> generate_items(const ItemSource& src, std::uint64_t /*t*/, CounterRng& rng) {
  std::vector<NodeSet> items;
  if (const auto* process = std::get_if<GeneratingProcess>(&src)) {
    for (const WeightedSet& ws : process->sets()) {
      if (rng.bernoulli(ws.weight)) items.push_back(ws.set);
    }
    return items;
  }
  const auto& cascade = std::get<CascadeSource>(src);
  for (NodeId v : cascade.seeds()) {
    if (rng.bernoulli(cascade.head_prob(v))) items.push_back(run_cascade(cascade.graph(), v, rng));
  }
  return items;
}

double expected_generation_rate(const CascadeSource& src) noexcept {
  double rate = 0.0;
  for (std::size_t b = 0; b < src.bands().size(); ++b) {
    rate += static_cast<double>(src.band_size(b)) * src.bands()[b].head_prob;
  }
  return rate;
}

double generation_rate_variance(const CascadeSource& src) noexcept {
  double var = 0.0;
  for (std::size_t b = 0; b < src.bands().size(); ++b) {
    const double q = src.bands()[b].head_prob;
    var += static_cast<double>(src.band_size(b)) * q * (1.0 - q);
  }
  return var;
}

ProbeDrawer::ProbeDrawer(const Schedule& p, unsigned c, ProbeMode mode)
    : probs_(p.probs().begin(), p.probs().end()), sampler_(p.probs()), c_(c), mode_(mode) {
  if (c < 1) throw ValidationError("probe budget c must be at least 1");
}

NodeSet ProbeDrawer::draw(CounterRng& rng) const {
  std::vector<NodeId> picked;
  picked.reserve(c_);
  if (mode_ == ProbeMode::with_replacement) {
    for (unsigned k = 0; k < c_; ++k) picked.push_back(static_cast<NodeId>(sampler_(rng)));
    return NodeSet(std::move(picked));
  }
  std::vector<double> remaining = probs_;
  for (unsigned k = 0; k < c_; ++k) {
    double total = 0.0;
    for (double x : remaining) total += x;
    if (!(total > 0.0)) break;
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t chosen = remaining.size();
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (remaining[i] <= 0.0) continue;
      last_positive = i;
      acc += remaining[i];
      if (u < acc) {
        chosen = i;
        break;
      }
    }
    if (chosen == remaining.size()) chosen = last_positive;
    picked.push_back(static_cast<NodeId>(chosen));
    remaining[chosen] = 0.0;
  }
  return NodeSet(std::move(picked));
}

NodeSet draw_probe_set(const Schedule& p, unsigned c, CounterRng& rng, ProbeMode mode) {
  return ProbeDrawer(p, c, mode).draw(rng);
}

void LoadTrace::push(const StepRecord& r) {
  steps.push_back(r);
  generated_total += r.generated;
  caught_total += r.caught;
  expired_total += r.expired;
}

double LoadTrace::average_load(std::size_t begin, std::size_t end) const {
  end = std::min(end, steps.size());
  if (begin >= end) throw ValidationError("empty load window");
  double total = 0.0;
  for (std::size_t t = begin; t < end; ++t) total += steps[t].load;
  return total / static_cast<double>(end - begin);
}

std::vector<double> LoadTrace::running_average(std::size_t window) const {
  if (window == 0) throw ValidationError("window must be positive");
  std::vector<double> out(steps.size());
  double total = 0.0;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    total += steps[t].load;
    if (t >= window) total -= steps[t - window].load;
    out[t] = total / static_cast<double>(std::min(t + 1, window));
  }
  return out;
}

std::string format_load_csv(const LoadTrace& trace) {
  std::string out = "step,load,generated,caught\n";
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const StepRecord& r = trace.steps[t];
    out += std::to_string(t);
    out += ',';
    out += format_double(r.load);
    out += ',';
    out += std::to_string(r.generated);
    out += ',';
    out += std::to_string(r.caught);
    out += '\n';
  }
  return out;
}

Simulator::Simulator(std::size_t n, double theta, double novelty_floor)
    : n_(n), theta_(theta), floor_(novelty_floor), probed_stamp_(n, 0) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
}

StepRecord Simulator::step(std::vector<NodeSet> items, const ProbeDrawer* drawer, CounterRng& probe_rng,
                           std::vector<LiveItem>* caught) {
  StepRecord record{0.0, static_cast<std::uint32_t>(items.size()), 0, 0, 0};
  for (NodeSet& set : items) {
    if (set.max_id() >= n_) throw DimensionError("generated set references a node outside the schedule");
    pool_.push_back({t_, std::move(set)});
  }

  for (const LiveItem& item : pool_) record.load += std::pow(theta_, static_cast<double>(t_ - item.born));

  const std::uint64_t mark = t_ + 1;
  if (drawer != nullptr) {
    const NodeSet probed = drawer->draw(probe_rng);
    for (NodeId v : probed.members()) probed_stamp_[v] = mark;
  }
  std::vector<LiveItem> kept;
  kept.reserve(pool_.size());
  for (LiveItem& item : pool_) {
    bool hit = drawer == nullptr;
    if (!hit) {
      for (NodeId v : item.set.members()) {
        if (probed_stamp_[v] == mark) {
          hit = true;
          break;
        }
      }
    }
    if (hit) {
      ++record.caught;
      if (caught != nullptr) caught->push_back(std::move(item));
    } else if (std::pow(theta_, static_cast<double>(t_ + 1 - item.born)) < floor_) {
      ++record.expired;
    } else {
      kept.push_back(std::move(item));
    }
  }
  pool_ = std::move(kept);
  record.live = static_cast<std::uint32_t>(pool_.size());
  ++t_;
  return record;
}

LoadTrace run_simulation(const ItemSource& src, const Schedule& p, const CostParams& params, std::size_t steps,
                         CounterRng& rng, const SimulationOptions& opts) {
  const std::size_t n = source_nodes(src);
  if (p.size() != n) throw DimensionError("schedule does not match the source's node count");
  if (steps < 1) throw ValidationError("simulation needs at least one step");
  CounterRng gen_rng = rng.fork(1);
  CounterRng probe_rng = rng.fork(2);
  const ProbeDrawer drawer(p, params.c(), opts.mode);
  Simulator sim(n, params.theta(), opts.novelty_floor);
  LoadTrace trace;
  trace.steps.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) trace.push(sim.step(generate_items(src, t, gen_rng), &drawer, probe_rng));
  return trace;
}

Sample collect_sample(const ItemSource& src, std::size_t steps, CounterRng& rng) {
  if (steps < 1) throw ValidationError("sample needs at least one step");
  Sample sample;
  sample.steps.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) sample.steps.push_back(generate_items(src, t, rng));
  return sample;
}

}  // namespace probesched
