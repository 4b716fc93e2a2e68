#include "probesched/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "probesched/error.hpp"

namespace probesched {

NodeSet::NodeSet(std::vector<NodeId> members) : members_(std::move(members)) {
  if (members_.empty()) throw ValidationError("node set must be nonempty");
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool NodeSet::contains(NodeId v) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), v);
}

namespace {

void build_csr(std::size_t n, std::span<const Edge> edges, bool by_source, std::vector<std::size_t>& offsets,
               std::vector<NodeId>& neighbors) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(by_source ? e.source : e.target) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  neighbors.resize(edges.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Edge& e : edges) {
    const NodeId key = by_source ? e.source : e.target;
    neighbors[cursor[key]++] = by_source ? e.target : e.source;
  }
  for (std::size_t v = 0; v < n; ++v) std::sort(neighbors.begin() + offsets[v], neighbors.begin() + offsets[v + 1]);
}

}  // namespace

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.source >= n_ || e.target >= n_) {
      throw ValidationError("edge (" + std::to_string(e.source) + ", " + std::to_string(e.target) +
                            ") references a node outside [0, " + std::to_string(n_) + ")");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  build_csr(n_, edges_, true, out_offsets_, out_targets_);
  build_csr(n_, edges_, false, in_offsets_, in_sources_);
}

Graph Graph::relabeled(std::span<const NodeId> perm) const {
  check_permutation(perm, n_);
  std::vector<Edge> mapped;
  mapped.reserve(edges_.size());
  for (const Edge& e : edges_) mapped.push_back({perm[e.source], perm[e.target]});
  return Graph(n_, std::move(mapped));
}

GeneratingProcess::GeneratingProcess(std::size_t n, std::vector<WeightedSet> sets) : n_(n), sets_(std::move(sets)) {
  for (const WeightedSet& ws : sets_) {
    if (!(ws.weight >= 0.0 && ws.weight <= 1.0)) {
      throw ValidationError("set weight " + std::to_string(ws.weight) + " outside [0, 1]");
    }
    if (ws.set.max_id() >= n_) {
      throw ValidationError("set member " + std::to_string(ws.set.max_id()) + " outside [0, " + std::to_string(n_) +
                            ")");
    }
  }
  std::sort(sets_.begin(), sets_.end(), [](const WeightedSet& a, const WeightedSet& b) { return a.set < b.set; });
  const auto dup = std::adjacent_find(sets_.begin(), sets_.end(),
                                      [](const WeightedSet& a, const WeightedSet& b) { return a.set == b.set; });
  if (dup != sets_.end()) throw ValidationError("duplicate set in generating process");
}

double GeneratingProcess::total_weight() const noexcept {
  double total = 0.0;
  for (const WeightedSet& ws : sets_) total += ws.weight;
  return total;
}

GeneratingProcess GeneratingProcess::relabeled(std::span<const NodeId> perm) const {
  check_permutation(perm, n_);
  std::vector<WeightedSet> mapped;
  mapped.reserve(sets_.size());
  for (const WeightedSet& ws : sets_) {
    std::vector<NodeId> members;
    members.reserve(ws.set.size());
    for (NodeId v : ws.set.members()) members.push_back(perm[v]);
    mapped.push_back({NodeSet(std::move(members)), ws.weight});
  }
  return GeneratingProcess(n_, std::move(mapped));
}

Schedule Schedule::uniform(std::size_t n) {
  if (n == 0) throw ValidationError("schedule needs at least one node");
  return Schedule(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Schedule Schedule::from_normalized(std::vector<double> probs) {
  if (probs.empty()) throw ValidationError("schedule needs at least one node");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw ValidationError("schedule entry " + std::to_string(i) + " is negative or NaN");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("schedule sums to " + std::to_string(sum));
  return Schedule(std::move(probs));
}

Schedule validate_schedule(std::span<const double> raw) {
  if (raw.empty()) throw ValidationError("schedule needs at least one node");
  std::vector<double> probs(raw.begin(), raw.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < -1e-12) {
      throw ValidationError("schedule entry " + std::to_string(i) + " = " + std::to_string(probs[i]) +
                            " is negative");
    }
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("schedule sum " + std::to_string(sum) + " is not 1");
  double clamped_sum = 0.0;
  for (double& x : probs) {
    x = std::max(x, 0.0);
    clamped_sum += x;
  }
  if (clamped_sum != 1.0) {
    for (double& x : probs) x /= clamped_sum;
  }
  return Schedule(std::move(probs));
}

double set_mass(const Schedule& p, const NodeSet& s) {
  if (s.max_id() >= p.size()) {
    throw DimensionError("set member " + std::to_string(s.max_id()) + " outside schedule of size " +
                         std::to_string(p.size()));
  }
  double mass = 0.0;
  for (NodeId v : s.members()) mass += p[v];
  return std::clamp(mass, 0.0, 1.0);
}

std::size_t Sample::occurrences() const noexcept {
  std::size_t total = 0;
  for (const auto& step : steps) total += step.size();
  return total;
}

CostParams::CostParams(double theta, unsigned c) : theta_(theta), c_(c) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  if (c < 1) throw ValidationError("probe budget c must be at least 1");
}

void check_permutation(std::span<const NodeId> perm, std::size_t n) {
  if (perm.size() != n) throw DimensionError("permutation size does not match node count");
  std::vector<bool> seen(n, false);
  for (NodeId v : perm) {
    if (v >= n || seen[v]) throw ValidationError("not a permutation of [0, n)");
    seen[v] = true;
  }
}

}  // namespace probesched
