#pragma once

// Domain types shared by every module: graphs, node sets, generating
// processes, schedules, samples and cost parameters. All types are immutable
// after construction.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace probesched {

using NodeId = std::uint32_t;

// A nonempty, strictly ascending set of node ids. Construction canonicalizes
// its input, so equal sets compare equal member-by-member.
class NodeSet {
 public:
  explicit NodeSet(std::vector<NodeId> members);
  NodeSet(std::initializer_list<NodeId> members) : NodeSet(std::vector<NodeId>(members)) {}

  std::span<const NodeId> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  NodeId max_id() const noexcept { return members_.back(); }
  bool contains(NodeId v) const noexcept;

  friend bool operator==(const NodeSet&, const NodeSet&) = default;
  friend auto operator<=>(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<NodeId> members_;
};

struct Edge {
  NodeId source;
  NodeId target;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed graph over ids [0, n). Duplicate edges are collapsed; adjacency is
// kept in both directions as CSR arrays sorted by neighbor id.
class Graph {
 public:
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t n() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const NodeId> out_neighbors(NodeId v) const noexcept {
    return {out_targets_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
  }
  std::span<const NodeId> in_neighbors(NodeId v) const noexcept {
    return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }
  std::size_t out_degree(NodeId v) const noexcept { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }
  // Number of incident edges; a self-loop counts once in each direction.
  std::size_t total_degree(NodeId v) const noexcept { return out_degree(v) + in_degree(v); }

  // Node v becomes perm[v].
  Graph relabeled(std::span<const NodeId> perm) const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<NodeId> out_targets_, in_sources_;
};

struct WeightedSet {
  NodeSet set;
  double weight;
};

// The family F with per-set generation probabilities pi(S). Weights need not
// sum to one. Sets are stored in canonical (lexicographic) order.
class GeneratingProcess {
 public:
  GeneratingProcess(std::size_t n, std::vector<WeightedSet> sets);

  std::size_t n() const noexcept { return n_; }
  std::span<const WeightedSet> sets() const noexcept { return sets_; }
  std::size_t size() const noexcept { return sets_.size(); }
  double total_weight() const noexcept;

  GeneratingProcess relabeled(std::span<const NodeId> perm) const;

 private:
  std::size_t n_;
  std::vector<WeightedSet> sets_;
};

// A probing c-schedule: a probability distribution over the n nodes.
class Schedule {
 public:
  static Schedule uniform(std::size_t n);
  // For vectors already on the simplex (solver iterates); tolerance 1e-9.
  static Schedule from_normalized(std::vector<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }

  friend bool operator==(const Schedule&, const Schedule&) = default;
  friend Schedule validate_schedule(std::span<const double> raw);

 private:
  explicit Schedule(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Accepts entries >= -1e-12 summing to 1 within 1e-9; clamps negative dust to
// zero and renormalizes. Throws ValidationError otherwise.
Schedule validate_schedule(std::span<const double> raw);

// p(S), clamped to [0, 1]. Throws DimensionError for members out of range.
double set_mass(const Schedule& p, const NodeSet& s);

// Time-ordered per-step collections of generated sets. Identical sets within
// a step are distinct occurrences.
struct Sample {
  std::vector<std::vector<NodeSet>> steps;

  std::size_t length() const noexcept { return steps.size(); }
  std::size_t occurrences() const noexcept;
};

class CostParams {
 public:
  CostParams(double theta, unsigned c);
  double theta() const noexcept { return theta_; }
  unsigned c() const noexcept { return c_; }

 private:
  double theta_;
  unsigned c_;
};

// Throws ValidationError unless perm is a permutation of [0, n).
void check_permutation(std::span<const NodeId> perm, std::size_t n);

}  // namespace probesched
