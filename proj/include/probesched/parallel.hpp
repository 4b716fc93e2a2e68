#pragma once

// One sample-based iteration decomposed into map / shuffle / reduce /
// normalize rounds over worker partitions, run on threads in-process.
//
//   map        each set S emits (i, v_S) for every i in S, where
//              v_S = count(S) / l * theta c (1 - p(S))^(c-1) / (1 - theta (1 - p(S))^c)^2
//   shuffle    contributions grouped by key, ordered by (worker, emission)
//   reduce     g_i = p_i * sum of key i's values
//   normalize  p_i <- g_i / sum_z g_z
//
// The schedule is broadcast to every worker between rounds. Reduction order
// is fixed, so results do not depend on thread timing.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "probesched/cost.hpp"
#include "probesched/model.hpp"
#include "probesched/solver.hpp"

namespace probesched {

struct KeyedContribution {
  NodeId key;
  double value;
  friend bool operator==(const KeyedContribution&, const KeyedContribution&) = default;
};

struct CountedSet {
  NodeSet set;
  std::size_t count;
};

// Worker w owns table rows [bounds[w], bounds[w + 1]).
struct PartitionPlan {
  std::size_t num_workers;
  std::vector<std::size_t> bounds;
};

// Contiguous ranges balanced by member count (emissions per worker).
PartitionPlan make_partition_plan(const SetTable& table, std::size_t workers);

std::vector<KeyedContribution> map_phase(std::span<const CountedSet> partition, const Schedule& p,
                                         const CostParams& params, std::size_t ell);
// Map over table rows [begin, end); the table's row weights already carry
// count / l.
std::vector<KeyedContribution> map_rows(const SetTable& table, std::size_t begin, std::size_t end,
                                        std::span<const double> p, const CostParams& params);

// Contributions grouped by key: values of key i are
// values[offsets[i] .. offsets[i + 1]).
struct GroupedContributions {
  std::vector<std::size_t> offsets;
  std::vector<double> values;
};

// Stable counting sort by key across the workers' outputs taken in worker
// order.
GroupedContributions shuffle(std::span<const std::vector<KeyedContribution>> per_worker, std::size_t n);

// g_i = p_i * (ordered sum of key i's values); keys without values give 0.
std::vector<double> reduce_phase(const GroupedContributions& groups, const Schedule& p);

// p_i = g_i / sum_z g_z. Throws DegenerateProcessError when the sum is zero.
Schedule normalize_round(std::span<const double> g);

struct RoundOutput {
  std::vector<double> weights;  // W_i
  std::vector<double> g;        // p_i W_i
  double cost;                  // sample cost of the broadcast schedule
  std::size_t emissions;
};

// One map + shuffle + reduce round on `plan.num_workers` threads. With a
// combiner each worker folds its emissions into a dense partial per key and
// the partials are merged in worker-index order instead of shuffling.
RoundOutput run_round(const SetTable& table, const PartitionPlan& plan, std::span<const double> p,
                      const CostParams& params, bool combiner);

struct ParallelConfig {
  std::size_t workers = 1;
  bool combiner = true;
};

SolveResult parallel_wiggins_apx(const Sample& sample, std::size_t n, const CostParams& params,
                                 const SolverConfig& cfg, const ParallelConfig& pcfg);

// Binary spill of contributions: per record a little-endian u32 key then a
// little-endian IEEE-754 f64 value.
void write_spill(std::ostream& out, std::span<const KeyedContribution> contributions);
std::vector<KeyedContribution> read_spill(std::istream& in);

}  // namespace probesched
