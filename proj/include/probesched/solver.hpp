#pragma once

// The multiplicative fixed-point iteration for optimal probing schedules, on
// an explicit generating process or on an observed sample, plus the baseline
// schedules it is compared against.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "probesched/cost.hpp"
#include "probesched/model.hpp"
#include "probesched/rng.hpp"

namespace probesched {

struct SolverConfig {
  std::size_t max_iters = 50;
  // Convergence when the L-infinity change between iterates is at most this.
  double conv_tol = 1e-9;
  bool record_trace = true;
  // Uniform when unset.
  std::optional<Schedule> start;

  void validate() const;
};

struct SolveResult {
  Schedule schedule;
  bool converged = false;
  std::size_t iterations = 0;
  double initial_cost = 0.0;
  // cost of the iterate produced by each completed iteration
  std::vector<double> cost_trace;
  WeightVector final_weights;
  // iterations whose cost rose by more than 1e-9 (relative) over the previous one
  std::size_t descent_violations = 0;
};

// One update p_i <- p_i W_i / sum_z p_z W_z, the normalizer summed in index
// order with compensation. Throws DegenerateProcessError when every W_i is
// zero and NumericalError (tagged with `iteration`) on NaN/Inf or underflow.
std::vector<double> multiplicative_update(std::span<const double> p, const WeightVector& w, std::size_t iteration);

// The fixed-point loop over any set table.
SolveResult solve_table(const SetTable& table, const CostParams& params, const SolverConfig& cfg);

SolveResult wiggins(const GeneratingProcess& process, const CostParams& params, const SolverConfig& cfg = {});
SolveResult wiggins_apx(const Sample& sample, std::size_t n, const CostParams& params, const SolverConfig& cfg = {});

// Random start with every entry >= 1e-9 before normalization.
Schedule random_interior_start(std::size_t n, CounterRng& rng);

// (max - min) / mean of W over nodes with p_i > support_tol.
double stationarity_spread(const Schedule& p, const WeightVector& w, double support_tol);

double linf_distance(std::span<const double> a, std::span<const double> b);
double total_variation(std::span<const double> a, std::span<const double> b);

enum class BaselineKind { uniform, indeg, outdeg, totdeg };

std::string_view to_string(BaselineKind kind) noexcept;
std::optional<BaselineKind> parse_baseline(std::string_view name) noexcept;

Schedule baseline_schedule(BaselineKind kind, const Graph& graph);

struct NamedSchedule {
  std::string name;
  Schedule schedule;
};

struct ComparisonRow {
  std::string name;
  double mean_cost;
  std::vector<double> sample_costs;
};

// Mean sample cost of every schedule over every sample; rows follow the
// input order.
std::vector<ComparisonRow> compare_schedules(std::span<const NamedSchedule> schedules, std::span<const Sample> samples,
                                             const CostParams& params);

}  // namespace probesched
