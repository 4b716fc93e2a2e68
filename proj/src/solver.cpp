#include "probesched/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "probesched/error.hpp"
#include "probesched/summation.hpp"

namespace probesched {

void SolverConfig::validate() const {
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(conv_tol > 0.0)) throw ValidationError("conv_tol must be positive");
}

std::vector<double> multiplicative_update(std::span<const double> p, const WeightVector& w, std::size_t iteration) {
  if (p.size() != w.size()) throw DimensionError("schedule and weight vector differ in length");
  bool any_weight = false;
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(w[i])) throw NumericalError(iteration, "non-finite weight at node " + std::to_string(i));
    any_weight = any_weight || w[i] != 0.0;
    g[i] = p[i] * w[i];
  }
  if (!any_weight) throw DegenerateProcessError();
  const double total = compensated_sum(g);
  if (!std::isfinite(total)) throw NumericalError(iteration, "non-finite normalizer");
  if (total < 1e-300) throw NumericalError(iteration, "normalizer underflow");
  for (double& x : g) x /= total;
  return g;
}

SolveResult solve_table(const SetTable& table, const CostParams& params, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = table.n();
  if (cfg.start && cfg.start->size() != n) throw DimensionError("start schedule does not match node count");

  const Schedule start = cfg.start ? *cfg.start : Schedule::uniform(n);
  std::vector<double> p(start.probs().begin(), start.probs().end());
  Evaluation ev = evaluate(table, p, params);
  const double initial_cost = ev.cost;
  double previous_cost = ev.cost;

  std::vector<double> trace;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t violations = 0;
  for (std::size_t j = 1; j <= cfg.max_iters; ++j) {
    std::vector<double> next = multiplicative_update(p, ev.weights, j);
    const double change = linf_distance(next, p);
    p = std::move(next);
    ev = evaluate(table, p, params);
    if (!std::isfinite(ev.cost)) throw NumericalError(j, "non-finite cost");
    if (ev.cost > previous_cost + 1e-9 * std::abs(previous_cost)) ++violations;
    previous_cost = ev.cost;
    if (cfg.record_trace) trace.push_back(ev.cost);
    iterations = j;
    if (change <= cfg.conv_tol) {
      converged = true;
      break;
    }
  }
  return SolveResult{Schedule::from_normalized(std::move(p)), converged, iterations, initial_cost, std::move(trace),
                     std::move(ev.weights), violations};
}

SolveResult wiggins(const GeneratingProcess& process, const CostParams& params, const SolverConfig& cfg) {
  if (process.size() == 0) throw ValidationError("generating process has no sets");
  return solve_table(SetTable::from_process(process), params, cfg);
}

SolveResult wiggins_apx(const Sample& sample, std::size_t n, const CostParams& params, const SolverConfig& cfg) {
  return solve_table(SetTable::from_sample(sample, n), params, cfg);
}

Schedule random_interior_start(std::size_t n, CounterRng& rng) {
  std::vector<double> raw(n);
  double total = 0.0;
  for (double& x : raw) {
    x = std::max(rng.uniform(), 1e-9);
    total += x;
  }
  for (double& x : raw) x /= total;
  return Schedule::from_normalized(std::move(raw));
}

double stationarity_spread(const Schedule& p, const WeightVector& w, double support_tol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= support_tol) continue;
    lo = std::min(lo, w[i]);
    hi = std::max(hi, w[i]);
    sum += w[i];
    ++count;
  }
  if (count == 0) return 0.0;
  return (hi - lo) / (sum / static_cast<double>(count));
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

std::string_view to_string(BaselineKind kind) noexcept {
  switch (kind) {
    case BaselineKind::uniform: return "uniform";
    case BaselineKind::indeg: return "indeg";
    case BaselineKind::outdeg: return "outdeg";
    case BaselineKind::totdeg: return "totdeg";
  }
  return "unknown";
}

std::optional<BaselineKind> parse_baseline(std::string_view name) noexcept {
  for (BaselineKind k : {BaselineKind::uniform, BaselineKind::indeg, BaselineKind::outdeg, BaselineKind::totdeg}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Schedule baseline_schedule(BaselineKind kind, const Graph& graph) {
  const std::size_t n = graph.n();
  if (kind == BaselineKind::uniform) return Schedule::uniform(n);
  std::vector<double> probs(n);
  double total = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t degree = kind == BaselineKind::indeg    ? graph.in_degree(v)
                               : kind == BaselineKind::outdeg ? graph.out_degree(v)
                                                              : graph.total_degree(v);
    probs[v] = static_cast<double>(degree);
    total += probs[v];
  }
  if (total == 0.0) throw ValidationError(std::string(to_string(kind)) + " schedule needs at least one edge");
  for (double& x : probs) x /= total;
  return Schedule::from_normalized(std::move(probs));
}

std::vector<ComparisonRow> compare_schedules(std::span<const NamedSchedule> schedules, std::span<const Sample> samples,
                                             const CostParams& params) {
  if (samples.empty()) throw ValidationError("comparison needs at least one sample");
  if (schedules.empty()) return {};
  const std::size_t n = schedules.front().schedule.size();
  for (const NamedSchedule& s : schedules) {
    if (s.schedule.size() != n) throw DimensionError("schedule '" + s.name + "' has a different node count");
  }
  std::vector<SetTable> tables;
  tables.reserve(samples.size());
  for (const Sample& sample : samples) tables.push_back(SetTable::from_sample(sample, n));

  std::vector<ComparisonRow> rows;
  for (const NamedSchedule& s : schedules) {
    ComparisonRow row{s.name, 0.0, {}};
    for (const SetTable& table : tables) row.sample_costs.push_back(evaluate(table, s.schedule.probs(), params).cost);
    double total = 0.0;
    for (double c : row.sample_costs) total += c;
    row.mean_cost = total / static_cast<double>(row.sample_costs.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace probesched
