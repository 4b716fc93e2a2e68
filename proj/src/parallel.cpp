#include "probesched/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include "probesched/error.hpp"
#include "probesched/kernels.hpp"
#include "probesched/summation.hpp"

namespace probesched {

PartitionPlan make_partition_plan(const SetTable& table, std::size_t workers) {
  if (workers < 1) throw ValidationError("need at least one worker");
  PartitionPlan plan{workers, {0}};
  const auto offsets = table.offsets();
  const std::size_t total = table.members().size();
  std::size_t row = 0;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t target = total * w / workers;
    while (row < table.size() && offsets[row] < target) ++row;
    plan.bounds.push_back(row);
  }
  plan.bounds.push_back(table.size());
  return plan;
}

namespace {

void emit(std::span<const NodeId> members, double value, std::vector<KeyedContribution>& out) {
  for (NodeId v : members) out.push_back({v, value});
}

}  // namespace

std::vector<KeyedContribution> map_phase(std::span<const CountedSet> partition, const Schedule& p,
                                         const CostParams& params, std::size_t ell) {
  if (ell < 1) throw ValidationError("sample length must be at least 1");
  std::vector<double> masses;
  masses.reserve(partition.size());
  for (const CountedSet& cs : partition) masses.push_back(set_mass(p, cs.set));
  std::vector<double> terms(partition.size()), coefs(partition.size());
  kernels::set_terms(kernels::active(), masses, params.theta(), params.c(), terms, coefs);

  std::vector<KeyedContribution> out;
  for (std::size_t s = 0; s < partition.size(); ++s) {
    const double weight = static_cast<double>(partition[s].count) / static_cast<double>(ell);
    emit(partition[s].set.members(), weight * coefs[s], out);
  }
  return out;
}

namespace {

struct MapOutput {
  std::vector<KeyedContribution> contributions;
  double cost = 0.0;
};

MapOutput map_block(const SetTable& table, std::size_t begin, std::size_t end, std::span<const double> p,
                    const CostParams& params) {
  MapOutput out;
  if (begin >= end) return out;
  const auto& k = kernels::active();
  const std::size_t rows = end - begin;
  std::vector<double> masses(rows), terms(rows), coefs(rows);
  k.set_masses(table.offsets().data() + begin, table.members().data(), rows, p.data(), p.size(), masses.data());
  kernels::set_terms(k, masses, params.theta(), params.c(), terms, coefs);
  out.contributions.reserve(table.offsets()[end] - table.offsets()[begin]);
  for (std::size_t s = begin; s < end; ++s) {
    out.cost += table.weights()[s] * terms[s - begin];
    emit(table.members(s), table.weights()[s] * coefs[s - begin], out.contributions);
  }
  return out;
}

}  // namespace

std::vector<KeyedContribution> map_rows(const SetTable& table, std::size_t begin, std::size_t end,
                                        std::span<const double> p, const CostParams& params) {
  if (p.size() != table.n()) throw DimensionError("schedule does not match the table's node count");
  return map_block(table, begin, end, p, params).contributions;
}

GroupedContributions shuffle(std::span<const std::vector<KeyedContribution>> per_worker, std::size_t n) {
  GroupedContributions groups{std::vector<std::size_t>(n + 1, 0), {}};
  for (const auto& worker : per_worker) {
    for (const KeyedContribution& kc : worker) {
      if (kc.key >= n) throw DimensionError("contribution key outside [0, n)");
      ++groups.offsets[kc.key + 1];
    }
  }
  for (std::size_t i = 0; i < n; ++i) groups.offsets[i + 1] += groups.offsets[i];
  groups.values.resize(groups.offsets[n]);
  std::vector<std::size_t> cursor(groups.offsets.begin(), groups.offsets.end() - 1);
  for (const auto& worker : per_worker) {
    for (const KeyedContribution& kc : worker) groups.values[cursor[kc.key]++] = kc.value;
  }
  return groups;
}

std::vector<double> reduce_phase(const GroupedContributions& groups, const Schedule& p) {
  const std::size_t n = groups.offsets.size() - 1;
  if (p.size() != n) throw DimensionError("schedule does not match grouped keys");
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = groups.offsets[i]; k < groups.offsets[i + 1]; ++k) sum += groups.values[k];
    g[i] = p[i] * sum;
  }
  return g;
}

Schedule normalize_round(std::span<const double> g) {
  const double total = compensated_sum(g);
  if (total == 0.0) throw DegenerateProcessError();
  if (!std::isfinite(total) || total < 1e-300) throw NumericalError(0, "invalid normalizer");
  std::vector<double> probs(g.begin(), g.end());
  for (double& x : probs) x /= total;
  return Schedule::from_normalized(std::move(probs));
}

RoundOutput run_round(const SetTable& table, const PartitionPlan& plan, std::span<const double> p,
                      const CostParams& params, bool combiner) {
  const std::size_t n = table.n();
  const std::size_t workers = plan.num_workers;
  std::vector<std::vector<KeyedContribution>> emitted(workers);
  std::vector<std::vector<double>> partial_w(combiner ? workers : 0);
  std::vector<double> partial_cost(workers, 0.0);

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        MapOutput mapped = map_block(table, plan.bounds[w], plan.bounds[w + 1], p, params);
        partial_cost[w] = mapped.cost;
        emitted[w] = std::move(mapped.contributions);
        if (combiner) {
          partial_w[w].assign(n, 0.0);
          for (const KeyedContribution& kc : emitted[w]) partial_w[w][kc.key] += kc.value;
        }
      });
    }
  }

  RoundOutput out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0, 0};
  for (std::size_t w = 0; w < workers; ++w) {
    out.cost += partial_cost[w];
    out.emissions += emitted[w].size();
  }
  if (combiner) {
    for (std::size_t w = 0; w < workers; ++w)
      for (std::size_t i = 0; i < n; ++i) out.weights[i] += partial_w[w][i];
  } else {
    const GroupedContributions groups = shuffle(emitted, n);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t k = groups.offsets[i]; k < groups.offsets[i + 1]; ++k) sum += groups.values[k];
      out.weights[i] = sum;
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.g[i] = p[i] * out.weights[i];
  return out;
}

SolveResult parallel_wiggins_apx(const Sample& sample, std::size_t n, const CostParams& params,
                                 const SolverConfig& cfg, const ParallelConfig& pcfg) {
  cfg.validate();
  const SetTable table = SetTable::from_sample(sample, n);
  const PartitionPlan plan = make_partition_plan(table, pcfg.workers);
  if (cfg.start && cfg.start->size() != n) throw DimensionError("start schedule does not match node count");

  Schedule p = cfg.start ? *cfg.start : Schedule::uniform(n);
  RoundOutput round = run_round(table, plan, p.probs(), params, pcfg.combiner);
  const double initial_cost = round.cost;
  double previous_cost = round.cost;
  std::vector<double> trace;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t violations = 0;
  for (std::size_t j = 1; j <= cfg.max_iters; ++j) {
    if (std::all_of(round.weights.begin(), round.weights.end(), [](double w) { return w == 0.0; })) {
      throw DegenerateProcessError();
    }
    for (double w : round.weights)
      if (!std::isfinite(w)) throw NumericalError(j, "non-finite weight");
    Schedule next = [&] {
      try {
        return normalize_round(round.g);
      } catch (const NumericalError&) {
        throw NumericalError(j, "normalizer underflow");
      }
    }();
    const double change = linf_distance(next.probs(), p.probs());
    p = std::move(next);
    round = run_round(table, plan, p.probs(), params, pcfg.combiner);
    if (!std::isfinite(round.cost)) throw NumericalError(j, "non-finite cost");
    if (round.cost > previous_cost + 1e-9 * std::abs(previous_cost)) ++violations;
    previous_cost = round.cost;
    if (cfg.record_trace) trace.push_back(round.cost);
    iterations = j;
    if (change <= cfg.conv_tol) {
      converged = true;
      break;
    }
  }
  return SolveResult{std::move(p), converged, iterations, initial_cost, std::move(trace),
                     WeightVector{std::move(round.weights)}, violations};
}

void write_spill(std::ostream& out, std::span<const KeyedContribution> contributions) {
  for (const KeyedContribution& kc : contributions) {
    std::array<unsigned char, 12> rec{};
    std::uint32_t key = kc.key;
    std::uint64_t bits = std::bit_cast<std::uint64_t>(kc.value);
    for (int b = 0; b < 4; ++b) rec[b] = static_cast<unsigned char>(key >> (8 * b));
    for (int b = 0; b < 8; ++b) rec[4 + b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(rec.data()), rec.size());
  }
  if (!out) throw Error("spill write failed");
}

std::vector<KeyedContribution> read_spill(std::istream& in) {
  std::vector<KeyedContribution> out;
  std::array<unsigned char, 12> rec{};
  while (in.read(reinterpret_cast<char*>(rec.data()), rec.size())) {
    std::uint32_t key = 0;
    std::uint64_t bits = 0;
    for (int b = 0; b < 4; ++b) key |= static_cast<std::uint32_t>(rec[b]) << (8 * b);
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(rec[4 + b]) << (8 * b);
    out.push_back({key, std::bit_cast<double>(bits)});
  }
  if (in.gcount() != 0) throw ParseError(0, "truncated spill record");
  return out;
}

}  // namespace probesched
