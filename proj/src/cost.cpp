#include "probesched/cost.hpp"

#include <cmath>
#include <map>
#include <string>

#include "probesched/error.hpp"

namespace probesched {

void SetTable::push(const NodeSet& set, double weight, std::size_t count) {
  const auto m = set.members();
  members_.insert(members_.end(), m.begin(), m.end());
  offsets_.push_back(members_.size());
  weights_.push_back(weight);
  counts_.push_back(count);
}

SetTable SetTable::from_process(const GeneratingProcess& process) {
  SetTable table;
  table.n_ = process.n();
  for (const WeightedSet& ws : process.sets()) table.push(ws.set, ws.weight, 1);
  return table;
}

SetTable SetTable::from_sample(const Sample& sample, std::size_t n) {
  if (sample.length() == 0) throw ValidationError("sample has no steps");
  std::map<NodeSet, std::size_t> counts;
  for (const auto& step : sample.steps) {
    for (const NodeSet& set : step) {
      if (set.max_id() >= n) {
        throw DimensionError("sample member " + std::to_string(set.max_id()) + " outside [0, " + std::to_string(n) +
                             ")");
      }
      ++counts[set];
    }
  }
  SetTable table;
  table.n_ = n;
  table.length_ = sample.length();
  const double length = static_cast<double>(sample.length());
  for (const auto& [set, count] : counts) table.push(set, static_cast<double>(count) / length, count);
  return table;
}

SetTerms compute_set_terms(const SetTable& table, std::span<const double> p, const CostParams& params,
                           const kernels::KernelTable& k) {
  if (p.size() != table.n()) {
    throw DimensionError("schedule has " + std::to_string(p.size()) + " entries, expected " +
                         std::to_string(table.n()));
  }
  SetTerms terms;
  terms.masses.resize(table.size());
  terms.cost_terms.resize(table.size());
  terms.weight_coefs.resize(table.size());
  kernels::set_masses(k, table.offsets(), table.members(), p, terms.masses);
  kernels::set_terms(k, terms.masses, params.theta(), params.c(), terms.cost_terms, terms.weight_coefs);
  return terms;
}

Evaluation evaluate(const SetTable& table, std::span<const double> p, const CostParams& params,
                    const kernels::KernelTable& k) {
  const SetTerms terms = compute_set_terms(table, p, params, k);
  Evaluation ev{0.0, WeightVector{std::vector<double>(table.n(), 0.0)}};
  const auto weights = table.weights();
  for (std::size_t s = 0; s < table.size(); ++s) {
    ev.cost += weights[s] * terms.cost_terms[s];
    const double w = weights[s] * terms.weight_coefs[s];
    for (NodeId v : table.members(s)) ev.weights.values[v] += w;
  }
  return ev;
}

namespace {

void check_dims(std::size_t expected, const Schedule& p) {
  if (p.size() != expected) {
    throw DimensionError("schedule has " + std::to_string(p.size()) + " entries, expected " +
                         std::to_string(expected));
  }
}

}  // namespace

double exact_cost(const GeneratingProcess& process, const Schedule& p, const CostParams& params) {
  check_dims(process.n(), p);
  return evaluate(SetTable::from_process(process), p.probs(), params).cost;
}

WeightVector weight_vector(const GeneratingProcess& process, const Schedule& p, const CostParams& params) {
  check_dims(process.n(), p);
  return evaluate(SetTable::from_process(process), p.probs(), params).weights;
}

double sample_cost(const Sample& sample, const Schedule& p, const CostParams& params) {
  return evaluate(SetTable::from_sample(sample, p.size()), p.probs(), params).cost;
}

WeightVector sample_weight_vector(const Sample& sample, const Schedule& p, const CostParams& params) {
  return evaluate(SetTable::from_sample(sample, p.size()), p.probs(), params).weights;
}

void SampleSizeParams::validate() const {
  if (n < 2) throw ValidationError("sample size bound needs n >= 2");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  if (r < 1) throw ValidationError("r must be at least 1");
}

double sample_length_bound(const SampleSizeParams& sp) {
  sp.validate();
  const double numerator = 3.0 * (static_cast<double>(sp.r) * std::log(static_cast<double>(sp.n)) + std::log(4.0));
  return numerator / (sp.epsilon * sp.epsilon * (1.0 - sp.theta));
}

std::size_t required_sample_length(const SampleSizeParams& sp) {
  return static_cast<std::size_t>(std::ceil(sample_length_bound(sp)));
}

}  // namespace probesched
