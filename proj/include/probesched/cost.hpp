#pragma once

// Exact and sample-based schedule cost, the weight vector W (the negative
// gradient of the cost), and the sample length needed for the sample cost to
// concentrate around the exact cost.

#include <cstddef>
#include <span>
#include <vector>

#include "probesched/kernels.hpp"
#include "probesched/model.hpp"

namespace probesched {

// W_i for every node; W_i = -d cost / d p_i.
struct WeightVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
};

// Sets in canonical order, flattened into CSR arrays with one weight per set.
// For a process the weight is pi(S); for a sample it is count(S) / length,
// with identical sets across the whole sample merged into one row.
class SetTable {
 public:
  static SetTable from_process(const GeneratingProcess& process);
  // Throws ValidationError for an empty sample, DimensionError when a member
  // is >= n.
  static SetTable from_sample(const Sample& sample, std::size_t n);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> members() const noexcept { return members_; }
  std::span<const NodeId> members(std::size_t s) const noexcept {
    return {members_.data() + offsets_[s], offsets_[s + 1] - offsets_[s]};
  }
  std::span<const double> weights() const noexcept { return weights_; }
  // Occurrence counts (all 1 for a process table).
  std::span<const std::size_t> counts() const noexcept { return counts_; }
  // Observed steps for a sample table, 1 for a process table.
  std::size_t length() const noexcept { return length_; }

 private:
  SetTable() = default;
  void push(const NodeSet& set, double weight, std::size_t count);

  std::size_t n_ = 0;
  std::size_t length_ = 1;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> members_;
  std::vector<double> weights_;
  std::vector<std::size_t> counts_;
};

// Per-set quantities for one schedule, in table order.
struct SetTerms {
  std::vector<double> masses;        // p(S)
  std::vector<double> cost_terms;    // 1 / (1 - theta (1 - p(S))^c)
  std::vector<double> weight_coefs;  // theta c (1 - p(S))^(c-1) / (1 - theta (1 - p(S))^c)^2
};

SetTerms compute_set_terms(const SetTable& table, std::span<const double> p, const CostParams& params,
                           const kernels::KernelTable& k = kernels::active());

struct Evaluation {
  double cost;
  WeightVector weights;
};

// Cost and W in one pass. Sums run in canonical set order.
Evaluation evaluate(const SetTable& table, std::span<const double> p, const CostParams& params,
                    const kernels::KernelTable& k = kernels::active());

double exact_cost(const GeneratingProcess& process, const Schedule& p, const CostParams& params);
WeightVector weight_vector(const GeneratingProcess& process, const Schedule& p, const CostParams& params);
double sample_cost(const Sample& sample, const Schedule& p, const CostParams& params);
WeightVector sample_weight_vector(const Sample& sample, const Schedule& p, const CostParams& params);

struct SampleSizeParams {
  std::size_t n;
  double epsilon;  // relative accuracy in (0, 1]
  double theta;
  unsigned r;  // failure probability is at most 1 / n^r

  void validate() const;
};

// 3 (r ln n + ln 4) / (eps^2 (1 - theta)), before rounding up.
double sample_length_bound(const SampleSizeParams& sp);
std::size_t required_sample_length(const SampleSizeParams& sp);

}  // namespace probesched
