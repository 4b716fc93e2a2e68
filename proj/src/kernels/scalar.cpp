#include <algorithm>

#include "kernels_impl.hpp"

namespace probesched::kernels {

void set_masses_scalar(const std::size_t* offsets, const NodeId* members, std::size_t num_sets, const double* p,
                       std::size_t /*n*/, double* out) {
  for (std::size_t s = 0; s < num_sets; ++s) {
    double acc = 0.0;
    for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) acc += p[members[k]];
    out[s] = std::min(std::max(acc, 0.0), 1.0);
  }
}

void set_terms_scalar(const double* masses, std::size_t count, double theta, unsigned c, double* cost_terms,
                      double* weight_coefs) {
  const double tc = theta * static_cast<double>(c);
  for (std::size_t s = 0; s < count; ++s) {
    const double q = 1.0 - masses[s];
    const double qc1 = ipow(q, c - 1);
    const double qc = qc1 * q;
    const double d = 1.0 - theta * qc;
    cost_terms[s] = 1.0 / d;
    weight_coefs[s] = tc * qc1 / (d * d);
  }
}

}  // namespace probesched::kernels
