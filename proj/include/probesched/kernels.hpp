#pragma once

// Per-set inner loops of cost evaluation, with a scalar reference and SIMD
// variants chosen at runtime. Every variant assigns one lane per set and
// performs the same operations in the same order as the scalar loop, so all
// variants produce bit-identical results.

#include <cstddef>
#include <span>

#include "probesched/model.hpp"

namespace probesched::kernels {

struct KernelTable {
  const char* name;

  // out[s] = clamp(sum of p[members[k]] for k in [offsets[s], offsets[s+1]), 0, 1),
  // members accumulated in storage order.
  void (*set_masses)(const std::size_t* offsets, const NodeId* members, std::size_t num_sets, const double* p,
                     std::size_t n, double* out);

  // With q = 1 - m and d = 1 - theta * q^c:
  //   cost_terms[s]   = 1 / d
  //   weight_coefs[s] = theta * c * q^(c-1) / d^2
  // Integer powers use repeated squaring.
  void (*set_terms)(const double* masses, std::size_t count, double theta, unsigned c, double* cost_terms,
                    double* weight_coefs);
};

const KernelTable& scalar();
// nullptr when not compiled in or when the CPU lacks AVX2.
const KernelTable* avx2();
// Best supported table; PROBESCHED_KERNEL=scalar|avx2 overrides.
const KernelTable& active();

// x^e by repeated squaring.
inline double ipow(double x, unsigned e) noexcept {
  double result = 1.0;
  while (e != 0) {
    if (e & 1u) result *= x;
    x *= x;
    e >>= 1;
  }
  return result;
}

inline void set_masses(const KernelTable& k, std::span<const std::size_t> offsets, std::span<const NodeId> members,
                       std::span<const double> p, std::span<double> out) {
  k.set_masses(offsets.data(), members.data(), out.size(), p.data(), p.size(), out.data());
}

inline void set_terms(const KernelTable& k, std::span<const double> masses, double theta, unsigned c,
                      std::span<double> cost_terms, std::span<double> weight_coefs) {
  k.set_terms(masses.data(), masses.size(), theta, c, cost_terms.data(), weight_coefs.data());
}

}  // namespace probesched::kernels
