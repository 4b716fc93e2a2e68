#pragma once

#include "probesched/kernels.hpp"

namespace probesched::kernels {

void set_masses_scalar(const std::size_t* offsets, const NodeId* members, std::size_t num_sets, const double* p,
                       std::size_t n, double* out);
void set_terms_scalar(const double* masses, std::size_t count, double theta, unsigned c, double* cost_terms,
                      double* weight_coefs);

#if defined(PROBESCHED_BUILD_AVX2)
void set_masses_avx2(const std::size_t* offsets, const NodeId* members, std::size_t num_sets, const double* p,
                     std::size_t n, double* out);
void set_terms_avx2(const double* masses, std::size_t count, double theta, unsigned c, double* cost_terms,
                    double* weight_coefs);
#endif

}  // namespace probesched::kernels
