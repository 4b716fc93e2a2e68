#include <immintrin.h>

#include <algorithm>
#include <cstdint>

#include "kernels_impl.hpp"

namespace probesched::kernels {

// One lane per set; lanes whose set is exhausted add +0.0, which leaves their
// running sum unchanged.
void set_masses_avx2(const std::size_t* offsets, const NodeId* members, std::size_t num_sets, const double* p,
                     std::size_t n, double* out) {
  if (n > static_cast<std::size_t>(INT32_MAX)) {
    set_masses_scalar(offsets, members, num_sets, p, n, out);
    return;
  }
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t s = 0;
  for (; s + 4 <= num_sets; s += 4) {
    const std::size_t b0 = offsets[s], b1 = offsets[s + 1], b2 = offsets[s + 2], b3 = offsets[s + 3];
    const std::size_t l0 = b1 - b0, l1 = offsets[s + 2] - b1, l2 = offsets[s + 3] - b2, l3 = offsets[s + 4] - b3;
    const std::size_t longest = std::max(std::max(l0, l1), std::max(l2, l3));
    __m256d acc = zero;
    for (std::size_t k = 0; k < longest; ++k) {
      const int i0 = k < l0 ? static_cast<int>(members[b0 + k]) : 0;
      const int i1 = k < l1 ? static_cast<int>(members[b1 + k]) : 0;
      const int i2 = k < l2 ? static_cast<int>(members[b2 + k]) : 0;
      const int i3 = k < l3 ? static_cast<int>(members[b3 + k]) : 0;
      const __m128i idx = _mm_setr_epi32(i0, i1, i2, i3);
      const __m256d mask = _mm256_castsi256_pd(
          _mm256_setr_epi64x(k < l0 ? -1 : 0, k < l1 ? -1 : 0, k < l2 ? -1 : 0, k < l3 ? -1 : 0));
      const __m256d vals = _mm256_mask_i32gather_pd(zero, p, idx, mask, 8);
      acc = _mm256_add_pd(acc, vals);
    }
    _mm256_storeu_pd(out + s, _mm256_min_pd(_mm256_max_pd(acc, zero), one));
  }
  if (s < num_sets) set_masses_scalar(offsets + s, members, num_sets - s, p, n, out + s);
}

void set_terms_avx2(const double* masses, std::size_t count, double theta, unsigned c, double* cost_terms,
                    double* weight_coefs) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vtheta = _mm256_set1_pd(theta);
  const __m256d vtc = _mm256_set1_pd(theta * static_cast<double>(c));
  std::size_t s = 0;
  for (; s + 4 <= count; s += 4) {
    __m256d x = _mm256_sub_pd(one, _mm256_loadu_pd(masses + s));
    const __m256d q = x;
    __m256d qc1 = one;
    for (unsigned e = c - 1; e != 0; e >>= 1) {
      if (e & 1u) qc1 = _mm256_mul_pd(qc1, x);
      x = _mm256_mul_pd(x, x);
    }
    const __m256d qc = _mm256_mul_pd(qc1, q);
    const __m256d d = _mm256_sub_pd(one, _mm256_mul_pd(vtheta, qc));
    _mm256_storeu_pd(cost_terms + s, _mm256_div_pd(one, d));
    _mm256_storeu_pd(weight_coefs + s, _mm256_div_pd(_mm256_mul_pd(vtc, qc1), _mm256_mul_pd(d, d)));
  }
  if (s < count) set_terms_scalar(masses + s, count - s, theta, c, cost_terms + s, weight_coefs + s);
}

}  // namespace probesched::kernels
