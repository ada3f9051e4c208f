// Compiled with -mavx2 (and never -mfma); only reached after a runtime check.

#include <immintrin.h>

#include <limits>

#include "mir/simd/kernels.hpp"

namespace mir::simd::avx2 {

std::uint32_t byte_sum(std::span<const std::uint8_t> bytes) {
  const std::size_t n = bytes.size();
  const std::uint8_t* p = bytes.data();
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(v, zero));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) sum += p[i];
  return static_cast<std::uint32_t>(sum);
}

void raycast_nearest(const SegmentView& segments, double ox, double oy,
                     std::span<const double> dir_x, std::span<const double> dir_y,
                     std::span<double> out_t) {
  const std::size_t rays = out_t.size();
  const std::size_t n = segments.size();
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t i = 0;
  for (; i + 4 <= rays; i += 4) {
    const __m256d dx = _mm256_loadu_pd(dir_x.data() + i);
    const __m256d dy = _mm256_loadu_pd(dir_y.data() + i);
    __m256d best = inf;
    for (std::size_t k = 0; k < n; ++k) {
      const __m256d ex = _mm256_set1_pd(segments.x2[k] - segments.x1[k]);
      const __m256d ey = _mm256_set1_pd(segments.y2[k] - segments.y1[k]);
      const __m256d wx = _mm256_set1_pd(segments.x1[k] - ox);
      const __m256d wy = _mm256_set1_pd(segments.y1[k] - oy);
      const __m256d det = _mm256_sub_pd(_mm256_mul_pd(ex, dy), _mm256_mul_pd(dx, ey));
      const __m256d tnum = _mm256_sub_pd(_mm256_mul_pd(ex, wy), _mm256_mul_pd(wx, ey));
      const __m256d snum = _mm256_sub_pd(_mm256_mul_pd(dx, wy), _mm256_mul_pd(dy, wx));
      const __m256d t = _mm256_div_pd(tnum, det);
      const __m256d s = _mm256_div_pd(snum, det);
      __m256d hit = _mm256_cmp_pd(det, zero, _CMP_NEQ_OQ);
      hit = _mm256_and_pd(hit, _mm256_cmp_pd(s, zero, _CMP_GE_OQ));
      hit = _mm256_and_pd(hit, _mm256_cmp_pd(s, one, _CMP_LE_OQ));
      hit = _mm256_and_pd(hit, _mm256_cmp_pd(t, zero, _CMP_GT_OQ));
      hit = _mm256_and_pd(hit, _mm256_cmp_pd(t, best, _CMP_LT_OQ));
      best = _mm256_blendv_pd(best, t, hit);
    }
    _mm256_storeu_pd(out_t.data() + i, best);
  }
  if (i < rays) {
    scalar::raycast_nearest(segments, ox, oy, dir_x.subspan(i), dir_y.subspan(i),
                            out_t.subspan(i));
  }
}

}  // namespace mir::simd::avx2
