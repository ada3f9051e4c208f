#include <limits>

#include "mir/simd/kernels.hpp"

namespace mir::simd::scalar {

std::uint32_t byte_sum(std::span<const std::uint8_t> bytes) {
  std::uint32_t sum = 0;
  for (std::uint8_t b : bytes) sum += b;
  return sum;
}

void raycast_nearest(const SegmentView& segments, double ox, double oy,
                     std::span<const double> dir_x, std::span<const double> dir_y,
                     std::span<double> out_t) {
  const std::size_t rays = out_t.size();
  const std::size_t n = segments.size();
  for (std::size_t i = 0; i < rays; ++i) {
    const double dx = dir_x[i];
    const double dy = dir_y[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double ex = segments.x2[k] - segments.x1[k];
      const double ey = segments.y2[k] - segments.y1[k];
      const double wx = segments.x1[k] - ox;
      const double wy = segments.y1[k] - oy;
      const double det = ex * dy - dx * ey;
      if (det == 0.0) continue;
      const double t = (ex * wy - wx * ey) / det;
      const double s = (dx * wy - dy * wx) / det;
      if (s >= 0.0 && s <= 1.0 && t > 0.0 && t < best) best = t;
    }
    out_t[i] = best;
  }
}

}  // namespace mir::simd::scalar
