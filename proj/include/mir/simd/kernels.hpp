#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the CPU supports it, an AVX2 version selected at runtime. Variants are
// required to produce bit-identical results (no FMA contraction, same
// operation order per lane).

#include <cstdint>
#include <span>
#include <string_view>

namespace mir::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Best instruction set this binary and CPU support together.
Isa detect_isa();

// detect_isa(), unless the MIR_SIMD environment variable is "scalar".
Isa active_isa();

bool isa_available(Isa isa);

// Structure-of-arrays view over 2D line segments (x1,y1)-(x2,y2).
struct SegmentView {
  std::span<const double> x1, y1, x2, y2;

  std::size_t size() const { return x1.size(); }
};

// Sum of all bytes, modulo 2^32.
std::uint32_t byte_sum(std::span<const std::uint8_t> bytes, Isa isa);
inline std::uint32_t byte_sum(std::span<const std::uint8_t> bytes) {
  return byte_sum(bytes, active_isa());
}

// For each ray i starting at (ox, oy) with direction (dir_x[i], dir_y[i]),
// writes the smallest ray parameter t > 0 at which it meets any segment, or
// +infinity. Parallel segments never hit. Segment endpoints count as hits.
void raycast_nearest(const SegmentView& segments, double ox, double oy,
                     std::span<const double> dir_x, std::span<const double> dir_y,
                     std::span<double> out_t, Isa isa);
inline void raycast_nearest(const SegmentView& segments, double ox, double oy,
                            std::span<const double> dir_x, std::span<const double> dir_y,
                            std::span<double> out_t) {
  raycast_nearest(segments, ox, oy, dir_x, dir_y, out_t, active_isa());
}

namespace scalar {
std::uint32_t byte_sum(std::span<const std::uint8_t> bytes);
void raycast_nearest(const SegmentView& segments, double ox, double oy,
                     std::span<const double> dir_x, std::span<const double> dir_y,
                     std::span<double> out_t);
}  // namespace scalar

#if defined(MIR_HAVE_AVX2)
namespace avx2 {
std::uint32_t byte_sum(std::span<const std::uint8_t> bytes);
void raycast_nearest(const SegmentView& segments, double ox, double oy,
                     std::span<const double> dir_x, std::span<const double> dir_y,
                     std::span<double> out_t);
}  // namespace avx2
#endif

}  // namespace mir::simd
