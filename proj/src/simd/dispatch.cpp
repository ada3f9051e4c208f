#include <cstdlib>
#include <string>
#include <string_view>

#include "mir/error.hpp"
#include "mir/simd/kernels.hpp"

namespace mir::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(MIR_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar; }

Isa active_isa() {
  static const Isa isa = [] {
    const char* env = std::getenv("MIR_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return Isa::kScalar;
    return detect_isa();
  }();
  return isa;
}

namespace {

void require(Isa isa) {
  if (!isa_available(isa)) {
    throw InvalidArgument("simd: instruction set " + std::string(isa_name(isa)) +
                          " is not available on this machine");
  }
}

}  // namespace

std::uint32_t byte_sum(std::span<const std::uint8_t> bytes, Isa isa) {
  require(isa);
#if defined(MIR_HAVE_AVX2)
  if (isa == Isa::kAvx2) return avx2::byte_sum(bytes);
#endif
  return scalar::byte_sum(bytes);
}

void raycast_nearest(const SegmentView& segments, double ox, double oy,
                     std::span<const double> dir_x, std::span<const double> dir_y,
                     std::span<double> out_t, Isa isa) {
  if (dir_x.size() != out_t.size() || dir_y.size() != out_t.size()) {
    throw InvalidArgument("raycast_nearest: direction and output spans differ in length");
  }
  if (segments.x1.size() != segments.y1.size() || segments.x1.size() != segments.x2.size() ||
      segments.x1.size() != segments.y2.size()) {
    throw InvalidArgument("raycast_nearest: segment arrays differ in length");
  }
  require(isa);
#if defined(MIR_HAVE_AVX2)
  if (isa == Isa::kAvx2) {
    avx2::raycast_nearest(segments, ox, oy, dir_x, dir_y, out_t);
    return;
  }
#endif
  scalar::raycast_nearest(segments, ox, oy, dir_x, dir_y, out_t);
}

}  // namespace mir::simd
