#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "mir/simd/kernels.hpp"

namespace mir::plant {

struct Segment {
  double x1, y1, x2, y2;
};

// Static 2D obstacle map. Segments are stored as structure-of-arrays so the
// LIDAR kernels can stream them.
class WorldModel {
 public:
  WorldModel() = default;
  explicit WorldModel(const std::vector<Segment>& segments);

  void add(const Segment& s);
  std::size_t size() const { return x1_.size(); }
  bool empty() const { return x1_.empty(); }
  Segment segment(std::size_t i) const { return {x1_[i], y1_[i], x2_[i], y2_[i]}; }
  simd::SegmentView view() const { return {x1_, y1_, x2_, y2_}; }

 private:
  std::vector<double> x1_, y1_, x2_, y2_;
};

// World file: one segment per line as "x1 y1 x2 y2" in meters; '#' starts a
// comment. Throws ConfigError with the offending line number.
WorldModel parse_world(std::string_view text);
WorldModel load_world(const std::filesystem::path& path);

}  // namespace mir::plant
