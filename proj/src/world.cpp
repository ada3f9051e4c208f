#include "mir/world.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mir/error.hpp"

namespace mir::plant {

WorldModel::WorldModel(const std::vector<Segment>& segments) {
  for (const auto& s : segments) add(s);
}

void WorldModel::add(const Segment& s) {
  if (!std::isfinite(s.x1) || !std::isfinite(s.y1) || !std::isfinite(s.x2) ||
      !std::isfinite(s.y2)) {
    throw InvalidArgument("world segment has a non-finite coordinate");
  }
  x1_.push_back(s.x1);
  y1_.push_back(s.y1);
  x2_.push_back(s.x2);
  y2_.push_back(s.y2);
}

WorldModel parse_world(std::string_view text) {
  WorldModel world;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Segment s{};
    if (!(fields >> s.x1)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError("world line " + std::to_string(lineno) + ": expected 'x1 y1 x2 y2'");
    }
    std::string extra;
    if (!(fields >> s.y1 >> s.x2 >> s.y2) || (fields >> extra)) {
      throw ConfigError("world line " + std::to_string(lineno) + ": expected 'x1 y1 x2 y2'");
    }
    try {
      world.add(s);
    } catch (const InvalidArgument& e) {
      throw ConfigError("world line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return world;
}

WorldModel load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("world file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_world(buf.str());
}

}  // namespace mir::plant
