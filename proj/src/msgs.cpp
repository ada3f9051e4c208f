#include "mir/msgs.hpp"

#include <type_traits>

namespace mir::msgs {

std::string_view schema_name(SchemaId id) {
  switch (id) {
    case SchemaId::kVehicleControl: return "VehicleControl";
    case SchemaId::kEncoderPulse: return "EncoderPulse";
    case SchemaId::kImu: return "ImuSample";
    case SchemaId::kLaserScan: return "LaserScan";
    case SchemaId::kHeartbeat: return "Heartbeat";
    case SchemaId::kJoy: return "JoyState";
    case SchemaId::kCameraStub: return "CameraStub";
  }
  return "unknown";
}

SchemaId schema_of(const Message& msg) {
  return std::visit(
      [](const auto& m) -> SchemaId {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, VehicleControl>) return SchemaId::kVehicleControl;
        else if constexpr (std::is_same_v<T, EncoderPulse>) return SchemaId::kEncoderPulse;
        else if constexpr (std::is_same_v<T, ImuSample>) return SchemaId::kImu;
        else if constexpr (std::is_same_v<T, LaserScan>) return SchemaId::kLaserScan;
        else if constexpr (std::is_same_v<T, Heartbeat>) return SchemaId::kHeartbeat;
        else if constexpr (std::is_same_v<T, JoyState>) return SchemaId::kJoy;
        else return SchemaId::kCameraStub;
      },
      msg);
}

Timestamp stamp_of(const Message& msg) {
  return std::visit([](const auto& m) { return m.stamp; }, msg);
}

}  // namespace mir::msgs
