#include "rtms/igtl/message.hpp"

#include <cmath>

namespace rtms::igtl {

Timestamp Timestamp::from_seconds(double t) {
  if (t < 0) {
    t = 0;
  }
  double whole = std::floor(t);
  double frac = t - whole;
  uint64_t fraction = static_cast<uint64_t>(std::llround(frac * 4294967296.0));
  uint64_t seconds = static_cast<uint64_t>(whole);
  if (fraction >= 4294967296ull) {  // rounding carried into the next second
    fraction -= 4294967296ull;
    seconds += 1;
  }
  return Timestamp{static_cast<uint32_t>(seconds), static_cast<uint32_t>(fraction)};
}

double Timestamp::to_seconds() const {
  return static_cast<double>(seconds) + static_cast<double>(fraction) / 4294967296.0;
}

const char* implied_type_name(const Body& body) {
  if (std::holds_alternative<TransformBody>(body)) return kTypeTransform;
  if (std::holds_alternative<StatusBody>(body)) return kTypeStatus;
  if (std::holds_alternative<PolyDataBody>(body)) return kTypePolyData;
  return nullptr;
}

IgtlMessage make_transform(std::string device, const std::array<float, 12>& columns,
                           Timestamp ts) {
  IgtlMessage m;
  m.header.type_name = kTypeTransform;
  m.header.device_name = std::move(device);
  m.header.timestamp = ts;
  TransformBody body;
  body.matrix = columns;
  m.body = body;
  return m;
}

IgtlMessage make_status(std::string device, StatusBody body, Timestamp ts) {
  IgtlMessage m;
  m.header.type_name = kTypeStatus;
  m.header.device_name = std::move(device);
  m.header.timestamp = ts;
  m.body = std::move(body);
  return m;
}

IgtlMessage make_polydata(std::string device, PolyDataBody body, Timestamp ts) {
  IgtlMessage m;
  m.header.type_name = kTypePolyData;
  m.header.device_name = std::move(device);
  m.header.timestamp = ts;
  m.body = std::move(body);
  return m;
}

}  // namespace rtms::igtl
