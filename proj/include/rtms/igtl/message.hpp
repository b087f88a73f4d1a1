#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rtms::igtl {

inline constexpr std::size_t kHeaderSize = 58;
inline constexpr std::size_t kTypeNameMax = 12;
inline constexpr std::size_t kDeviceNameMax = 20;
inline constexpr std::size_t kErrorNameMax = 20;
inline constexpr std::size_t kStatusFixedSize = 30;
inline constexpr std::size_t kTransformBodySize = 48;

inline constexpr const char* kTypeTransform = "TRANSFORM";
inline constexpr const char* kTypeStatus = "STATUS";
inline constexpr const char* kTypePolyData = "POLYDATA";

// Status codes from the OpenIGTLink status specification; only the
// handful this stack emits.
inline constexpr uint16_t kStatusInvalid = 0;
inline constexpr uint16_t kStatusOk = 1;
inline constexpr uint16_t kStatusError = 2;
inline constexpr uint16_t kStatusNotReady = 13;

// 64-bit OpenIGTLink timestamp: seconds since the Unix epoch plus a
// binary fraction of a second (fraction = nanoseconds * 2^32 / 1e9).
struct Timestamp {
  uint32_t seconds = 0;
  uint32_t fraction = 0;

  static Timestamp from_seconds(double t);
  double to_seconds() const;

  bool operator==(const Timestamp&) const = default;
};

struct MessageHeader {
  uint16_t version = 1;
  std::string type_name;
  std::string device_name;
  Timestamp timestamp;
  uint64_t body_size = 0;  // derived on encode
  uint64_t body_crc = 0;   // derived on encode

  bool operator==(const MessageHeader&) const = default;
};

// Upper 3x4 of a homogeneous matrix, serialized column-major: three
// rotation columns, then translation. Millimetres, RAS frame.
struct TransformBody {
  std::array<float, 12> matrix{1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0};

  // Filled in by decode: true when the rotation columns are orthonormal
  // within 1e-4. Foreign senders may stream non-rigid matrices; those
  // are flagged here, never rejected.
  bool rotation_orthonormal = true;

  std::array<float, 3> column(int i) const {
    return {matrix[3 * i], matrix[3 * i + 1], matrix[3 * i + 2]};
  }

  bool operator==(const TransformBody& o) const { return matrix == o.matrix; }
};

struct StatusBody {
  uint16_t code = kStatusOk;
  int64_t subcode = 0;
  std::string error_name;
  std::string message;

  bool operator==(const StatusBody&) const = default;
};

// POLYDATA subset: points and polygons only; vertices, lines, triangle
// strips and attributes are encoded as zero counts.
struct PolyDataBody {
  std::vector<std::array<float, 3>> points;
  std::vector<std::vector<uint32_t>> polygons;
  uint32_t attribute_count = 0;  // anything but 0 is an encode error

  bool operator==(const PolyDataBody&) const = default;
};

// Body of a message whose type is outside the supported set. Preserved,
// never dropped.
struct RawBody {
  std::vector<std::byte> bytes;

  bool operator==(const RawBody&) const = default;
};

using Body = std::variant<TransformBody, StatusBody, PolyDataBody, RawBody>;

// Wire type name implied by a typed body; nullptr for RawBody (the
// header keeps the foreign name).
const char* implied_type_name(const Body& body);

struct IgtlMessage {
  MessageHeader header;
  Body body;

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(body);
  }
  template <typename T>
  const T& get() const {
    return std::get<T>(body);
  }

  // Semantic equality: derived header fields (body_size, body_crc) and
  // decode-only flags are excluded; floats compare bit-exact.
  bool operator==(const IgtlMessage& o) const {
    return header.version == o.header.version &&
           header.type_name == o.header.type_name &&
           header.device_name == o.header.device_name &&
           header.timestamp == o.header.timestamp && body == o.body;
  }
};

IgtlMessage make_transform(std::string device, const std::array<float, 12>& columns,
                           Timestamp ts = {});
IgtlMessage make_status(std::string device, StatusBody body, Timestamp ts = {});
IgtlMessage make_polydata(std::string device, PolyDataBody body, Timestamp ts = {});

}  // namespace rtms::igtl
