#include "rtms/igtl/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <optional>

#include "rtms/igtl/crc64.hpp"

namespace rtms::igtl {

namespace {

void put_u16(std::vector<std::byte>& out, uint16_t v) {
  out.push_back(std::byte(v >> 8));
  out.push_back(std::byte(v & 0xff));
}

void put_u32(std::vector<std::byte>& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(std::byte((v >> shift) & 0xff));
  }
}

void put_u64(std::vector<std::byte>& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(std::byte((v >> shift) & 0xff));
  }
}

void put_f32(std::vector<std::byte>& out, float v) {
  put_u32(out, std::bit_cast<uint32_t>(v));
}

uint16_t get_u16(std::span<const std::byte> in, std::size_t pos) {
  return static_cast<uint16_t>((std::to_integer<uint16_t>(in[pos]) << 8) |
                               std::to_integer<uint16_t>(in[pos + 1]));
}

uint32_t get_u32(std::span<const std::byte> in, std::size_t pos) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v = (v << 8) | std::to_integer<uint32_t>(in[pos + i]);
  }
  return v;
}

uint64_t get_u64(std::span<const std::byte> in, std::size_t pos) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | std::to_integer<uint64_t>(in[pos + i]);
  }
  return v;
}

float get_f32(std::span<const std::byte> in, std::size_t pos) {
  return std::bit_cast<float>(get_u32(in, pos));
}

bool ascii_name_ok(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c >= 0x20 && c <= 0x7e; });
}

bool ascii_text_ok(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return (c >= 0x20 && c <= 0x7e) || c == '\t' || c == '\n' || c == '\r';
  });
}

void check_name(const std::string& s, std::size_t max, const char* field) {
  if (s.size() > max) {
    throw CodecError(CodecErrc::oversize_field,
                     std::string(field) + " exceeds " + std::to_string(max) +
                         " bytes: \"" + s + "\"");
  }
  if (!ascii_name_ok(s)) {
    throw CodecError(CodecErrc::invalid_character,
                     std::string(field) + " contains non-ASCII bytes");
  }
}

// NUL-padded to field width on encode.
void put_padded(std::vector<std::byte>& out, const std::string& s, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) {
    out.push_back(i < s.size() ? std::byte(static_cast<unsigned char>(s[i]))
                               : std::byte{0});
  }
}

// Right-trimmed of NULs on decode.
std::string get_padded(std::span<const std::byte> in, std::size_t pos, std::size_t width) {
  std::size_t len = width;
  while (len > 0 && in[pos + len - 1] == std::byte{0}) {
    --len;
  }
  std::string s(len, '\0');
  for (std::size_t i = 0; i < len; ++i) {
    s[i] = static_cast<char>(std::to_integer<unsigned char>(in[pos + i]));
  }
  return s;
}

std::vector<std::byte> encode_transform(const TransformBody& body) {
  std::vector<std::byte> out;
  out.reserve(kTransformBodySize);
  for (float v : body.matrix) {
    if (!std::isfinite(v)) {
      throw CodecError(CodecErrc::non_finite_value,
                       "TRANSFORM matrix contains a non-finite value");
    }
    put_f32(out, v);
  }
  return out;
}

std::vector<std::byte> encode_status(const StatusBody& body) {
  check_name(body.error_name, kErrorNameMax, "error_name");
  if (!ascii_text_ok(body.message)) {
    throw CodecError(CodecErrc::invalid_character,
                     "status message contains non-ASCII bytes");
  }
  std::vector<std::byte> out;
  out.reserve(kStatusFixedSize + body.message.size());
  put_u16(out, body.code);
  put_u64(out, static_cast<uint64_t>(body.subcode));
  put_padded(out, body.error_name, kErrorNameMax);
  for (char c : body.message) {
    out.push_back(std::byte(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::byte> encode_polydata(const PolyDataBody& body) {
  if (body.attribute_count != 0) {
    throw CodecError(CodecErrc::attributes_unsupported,
                     "POLYDATA attributes are outside the supported subset");
  }
  uint32_t npoints = static_cast<uint32_t>(body.points.size());
  uint32_t size_polygons = 0;
  for (const auto& poly : body.polygons) {
    for (uint32_t index : poly) {
      if (index >= npoints) {
        throw CodecError(CodecErrc::invalid_index,
                         "polygon index " + std::to_string(index) +
                             " out of range for " + std::to_string(npoints) +
                             " points");
      }
    }
    size_polygons += 4 * (1 + static_cast<uint32_t>(poly.size()));
  }

  std::vector<std::byte> out;
  put_u32(out, npoints);
  put_u32(out, 0);  // nvertices
  put_u32(out, 0);  // size_vertices
  put_u32(out, 0);  // nlines
  put_u32(out, 0);  // size_lines
  put_u32(out, static_cast<uint32_t>(body.polygons.size()));
  put_u32(out, size_polygons);
  put_u32(out, 0);  // ntriangle_strips
  put_u32(out, 0);  // size_triangle_strips
  put_u32(out, 0);  // nattributes
  for (const auto& p : body.points) {
    put_f32(out, p[0]);
    put_f32(out, p[1]);
    put_f32(out, p[2]);
  }
  for (const auto& poly : body.polygons) {
    put_u32(out, static_cast<uint32_t>(poly.size()));
    for (uint32_t index : poly) {
      put_u32(out, index);
    }
  }
  return out;
}

std::vector<std::byte> encode_body(const IgtlMessage& m) {
  if (m.is<TransformBody>()) return encode_transform(m.get<TransformBody>());
  if (m.is<StatusBody>()) return encode_status(m.get<StatusBody>());
  if (m.is<PolyDataBody>()) return encode_polydata(m.get<PolyDataBody>());
  const auto& raw = m.get<RawBody>();
  return raw.bytes;
}

bool columns_orthonormal(const std::array<float, 12>& m, double tol) {
  double c[3][3];
  for (int col = 0; col < 3; ++col) {
    for (int row = 0; row < 3; ++row) {
      c[col][row] = m[3 * col + row];
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      double dot = c[i][0] * c[j][0] + c[i][1] * c[j][1] + c[i][2] * c[j][2];
      double expect = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - expect) > tol) {
        return false;
      }
    }
  }
  return true;
}

TransformBody decode_transform(std::span<const std::byte> body, const std::string& device) {
  if (body.size() != kTransformBodySize) {
    throw CodecError(CodecErrc::bad_body,
                     "TRANSFORM body must be 48 bytes, got " +
                         std::to_string(body.size()),
                     device);
  }
  TransformBody out;
  for (int i = 0; i < 12; ++i) {
    out.matrix[static_cast<std::size_t>(i)] = get_f32(body, static_cast<std::size_t>(4 * i));
  }
  out.rotation_orthonormal = columns_orthonormal(out.matrix, 1e-4);
  return out;
}

StatusBody decode_status(std::span<const std::byte> body, const std::string& device) {
  if (body.size() < kStatusFixedSize) {
    throw CodecError(CodecErrc::bad_body,
                     "STATUS body must be at least 30 bytes, got " +
                         std::to_string(body.size()),
                     device);
  }
  StatusBody out;
  out.code = get_u16(body, 0);
  out.subcode = static_cast<int64_t>(get_u64(body, 2));
  out.error_name = get_padded(body, 10, kErrorNameMax);
  out.message.assign(reinterpret_cast<const char*>(body.data()) + kStatusFixedSize,
                     body.size() - kStatusFixedSize);
  return out;
}

PolyDataBody decode_polydata(std::span<const std::byte> body, const std::string& device) {
  constexpr std::size_t kCountsSize = 40;
  if (body.size() < kCountsSize) {
    throw CodecError(CodecErrc::bad_body, "POLYDATA body shorter than its counts header",
                     device);
  }
  uint32_t npoints = get_u32(body, 0);
  uint32_t nvertices = get_u32(body, 4);
  uint32_t size_vertices = get_u32(body, 8);
  uint32_t nlines = get_u32(body, 12);
  uint32_t size_lines = get_u32(body, 16);
  uint32_t npolygons = get_u32(body, 20);
  uint32_t size_polygons = get_u32(body, 24);
  uint32_t nstrips = get_u32(body, 28);
  uint32_t size_strips = get_u32(body, 32);
  uint32_t nattributes = get_u32(body, 36);
  if (nvertices != 0 || size_vertices != 0 || nlines != 0 || size_lines != 0 ||
      nstrips != 0 || size_strips != 0) {
    throw CodecError(CodecErrc::bad_body,
                     "POLYDATA vertices/lines/triangle strips are outside the subset",
                     device);
  }
  if (nattributes != 0) {
    throw CodecError(CodecErrc::attributes_unsupported,
                     "POLYDATA attributes are outside the supported subset", device);
  }
  std::size_t expected = kCountsSize + std::size_t{npoints} * 12 + size_polygons;
  if (body.size() != expected) {
    throw CodecError(CodecErrc::bad_body,
                     "POLYDATA body size " + std::to_string(body.size()) +
                         " does not match counts (" + std::to_string(expected) + ")",
                     device);
  }

  PolyDataBody out;
  out.points.resize(npoints);
  std::size_t pos = kCountsSize;
  for (uint32_t i = 0; i < npoints; ++i) {
    out.points[i] = {get_f32(body, pos), get_f32(body, pos + 4), get_f32(body, pos + 8)};
    pos += 12;
  }
  std::size_t polygons_end = pos + size_polygons;
  for (uint32_t i = 0; i < npolygons; ++i) {
    if (pos + 4 > polygons_end) {
      throw CodecError(CodecErrc::bad_body, "POLYDATA polygon list truncated", device);
    }
    uint32_t count = get_u32(body, pos);
    pos += 4;
    if (pos + std::size_t{count} * 4 > polygons_end) {
      throw CodecError(CodecErrc::bad_body, "POLYDATA polygon list truncated", device);
    }
    std::vector<uint32_t> poly(count);
    for (uint32_t k = 0; k < count; ++k) {
      poly[k] = get_u32(body, pos);
      pos += 4;
      if (poly[k] >= npoints) {
        throw CodecError(CodecErrc::invalid_index,
                         "polygon index " + std::to_string(poly[k]) +
                             " out of range for " + std::to_string(npoints) + " points",
                         device);
      }
    }
    out.polygons.push_back(std::move(poly));
  }
  if (pos != polygons_end) {
    throw CodecError(CodecErrc::bad_body, "POLYDATA polygon bytes left over", device);
  }
  return out;
}

}  // namespace

std::vector<std::byte> encode(const IgtlMessage& message) {
  const char* implied = implied_type_name(message.body);
  std::string type_name = implied ? implied : message.header.type_name;
  check_name(type_name, kTypeNameMax, "type_name");
  if (type_name.empty()) {
    throw CodecError(CodecErrc::oversize_field, "type_name must not be empty");
  }
  check_name(message.header.device_name, kDeviceNameMax, "device_name");

  std::vector<std::byte> body = encode_body(message);
  uint64_t crc = crc64(body);

  std::vector<std::byte> out;
  out.reserve(kHeaderSize + body.size());
  put_u16(out, 1);  // protocol version 1 header layout
  put_padded(out, type_name, kTypeNameMax);
  put_padded(out, message.header.device_name, kDeviceNameMax);
  put_u32(out, message.header.timestamp.seconds);
  put_u32(out, message.header.timestamp.fraction);
  put_u64(out, body.size());
  put_u64(out, crc);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

MessageHeader decode_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderSize) {
    throw CodecError(CodecErrc::truncated,
                     "need 58 header bytes, have " + std::to_string(bytes.size()));
  }
  MessageHeader h;
  h.version = get_u16(bytes, 0);
  if (h.version != 1) {
    throw CodecError(CodecErrc::bad_version,
                     "unsupported header version " + std::to_string(h.version));
  }
  h.type_name = get_padded(bytes, 2, kTypeNameMax);
  h.device_name = get_padded(bytes, 14, kDeviceNameMax);
  h.timestamp.seconds = get_u32(bytes, 34);
  h.timestamp.fraction = get_u32(bytes, 38);
  h.body_size = get_u64(bytes, 42);
  h.body_crc = get_u64(bytes, 50);
  return h;
}

IgtlMessage decode(std::span<const std::byte> bytes) {
  MessageHeader header = decode_header(bytes);
  if (bytes.size() < kHeaderSize + header.body_size) {
    throw CodecError(CodecErrc::truncated,
                     "frame for device \"" + header.device_name + "\" needs " +
                         std::to_string(kHeaderSize + header.body_size) +
                         " bytes, have " + std::to_string(bytes.size()),
                     header.device_name);
  }
  std::span<const std::byte> body =
      bytes.subspan(kHeaderSize, static_cast<std::size_t>(header.body_size));
  uint64_t crc = crc64(body);
  if (crc != header.body_crc) {
    throw CodecError(CodecErrc::crc_mismatch,
                     "body CRC mismatch on device \"" + header.device_name + "\"",
                     header.device_name);
  }

  IgtlMessage m;
  m.header = header;
  if (header.type_name == kTypeTransform) {
    m.body = decode_transform(body, header.device_name);
  } else if (header.type_name == kTypeStatus) {
    m.body = decode_status(body, header.device_name);
  } else if (header.type_name == kTypePolyData) {
    m.body = decode_polydata(body, header.device_name);
  } else {
    m.body = RawBody{std::vector<std::byte>(body.begin(), body.end())};
  }
  return m;
}

void FrameReader::feed(std::span<const std::byte> bytes) {
  // Compact once the consumed prefix dominates the buffer.
  if (pos_ > 4096 && pos_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<IgtlMessage> FrameReader::next() {
  std::span<const std::byte> pending(buffer_.data() + pos_, buffer_.size() - pos_);
  if (pending.size() < kHeaderSize) {
    return std::nullopt;
  }
  MessageHeader header = decode_header(pending);
  std::size_t frame_size = kHeaderSize + static_cast<std::size_t>(header.body_size);
  if (pending.size() < frame_size) {
    return std::nullopt;
  }
  IgtlMessage m = decode(pending.first(frame_size));
  pos_ += frame_size;
  consumed_ += frame_size;
  ++frames_;
  return m;
}

std::vector<IgtlMessage> read_frames(std::span<const std::byte> bytes) {
  FrameReader reader;
  reader.feed(bytes);
  std::vector<IgtlMessage> out;
  while (auto m = reader.next()) {
    out.push_back(std::move(*m));
  }
  if (reader.mid_frame()) {
    throw CodecError(CodecErrc::truncated,
                     "stream ends mid-frame after " +
                         std::to_string(reader.bytes_consumed()) + " bytes",
                     {}, reader.bytes_consumed());
  }
  return out;
}

}  // namespace rtms::igtl
