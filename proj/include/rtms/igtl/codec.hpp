#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtms/igtl/message.hpp"

namespace rtms::igtl {

enum class CodecErrc {
  oversize_field,         // type/device/error name exceeds its field width
  invalid_character,      // non-ASCII content in a string field
  non_finite_value,       // NaN/Inf in a TRANSFORM matrix
  attributes_unsupported, // POLYDATA attributes outside the subset
  invalid_index,          // polygon index >= point count
  bad_version,            // header version other than 1
  crc_mismatch,           // body CRC check failed
  truncated,              // input ends mid-frame
  bad_body,               // body_size inconsistent with the typed layout
};

class CodecError : public std::runtime_error {
 public:
  CodecError(CodecErrc code, std::string what, std::string device = {},
             std::size_t bytes_consumed = 0)
      : std::runtime_error(std::move(what)),
        code_(code),
        device_(std::move(device)),
        bytes_consumed_(bytes_consumed) {}

  CodecErrc code() const { return code_; }
  const std::string& device() const { return device_; }
  std::size_t bytes_consumed() const { return bytes_consumed_; }

 private:
  CodecErrc code_;
  std::string device_;
  std::size_t bytes_consumed_;
};

// Serialize one message: 58-byte big-endian header followed by the body.
// body_size and body_crc are computed here; the caller's header values
// for them are ignored.
std::vector<std::byte> encode(const IgtlMessage& message);

// Parse the 58-byte header at the front of `bytes`.
MessageHeader decode_header(std::span<const std::byte> bytes);

// Decode exactly one frame from the front of `bytes`. The CRC is
// verified before the body is parsed. Unknown type names produce a
// RawBody message, not an error.
IgtlMessage decode(std::span<const std::byte> bytes);

// Incremental frame reassembly over an arbitrarily fragmented byte
// stream. Output is independent of fragmentation boundaries.
class FrameReader {
 public:
  void feed(std::span<const std::byte> bytes);

  // Next complete message, or nullopt if the buffer holds less than a
  // full frame. Throws CodecError on malformed or corrupt input.
  std::optional<IgtlMessage> next();

  bool mid_frame() const { return buffer_.size() > pos_; }
  std::size_t buffered() const { return buffer_.size() - pos_; }
  std::size_t bytes_consumed() const { return consumed_; }
  uint64_t frames_decoded() const { return frames_; }

 private:
  std::vector<std::byte> buffer_;
  std::size_t pos_ = 0;
  std::size_t consumed_ = 0;
  uint64_t frames_ = 0;
};

// Decode a whole buffer of concatenated frames. Throws CodecError with
// code truncated (carrying bytes_consumed) if the buffer ends mid-frame.
std::vector<IgtlMessage> read_frames(std::span<const std::byte> bytes);

}  // namespace rtms::igtl
