#include "rtms/app/codec_tool.hpp"

#include <cstring>
#include <fstream>
#include <ostream>
#include <vector>

#include "rtms/igtl/codec.hpp"
#include "rtms/igtl/crc64.hpp"

namespace rtms::app {

namespace {

std::vector<std::byte> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<char> chars((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(chars.size());
  std::memcpy(bytes.data(), chars.data(), chars.size());
  return bytes;
}

struct FrameSlice {
  std::size_t offset = 0;
  std::size_t size = 0;
  igtl::MessageHeader header;
  bool crc_ok = false;
};

// Walk the frame boundaries without rejecting corrupt bodies.
std::vector<FrameSlice> scan_frames(std::span<const std::byte> bytes,
                                    std::size_t& trailing_offset) {
  std::vector<FrameSlice> frames;
  std::size_t pos = 0;
  while (bytes.size() - pos >= igtl::kHeaderSize) {
    FrameSlice slice;
    slice.offset = pos;
    slice.header = igtl::decode_header(bytes.subspan(pos));
    slice.size = igtl::kHeaderSize + static_cast<std::size_t>(slice.header.body_size);
    if (bytes.size() - pos < slice.size) {
      break;  // ends mid-frame
    }
    auto body = bytes.subspan(pos + igtl::kHeaderSize,
                              static_cast<std::size_t>(slice.header.body_size));
    slice.crc_ok = igtl::crc64(body) == slice.header.body_crc;
    frames.push_back(slice);
    pos += slice.size;
  }
  trailing_offset = pos;
  return frames;
}

}  // namespace

int codec_inspect(const std::filesystem::path& path, std::ostream& out) {
  auto bytes = read_file(path);
  std::size_t trailing = 0;
  auto frames = scan_frames(bytes, trailing);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    out << "frame " << i << " @" << f.offset << ": " << f.header.type_name
        << " device=\"" << f.header.device_name << "\" body=" << f.header.body_size
        << "B ts=" << f.header.timestamp.seconds << "." << f.header.timestamp.fraction
        << " crc=" << (f.crc_ok ? "OK" : "FAIL") << "\n";
  }
  if (trailing != bytes.size()) {
    out << "error: " << (bytes.size() - trailing) << " trailing bytes at offset "
        << trailing << " (mid-frame)\n";
    return 1;
  }
  return 0;
}

int codec_roundtrip(const std::filesystem::path& path, std::ostream& out) {
  auto bytes = read_file(path);
  std::size_t trailing = 0;
  auto frames = scan_frames(bytes, trailing);
  int failures = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    auto original = std::span<const std::byte>(bytes).subspan(f.offset, f.size);
    if (!f.crc_ok) {
      out << "frame " << i << " @" << f.offset << ": CRC FAIL\n";
      ++failures;
      continue;
    }
    try {
      auto reencoded = igtl::encode(igtl::decode(original));
      if (reencoded.size() != original.size() ||
          std::memcmp(reencoded.data(), original.data(), original.size()) != 0) {
        out << "frame " << i << " @" << f.offset << ": re-encode differs\n";
        ++failures;
      } else {
        out << "frame " << i << " @" << f.offset << ": roundtrip OK\n";
      }
    } catch (const igtl::CodecError& e) {
      out << "frame " << i << " @" << f.offset << ": decode error: " << e.what() << "\n";
      ++failures;
    }
  }
  if (trailing != bytes.size()) {
    out << "error: " << (bytes.size() - trailing) << " trailing bytes at offset "
        << trailing << " (mid-frame)\n";
    ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace rtms::app
