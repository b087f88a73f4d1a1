#pragma once

#include <filesystem>
#include <iosfwd>

namespace rtms::app {

// Print one summary line per frame (type, device, body size, timestamp,
// CRC validity). Corrupt frames are listed with their byte offset;
// returns nonzero if the file ends mid-frame.
int codec_inspect(const std::filesystem::path& path, std::ostream& out);

// Decode every frame, re-encode it, and compare the bytes. Returns
// nonzero on any mismatch, corrupt frame, or trailing garbage.
int codec_roundtrip(const std::filesystem::path& path, std::ostream& out);

}  // namespace rtms::app
