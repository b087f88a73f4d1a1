#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace rtms::igtl {

// CRC-64/ECMA-182: polynomial 0x42F0E1EBA9EA3693, init 0, MSB first,
// no reflection, no final XOR. This is the checksum OpenIGTLink uses
// for message bodies. Chainable: pass a previous result as `seed` to
// continue over a split buffer.
uint64_t crc64(std::span<const std::byte> data, uint64_t seed = 0);

}  // namespace rtms::igtl
