#include "rtms/igtl/crc64.hpp"

#include <array>

namespace rtms::igtl {

namespace {

constexpr uint64_t kPolynomial = 0x42F0E1EBA9EA3693ull;

constexpr std::array<uint64_t, 256> make_table() {
  std::array<uint64_t, 256> table{};
  for (uint64_t i = 0; i < 256; ++i) {
    uint64_t crc = i << 56;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000000000000000ull) ? (crc << 1) ^ kPolynomial : crc << 1;
    }
    table[i] = crc;
  }
  return table;
}

constexpr std::array<uint64_t, 256> kTable = make_table();

}  // namespace

uint64_t crc64(std::span<const std::byte> data, uint64_t seed) {
  uint64_t crc = seed;
  for (std::byte b : data) {
    crc = (crc << 8) ^ kTable[((crc >> 56) ^ std::to_integer<uint64_t>(b)) & 0xff];
  }
  return crc;
}

}  // namespace rtms::igtl
