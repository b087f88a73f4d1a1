#include <doctest.h>

#include <random>
#include <vector>

#include "rtms/igtl/crc64.hpp"

namespace {

// Independent oracle: bitwise long division, MSB first, no tables.
uint64_t crc64_oracle(const std::vector<uint8_t>& data) {
  constexpr uint64_t poly = 0x42F0E1EBA9EA3693ull;
  uint64_t crc = 0;
  for (uint8_t byte : data) {
    crc ^= static_cast<uint64_t>(byte) << 56;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x8000000000000000ull) ? (crc << 1) ^ poly : crc << 1;
    }
  }
  return crc;
}

std::vector<std::byte> as_bytes(const std::vector<uint8_t>& v) {
  std::vector<std::byte> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::byte(v[i]);
  }
  return out;
}

uint64_t crc64_of(const std::vector<uint8_t>& v) {
  auto b = as_bytes(v);
  return rtms::igtl::crc64(b);
}

}  // namespace

TEST_CASE("empty input is zero") {
  CHECK(crc64_of({}) == 0);
}

TEST_CASE("check value matches the published catalog entry") {
  std::vector<uint8_t> check = {'1', '2', '3', '4', '5', '6', '7', '8', '9'};
  CHECK(crc64_of(check) == 0x6C40DF5F0B497347ull);
  CHECK(crc64_oracle(check) == 0x6C40DF5F0B497347ull);
}

TEST_CASE("single zero byte matches the bitwise oracle") {
  std::vector<uint8_t> zero = {0x00};
  CHECK(crc64_of(zero) == crc64_oracle(zero));
}

TEST_CASE("random buffers match the bitwise oracle") {
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> length(0, 512);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<uint8_t> data(length(rng));
    for (auto& b : data) {
      b = static_cast<uint8_t>(byte(rng));
    }
    CAPTURE(trial);
    CHECK(crc64_of(data) == crc64_oracle(data));
  }
}

TEST_CASE("crc chains across split buffers") {
  std::mt19937_64 rng(0xcafe);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<uint8_t> data(300);
  for (auto& b : data) {
    b = static_cast<uint8_t>(byte(rng));
  }
  auto whole = as_bytes(data);
  for (std::size_t split : {std::size_t{0}, std::size_t{1}, std::size_t{57},
                            std::size_t{299}, std::size_t{300}}) {
    auto head = std::span<const std::byte>(whole).first(split);
    auto tail = std::span<const std::byte>(whole).subspan(split);
    CHECK(rtms::igtl::crc64(tail, rtms::igtl::crc64(head)) == crc64_of(data));
  }
}
