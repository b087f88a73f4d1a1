#include <doctest.h>

#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "rtms/igtl/codec.hpp"
#include "rtms/igtl/crc64.hpp"

using namespace rtms::igtl;

namespace {

std::vector<std::byte> load_fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURES_DIR) + "/golden/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::vector<char> chars((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(chars.size());
  std::memcpy(bytes.data(), chars.data(), chars.size());
  return bytes;
}

IgtlMessage random_message(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> printable('A', 'Z');
  std::uniform_real_distribution<float> value(-500.0f, 500.0f);
  std::uniform_int_distribution<uint32_t> word(0, 0xffffffff);

  std::string device;
  std::uniform_int_distribution<std::size_t> device_len(1, kDeviceNameMax);
  std::size_t len = device_len(rng);
  for (std::size_t i = 0; i < len; ++i) {
    device.push_back(static_cast<char>(printable(rng)));
  }
  Timestamp ts{word(rng), word(rng)};

  switch (kind(rng)) {
    case 0: {
      std::array<float, 12> m{};
      for (auto& f : m) {
        f = value(rng);
      }
      return make_transform(device, m, ts);
    }
    case 1: {
      StatusBody body;
      body.code = static_cast<uint16_t>(word(rng) & 0xffff);
      body.subcode = static_cast<int64_t>(word(rng)) - 0x80000000ll;
      body.error_name = "E" + std::to_string(word(rng) % 1000);
      std::uniform_int_distribution<std::size_t> msg_len(0, 120);
      std::size_t n = msg_len(rng);
      for (std::size_t i = 0; i < n; ++i) {
        body.message.push_back(static_cast<char>(printable(rng)));
      }
      return make_status(device, std::move(body), ts);
    }
    default: {
      PolyDataBody body;
      std::uniform_int_distribution<std::size_t> n_points(3, 40);
      std::size_t n = n_points(rng);
      for (std::size_t i = 0; i < n; ++i) {
        body.points.push_back({value(rng), value(rng), value(rng)});
      }
      std::uniform_int_distribution<std::size_t> n_polys(0, 10);
      std::uniform_int_distribution<uint32_t> index(0, static_cast<uint32_t>(n - 1));
      std::size_t polys = n_polys(rng);
      for (std::size_t p = 0; p < polys; ++p) {
        std::uniform_int_distribution<std::size_t> poly_len(3, 6);
        std::vector<uint32_t> poly(poly_len(rng));
        for (auto& ix : poly) {
          ix = index(rng);
        }
        body.polygons.push_back(std::move(poly));
      }
      return make_polydata(device, std::move(body), ts);
    }
  }
}

}  // namespace

TEST_CASE("header is exactly 58 bytes for every type") {
  CHECK(encode(make_transform("dev", TransformBody{}.matrix)).size() == 58 + 48);
  CHECK(encode(make_status("dev", StatusBody{})).size() == 58 + 30);
  auto poly = encode(make_polydata("dev", PolyDataBody{}));
  CHECK(poly.size() == 58 + 40);
}

TEST_CASE("identity transform encodes the identity columns") {
  auto bytes = encode(make_transform("identity", TransformBody{}.matrix));
  auto m = decode(bytes);
  REQUIRE(m.is<TransformBody>());
  std::array<float, 12> expected{1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0};
  CHECK(m.get<TransformBody>().matrix == expected);
  CHECK(m.header.body_size == 48);
}

TEST_CASE("status body size is 30 plus the message length") {
  StatusBody body;
  body.code = 1;
  body.error_name = "OK";
  auto empty = encode(make_status("s", body));
  CHECK(empty.size() == 58 + 30);
  body.message = "hello";
  auto with_message = encode(make_status("s", body));
  CHECK(with_message.size() == 58 + 35);
}

TEST_CASE("golden vectors: byte-exact encode and field-exact decode") {
  SUBCASE("transform") {
    auto golden = load_fixture("transform.bin");
    std::array<float, 12> columns{0, 1, 0, -1, 0, 0, 0, 0, 1, 10, 20, 30};
    auto encoded =
        encode(make_transform("GoldenTransform", columns, {1700000000u, 2147483648u}));
    CHECK(encoded == golden);

    auto decoded = decode(golden);
    CHECK(decoded.header.type_name == "TRANSFORM");
    CHECK(decoded.header.device_name == "GoldenTransform");
    CHECK(decoded.header.timestamp.seconds == 1700000000u);
    CHECK(decoded.header.timestamp.fraction == 2147483648u);
    CHECK(decoded.get<TransformBody>().matrix == columns);
    CHECK(decoded.get<TransformBody>().rotation_orthonormal);
  }
  SUBCASE("status") {
    auto golden = load_fixture("status.bin");
    StatusBody body;
    body.code = 1;
    body.subcode = 0;
    body.error_name = "OK";
    body.message = "calibration complete";
    auto encoded = encode(make_status("GoldenStatus", body, {1700000000u, 0u}));
    CHECK(encoded == golden);

    auto decoded = decode(golden);
    REQUIRE(decoded.is<StatusBody>());
    CHECK(decoded.get<StatusBody>() == body);
  }
  SUBCASE("polydata") {
    auto golden = load_fixture("polydata.bin");
    PolyDataBody body;
    body.points = {{0, 0, 0}, {10, 0, 0}, {0, 10, 0}};
    body.polygons = {{0, 1, 2}};
    auto encoded = encode(make_polydata("GoldenPolyData", body, {1700000000u, 4294967u}));
    CHECK(encoded == golden);
    CHECK(encoded.size() == 58 + 40 + 36 + 16);

    auto decoded = decode(golden);
    REQUIRE(decoded.is<PolyDataBody>());
    CHECK(decoded.get<PolyDataBody>() == body);
  }
}

TEST_CASE("round trip is the identity on random messages") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    IgtlMessage m = random_message(rng);
    CAPTURE(i);
    CHECK(decode(encode(m)) == m);
  }
}

TEST_CASE("a flipped CRC bit is an integrity error naming the device") {
  auto bytes = encode(make_transform("RTMS_TF_COIL", TransformBody{}.matrix));
  bytes[70] ^= std::byte{0x04};  // inside the body
  try {
    decode(bytes);
    FAIL("expected CodecError");
  } catch (const CodecError& e) {
    CHECK(e.code() == CodecErrc::crc_mismatch);
    CHECK(e.device() == "RTMS_TF_COIL");
  }
}

TEST_CASE("truncated body is an incomplete-frame error") {
  auto bytes = encode(make_status("s", StatusBody{}));
  bytes.resize(bytes.size() - 5);
  CHECK_THROWS_AS(decode(bytes), CodecError);
  try {
    decode(bytes);
  } catch (const CodecError& e) {
    CHECK(e.code() == CodecErrc::truncated);
  }
}

TEST_CASE("unknown types are preserved as raw bodies") {
  IgtlMessage foreign;
  foreign.header.type_name = "IMAGE";
  foreign.header.device_name = "scanner";
  RawBody raw;
  for (int i = 0; i < 32; ++i) {
    raw.bytes.push_back(std::byte(static_cast<unsigned char>(i * 7)));
  }
  foreign.body = raw;
  auto decoded = decode(encode(foreign));
  REQUIRE(decoded.is<RawBody>());
  CHECK(decoded.header.type_name == "IMAGE");
  CHECK(decoded.get<RawBody>() == raw);
  CHECK(decoded == foreign);
}

TEST_CASE("encode validation errors") {
  CHECK_THROWS_AS(encode(make_transform(std::string(21, 'x'), TransformBody{}.matrix)),
                  CodecError);

  TransformBody nan_body;
  nan_body.matrix[4] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(encode(make_transform("dev", nan_body.matrix)), CodecError);

  StatusBody long_name;
  long_name.error_name = std::string(21, 'e');
  CHECK_THROWS_AS(encode(make_status("dev", long_name)), CodecError);

  PolyDataBody with_attributes;
  with_attributes.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  with_attributes.attribute_count = 1;
  CHECK_THROWS_AS(encode(make_polydata("dev", with_attributes)), CodecError);

  PolyDataBody bad_index;
  bad_index.points = {{0, 0, 0}, {1, 0, 0}};
  bad_index.polygons = {{0, 1, 2}};
  CHECK_THROWS_AS(encode(make_polydata("dev", bad_index)), CodecError);
}

TEST_CASE("non-orthonormal foreign transform is flagged, not rejected") {
  TransformBody skewed;
  skewed.matrix = {1, 0, 0, 0.5f, 1, 0, 0, 0, 1, 0, 0, 0};
  auto decoded = decode(encode(make_transform("foreign", skewed.matrix)));
  REQUIRE(decoded.is<TransformBody>());
  CHECK_FALSE(decoded.get<TransformBody>().rotation_orthonormal);
}

TEST_CASE("frame reader is invariant to fragmentation") {
  auto a = encode(make_transform("a", TransformBody{}.matrix));
  auto b = encode(make_status("b", StatusBody{.code = 1, .subcode = 0,
                                              .error_name = "OK", .message = "x"}));
  std::vector<std::byte> stream = a;
  stream.insert(stream.end(), b.begin(), b.end());

  SUBCASE("one byte at a time") {
    FrameReader reader;
    std::vector<IgtlMessage> out;
    for (std::byte byte : stream) {
      reader.feed({&byte, 1});
      while (auto m = reader.next()) {
        out.push_back(std::move(*m));
      }
    }
    REQUIRE(out.size() == 2);
    CHECK(out[0].header.device_name == "a");
    CHECK(out[1].header.device_name == "b");
    CHECK_FALSE(reader.mid_frame());
  }

  SUBCASE("split at the header/body boundary") {
    FrameReader reader;
    reader.feed(std::span<const std::byte>(a).first(kHeaderSize));
    CHECK_FALSE(reader.next().has_value());
    CHECK(reader.mid_frame());
    reader.feed(std::span<const std::byte>(a).subspan(kHeaderSize));
    auto m = reader.next();
    REQUIRE(m.has_value());
    CHECK(m->header.device_name == "a");
  }
}

TEST_CASE("random frames survive random fragmentation in order") {
  std::mt19937_64 rng(7);
  std::vector<IgtlMessage> sent;
  std::vector<std::byte> stream;
  for (int i = 0; i < 200; ++i) {
    sent.push_back(random_message(rng));
    auto bytes = encode(sent.back());
    stream.insert(stream.end(), bytes.begin(), bytes.end());
  }

  FrameReader reader;
  std::vector<IgtlMessage> received;
  std::size_t pos = 0;
  std::uniform_int_distribution<std::size_t> chunk(1, 997);
  while (pos < stream.size()) {
    std::size_t n = std::min(chunk(rng), stream.size() - pos);
    reader.feed(std::span<const std::byte>(stream).subspan(pos, n));
    pos += n;
    while (auto m = reader.next()) {
      received.push_back(std::move(*m));
    }
  }
  REQUIRE(received.size() == sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) {
    CAPTURE(i);
    CHECK(received[i] == sent[i]);
  }
}

TEST_CASE("read_frames reports a stream ending mid-frame") {
  auto a = encode(make_status("a", StatusBody{}));
  auto b = encode(make_status("b", StatusBody{}));
  std::vector<std::byte> stream = a;
  stream.insert(stream.end(), b.begin(), b.end() - 3);
  try {
    read_frames(stream);
    FAIL("expected CodecError");
  } catch (const CodecError& e) {
    CHECK(e.code() == CodecErrc::truncated);
    CHECK(e.bytes_consumed() == a.size());
  }
}

TEST_CASE("timestamp conversion rounds to nearest") {
  auto ts = Timestamp::from_seconds(1.5);
  CHECK(ts.seconds == 1);
  CHECK(ts.fraction == 2147483648u);
  CHECK(ts.to_seconds() == doctest::Approx(1.5).epsilon(1e-12));
  // Rounding carry into the next second.
  auto carry = Timestamp::from_seconds(2.0 - 1e-12);
  CHECK(carry.seconds == 2);
  CHECK(carry.fraction == 0);
}
