#include "rtms/scene/stl_mesh.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "rtms/scene/transform_tree.hpp"

namespace rtms::scene {

namespace {

constexpr std::size_t kStlHeaderSize = 80;
constexpr std::size_t kStlTriangleSize = 50;  // normal + 3 vertices + attribute word

uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

float read_f32_le(const unsigned char* p) {
  return std::bit_cast<float>(read_u32_le(p));
}

}  // namespace

MeshMetadata load_stl_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SceneError(SceneErrc::io, "cannot open STL file " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < kStlHeaderSize + 4) {
    throw SceneError(SceneErrc::corrupt_stl,
                     path.string() + ": too short for a binary STL");
  }
  uint32_t count = read_u32_le(bytes.data() + kStlHeaderSize);
  std::size_t expected = kStlHeaderSize + 4 + kStlTriangleSize * std::size_t{count};
  if (bytes.size() != expected) {
    if (bytes.size() >= 5 && std::memcmp(bytes.data(), "solid", 5) == 0) {
      throw SceneError(SceneErrc::unsupported_format,
                       path.string() + ": ASCII STL is not supported");
    }
    throw SceneError(SceneErrc::corrupt_stl,
                     path.string() + ": declared " + std::to_string(count) +
                         " triangles (" + std::to_string(expected) + " bytes) but file is " +
                         std::to_string(bytes.size()) + " bytes");
  }
  if (count == 0) {
    throw SceneError(SceneErrc::corrupt_stl, path.string() + ": mesh has no triangles");
  }

  MeshMetadata meta;
  meta.triangle_count = count;
  meta.bbox_min = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  meta.bbox_max = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());
  const unsigned char* p = bytes.data() + kStlHeaderSize + 4;
  for (uint32_t t = 0; t < count; ++t, p += kStlTriangleSize) {
    // Skip the 12-byte normal; three vertices follow.
    for (int v = 0; v < 3; ++v) {
      const unsigned char* vp = p + 12 + 12 * v;
      Eigen::Vector3d vertex(read_f32_le(vp), read_f32_le(vp + 4), read_f32_le(vp + 8));
      meta.bbox_min = meta.bbox_min.cwiseMin(vertex);
      meta.bbox_max = meta.bbox_max.cwiseMax(vertex);
    }
  }
  return meta;
}

}  // namespace rtms::scene
