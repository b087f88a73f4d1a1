#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

namespace rtms::scene {

struct MeshMetadata {
  uint32_t triangle_count = 0;
  Eigen::Vector3d bbox_min;
  Eigen::Vector3d bbox_max;
};

// Binary STL only: the 4-byte triangle count after the 80-byte header is
// verified against the file size (84 + 50 * n bytes) and the bounding
// box is computed from the vertices. ASCII STL is rejected as an
// unsupported format.
MeshMetadata load_stl_metadata(const std::filesystem::path& path);

}  // namespace rtms::scene
