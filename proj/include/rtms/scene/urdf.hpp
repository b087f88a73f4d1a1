#pragma once

#include <string>
#include <vector>

#include "rtms/scene/transform_tree.hpp"

namespace rtms::scene {

// Parse the URDF subset used for scene initialization: links, fixed and
// floating joints, origin xyz/rpy, visual mesh filenames and material
// colors. Every link becomes a frame; each joint origin becomes the
// child's local transform (rpy as intrinsic Z.Y.X). Units are
// millimetres and RAS throughout; no axis permutation is applied.
// "floating" joints mark frames that tracking updates at runtime.
std::vector<FrameNode> parse_urdf(const std::string& xml);

std::vector<FrameNode> parse_urdf_file(const std::filesystem::path& path);

}  // namespace rtms::scene
