#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtms/math/rigid_transform.hpp"

namespace rtms::scene {

enum class SceneErrc {
  parse,
  structure,
  unsupported_joint,
  unknown_frame,
  root_immutable,
  corrupt_stl,
  unsupported_format,
  io,
  config,
};

class SceneError : public std::runtime_error {
 public:
  SceneError(SceneErrc code, std::string what)
      : std::runtime_error(std::move(what)), code_(code) {}
  SceneErrc code() const { return code_; }

 private:
  SceneErrc code_;
};

struct MeshRef {
  std::filesystem::path path;
  std::array<double, 4> rgba{0.8, 0.8, 0.8, 1.0};
};

struct FrameNode {
  std::string frame_id;
  std::string parent_id;  // empty for the root
  math::RigidTransform local;  // parent <- child
  std::optional<MeshRef> mesh;
  bool floating = false;  // updated from tracking at runtime
};

struct ChangeEvent {
  std::string frame_id;
  std::vector<std::string> affected;  // the frame and all descendants
};

// Hierarchical frame tree: single root, acyclic, unique ids. World
// transforms are cached lazily and invalidated on update; frames touched
// since the last synchronization are tracked per frame.
class TransformTree {
 public:
  explicit TransformTree(std::vector<FrameNode> frames);

  const std::string& root() const { return root_; }
  bool has_frame(const std::string& frame_id) const;
  const FrameNode& node(const std::string& frame_id) const;

  // Frames in deterministic depth-first order from the root.
  std::vector<std::string> frame_ids() const;
  std::size_t size() const { return nodes_.size(); }

  // Composition of local transforms along the path from the root.
  math::RigidTransform world_transform(const std::string& frame_id) const;

  // Replace a frame's local transform; the frame and all descendants are
  // marked pending for the next synchronization pass. The root is
  // immutable.
  ChangeEvent set_local_transform(const std::string& frame_id,
                                  const math::RigidTransform& t);

  // Relative transform a <- b (b's pose expressed in a's frame).
  math::RigidTransform relative_transform(const std::string& from,
                                          const std::string& to) const;

  std::vector<std::string> dirty_frames() const;  // depth-first order
  void clear_dirty();
  void mark_all_dirty();

 private:
  struct Rec {
    FrameNode frame;
    std::vector<std::string> children;
    mutable std::optional<math::RigidTransform> world_cache;
    bool dirty = false;
  };

  const Rec& rec(const std::string& frame_id) const;
  Rec& rec(const std::string& frame_id);
  void invalidate_and_mark(const std::string& frame_id, std::vector<std::string>& out);
  void collect_depth_first(const std::string& frame_id, bool dirty_only,
                           std::vector<std::string>& out) const;

  std::unordered_map<std::string, Rec> nodes_;
  std::string root_;
};

}  // namespace rtms::scene
