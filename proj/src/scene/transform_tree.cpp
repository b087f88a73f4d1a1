#include "rtms/scene/transform_tree.hpp"

#include <algorithm>

namespace rtms::scene {

TransformTree::TransformTree(std::vector<FrameNode> frames) {
  for (auto& f : frames) {
    std::string id = f.frame_id;
    if (id.empty()) {
      throw SceneError(SceneErrc::structure, "frame with empty id");
    }
    if (!nodes_.emplace(id, Rec{std::move(f), {}, std::nullopt, false}).second) {
      throw SceneError(SceneErrc::structure, "duplicate frame id \"" + id + "\"");
    }
  }
  for (auto& [id, r] : nodes_) {
    if (r.frame.parent_id.empty()) {
      if (!root_.empty()) {
        throw SceneError(SceneErrc::structure,
                         "multiple roots: \"" + root_ + "\" and \"" + id + "\"");
      }
      root_ = id;
    } else {
      auto parent = nodes_.find(r.frame.parent_id);
      if (parent == nodes_.end()) {
        throw SceneError(SceneErrc::structure, "frame \"" + id +
                                                   "\" references unknown parent \"" +
                                                   r.frame.parent_id + "\"");
      }
      parent->second.children.push_back(id);
    }
  }
  if (root_.empty()) {
    throw SceneError(SceneErrc::structure, "no root frame (joint cycle)");
  }
  for (auto& [id, r] : nodes_) {
    std::sort(r.children.begin(), r.children.end());
  }
  // Every frame must be reachable from the root; leftovers mean a cycle.
  std::vector<std::string> reached;
  collect_depth_first(root_, false, reached);
  if (reached.size() != nodes_.size()) {
    throw SceneError(SceneErrc::structure,
                     "frame graph is not a tree (cycle or disconnected frames)");
  }
}

bool TransformTree::has_frame(const std::string& frame_id) const {
  return nodes_.count(frame_id) > 0;
}

const TransformTree::Rec& TransformTree::rec(const std::string& frame_id) const {
  auto it = nodes_.find(frame_id);
  if (it == nodes_.end()) {
    throw SceneError(SceneErrc::unknown_frame, "unknown frame \"" + frame_id + "\"");
  }
  return it->second;
}

TransformTree::Rec& TransformTree::rec(const std::string& frame_id) {
  return const_cast<Rec&>(static_cast<const TransformTree*>(this)->rec(frame_id));
}

const FrameNode& TransformTree::node(const std::string& frame_id) const {
  return rec(frame_id).frame;
}

std::vector<std::string> TransformTree::frame_ids() const {
  std::vector<std::string> out;
  collect_depth_first(root_, false, out);
  return out;
}

math::RigidTransform TransformTree::world_transform(const std::string& frame_id) const {
  const Rec& r = rec(frame_id);
  if (r.world_cache) {
    return *r.world_cache;
  }
  math::RigidTransform world =
      frame_id == root_
          ? math::RigidTransform::identity()
          : compose(world_transform(r.frame.parent_id), r.frame.local);
  r.world_cache = world;
  return world;
}

ChangeEvent TransformTree::set_local_transform(const std::string& frame_id,
                                               const math::RigidTransform& t) {
  Rec& r = rec(frame_id);
  if (frame_id == root_) {
    throw SceneError(SceneErrc::root_immutable,
                     "root frame \"" + root_ + "\" is immutable");
  }
  r.frame.local = t;
  ChangeEvent event{frame_id, {}};
  invalidate_and_mark(frame_id, event.affected);
  return event;
}

math::RigidTransform TransformTree::relative_transform(const std::string& from,
                                                       const std::string& to) const {
  return compose(invert(world_transform(from)), world_transform(to));
}

void TransformTree::invalidate_and_mark(const std::string& frame_id,
                                        std::vector<std::string>& out) {
  Rec& r = rec(frame_id);
  r.world_cache.reset();
  r.dirty = true;
  out.push_back(frame_id);
  for (const auto& child : r.children) {
    invalidate_and_mark(child, out);
  }
}

void TransformTree::collect_depth_first(const std::string& frame_id, bool dirty_only,
                                        std::vector<std::string>& out) const {
  const Rec& r = rec(frame_id);
  if (!dirty_only || r.dirty) {
    out.push_back(frame_id);
  }
  for (const auto& child : r.children) {
    collect_depth_first(child, dirty_only, out);
  }
}

std::vector<std::string> TransformTree::dirty_frames() const {
  std::vector<std::string> out;
  collect_depth_first(root_, true, out);
  return out;
}

void TransformTree::clear_dirty() {
  for (auto& [id, r] : nodes_) {
    r.dirty = false;
  }
}

void TransformTree::mark_all_dirty() {
  for (auto& [id, r] : nodes_) {
    if (id != root_) {
      r.dirty = true;
    }
  }
}

}  // namespace rtms::scene
