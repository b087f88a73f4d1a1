#include "rtms/scene/urdf.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <map>
#include <sstream>

namespace rtms::scene {

namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_numbers(const std::string& text, std::size_t expected,
                                  const std::string& context) {
  std::istringstream in(text);
  std::vector<double> values;
  double v;
  while (in >> v) {
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw SceneError(SceneErrc::parse, context + ": expected " +
                                           std::to_string(expected) +
                                           " numbers, got \"" + text + "\"");
  }
  return values;
}

math::RigidTransform parse_origin(const pt::ptree& element, const std::string& context) {
  Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
  if (auto origin = element.get_child_optional("origin")) {
    if (auto s = origin->get_optional<std::string>("<xmlattr>.xyz")) {
      auto v = parse_numbers(*s, 3, context + " origin xyz");
      xyz = Eigen::Vector3d(v[0], v[1], v[2]);
    }
    if (auto s = origin->get_optional<std::string>("<xmlattr>.rpy")) {
      auto v = parse_numbers(*s, 3, context + " origin rpy");
      rpy = Eigen::Vector3d(v[0], v[1], v[2]);
    }
  }
  Eigen::Quaterniond q = Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                         Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                         Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX());
  return math::RigidTransform(q, xyz);
}

std::optional<MeshRef> parse_visual(const pt::ptree& link, const std::string& context) {
  auto visual = link.get_child_optional("visual");
  if (!visual) {
    return std::nullopt;
  }
  auto mesh = visual->get_child_optional("geometry.mesh");
  if (!mesh) {
    return std::nullopt;
  }
  MeshRef ref;
  auto filename = mesh->get_optional<std::string>("<xmlattr>.filename");
  if (!filename || filename->empty()) {
    throw SceneError(SceneErrc::parse, context + ": mesh element without filename");
  }
  ref.path = *filename;
  if (auto color = visual->get_child_optional("material.color")) {
    if (auto s = color->get_optional<std::string>("<xmlattr>.rgba")) {
      auto v = parse_numbers(*s, 4, context + " material rgba");
      ref.rgba = {v[0], v[1], v[2], v[3]};
    }
  }
  return ref;
}

}  // namespace

std::vector<FrameNode> parse_urdf(const std::string& xml) {
  pt::ptree tree;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw SceneError(SceneErrc::parse, "URDF XML parse error at line " +
                                           std::to_string(e.line()) + ": " +
                                           e.message());
  }

  auto robot = tree.get_child_optional("robot");
  if (!robot) {
    throw SceneError(SceneErrc::parse, "URDF has no <robot> element");
  }

  std::vector<FrameNode> frames;
  std::map<std::string, std::size_t> index_by_id;
  for (const auto& [tag, element] : *robot) {
    if (tag != "link") {
      continue;
    }
    auto name = element.get_optional<std::string>("<xmlattr>.name");
    if (!name || name->empty()) {
      throw SceneError(SceneErrc::parse, "link without a name attribute");
    }
    if (index_by_id.count(*name)) {
      throw SceneError(SceneErrc::structure, "duplicate link name \"" + *name + "\"");
    }
    FrameNode frame;
    frame.frame_id = *name;
    frame.mesh = parse_visual(element, "link \"" + *name + "\"");
    index_by_id.emplace(*name, frames.size());
    frames.push_back(std::move(frame));
  }

  for (const auto& [tag, element] : *robot) {
    if (tag != "joint") {
      continue;
    }
    std::string joint_name = element.get<std::string>("<xmlattr>.name", "(unnamed)");
    std::string context = "joint \"" + joint_name + "\"";
    auto type = element.get_optional<std::string>("<xmlattr>.type");
    if (!type || (*type != "fixed" && *type != "floating")) {
      throw SceneError(SceneErrc::unsupported_joint,
                       context + ": unsupported joint type \"" +
                           (type ? *type : std::string("(none)")) + "\"");
    }
    auto parent = element.get_optional<std::string>("parent.<xmlattr>.link");
    auto child = element.get_optional<std::string>("child.<xmlattr>.link");
    if (!parent || !child) {
      throw SceneError(SceneErrc::parse, context + ": missing parent or child link");
    }
    if (!index_by_id.count(*parent)) {
      throw SceneError(SceneErrc::structure,
                       context + ": unknown parent link \"" + *parent + "\"");
    }
    auto child_it = index_by_id.find(*child);
    if (child_it == index_by_id.end()) {
      throw SceneError(SceneErrc::structure,
                       context + ": unknown child link \"" + *child + "\"");
    }
    FrameNode& frame = frames[child_it->second];
    if (!frame.parent_id.empty()) {
      throw SceneError(SceneErrc::structure,
                       "link \"" + *child + "\" has multiple parent joints");
    }
    frame.parent_id = *parent;
    frame.local = parse_origin(element, context);
    frame.floating = (*type == "floating");
  }

  // Root and reachability checks; a rootless graph means the joints
  // close a cycle.
  std::string root;
  for (const auto& f : frames) {
    if (f.parent_id.empty()) {
      if (!root.empty()) {
        throw SceneError(SceneErrc::structure,
                         "multiple root links: \"" + root + "\" and \"" + f.frame_id +
                             "\"");
      }
      root = f.frame_id;
    }
  }
  if (root.empty()) {
    throw SceneError(SceneErrc::structure, "joint graph has a cycle (no root link)");
  }
  return frames;
}

std::vector<FrameNode> parse_urdf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SceneError(SceneErrc::io, "cannot open URDF file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::vector<FrameNode> frames = parse_urdf(buffer.str());
  // Mesh paths are relative to the URDF location.
  for (auto& f : frames) {
    if (f.mesh && f.mesh->path.is_relative()) {
      f.mesh->path = path.parent_path() / f.mesh->path;
    }
  }
  return frames;
}

}  // namespace rtms::scene
