#include "aos/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "aos/error.hpp"

namespace aos::config {

namespace {

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError("config key '" + key + "' has an invalid value");
  }
}

template <typename T>
void read_if(const YAML::Node& map, const char* key, T& out, const std::string& prefix = "") {
  if (const YAML::Node n = map[key]) out = scalar<T>(n, prefix + key);
}

void read_pair(const YAML::Node& map, const char* key, double& a, double& b, const std::string& prefix) {
  const YAML::Node n = map[key];
  if (!n) return;
  if (!n.IsSequence() || n.size() != 2) throw ValidationError("config key '" + prefix + key + "' needs two numbers");
  a = scalar<double>(n[0], prefix + key);
  b = scalar<double>(n[1], prefix + key);
}

void require_map(const YAML::Node& n, const std::string& key) {
  if (!n.IsMap()) throw ValidationError("config key '" + key + "' must be a map");
}

sim::TargetSpec parse_target(const YAML::Node& n, std::size_t index) {
  const std::string p = "targets[" + std::to_string(index) + "].";
  require_map(n, p.substr(0, p.size() - 1));
  sim::TargetSpec t;
  read_pair(n, "position", t.x, t.y, p);
  read_if(n, "height", t.height, p);
  read_if(n, "temp", t.temp, p);
  read_if(n, "texture_amp", t.texture_amp, p);
  std::string shape = n["half_extent"] ? "box" : "disc";
  read_if(n, "shape", shape, p);
  if (shape == "box") {
    t.footprint.shape = sim::FootprintShape::box;
    read_pair(n, "half_extent", t.footprint.half_x, t.footprint.half_y, p);
  } else if (shape == "disc") {
    t.footprint.shape = sim::FootprintShape::disc;
    read_if(n, "radius", t.footprint.radius, p);
  } else {
    throw ValidationError("config key '" + p + "shape' must be 'box' or 'disc'");
  }
  return t;
}

sim::OccluderDisc parse_disc(const YAML::Node& n, const std::string& p) {
  require_map(n, p);
  sim::OccluderDisc d;
  read_pair(n, "position", d.x, d.y, p + ".");
  read_if(n, "height", d.height, p + ".");
  read_if(n, "radius", d.radius, p + ".");
  read_if(n, "temp", d.temp, p + ".");
  return d;
}

std::vector<sim::OccluderDisc> parse_discs(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence()) throw ValidationError("config key '" + key + "' must be a list");
  std::vector<sim::OccluderDisc> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(parse_disc(n[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

sim::SceneSpec spec_from_node(const YAML::Node& root) {
  if (!root.IsMap()) throw ValidationError("scene description must be a YAML map");
  std::uint64_t seed = 1;
  read_if(root, "seed", seed);
  sim::SceneSpec spec;
  spec.seed = seed;
  if (const YAML::Node p = root["preset"]) {
    const auto base = sim::preset_by_name(scalar<std::string>(p, "preset"), seed);
    if (!base) throw ValidationError("unknown preset '" + p.as<std::string>() + "' (expected preset1..preset4)");
    spec = *base;
  }
  read_pair(root, "extent", spec.extent_x, spec.extent_y, "");
  if (const YAML::Node g = root["ground"]) {
    require_map(g, "ground");
    read_if(g, "temp", spec.ground_temp, "ground.");
    read_if(g, "noise_amp", spec.ground_noise_amp, "ground.");
    read_if(g, "noise_scale", spec.ground_noise_scale, "ground.");
  }
  if (const YAML::Node t = root["targets"]) {
    if (!t.IsSequence()) throw ValidationError("config key 'targets' must be a list");
    spec.targets.clear();
    for (std::size_t i = 0; i < t.size(); ++i) spec.targets.push_back(parse_target(t[i], i));
  }
  if (const YAML::Node l = root["occluder_layer"]) {
    require_map(l, "occluder_layer");
    auto& o = spec.occluder_layer;
    const std::string p = "occluder_layer.";
    read_if(l, "density", o.density, p);
    read_if(l, "crown_height", o.crown_height, p);
    read_if(l, "crown_height_jitter", o.crown_height_jitter, p);
    read_if(l, "crown_radius", o.crown_radius, p);
    read_if(l, "crown_radius_jitter", o.crown_radius_jitter, p);
    read_if(l, "temp", o.temp, p);
  }
  if (const YAML::Node o = root["occluders"]) spec.occluders = parse_discs(o, "occluders");
  spec.validate();
  return spec;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("malformed YAML: ") + e.what());
  }
}

// Shortest decimal text that parses back to the same double.
std::string num(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void emit_pair(YAML::Emitter& out, const char* key, double a, double b) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq << num(a) << num(b) << YAML::EndSeq;
}

void emit_disc(YAML::Emitter& out, const sim::OccluderDisc& d) {
  out << YAML::Flow << YAML::BeginMap;
  emit_pair(out, "position", d.x, d.y);
  out << YAML::Key << "height" << YAML::Value << num(d.height);
  out << YAML::Key << "radius" << YAML::Value << num(d.radius);
  out << YAML::Key << "temp" << YAML::Value << num(d.temp);
  out << YAML::EndMap;
}

void emit_spec(YAML::Emitter& out, const sim::SceneSpec& spec) {
  out << YAML::Key << "seed" << YAML::Value << spec.seed;
  emit_pair(out, "extent", spec.extent_x, spec.extent_y);
  out << YAML::Key << "ground" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "temp" << YAML::Value << num(spec.ground_temp);
  out << YAML::Key << "noise_amp" << YAML::Value << num(spec.ground_noise_amp);
  out << YAML::Key << "noise_scale" << YAML::Value << num(spec.ground_noise_scale);
  out << YAML::EndMap;

  out << YAML::Key << "targets" << YAML::Value << YAML::BeginSeq;
  for (const sim::TargetSpec& t : spec.targets) {
    out << YAML::BeginMap;
    emit_pair(out, "position", t.x, t.y);
    out << YAML::Key << "height" << YAML::Value << num(t.height);
    if (t.footprint.shape == sim::FootprintShape::box) {
      out << YAML::Key << "shape" << YAML::Value << "box";
      emit_pair(out, "half_extent", t.footprint.half_x, t.footprint.half_y);
    } else {
      out << YAML::Key << "shape" << YAML::Value << "disc";
      out << YAML::Key << "radius" << YAML::Value << num(t.footprint.radius);
    }
    out << YAML::Key << "temp" << YAML::Value << num(t.temp);
    out << YAML::Key << "texture_amp" << YAML::Value << num(t.texture_amp);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  const auto& o = spec.occluder_layer;
  out << YAML::Key << "occluder_layer" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "density" << YAML::Value << num(o.density);
  out << YAML::Key << "crown_height" << YAML::Value << num(o.crown_height);
  out << YAML::Key << "crown_height_jitter" << YAML::Value << num(o.crown_height_jitter);
  out << YAML::Key << "crown_radius" << YAML::Value << num(o.crown_radius);
  out << YAML::Key << "crown_radius_jitter" << YAML::Value << num(o.crown_radius_jitter);
  out << YAML::Key << "temp" << YAML::Value << num(o.temp);
  out << YAML::EndMap;

  out << YAML::Key << "occluders" << YAML::Value << YAML::BeginSeq;
  for (const sim::OccluderDisc& d : spec.occluders) emit_disc(out, d);
  out << YAML::EndSeq;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scalar_text(const YAML::Node& n) {
  if (n.IsScalar()) return n.Scalar();
  if (n.IsSequence()) {
    std::string joined;
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (!n[i].IsScalar()) throw ValidationError("config lists may only hold scalars");
      if (i) joined += ',';
      joined += n[i].Scalar();
    }
    return joined;
  }
  throw ValidationError("config nesting is limited to one level");
}

}  // namespace

sim::SceneSpec parse_scene_spec(const std::string& yaml_text) { return spec_from_node(load_yaml(yaml_text)); }

sim::SceneSpec load_scene_spec(const std::filesystem::path& path) { return parse_scene_spec(read_text(path)); }

std::string format_scene_spec(const sim::SceneSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_spec(out, spec);
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string format_scene(const sim::Scene& scene) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  emit_spec(out, scene.spec());
  out << YAML::Key << "generated_occluders" << YAML::Value << YAML::BeginSeq;
  for (const sim::OccluderDisc& d : scene.occluders()) emit_disc(out, d);
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

sim::Scene parse_scene(const std::string& yaml_text) {
  const YAML::Node root = load_yaml(yaml_text);
  sim::SceneSpec spec = spec_from_node(root);
  if (const YAML::Node g = root["generated_occluders"]) {
    return sim::Scene(std::move(spec), parse_discs(g, "generated_occluders"));
  }
  return sim::generate_scene(spec);
}

FlatConfig parse_flat_config(const std::string& yaml_text) {
  const YAML::Node root = load_yaml(yaml_text);
  FlatConfig flat;
  if (root.IsNull()) return flat;
  if (!root.IsMap()) throw ValidationError("config file must be a YAML map");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& value = kv.second;
    if (key == "scene" && value.IsMap()) {
      YAML::Emitter e;
      e << value;
      flat[key] = e.c_str();
    } else if (value.IsMap()) {
      for (const auto& inner : value) flat[key + "." + inner.first.as<std::string>()] = scalar_text(inner.second);
    } else {
      flat[key] = scalar_text(value);
    }
  }
  return flat;
}

FlatConfig load_flat_config(const std::filesystem::path& path) { return parse_flat_config(read_text(path)); }

}  // namespace aos::config
