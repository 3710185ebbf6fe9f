#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "aos/scene.hpp"

namespace aos::config {

/// Scene description in YAML. A `preset: presetN` key seeds the defaults;
/// every other key overrides it.
///
///   preset: preset3
///   seed: 7
///   extent: [40, 40]
///   ground: {temp: 15, noise_amp: 2, noise_scale: 0.25}
///   targets:
///     - {position: [20, 20], height: 1.8, shape: box, half_extent: [0.5, 0.5], temp: 32}
///   occluder_layer: {density: 0.06, crown_height: 21, crown_radius: 1.5}
///   occluders:
///     - {position: [20, 22], height: 21, radius: 0.05, temp: 8}
sim::SceneSpec parse_scene_spec(const std::string& yaml_text);
sim::SceneSpec load_scene_spec(const std::filesystem::path& path);
std::string format_scene_spec(const sim::SceneSpec& spec);

/// Ground-truth scene file: the spec plus a `generated_occluders` list with
/// every concrete disc. Numbers are written with round-trip precision so a
/// reloaded scene compares equal. Without `generated_occluders` the scene is
/// regenerated from the spec.
std::string format_scene(const sim::Scene& scene);
sim::Scene parse_scene(const std::string& yaml_text);

/// Flat view of a CLI config file: top-level keys plus one level of nested
/// maps joined with '.', each value kept as its YAML scalar text (sequences
/// are joined with ','). The `scene` key, when it is a map, is kept verbatim
/// as YAML text under "scene".
using FlatConfig = std::map<std::string, std::string>;
FlatConfig load_flat_config(const std::filesystem::path& path);
FlatConfig parse_flat_config(const std::string& yaml_text);

}  // namespace aos::config
