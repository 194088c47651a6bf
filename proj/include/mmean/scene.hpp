#ifndef MMEAN_SCENE_HPP
#define MMEAN_SCENE_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mmean/averaging.hpp"
#include "mmean/mesh_io.hpp"
#include "mmean/shapes.hpp"

namespace mmean {

struct OrbitSpec {
  int base = 0;
  std::vector<Isometry> generators;
};

/// Validated scene: ambient, shape specs, family wiring, solver and outputs.
struct SceneConfig {
  AmbientSpace ambient;
  std::vector<nlohmann::json> shapes;
  std::vector<std::pair<int, double>> members;  // (shape index, weight); empty for orbit scenes
  std::optional<OrbitSpec> orbit;
  int reference = 0;
  SolverConfig solver;
  std::string out_dir = "out";
  MeshFormat mesh_format = MeshFormat::Csv;
  nlohmann::ordered_json echo;  // canonical scene echo for reports
};

/// Parses and validates a scene file. ParseError carries the JSON position;
/// ValidationError names the offending key.
SceneConfig parse_scene(const std::string& path);
SceneConfig parse_scene_json(const nlohmann::json& root);

ParametricSubmanifold build_shape(const AmbientSpace& ambient, const nlohmann::json& spec);

/// Instantiates the family: explicit members, or the orbit of the base shape
/// under the group generated by the scene's isometry generators (uniform
/// weights, isometries retained).
WeightedFamily build_family(const SceneConfig& scene);

}  // namespace mmean

#endif
