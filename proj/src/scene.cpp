#include "mmean/scene.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "mmean/errors.hpp"

namespace mmean {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      raise(ErrorCode::ValidationError, "unknown key \"" + where + "." + key + "\"");
    }
  }
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    raise(ErrorCode::ValidationError, "missing or non-numeric \"" + where + "." + key + "\"");
  }
  return obj[key].get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback) {
  return obj.contains(key) ? obj[key].get<double>() : fallback;
}

Eigen::VectorXd vector_field(const json& obj, const std::string& key, const std::string& where,
                             int expected = -1) {
  if (!obj.contains(key)) return Eigen::VectorXd();
  if (!obj[key].is_array()) {
    raise(ErrorCode::ValidationError, "\"" + where + "." + key + "\" must be an array");
  }
  Eigen::VectorXd out(obj[key].size());
  int i = 0;
  for (const auto& v : obj[key]) out(i++) = v.get<double>();
  if (expected >= 0 && out.size() != expected) {
    raise(ErrorCode::ValidationError,
          "\"" + where + "." + key + "\" must have " + std::to_string(expected) + " entries");
  }
  return out;
}

Isometry rotation_isometry(const AmbientSpace& ambient, const json& spec,
                           const std::string& where) {
  check_keys(spec, {"angle", "axis"}, where);
  const double angle = need_number(spec, "angle", where);
  const int m = ambient.embedding_dim();
  Isometry iso = Isometry::identity(m);
  if (m == 2) {
    iso.linear << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return iso;
  }
  if (m != 3) raise(ErrorCode::ValidationError, where + ": rotations need dimension 2 or 3");
  Eigen::VectorXd axis = vector_field(spec, "axis", where, 3);
  if (axis.size() == 0) raise(ErrorCode::ValidationError, where + ".axis is required in 3d");
  axis.normalize();
  iso.linear = Eigen::AngleAxisd(angle, Eigen::Vector3d(axis)).toRotationMatrix();
  return iso;
}

Isometry reflection_isometry(const AmbientSpace& ambient, const json& spec,
                             const std::string& where) {
  check_keys(spec, {"normal"}, where);
  const int m = ambient.embedding_dim();
  Eigen::VectorXd normal = vector_field(spec, "normal", where, m);
  if (normal.size() == 0) raise(ErrorCode::ValidationError, where + ".normal is required");
  normal.normalize();
  Isometry iso = Isometry::identity(m);
  iso.linear -= 2.0 * normal * normal.transpose();
  return iso;
}

// Closure of the generated group, capped to keep scene mistakes finite.
std::vector<Isometry> generate_group(const std::vector<Isometry>& generators, int embedding_dim) {
  constexpr int kMaxGroup = 720;
  std::vector<Isometry> group;
  group.push_back(Isometry::identity(embedding_dim));

  auto find = [&](const Isometry& candidate) {
    for (const auto& g : group) {
      if ((g.linear - candidate.linear).cwiseAbs().maxCoeff() < 1e-9 &&
          (g.translation - candidate.translation).cwiseAbs().maxCoeff() < 1e-9) {
        return true;
      }
    }
    return false;
  };

  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (const auto& gen : generators) {
        Isometry next = gen.compose(group[i]);
        if (!find(next)) {
          group.push_back(next);
          grew = true;
          if (static_cast<int>(group.size()) > kMaxGroup) {
            raise(ErrorCode::ValidationError,
                  "family.orbit generates more than " + std::to_string(kMaxGroup) + " isometries");
          }
        }
      }
    }
  }
  return group;
}

const std::set<std::string> kShapeNames = {"circle",       "ellipse", "fourier_circle",
                                           "torus",        "segment", "sphere_graph"};

}  // namespace

SceneConfig parse_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open scene file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ParseError, e.what());
  }
  return parse_scene_json(root);
}

SceneConfig parse_scene_json(const nlohmann::json& root) {
  SceneConfig scene;
  check_keys(root, {"ambient", "shapes", "family", "solver", "outputs"}, "scene");

  if (!root.contains("ambient")) raise(ErrorCode::ValidationError, "missing \"ambient\"");
  const json& ambient = root["ambient"];
  check_keys(ambient, {"kind", "dim", "radius"}, "ambient");
  const std::string kind = ambient.value("kind", "");
  const int dim = static_cast<int>(need_number(ambient, "dim", "ambient"));
  if (kind == "euclidean") {
    scene.ambient = AmbientSpace::euclidean(dim);
  } else if (kind == "sphere") {
    scene.ambient = AmbientSpace::sphere(dim, need_number(ambient, "radius", "ambient"));
  } else {
    raise(ErrorCode::ValidationError, "ambient.kind must be \"euclidean\" or \"sphere\"");
  }

  if (!root.contains("shapes") || !root["shapes"].is_array() || root["shapes"].empty()) {
    raise(ErrorCode::ValidationError, "\"shapes\" must be a non-empty array");
  }
  int shape_index = 0;
  for (const auto& spec : root["shapes"]) {
    const std::string where = "shapes[" + std::to_string(shape_index) + "]";
    const std::string name = spec.value("name", "");
    if (!kShapeNames.count(name)) {
      std::string catalog;
      for (const auto& s : kShapeNames) catalog += s + " ";
      raise(ErrorCode::ValidationError,
            where + ".name \"" + name + "\" is not in the catalog: " + catalog);
    }
    // Mesh resolution floor applies to every axis.
    if (!spec.contains("mesh")) raise(ErrorCode::ValidationError, where + ".mesh is required");
    if (spec["mesh"].is_array()) {
      for (const auto& r : spec["mesh"]) {
        if (r.get<int>() < 8) raise(ErrorCode::ValidationError, where + ".mesh must be >= 8");
      }
    } else if (spec["mesh"].get<int>() < 8) {
      raise(ErrorCode::ValidationError, where + ".mesh must be >= 8");
    }
    build_shape(scene.ambient, spec);  // full validation, result discarded
    scene.shapes.push_back(spec);
    ++shape_index;
  }

  if (!root.contains("family")) raise(ErrorCode::ValidationError, "missing \"family\"");
  const json& family = root["family"];
  check_keys(family, {"members", "orbit", "reference"}, "family");
  scene.reference = family.value("reference", 0);

  const auto shape_count = static_cast<int>(scene.shapes.size());
  if (family.contains("members") == family.contains("orbit")) {
    raise(ErrorCode::ValidationError, "family needs exactly one of \"members\" or \"orbit\"");
  }
  if (family.contains("members")) {
    double weight_sum = 0.0;
    for (const auto& member : family["members"]) {
      check_keys(member, {"shape", "weight"}, "family.members[]");
      const int shape = static_cast<int>(need_number(member, "shape", "family.members[]"));
      const double weight = need_number(member, "weight", "family.members[]");
      if (shape < 0 || shape >= shape_count) {
        raise(ErrorCode::ValidationError, "family.members[].shape out of range");
      }
      if (weight <= 0.0) raise(ErrorCode::ValidationError, "family.members[].weight must be > 0");
      weight_sum += weight;
      scene.members.emplace_back(shape, weight);
    }
    if (scene.members.empty()) raise(ErrorCode::ValidationError, "family.members is empty");
    if (std::abs(weight_sum - 1.0) > 1e-12) {
      raise(ErrorCode::ValidationError,
            "family \"weights\" sum to " + std::to_string(weight_sum) + ", expected 1");
    }
    if (scene.reference < 0 || scene.reference >= static_cast<int>(scene.members.size())) {
      raise(ErrorCode::ValidationError, "family.reference out of range");
    }
  } else {
    const json& orbit = family["orbit"];
    check_keys(orbit, {"base", "rotations", "reflections", "translations"}, "family.orbit");
    OrbitSpec spec;
    spec.base = static_cast<int>(number_or(orbit, "base", 0));
    if (spec.base < 0 || spec.base >= shape_count) {
      raise(ErrorCode::ValidationError, "family.orbit.base out of range");
    }
    if (orbit.contains("rotations")) {
      for (const auto& r : orbit["rotations"]) {
        spec.generators.push_back(rotation_isometry(scene.ambient, r, "family.orbit.rotations[]"));
      }
    }
    if (orbit.contains("reflections")) {
      for (const auto& r : orbit["reflections"]) {
        spec.generators.push_back(
            reflection_isometry(scene.ambient, r, "family.orbit.reflections[]"));
      }
    }
    if (orbit.contains("translations")) {
      for (const auto& t : orbit["translations"]) {
        Isometry iso = Isometry::identity(scene.ambient.embedding_dim());
        json wrap;
        wrap["v"] = t;
        iso.translation =
            vector_field(wrap, "v", "family.orbit.translations[]", scene.ambient.embedding_dim());
        spec.generators.push_back(iso);
      }
    }
    const int m = scene.ambient.embedding_dim();
    for (const auto& g : spec.generators) {
      if ((g.linear.transpose() * g.linear - Eigen::MatrixXd::Identity(m, m))
              .cwiseAbs()
              .maxCoeff() > 1e-10) {
        raise(ErrorCode::ValidationError, "family.orbit generator is not an isometry");
      }
      if (scene.ambient.is_sphere() && g.translation.cwiseAbs().maxCoeff() > 1e-14) {
        raise(ErrorCode::ValidationError, "sphere isometries must fix the center");
      }
    }
    scene.orbit = spec;
  }

  if (root.contains("solver")) {
    const json& solver = root["solver"];
    check_keys(solver, {"tol", "max_iter", "fd_step", "r_max", "threads", "seed"}, "solver");
    scene.solver.tol = number_or(solver, "tol", scene.solver.tol);
    scene.solver.max_iter = static_cast<int>(number_or(solver, "max_iter", scene.solver.max_iter));
    scene.solver.fd_step = number_or(solver, "fd_step", scene.solver.fd_step);
    scene.solver.r_max_override = number_or(solver, "r_max", scene.solver.r_max_override);
    scene.solver.threads = static_cast<int>(number_or(solver, "threads", scene.solver.threads));
    scene.solver.seed =
        static_cast<std::uint64_t>(number_or(solver, "seed", static_cast<double>(scene.solver.seed)));
    if (scene.solver.tol <= 0 || scene.solver.max_iter < 1 || scene.solver.fd_step <= 0) {
      raise(ErrorCode::ValidationError, "solver tolerances must be positive");
    }
  }

  if (root.contains("outputs")) {
    const json& outputs = root["outputs"];
    check_keys(outputs, {"dir", "mesh_format"}, "outputs");
    scene.out_dir = outputs.value("dir", scene.out_dir);
    const std::string format = outputs.value("mesh_format", "csv");
    if (format == "csv") {
      scene.mesh_format = MeshFormat::Csv;
    } else if (format == "obj") {
      scene.mesh_format = MeshFormat::Obj;
    } else {
      raise(ErrorCode::ValidationError, "outputs.mesh_format must be \"csv\" or \"obj\"");
    }
  }

  scene.echo = nlohmann::ordered_json(root);
  return scene;
}

ParametricSubmanifold build_shape(const AmbientSpace& ambient, const nlohmann::json& spec) {
  const std::string name = spec.value("name", "");
  const std::string where = "shape \"" + name + "\"";

  auto mesh_1d = [&]() { return static_cast<int>(need_number(spec, "mesh", where)); };

  if (name == "circle") {
    check_keys(spec, {"name", "radius", "center", "mesh"}, where);
    return make_circle(ambient, need_number(spec, "radius", where),
                       vector_field(spec, "center", where, ambient.dim()), mesh_1d());
  }
  if (name == "ellipse") {
    check_keys(spec, {"name", "a", "b", "center", "mesh"}, where);
    return make_ellipse(ambient, need_number(spec, "a", where), need_number(spec, "b", where),
                        vector_field(spec, "center", where, ambient.dim()), mesh_1d());
  }
  if (name == "fourier_circle") {
    check_keys(spec,
               {"name", "radius", "radial_cos", "radial_sin", "vertical_cos", "vertical_sin",
                "mesh"},
               where);
    return make_fourier_circle(ambient, need_number(spec, "radius", where),
                               vector_field(spec, "radial_cos", where),
                               vector_field(spec, "radial_sin", where),
                               vector_field(spec, "vertical_cos", where),
                               vector_field(spec, "vertical_sin", where), mesh_1d());
  }
  if (name == "torus") {
    check_keys(spec, {"name", "major", "minor", "mesh"}, where);
    Eigen::Vector2i mesh;
    if (spec["mesh"].is_array()) {
      mesh << spec["mesh"][0].get<int>(), spec["mesh"][1].get<int>();
    } else {
      mesh.setConstant(spec["mesh"].get<int>());
    }
    return make_torus(ambient, need_number(spec, "major", where),
                      need_number(spec, "minor", where), mesh);
  }
  if (name == "segment") {
    check_keys(spec, {"name", "p0", "p1", "mesh"}, where);
    return make_segment(ambient, vector_field(spec, "p0", where, ambient.dim()),
                        vector_field(spec, "p1", where, ambient.dim()), mesh_1d());
  }
  if (name == "sphere_graph") {
    check_keys(spec, {"name", "latitude", "lat_cos", "lat_sin", "mesh"}, where);
    return make_sphere_graph(ambient, number_or(spec, "latitude", 0.0),
                             vector_field(spec, "lat_cos", where),
                             vector_field(spec, "lat_sin", where), mesh_1d());
  }
  raise(ErrorCode::ValidationError, "unknown shape \"" + name + "\"");
}

WeightedFamily build_family(const SceneConfig& scene) {
  WeightedFamily family;
  family.reference_index = scene.reference;

  if (scene.orbit) {
    ParametricSubmanifold base = build_shape(scene.ambient, scene.shapes[scene.orbit->base]);
    std::vector<Isometry> group =
        generate_group(scene.orbit->generators, scene.ambient.embedding_dim());
    const double weight = 1.0 / static_cast<double>(group.size());
    for (const auto& g : group) {
      family.members.push_back({weight, transformed(base, g)});
      family.isometries.push_back(g);
    }
    if (family.reference_index < 0 ||
        family.reference_index >= static_cast<int>(family.members.size())) {
      raise(ErrorCode::ValidationError, "family.reference out of range for the orbit");
    }
    return family;
  }

  for (const auto& [shape, weight] : scene.members) {
    family.members.push_back({weight, build_shape(scene.ambient, scene.shapes[shape])});
  }
  return family;
}

}  // namespace mmean
