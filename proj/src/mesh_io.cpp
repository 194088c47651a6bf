#include "mmean/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mmean/errors.hpp"

namespace mmean {

namespace {

std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

MeshData mesh_shell(const ParametricSubmanifold& n) {
  MeshData mesh;
  mesh.param_dim = n.param_dim();
  mesh.grid = n.grid_shape();
  mesh.sphere_ambient = n.ambient().is_sphere();
  return mesh;
}

}  // namespace

MeshData mesh_from_manifold(const ParametricSubmanifold& n) {
  MeshData mesh = mesh_shell(n);
  for (int i = 0; i < n.vertex_count(); ++i) {
    mesh.params.push_back(n.vertex_param(i));
    mesh.points.push_back(n.vertex_point(i));
    mesh.offset_norm.push_back(0.0);
  }
  return mesh;
}

MeshData mesh_from_section(const ParametricSubmanifold& reference,
                           const AveragedSection& section) {
  MeshData mesh = mesh_shell(reference);
  for (std::size_t i = 0; i < section.points.size(); ++i) {
    mesh.params.push_back(section.params[i]);
    mesh.points.push_back(section.points[i]);
    mesh.offset_norm.push_back(section.offsets[i].norm());
  }
  return mesh;
}

MeshData mesh_from_frame(const ParametricSubmanifold& reference, const MorphFrame& frame) {
  MeshData mesh = mesh_shell(reference);
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    mesh.params.push_back(frame.params[i]);
    mesh.points.push_back(frame.points[i]);
    mesh.offset_norm.push_back(0.0);
  }
  return mesh;
}

void write_mesh(const MeshData& mesh, const std::string& path, MeshFormat format) {
  if (mesh.points.empty()) raise(ErrorCode::ValidationError, "mesh has no points");
  const int embed_dim = static_cast<int>(mesh.points.front().size());

  if (format == MeshFormat::Obj) {
    if (mesh.param_dim != 2 || embed_dim != 3 || mesh.sphere_ambient) {
      raise(ErrorCode::UnsupportedFormat, "OBJ output needs a surface in euclidean R^3");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot open " + path);
    for (const auto& p : mesh.points) {
      out << "v " << format_double(p(0)) << " " << format_double(p(1)) << " "
          << format_double(p(2)) << "\n";
    }
    const int rows = mesh.grid(0), cols = mesh.grid(1);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const int i1 = (i + 1) % rows, j1 = (j + 1) % cols;
        out << "f " << (i * cols + j + 1) << " " << (i1 * cols + j + 1) << " "
            << (i1 * cols + j1 + 1) << " " << (i * cols + j1 + 1) << "\n";
      }
    }
    if (!out.good()) raise(ErrorCode::IoError, "write failed for " + path);
    return;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open " + path);
  out << "vertex_index";
  for (int a = 0; a < mesh.param_dim; ++a) out << ",u" << (a + 1);
  for (int c = 0; c < embed_dim; ++c) out << ",x" << (c + 1);
  out << ",offset_norm\n";
  for (std::size_t i = 0; i < mesh.points.size(); ++i) {
    out << i;
    for (int a = 0; a < mesh.param_dim; ++a) out << "," << format_double(mesh.params[i](a));
    for (int c = 0; c < embed_dim; ++c) out << "," << format_double(mesh.points[i](c));
    out << "," << format_double(mesh.offset_norm[i]) << "\n";
  }
  if (!out.good()) raise(ErrorCode::IoError, "write failed for " + path);
}

MeshData read_mesh_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  std::string header;
  std::getline(in, header);

  int param_dim = 0, embed_dim = 0;
  {
    std::stringstream ss(header);
    std::string field;
    while (std::getline(ss, field, ',')) {
      if (field.size() >= 2 && field[0] == 'u') ++param_dim;
      if (field.size() >= 2 && field[0] == 'x') ++embed_dim;
    }
  }
  if (param_dim == 0 || embed_dim == 0) raise(ErrorCode::ParseError, "bad mesh header");

  MeshData mesh;
  mesh.param_dim = param_dim;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    Eigen::VectorXd u(param_dim), p(embed_dim);
    for (int a = 0; a < param_dim; ++a) {
      std::getline(ss, field, ',');
      u(a) = std::strtod(field.c_str(), nullptr);
    }
    for (int c = 0; c < embed_dim; ++c) {
      std::getline(ss, field, ',');
      p(c) = std::strtod(field.c_str(), nullptr);
    }
    std::getline(ss, field, ',');
    mesh.params.push_back(u);
    mesh.points.push_back(p);
    mesh.offset_norm.push_back(std::strtod(field.c_str(), nullptr));
  }
  return mesh;
}

}  // namespace mmean
