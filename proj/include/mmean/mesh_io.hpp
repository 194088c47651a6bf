#ifndef MMEAN_MESH_IO_HPP
#define MMEAN_MESH_IO_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mmean/averaging.hpp"
#include "mmean/shapes.hpp"

namespace mmean {

enum class MeshFormat { Csv, Obj };

struct MeshData {
  int param_dim = 1;
  Eigen::VectorXi grid;  // points per axis
  std::vector<Eigen::VectorXd> params;
  std::vector<Eigen::VectorXd> points;
  std::vector<double> offset_norm;
  bool sphere_ambient = false;
};

MeshData mesh_from_manifold(const ParametricSubmanifold& n);
MeshData mesh_from_section(const ParametricSubmanifold& reference, const AveragedSection& section);
MeshData mesh_from_frame(const ParametricSubmanifold& reference, const MorphFrame& frame);

/// CSV: header vertex_index,u1[,u2],x1,...,xn,offset_norm, one row per vertex,
/// LF endings, 17 significant digits. OBJ: surfaces in euclidean R^3 only.
void write_mesh(const MeshData& mesh, const std::string& path, MeshFormat format);

/// Parses a CSV produced by write_mesh (round-trip exact).
MeshData read_mesh_csv(const std::string& path);

}  // namespace mmean

#endif
