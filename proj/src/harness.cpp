#include "mmean/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mmean/errors.hpp"
#include "mmean/mesh_io.hpp"
#include "mmean/submanifold.hpp"

namespace mmean {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

ordered_json row_json(const ContractRow& row) {
  ordered_json j;
  j["name"] = row.name;
  j["measured"] = row.measured;
  j["bound"] = row.bound;
  j["direction"] = row.direction;
  j["pass"] = row.pass;
  j["enforced"] = row.enforced;
  return j;
}

ContractRow upper_bound_row(const std::string& name, double measured, double bound,
                            bool enforced = true) {
  return {name, measured, bound, "<=", measured <= bound, enforced};
}

ContractRow lower_bound_row(const std::string& name, double measured, double bound,
                            bool enforced = true) {
  return {name, measured, bound, ">=", measured >= bound, enforced};
}

void finish_report(ordered_json& report, const std::vector<ContractRow>& rows,
                   const std::vector<std::string>& artifacts,
                   std::chrono::steady_clock::time_point started, RunOutcome& outcome) {
  ordered_json contract_list = ordered_json::array();
  for (const auto& row : rows) {
    contract_list.push_back(row_json(row));
    if (row.enforced && !row.pass) outcome.exit_code = 2;
  }
  report["contracts"] = contract_list;
  report["artifacts"] = artifacts;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  report["timing"] = ordered_json{{"wall_seconds", seconds}};
}

std::string write_report(const ordered_json& report, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const std::string path = (fs::path(out_dir) / "report.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot write " + path);
  out << report.dump(2) << "\n";
  return path;
}

std::string mesh_extension(MeshFormat format) {
  return format == MeshFormat::Obj ? ".obj" : ".csv";
}

ordered_json slice_summary_json(const AveragedSection& section) {
  ordered_json j;
  j["count"] = section.per_slice.size();
  j["max_residual"] = section.summary.max_residual;
  j["min_jacobian_eigenvalue"] = section.summary.min_jacobian_eig;
  std::vector<int> histogram(section.summary.max_iterations + 1, 0);
  int min_iter = section.summary.max_iterations;
  for (const auto& diag : section.per_slice) {
    histogram[diag.iterations] += 1;
    min_iter = std::min(min_iter, diag.iterations);
  }
  j["iterations"] =
      ordered_json{{"min", min_iter}, {"max", section.summary.max_iterations},
                   {"histogram", histogram}};
  return j;
}

ordered_json epsilon_json(const AveragedSection& section) {
  return ordered_json{{"c1", section.summary.eps_c1},
                      {"c0", section.summary.eps_c0},
                      {"angular", section.summary.eps_angular}};
}

void averaging_contracts(const WeightedFamily& family, const AveragedSection& section,
                         const SolverConfig& solver, std::vector<ContractRow>& rows) {
  rows.push_back(upper_bound_row("slice_residual_max", section.summary.max_residual,
                                 solver.tol * (1.0 + section.summary.max_offset)));
  rows.push_back(lower_bound_row("slice_jacobian_min_eigenvalue",
                                 section.summary.min_jacobian_eig, 0.0));
  rows.back().pass = section.summary.min_jacobian_eig > 0.0;
  rows.push_back(upper_bound_row("c0_offset_vs_100eps", section.summary.max_offset,
                                 100.0 * section.summary.eps_c1 + 1e-8));
  for (std::size_t g = 0; g < section.summary.c1_to_members.size(); ++g) {
    rows.push_back(upper_bound_row("c1_member_" + std::to_string(g) + "_vs_136sqrteps",
                                   section.summary.c1_to_members[g],
                                   136.0 * std::sqrt(section.summary.eps_c1) + 1e-6));
  }
  (void)family;
}

void write_family_meshes(const WeightedFamily& family, const SceneConfig& scene,
                         std::vector<std::string>& artifacts) {
  for (std::size_t g = 0; g < family.members.size(); ++g) {
    char name[32];
    std::snprintf(name, sizeof(name), "member_%02zu%s", g,
                  mesh_extension(scene.mesh_format).c_str());
    write_mesh(mesh_from_manifold(family.members[g].manifold),
               (fs::path(scene.out_dir) / name).string(), scene.mesh_format);
    artifacts.push_back(name);
  }
}

RunOutcome run_average_like(const std::string& command, const SceneConfig& scene) {
  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  ordered_json report;
  report["command"] = command;
  report["scene"] = scene.echo;
  report["seed"] = scene.solver.seed;

  WeightedFamily family = build_family(scene);
  if (command == "midpoint") {
    if (family.members.size() != 2) {
      raise(ErrorCode::ValidationError, "midpoint needs exactly two members");
    }
    family.members[0].weight = 0.5;
    family.members[1].weight = 0.5;
    family.reference_index = 0;
  }

  AveragedSection section = average_family(family, scene.solver);
  report["epsilon"] = epsilon_json(section);
  report["r_max"] = section.summary.r_max;
  report["slices"] = slice_summary_json(section);
  report["c1_to_members"] = section.summary.c1_to_members;

  std::vector<ContractRow> rows;
  averaging_contracts(family, section, scene.solver, rows);

  if (!family.isometries.empty()) {
    const double invariance = invariance_check(family, section);
    report["invariance"] = invariance;
    rows.push_back(upper_bound_row("orbit_invariance", invariance, 1e-7));
  }

  fs::create_directories(scene.out_dir);
  std::vector<std::string> artifacts;
  write_family_meshes(family, scene, artifacts);
  const std::string avg_name = "average" + mesh_extension(scene.mesh_format);
  write_mesh(mesh_from_section(family.reference(), section),
             (fs::path(scene.out_dir) / avg_name).string(), scene.mesh_format);
  artifacts.push_back(avg_name);

  finish_report(report, rows, artifacts, started, outcome);
  outcome.report = report;
  outcome.artifacts = artifacts;
  write_report(report, scene.out_dir);
  return outcome;
}

RunOutcome run_distance(const SceneConfig& scene) {
  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  ordered_json report;
  report["command"] = "distance";
  report["scene"] = scene.echo;
  report["seed"] = scene.solver.seed;

  WeightedFamily family = build_family(scene);
  validate_family(family);
  const int m = static_cast<int>(family.members.size());
  ordered_json table = ordered_json::array();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      C1Detail detail = c1_distance_detail(family.members[i].manifold,
                                           family.members[j].manifold, scene.solver.threads);
      table.push_back(ordered_json{{"from", i},
                                   {"to", j},
                                   {"c1", detail.value()},
                                   {"c0", detail.c0},
                                   {"angular", detail.angle}});
    }
  }
  report["distances"] = table;

  std::vector<ContractRow> rows;
  std::vector<std::string> artifacts;
  finish_report(report, rows, artifacts, started, outcome);
  outcome.report = report;
  write_report(report, scene.out_dir);
  return outcome;
}

RunOutcome run_morph(const SceneConfig& scene, int depth) {
  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  ordered_json report;
  report["command"] = "morph";
  report["scene"] = scene.echo;
  report["seed"] = scene.solver.seed;
  report["depth"] = depth;

  WeightedFamily family = build_family(scene);
  if (family.members.size() != 2) {
    raise(ErrorCode::ValidationError, "morph needs exactly two members");
  }
  auto frames = morph(family.members[0].manifold, family.members[1].manifold, depth,
                      scene.solver);

  fs::create_directories(scene.out_dir);
  std::vector<std::string> artifacts;
  ordered_json times = ordered_json::array();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "morph_%03zu%s", k,
                  mesh_extension(scene.mesh_format).c_str());
    write_mesh(mesh_from_frame(family.members[0].manifold, frames[k]),
               (fs::path(scene.out_dir) / name).string(), scene.mesh_format);
    artifacts.push_back(name);
    times.push_back(frames[k].t);
  }
  report["frame_times"] = times;

  std::vector<ContractRow> rows;
  finish_report(report, rows, artifacts, started, outcome);
  outcome.report = report;
  outcome.artifacts = artifacts;
  write_report(report, scene.out_dir);
  return outcome;
}

// Hessian block data at a tube point, in the vertical/horizontal splitting.
struct HessianBlocks {
  double vertical_min, vertical_max, horizontal_abs, cross_norm, full_norm;
};

HessianBlocks hessian_blocks(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  HessianForm hess = hessian_fd(n, x);
  Subspace vertical = gauss_extended(n, x);
  Eigen::MatrixXd vb = hess.frame.transpose() * vertical.frame;  // coords of vertical frame
  Subspace vertical_coords = make_subspace(vb);
  Subspace horizontal_coords = complement(vertical_coords);
  const Eigen::MatrixXd& v = vertical_coords.frame;
  const Eigen::MatrixXd& h = horizontal_coords.frame;

  Eigen::MatrixXd hvv = v.transpose() * hess.matrix * v;
  Eigen::MatrixXd hhh = h.transpose() * hess.matrix * h;
  Eigen::MatrixXd hvh = v.transpose() * hess.matrix * h;

  HessianBlocks blocks{};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ev(hvv);
  blocks.vertical_min = ev.eigenvalues().minCoeff();
  blocks.vertical_max = ev.eigenvalues().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(hhh);
  blocks.horizontal_abs = eh.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXd> cross(hvh);
  blocks.cross_norm = cross.singularValues().size() > 0 ? cross.singularValues()(0) : 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(hess.matrix);
  blocks.full_norm = ef.eigenvalues().cwiseAbs().maxCoeff();
  return blocks;
}

// Pointwise norm of the covariant derivative of the vertical projection
// field, by finite differences with parallel transport (advisory check).
double covder_projection_norm(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  const AmbientSpace& ambient = n.ambient();
  Eigen::MatrixXd basis = ambient.tangent_basis(x);
  const int dim = static_cast<int>(basis.cols());
  const double h = 1e-5;

  auto pulled_back = [&](const Eigen::VectorXd& y) {
    Eigen::MatrixXd p = projection_matrix(gauss_extended(n, y));
    Eigen::MatrixXd to_y(basis.rows(), dim), back(basis.rows(), dim);
    for (int i = 0; i < dim; ++i) to_y.col(i) = ambient.parallel_transport(x, y, basis.col(i));
    Eigen::MatrixXd mapped = p * to_y;
    for (int i = 0; i < dim; ++i) back.col(i) = ambient.parallel_transport(y, x, mapped.col(i));
    return Eigen::MatrixXd(basis.transpose() * back);
  };

  double worst = 0.0;
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd y_plus = ambient.exp_map(x, h * basis.col(i));
    Eigen::VectorXd y_minus = ambient.exp_map(x, -h * basis.col(i));
    Eigen::MatrixXd derivative = (pulled_back(y_plus) - pulled_back(y_minus)) / (2.0 * h);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(derivative);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

RunOutcome run_diagnose(const SceneConfig& scene) {
  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  ordered_json report;
  report["command"] = "diagnose";
  report["scene"] = scene.echo;
  report["seed"] = scene.solver.seed;

  WeightedFamily family = build_family(scene);
  if (family.members.size() != 1) {
    raise(ErrorCode::ValidationError, "diagnose needs a single-member scene");
  }
  const ParametricSubmanifold& n = family.members[0].manifold;
  const AmbientSpace& ambient = n.ambient();

  std::vector<ContractRow> rows;
  GentlenessReport gentle = gentleness_report(n);
  report["gentleness"] = ordered_json{{"second_form_norm", gentle.second_form_norm},
                                      {"curvature_bound", gentle.curvature_bound},
                                      {"injectivity_estimate", gentle.injectivity_estimate},
                                      {"injectivity_is_heuristic", true},
                                      {"scale_c", gentle.scale_c},
                                      {"gentle", gentle.gentle}};
  rows.push_back(upper_bound_row("second_form_norm", gentle.second_form_norm, 1.5));

  std::mt19937_64 rng(scene.solver.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int samples = 8;
  const int c = n.codim();

  for (double r : {0.05, 0.1, 0.2, 0.25}) {
    const std::string tag = "@r=" + std::to_string(r).substr(0, 4);

    TubePathLengths lengths = tube_path_lengths(n, r, 1.5, 200);
    const double warner = (std::cos(r) - 1.5 * std::sin(r)) * lengths.retracted_length /
                          lengths.path_length;
    rows.push_back(upper_bound_row("warner_length_ratio" + tag, warner, 1.0 + 1e-3));

    double angle_gap = 0.0, proj_gap = 0.0;
    double vertical_min = std::numeric_limits<double>::infinity(), vertical_max = 0.0;
    double horizontal = 0.0, cross = 0.0, full = 0.0;
    for (int s = 0; s < samples; ++s) {
      const int vertex = static_cast<int>((static_cast<long long>(s) * n.vertex_count()) / samples);
      const Eigen::VectorXd& p = n.vertex_param(vertex);
      Eigen::MatrixXd frame = normal_space(n, p).frame;
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(c);
      if (c == 1) {
        coeff(0) = unit(rng) < 0.5 ? -1.0 : 1.0;
      } else {
        const double phi = 2.0 * M_PI * unit(rng);
        coeff(0) = std::cos(phi);
        coeff(1) = std::sin(phi);
      }
      Eigen::VectorXd w = r * (frame * coeff);
      Eigen::VectorXd x = ambient.exp_map(n.vertex_point(vertex), w);

      Subspace quasi = quasi_vertical_at(n, p, w);
      Subspace vertical = gauss_extended(n, x);
      angle_gap = std::max(angle_gap, finsler_distance(quasi, vertical));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(projection_matrix(quasi) -
                                            projection_matrix(vertical));
      proj_gap = std::max(proj_gap, svd.singularValues()(0));

      HessianBlocks blocks = hessian_blocks(n, x);
      vertical_min = std::min(vertical_min, blocks.vertical_min);
      vertical_max = std::max(vertical_max, blocks.vertical_max);
      horizontal = std::max(horizontal, blocks.horizontal_abs);
      cross = std::max(cross, blocks.cross_norm);
      full = std::max(full, blocks.full_norm);
    }
    rows.push_back(upper_bound_row("twobundles_angle" + tag, angle_gap, r * r / 4 + 1e-4));
    rows.push_back(upper_bound_row("twobundles_projection" + tag, proj_gap, r * r / 5 + 1e-4));
    rows.push_back(lower_bound_row("hessian_vertical_min" + tag, vertical_min, 0.64));
    rows.push_back(upper_bound_row("hessian_vertical_max" + tag, vertical_max, 1.32));
    rows.push_back(upper_bound_row("hessian_horizontal" + tag, horizontal, 3.0 * r));
    rows.push_back(upper_bound_row("hessian_cross" + tag, cross, 3.0 * std::sqrt(r)));
    rows.push_back(upper_bound_row("hessian_norm" + tag, full, 1.32));
  }

  // Advisory: covariant derivative of the vertical projection field.
  {
    double worst = 0.0;
    for (int s = 0; s < 4; ++s) {
      const int vertex = static_cast<int>((static_cast<long long>(s) * n.vertex_count()) / 4);
      Eigen::MatrixXd frame = normal_space(n, n.vertex_param(vertex)).frame;
      Eigen::VectorXd w = 0.2 * frame.col(0);
      Eigen::VectorXd x = ambient.exp_map(n.vertex_point(vertex), w);
      worst = std::max(worst, covder_projection_norm(n, x));
    }
    rows.push_back(upper_bound_row("covder_projection_norm", worst, 11.0, /*enforced=*/false));
  }

  std::vector<std::string> artifacts;
  finish_report(report, rows, artifacts, started, outcome);
  outcome.report = report;
  write_report(report, scene.out_dir);
  return outcome;
}

}  // namespace

RunOutcome run_command(const std::string& command, const SceneConfig& scene, int morph_depth) {
  if (command == "average" || command == "midpoint") return run_average_like(command, scene);
  if (command == "distance") return run_distance(scene);
  if (command == "morph") return run_morph(scene, morph_depth);
  if (command == "diagnose") return run_diagnose(scene);
  raise(ErrorCode::ValidationError, "unknown command \"" + command + "\"");
}

RunOutcome grassmann_selftest(int n_max, int k_max, int trials, std::uint64_t seed) {
  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  ordered_json report;
  report["command"] = "selftest";
  report["seed"] = seed;
  report["trials"] = trials;
  report["n_max"] = n_max;
  report["k_max"] = k_max;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto gaussian = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
  };

  double worst_sin = 0.0, worst_graph = 0.0, worst_duality = 0.0, worst_triangle = 0.0;
  double worst_average = 0.0, worst_equivariance = 0.0;

  for (int trial = 0; trial < trials; ++trial) {
    std::uniform_int_distribution<int> n_dist(2, n_max);
    const int n = n_dist(rng);
    std::uniform_int_distribution<int> k_dist(1, std::min(k_max, n - 1));
    const int k = k_dist(rng);

    Subspace f = make_subspace(gaussian(n, k));
    Subspace f2 = make_subspace(gaussian(n, k));
    const double d = finsler_distance(f, f2);
    Eigen::JacobiSVD<Eigen::MatrixXd> gap(projection_matrix(f) - projection_matrix(f2));
    worst_sin = std::max(worst_sin, std::abs(std::sin(d) - gap.singularValues()(0)));

    Eigen::MatrixXd u = gaussian(n - k, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_u(u);
    worst_graph = std::max(worst_graph, std::abs(finsler_distance(f, graph_subspace(f, u)) -
                                                 std::atan(svd_u.singularValues()(0))));

    worst_duality = std::max(
        worst_duality, std::abs(d - finsler_distance(complement(f), complement(f2))));

    Subspace f3 = make_subspace(gaussian(n, k));
    worst_triangle =
        std::max(worst_triangle,
                 finsler_distance(f, f3) - finsler_distance(f, f2) - finsler_distance(f2, f3));

    // Averaging bound and equivariance on a small perturbed family.
    std::uniform_int_distribution<int> m_dist(2, 6);
    std::uniform_real_distribution<double> spread(0.01, 0.15);
    const int m = m_dist(rng);
    std::vector<WeightedSubspace> members;
    for (int g = 0; g < m; ++g) {
      Eigen::MatrixXd v = gaussian(n - k, k);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd_v(v);
      v *= std::tan(spread(rng)) / svd_v.singularValues()(0);
      members.push_back({1.0 / m, graph_subspace(f, v)});
    }
    double eps = 0.0;
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        eps = std::max(eps, finsler_distance(members[a].space, members[b].space));
      }
    }
    AverageReport avg = average_subspaces(members);
    for (const auto& member : members) {
      worst_average = std::max(worst_average, finsler_distance(member.space, avg.result) -
                                                  std::asin(std::min(1.0, 2 * eps)));
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, n));
    Eigen::MatrixXd q = qr.householderQ();
    std::vector<WeightedSubspace> rotated;
    for (const auto& member : members) {
      rotated.push_back({member.weight, Subspace{q * member.space.frame}});
    }
    worst_equivariance =
        std::max(worst_equivariance, finsler_distance(average_subspaces(rotated).result,
                                                      Subspace{q * avg.result.frame}));
  }

  std::vector<ContractRow> rows;
  rows.push_back(upper_bound_row("finsler_vs_projection_norm", worst_sin, 1e-9));
  rows.push_back(upper_bound_row("graph_formula", worst_graph, 1e-9));
  rows.push_back(upper_bound_row("duality", worst_duality, 1e-9));
  rows.push_back(upper_bound_row("triangle_inequality_violation", worst_triangle, 1e-9));
  rows.push_back(upper_bound_row("averaging_bound_violation", worst_average, 0.0));
  rows.push_back(upper_bound_row("averaging_equivariance", worst_equivariance, 1e-9));

  // Fixed known pair: a 2-plane rotation by 0.3 radians.
  {
    Eigen::MatrixXd e1(2, 1), rot(2, 1);
    e1 << 1, 0;
    rot << std::cos(0.3), std::sin(0.3);
    const double d = finsler_distance(make_subspace(e1), make_subspace(rot));
    ContractRow row{"fixed_pair_rotation_0.3", d, 0.3, "==", std::abs(d - 0.3) < 1e-12, true};
    rows.push_back(row);
  }

  std::vector<std::string> artifacts;
  finish_report(report, rows, artifacts, started, outcome);
  outcome.report = report;
  return outcome;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::IoError:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::EpsilonTooLarge:
    case ErrorCode::WeightError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::RankDeficient:
    case ErrorCode::Unsupported:
      return 3;
    default:
      return 4;
  }
}

nlohmann::ordered_json error_json(const Error& error) {
  return nlohmann::ordered_json{
      {"error", nlohmann::ordered_json{{"code", error.code_name()}, {"message", error.what()}}}};
}

}  // namespace mmean
