#include "mmean/submanifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mmean/errors.hpp"

namespace mmean {

namespace {

constexpr int kMaxBasins = 3;
constexpr int kMaxIterations = 50;
constexpr double kParamTolerance = 1e-12;
constexpr double kUniquenessMargin = 1e-6;

struct Candidate {
  Eigen::VectorXd param;
  Eigen::VectorXd foot;
  double rho;
  bool converged;
};

// Damped Newton refinement of u -> d(x, embed(u))^2 / 2 from a seed.
Candidate refine_basin(const ParametricSubmanifold& n, const Eigen::VectorXd& x,
                       Eigen::VectorXd u) {
  const AmbientSpace& ambient = n.ambient();
  const int d = n.param_dim();

  Eigen::VectorXd p = n.embed(u);
  double f = 0.5 * std::pow(ambient.distance(x, p), 2);

  bool converged = false;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    Eigen::MatrixXd jac = n.embed_d1(u);
    Eigen::VectorXd to_x = ambient.log_map(p, x);
    const double rho = to_x.norm();

    Eigen::VectorXd grad = -jac.transpose() * to_x;

    // Exact hessian of the squared-distance objective for the model ambients.
    Eigen::MatrixXd hess(d, d);
    const double orth = ambient.dist_sq_hessian_orth(rho);
    Eigen::VectorXd radial = rho > 0.0 ? Eigen::VectorXd(to_x / rho) : Eigen::VectorXd();
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double metric = jac.col(i).dot(jac.col(j));
        double value = orth * metric;
        if (rho > 0.0) {
          value += (1.0 - orth) * jac.col(i).dot(radial) * jac.col(j).dot(radial);
        }
        value -= to_x.dot(n.embed_d2(u, i, j));
        hess(i, j) = hess(j, i) = value;
      }
    }

    Eigen::VectorXd step;
    Eigen::LLT<Eigen::MatrixXd> llt(hess);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(-grad);
    } else {
      // Not positive definite here; fall back to the Gauss-Newton metric.
      step = (jac.transpose() * jac).ldlt().solve(-grad);
    }

    if (step.norm() < kParamTolerance) {
      converged = true;
      break;
    }

    bool decreased = false;
    for (int halving = 0; halving < 20; ++halving) {
      Eigen::VectorXd u_try = n.wrap_param(u + step);
      Eigen::VectorXd p_try = n.embed(u_try);
      double f_try = 0.5 * std::pow(ambient.distance(x, p_try), 2);
      if (f_try < f) {
        u = u_try;
        p = p_try;
        f = f_try;
        decreased = true;
        break;
      }
      step *= 0.5;
      if (step.norm() < kParamTolerance) break;
    }
    if (!decreased) {
      converged = true;  // at the numerical floor of the objective
      break;
    }
  }
  return {u, p, ambient.distance(x, p), converged};
}

}  // namespace

Subspace tangent_space(const ParametricSubmanifold& n, const Eigen::VectorXd& u) {
  Eigen::MatrixXd jac = n.embed_d1(u);
  if (n.ambient().is_sphere()) {
    Eigen::VectorXd p = n.embed(u);
    for (int i = 0; i < jac.cols(); ++i) {
      jac.col(i) = n.ambient().tangent_project(p, jac.col(i));
    }
  }
  return make_subspace(jac);
}

Subspace normal_space(const ParametricSubmanifold& n, const Eigen::VectorXd& u) {
  const AmbientSpace& ambient = n.ambient();
  Eigen::VectorXd p = n.embed(u);
  Eigen::MatrixXd basis = ambient.tangent_basis(p);  // m x dim
  Subspace tangent = tangent_space(n, u);
  // Complement of the tangent space inside T_p M, mapped back to embedding coords.
  Subspace tangent_in_basis = make_subspace(basis.transpose() * tangent.frame);
  Subspace comp = complement(tangent_in_basis);
  return Subspace{basis * comp.frame};
}

FootpointResult nearest_point(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  const AmbientSpace& ambient = n.ambient();
  const int count = n.vertex_count();

  std::vector<int> order(count);
  std::vector<double> dist(count);
  for (int i = 0; i < count; ++i) {
    order[i] = i;
    dist[i] = ambient.distance(x, n.vertex_point(i));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] < dist[b]; });

  // Seeds: best vertices separated by a few mesh cells, one per basin.
  std::vector<Eigen::VectorXd> seeds;
  for (int idx : order) {
    bool fresh = true;
    for (const auto& s : seeds) {
      if (n.param_separation_cells(n.vertex_param(idx), s) <= 2.5) {
        fresh = false;
        break;
      }
    }
    if (fresh) seeds.push_back(n.vertex_param(idx));
    if (static_cast<int>(seeds.size()) >= kMaxBasins) break;
  }

  std::vector<Candidate> candidates;
  for (const auto& seed : seeds) {
    Candidate c = refine_basin(n, x, seed);
    if (c.converged) candidates.push_back(std::move(c));
  }
  if (candidates.empty()) {
    raise(ErrorCode::NoConvergence, "no footpoint basin converged");
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.rho < b.rho; });

  const Candidate& best = candidates.front();
  // Minima closer than half a mesh cell (or numerically coincident) are the
  // same critical point reached from different seeds.
  const double point_tol = 1e-7 * (1.0 + best.foot.norm());
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if ((candidates[i].foot - best.foot).norm() <= point_tol) continue;
    if (n.param_separation_cells(candidates[i].param, best.param) < 0.5) continue;
    if (candidates[i].rho < best.rho + kUniquenessMargin * (1.0 + best.rho)) {
      raise(ErrorCode::NotUnique,
            "two local minima within the separation margin (rho = " + std::to_string(best.rho) +
                ", " + std::to_string(candidates[i].rho) + ")");
    }
    break;  // candidates are sorted; farther ones cannot violate the margin
  }
  return {best.param, best.foot, best.rho, true};
}

double potential(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  const double rho = nearest_point(n, x).rho;
  return 0.5 * rho * rho;
}

Eigen::VectorXd grad_potential(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  FootpointResult fp = nearest_point(n, x);
  return -n.ambient().log_map(x, fp.foot);
}

Subspace gauss_extended(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  FootpointResult fp = nearest_point(n, x);
  Eigen::MatrixXd frame = normal_space(n, fp.param).frame;
  for (int i = 0; i < frame.cols(); ++i) {
    frame.col(i) = n.ambient().parallel_transport(fp.foot, x, frame.col(i));
  }
  return make_subspace(frame);
}

Subspace quasi_vertical(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  FootpointResult fp = nearest_point(n, x);
  Eigen::VectorXd w = n.ambient().log_map(fp.foot, x);
  return quasi_vertical_at(n, fp.param, w);
}

Subspace quasi_vertical_at(const ParametricSubmanifold& n, const Eigen::VectorXd& p_param,
                           const Eigen::VectorXd& w) {
  return quasi_vertical_from_frame(n, n.embed(p_param), normal_space(n, p_param).frame, w);
}

Subspace quasi_vertical_from_frame(const ParametricSubmanifold& n, const Eigen::VectorXd& p_point,
                                   const Eigen::MatrixXd& normal_frame, const Eigen::VectorXd& w) {
  const AmbientSpace& ambient = n.ambient();
  const double h = 1e-5 * (1.0 + w.norm());
  Eigen::VectorXd x = ambient.exp_map(p_point, w);
  Eigen::MatrixXd cols(normal_frame.rows(), normal_frame.cols());
  for (int i = 0; i < normal_frame.cols(); ++i) {
    Eigen::VectorXd plus = ambient.exp_map(p_point, w + h * normal_frame.col(i));
    Eigen::VectorXd minus = ambient.exp_map(p_point, w - h * normal_frame.col(i));
    cols.col(i) = ambient.tangent_project(x, (plus - minus) / (2.0 * h));
  }
  return make_subspace(cols);
}

HessianForm hessian_fd(const ParametricSubmanifold& n, const Eigen::VectorXd& x) {
  const AmbientSpace& ambient = n.ambient();
  Eigen::MatrixXd basis = ambient.tangent_basis(x);
  const int dim = static_cast<int>(basis.cols());

  auto fd_matrix = [&](double h) {
    Eigen::MatrixXd mat(dim, dim);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd y_plus = ambient.exp_map(x, h * basis.col(i));
      Eigen::VectorXd y_minus = ambient.exp_map(x, -h * basis.col(i));
      Eigen::VectorXd g_plus = ambient.parallel_transport(y_plus, x, grad_potential(n, y_plus));
      Eigen::VectorXd g_minus = ambient.parallel_transport(y_minus, x, grad_potential(n, y_minus));
      mat.col(i) = basis.transpose() * ((g_plus - g_minus) / (2.0 * h));
    }
    return mat;
  };

  const double h = 1e-4 * (1.0 + x.norm());
  Eigen::MatrixXd coarse = fd_matrix(h);
  Eigen::MatrixXd fine = fd_matrix(0.5 * h);
  Eigen::MatrixXd richardson = (4.0 * fine - coarse) / 3.0;

  HessianForm out;
  out.asymmetry = (richardson - richardson.transpose()).cwiseAbs().maxCoeff();
  out.matrix = 0.5 * (richardson + richardson.transpose());
  out.frame = basis;
  return out;
}

double second_form_norm(const ParametricSubmanifold& n) {
  const AmbientSpace& ambient = n.ambient();
  const int d = n.param_dim();
  const int c = n.codim();
  double norm = 0.0;

  for (int v = 0; v < n.vertex_count(); ++v) {
    const Eigen::VectorXd& u = n.vertex_param(v);
    const Eigen::VectorXd& p = n.vertex_point(v);
    Eigen::MatrixXd jac = n.embed_d1(u);
    if (ambient.is_sphere()) {
      for (int i = 0; i < d; ++i) jac.col(i) = ambient.tangent_project(p, jac.col(i));
    }
    Eigen::MatrixXd metric = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(metric);
    Eigen::MatrixXd metric_inv_sqrt = eig.operatorInverseSqrt();

    Eigen::MatrixXd normal = normal_space(n, u).frame;
    // Shape operators per normal direction, in an orthonormal tangent basis.
    std::vector<Eigen::MatrixXd> shapes(c, Eigen::MatrixXd(d, d));
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        Eigen::VectorXd dd = ambient.tangent_project(p, n.embed_d2(u, i, j));
        for (int a = 0; a < c; ++a) {
          shapes[a](i, j) = shapes[a](j, i) = normal.col(a).dot(dd);
        }
      }
    }
    for (int a = 0; a < c; ++a) shapes[a] = metric_inv_sqrt * shapes[a] * metric_inv_sqrt;

    double local = 0.0;
    if (d == 1) {
      double sum = 0.0;
      for (int a = 0; a < c; ++a) sum += shapes[a](0, 0) * shapes[a](0, 0);
      local = std::sqrt(sum);
    } else if (c == 1) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(shapes[0]);
      local = se.eigenvalues().cwiseAbs().maxCoeff();
    } else {
      for (int s = 0; s < 360; ++s) {
        const double alpha = s * M_PI / 360.0;
        Eigen::VectorXd w(d);
        w.setZero();
        w(0) = std::cos(alpha);
        w(1) = std::sin(alpha);
        double sum = 0.0;
        for (int a = 0; a < c; ++a) {
          const double q = w.dot(shapes[a] * w);
          sum += q * q;
        }
        local = std::max(local, std::sqrt(sum));
      }
    }
    norm = std::max(norm, local);
  }
  return norm;
}

GentlenessReport gentleness_report(const ParametricSubmanifold& n) {
  GentlenessReport report;
  report.second_form_norm = second_form_norm(n);
  report.curvature_bound = n.ambient().curvature_bound();

  // Bottleneck term: half the distance between parameter-separated vertices.
  double min_dist = std::numeric_limits<double>::infinity();
  const int count = n.vertex_count();
  for (int i = 0; i < count; ++i) {
    for (int j = i + 1; j < count; ++j) {
      if (n.param_separation_fraction(n.vertex_param(i), n.vertex_param(j)) < 1.0 / 3.0) continue;
      min_dist = std::min(min_dist, n.ambient().distance(n.vertex_point(i), n.vertex_point(j)));
    }
  }
  const double bottleneck = 0.5 * min_dist;
  const double focal = report.second_form_norm > 1e-12
                           ? 1.0 / report.second_form_norm
                           : std::numeric_limits<double>::infinity();
  report.injectivity_estimate = std::min(bottleneck, focal);

  double inv_ambient = n.ambient().is_sphere() ? 1.0 / n.ambient().injectivity_radius() : 0.0;
  report.scale_c = std::max({1.0 / report.injectivity_estimate,
                             std::sqrt(report.curvature_bound), inv_ambient});
  report.gentle = report.scale_c <= 1.0 + 1e-9;
  return report;
}

TubePathLengths tube_path_lengths(const ParametricSubmanifold& n, double r, double wiggle,
                                  int steps) {
  const AmbientSpace& ambient = n.ambient();
  const int c = n.codim();
  const double span = 0.25 * n.axes()[0].length;

  Eigen::MatrixXd prev_frame;
  std::vector<Eigen::VectorXd> path;
  std::vector<Eigen::VectorXd> feet;
  path.reserve(steps + 1);
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n.param_dim());
    u(0) = t * span;
    u = n.wrap_param(u);
    Eigen::VectorXd p = n.embed(u);
    Eigen::MatrixXd frame = normal_space(n, u).frame;
    if (prev_frame.size() > 0) {
      // Align to the previous frame (polar factor of frame^T prev).
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(frame.transpose() * prev_frame,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      frame = frame * (svd.matrixU() * svd.matrixV().transpose());
    }
    prev_frame = frame;

    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(c);
    if (c == 1) {
      coeff(0) = 1.0;
    } else {
      coeff(0) = std::cos(wiggle * 2.0 * M_PI * t);
      coeff(1) = std::sin(wiggle * 2.0 * M_PI * t);
    }
    const double radius = r * (0.7 + 0.3 * std::cos(2.0 * M_PI * t + 1.0));
    path.push_back(ambient.exp_map(p, radius * (frame * coeff)));
  }

  TubePathLengths out;
  feet.reserve(path.size());
  for (const auto& x : path) feet.push_back(nearest_point(n, x).foot);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    out.path_length += ambient.distance(path[i], path[i + 1]);
    out.retracted_length += ambient.distance(feet[i], feet[i + 1]);
  }
  return out;
}

}  // namespace mmean
