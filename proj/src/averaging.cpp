#include "mmean/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mmean/errors.hpp"

namespace mmean {

namespace {

struct CapturedError {
  bool failed = false;
  ErrorCode code = ErrorCode::NoConvergence;
  std::string message;
};

template <class F>
void parallel_loop(int count, int threads, bool parallel, F&& body) {
#ifdef _OPENMP
  if (parallel && count > 1) {
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
#endif
  (void)threads;
  (void)parallel;
  for (int i = 0; i < count; ++i) body(i);
}

void rethrow_first(const std::vector<CapturedError>& errors, const std::string& what) {
  int failures = 0;
  std::string detail;
  ErrorCode first = ErrorCode::NoConvergence;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].failed) continue;
    if (failures == 0) first = errors[i].code;
    if (failures < 6) {
      detail += "[" + what + " " + std::to_string(i) + "] " + errors[i].message + "; ";
    }
    ++failures;
  }
  if (failures > 0) {
    raise(first, std::to_string(failures) + " of " + std::to_string(errors.size()) + " " + what +
                     "(s) failed: " + detail);
  }
}

struct SliceData {
  Eigen::VectorXd p_param;
  Eigen::VectorXd p_point;
  Eigen::MatrixXd normal_frame;  // embdim x codim
};

SliceData make_slice(const ParametricSubmanifold& ref, const Eigen::VectorXd& p_param) {
  return {p_param, ref.embed(p_param), normal_space(ref, p_param).frame};
}

// Doubly projected gradient in slice coordinates. Footpoint or injectivity
// failures during the search signal that the iterate left the working tube.
Eigen::VectorXd slice_v(const WeightedFamily& family, const SliceData& slice,
                        const Eigen::VectorXd& w_coeffs) {
  const ParametricSubmanifold& ref = family.reference();
  const AmbientSpace& ambient = ref.ambient();
  try {
    Eigen::VectorXd w = slice.normal_frame * w_coeffs;
    Eigen::VectorXd x = ambient.exp_map(slice.p_point, w);

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(ambient.embedding_dim());
    std::vector<WeightedSubspace> gauss;
    gauss.reserve(family.members.size());
    for (const auto& member : family.members) {
      FootpointResult fp = nearest_point(member.manifold, x);
      grad -= member.weight * ambient.log_map(x, fp.foot);
      Eigen::MatrixXd frame = normal_space(member.manifold, fp.param).frame;
      for (int i = 0; i < frame.cols(); ++i) {
        frame.col(i) = ambient.parallel_transport(fp.foot, x, frame.col(i));
      }
      gauss.push_back({member.weight, make_subspace(frame)});
    }
    Subspace gamma_bar = average_subspaces(gauss).result;
    Subspace q = quasi_vertical_from_frame(ref, slice.p_point, slice.normal_frame, w);
    return q.frame.transpose() * (gamma_bar.frame * (gamma_bar.frame.transpose() * grad));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotUnique || e.code() == ErrorCode::BeyondInjectivity ||
        e.code() == ErrorCode::NoConvergence) {
      raise(ErrorCode::LeftTube, std::string("slice search left the tube: ") + e.what());
    }
    throw;
  }
}

Eigen::MatrixXd slice_jacobian(const WeightedFamily& family, const SliceData& slice,
                               const Eigen::VectorXd& w, double fd_step) {
  const int c = static_cast<int>(w.size());
  const double step = fd_step * (1.0 + w.norm());
  Eigen::MatrixXd jac(c, c);
  for (int k = 0; k < c; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(c);
    e(k) = step;
    jac.col(k) = (slice_v(family, slice, w + e) - slice_v(family, slice, w - e)) / (2.0 * step);
  }
  return jac;
}

}  // namespace

void validate_family(const WeightedFamily& family) {
  if (family.members.empty()) raise(ErrorCode::WeightError, "family has no members");
  if (family.reference_index < 0 ||
      family.reference_index >= static_cast<int>(family.members.size())) {
    raise(ErrorCode::ValidationError, "reference index out of range");
  }
  const AmbientSpace& ambient = family.members.front().manifold.ambient();
  const int d = family.members.front().manifold.param_dim();
  double sum = 0.0;
  for (const auto& member : family.members) {
    if (member.weight <= 0.0) raise(ErrorCode::WeightError, "weights must be positive");
    sum += member.weight;
    if (!(member.manifold.ambient() == ambient)) {
      raise(ErrorCode::DimensionMismatch, "members live in different ambient spaces");
    }
    if (member.manifold.param_dim() != d) {
      raise(ErrorCode::DimensionMismatch, "members have different dimensions");
    }
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    raise(ErrorCode::WeightError, "weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

C1Detail c1_distance_detail(const ParametricSubmanifold& n, const ParametricSubmanifold& n2,
                            int threads) {
  const AmbientSpace& ambient = n.ambient();
  const int count = n2.vertex_count();
  std::vector<double> c0(count, 0.0), angle(count, 0.0);
  std::vector<CapturedError> errors(count);

  parallel_loop(count, threads, true, [&](int i) {
    try {
      const Eigen::VectorXd& x2 = n2.vertex_point(i);
      FootpointResult fp = nearest_point(n, x2);
      Eigen::MatrixXd frame = tangent_space(n, fp.param).frame;
      for (int k = 0; k < frame.cols(); ++k) {
        frame.col(k) = ambient.parallel_transport(fp.foot, x2, frame.col(k));
      }
      Subspace transported = make_subspace(frame);
      Subspace local = tangent_space(n2, n2.vertex_param(i));
      c0[i] = fp.rho;
      angle[i] = finsler_distance(transported, local);
    } catch (const Error& e) {
      errors[i] = {true, e.code(), e.what()};
    }
  });
  rethrow_first(errors, "vertex");

  C1Detail out;
  for (int i = 0; i < count; ++i) {
    out.c0 = std::max(out.c0, c0[i]);
    out.angle = std::max(out.angle, angle[i]);
  }
  return out;
}

double c1_distance(const ParametricSubmanifold& n, const ParametricSubmanifold& n2) {
  return c1_distance_detail(n, n2).value();
}

FamilyDistances measure_family(const WeightedFamily& family, int threads) {
  const int m = static_cast<int>(family.members.size());
  FamilyDistances out;
  out.pairwise = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      C1Detail detail =
          c1_distance_detail(family.members[i].manifold, family.members[j].manifold, threads);
      out.pairwise(i, j) = detail.value();
      out.eps_c1 = std::max(out.eps_c1, detail.value());
      out.eps_c0 = std::max(out.eps_c0, detail.c0);
      out.eps_angular = std::max(out.eps_angular, detail.angle);
    }
  }
  return out;
}

Eigen::VectorXd averaged_gradient(const WeightedFamily& family, const Eigen::VectorXd& x) {
  const AmbientSpace& ambient = family.reference().ambient();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(ambient.embedding_dim());
  for (const auto& member : family.members) {
    grad += member.weight * grad_potential(member.manifold, x);
  }
  return grad;
}

Subspace averaged_gauss_field(const WeightedFamily& family, const Eigen::VectorXd& x) {
  std::vector<WeightedSubspace> gauss;
  gauss.reserve(family.members.size());
  for (const auto& member : family.members) {
    gauss.push_back({member.weight, gauss_extended(member.manifold, x)});
  }
  return average_subspaces(gauss).result;
}

Eigen::VectorXd v_field(const WeightedFamily& family, const Eigen::VectorXd& p_param,
                        const Eigen::VectorXd& w_ambient) {
  SliceData slice = make_slice(family.reference(), p_param);
  Eigen::VectorXd coeffs = slice.normal_frame.transpose() * w_ambient;
  if ((slice.normal_frame * coeffs - w_ambient).norm() > 1e-8 * (1.0 + w_ambient.norm())) {
    raise(ErrorCode::ValidationError, "offset is not a normal vector at p");
  }
  return slice_v(family, slice, coeffs);
}

SliceResult solve_slice(const WeightedFamily& family, const Eigen::VectorXd& p_param,
                        const SolverConfig& config, double r_max) {
  const ParametricSubmanifold& ref = family.reference();
  const AmbientSpace& ambient = ref.ambient();
  SliceData slice = make_slice(ref, p_param);
  const int c = static_cast<int>(slice.normal_frame.cols());

  Eigen::VectorXd w = Eigen::VectorXd::Zero(c);
  Eigen::VectorXd v = slice_v(family, slice, w);
  int iterations = 1;
  int boundary_hits = 0;

  while (v.norm() > config.tol * (1.0 + w.norm())) {
    if (iterations >= config.max_iter) {
      raise(ErrorCode::NoConvergence,
            "slice Newton hit the iteration cap with residual " + std::to_string(v.norm()));
    }
    Eigen::MatrixXd jac = slice_jacobian(family, slice, w, config.fd_step);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) {
      raise(ErrorCode::NoConvergence, "singular slice jacobian");
    }
    Eigen::VectorXd step = lu.solve(-v);

    bool accepted = false;
    for (int halving = 0; halving < 12 && !accepted; ++halving) {
      Eigen::VectorXd w_try = w + step;
      if (w_try.norm() > r_max) {
        ++boundary_hits;
        if (boundary_hits >= 3) {
          raise(ErrorCode::LeftTube, "slice iterate pushed past r_max = " + std::to_string(r_max));
        }
        w_try *= r_max / w_try.norm();
      }
      Eigen::VectorXd v_try = slice_v(family, slice, w_try);
      if (v_try.norm() < v.norm() || step.norm() < 1e-14) {
        w = w_try;
        v = v_try;
        accepted = true;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) {
      raise(ErrorCode::NoConvergence, "slice line search stalled at residual " +
                                          std::to_string(v.norm()));
    }
    ++iterations;
  }

  Eigen::MatrixXd jac = slice_jacobian(family, slice, w, config.fd_step);
  Eigen::MatrixXd sym = 0.5 * (jac + jac.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const double min_eig = eig.eigenvalues()(0);
  if (min_eig <= 0.0) {
    raise(ErrorCode::NotPositive,
          "slice jacobian not positive definite (min eigenvalue " + std::to_string(min_eig) + ")");
  }

  SliceResult out;
  out.w_coeffs = w;
  out.offset = slice.normal_frame * w;
  out.point = ambient.exp_map(slice.p_point, out.offset);
  out.diag = {v.norm(), iterations, min_eig};
  return out;
}

AveragedSection average_family(const WeightedFamily& family, const SolverConfig& config) {
  validate_family(family);

  FamilyDistances dists;
  if (family.members.size() > 1) dists = measure_family(family, config.threads);
  if (dists.eps_angular >= config.eps_angular_max) {
    raise(ErrorCode::EpsilonTooLarge,
          "angular spread " + std::to_string(dists.eps_angular) + " >= " +
              std::to_string(config.eps_angular_max));
  }
  if (dists.eps_c0 >= config.eps_c0_max) {
    raise(ErrorCode::EpsilonTooLarge, "C0 spread " + std::to_string(dists.eps_c0) + " >= " +
                                          std::to_string(config.eps_c0_max));
  }

  const double r_max = config.r_max_override > 0.0
                           ? config.r_max_override
                           : std::min(0.25, std::max(100.0 * dists.eps_c1, 10.0 * config.tol));

  const ParametricSubmanifold& ref = family.reference();
  const int count = ref.vertex_count();
  std::vector<SliceResult> results(count);
  std::vector<CapturedError> errors(count);

  parallel_loop(count, config.threads, config.parallel, [&](int i) {
    try {
      results[i] = solve_slice(family, ref.vertex_param(i), config, r_max);
    } catch (const Error& e) {
      errors[i] = {true, e.code(), e.what()};
    } catch (const std::exception& e) {
      errors[i] = {true, ErrorCode::NoConvergence, e.what()};
    }
  });
  rethrow_first(errors, "slice");

  AveragedSection section;
  section.reference_index = family.reference_index;
  section.params.reserve(count);
  section.offsets.reserve(count);
  section.points.reserve(count);
  section.per_slice.reserve(count);
  auto& summary = section.summary;
  summary.eps_c1 = dists.eps_c1;
  summary.eps_c0 = dists.eps_c0;
  summary.eps_angular = dists.eps_angular;
  summary.r_max = r_max;
  summary.min_jacobian_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < count; ++i) {
    section.params.push_back(ref.vertex_param(i));
    section.offsets.push_back(results[i].offset);
    section.points.push_back(results[i].point);
    section.per_slice.push_back(results[i].diag);
    summary.max_offset = std::max(summary.max_offset, results[i].offset.norm());
    summary.max_residual = std::max(summary.max_residual, results[i].diag.residual);
    summary.min_jacobian_eig = std::min(summary.min_jacobian_eig, results[i].diag.min_jacobian_eig);
    summary.max_iterations = std::max(summary.max_iterations, results[i].diag.iterations);
  }

  if (ref.param_dim() == 1 && ref.axes()[0].periodic) {
    ParametricSubmanifold curve = section_to_curve(ref, section);
    for (const auto& member : family.members) {
      summary.c1_to_members.push_back(c1_distance_detail(member.manifold, curve,
                                                         config.threads).value());
    }
  } else {
    // Grid finite differences over the reference mesh give the section tangents.
    const Eigen::VectorXi shape = ref.grid_shape();
    const AmbientSpace& ambient = ref.ambient();
    for (const auto& member : family.members) {
      double worst = 0.0;
      for (int i = 0; i < count; ++i) {
        FootpointResult fp = nearest_point(member.manifold, section.points[i]);
        Eigen::MatrixXd frame = tangent_space(member.manifold, fp.param).frame;
        for (int k = 0; k < frame.cols(); ++k) {
          frame.col(k) = ambient.parallel_transport(fp.foot, section.points[i], frame.col(k));
        }
        // central differences along each grid axis (periodic axes only here)
        Eigen::MatrixXd cols(ambient.embedding_dim(), ref.param_dim());
        Eigen::VectorXi multi(ref.param_dim());
        int rest = i;
        for (int a = ref.param_dim() - 1; a >= 0; --a) {
          multi(a) = rest % shape(a);
          rest /= shape(a);
        }
        for (int a = 0; a < ref.param_dim(); ++a) {
          Eigen::VectorXi up = multi, down = multi;
          if (ref.axes()[a].periodic) {
            up(a) = (multi(a) + 1) % shape(a);
            down(a) = (multi(a) - 1 + shape(a)) % shape(a);
          } else {
            up(a) = std::min(multi(a) + 1, shape(a) - 1);
            down(a) = std::max(multi(a) - 1, 0);
          }
          int iu = 0, idn = 0;
          for (int b = 0; b < ref.param_dim(); ++b) {
            iu = iu * shape(b) + up(b);
            idn = idn * shape(b) + down(b);
          }
          cols.col(a) = ambient.tangent_project(
              section.points[i], section.points[iu] - section.points[idn]);
        }
        const double angle = finsler_distance(make_subspace(cols), make_subspace(frame));
        worst = std::max(worst, std::max(fp.rho, angle));
      }
      summary.c1_to_members.push_back(worst);
    }
  }
  return section;
}

AveragedSection midpoint(const ParametricSubmanifold& n1, const ParametricSubmanifold& n2,
                         const SolverConfig& config) {
  WeightedFamily pair;
  pair.members.push_back({0.5, n1});
  pair.members.push_back({0.5, n2});
  pair.reference_index = 0;
  return average_family(pair, config);
}

ParametricSubmanifold section_to_curve(const ParametricSubmanifold& reference,
                                       const AveragedSection& section) {
  if (reference.param_dim() != 1 || !reference.axes()[0].periodic) {
    raise(ErrorCode::Unsupported, "section interpolation needs a closed curve reference");
  }
  return interpolate_closed_curve(reference.ambient(), section.points,
                                  reference.resolution()(0));
}

std::vector<MorphFrame> morph(const ParametricSubmanifold& n1, const ParametricSubmanifold& n2,
                              int depth, const SolverConfig& config) {
  if (depth < 1) raise(ErrorCode::ValidationError, "morph depth must be >= 1");
  if (n1.param_dim() != 1) raise(ErrorCode::Unsupported, "morph supports curve families only");

  std::vector<std::pair<double, ParametricSubmanifold>> curves;
  curves.emplace_back(0.0, n1);
  curves.emplace_back(1.0, n2);

  std::function<void(const ParametricSubmanifold&, const ParametricSubmanifold&, double, double,
                     int)>
      split = [&](const ParametricSubmanifold& a, const ParametricSubmanifold& b, double ta,
                  double tb, int level) {
        if (level == 0) return;
        const double tm = 0.5 * (ta + tb);
        AveragedSection sect;
        try {
          sect = midpoint(a, b, config);
        } catch (const Error& e) {
          raise(e.code(), "morph step at t=" + std::to_string(tm) + ": " + e.what());
        }
        ParametricSubmanifold mid = section_to_curve(a, sect);
        curves.emplace_back(tm, mid);
        split(a, mid, ta, tm, level - 1);
        split(mid, b, tm, tb, level - 1);
      };
  split(n1, n2, 0.0, 1.0, depth);

  std::sort(curves.begin(), curves.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<MorphFrame> frames;
  frames.reserve(curves.size());
  for (const auto& [t, curve] : curves) {
    MorphFrame frame;
    frame.t = t;
    for (int i = 0; i < curve.vertex_count(); ++i) {
      frame.params.push_back(curve.vertex_param(i));
      frame.points.push_back(curve.vertex_point(i));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

double invariance_check(const WeightedFamily& family, const AveragedSection& section) {
  if (family.isometries.empty()) return 0.0;
  const ParametricSubmanifold& ref = family.reference();
  const int count = static_cast<int>(section.points.size());

  if (ref.param_dim() == 1 && ref.axes()[0].periodic) {
    ParametricSubmanifold curve = section_to_curve(ref, section);
    double worst = 0.0;
    for (const auto& iso : family.isometries) {
      std::vector<double> rho(count, 0.0);
      std::vector<CapturedError> errors(count);
      parallel_loop(count, 0, true, [&](int i) {
        try {
          rho[i] = nearest_point(curve, iso.apply(section.points[i])).rho;
        } catch (const Error& e) {
          errors[i] = {true, e.code(), e.what()};
        }
      });
      rethrow_first(errors, "orbit point");
      for (int i = 0; i < count; ++i) worst = std::max(worst, rho[i]);
    }
    return worst;
  }

  // Sampled symmetric Hausdorff fallback for higher-dimensional sections.
  const AmbientSpace& ambient = ref.ambient();
  double worst = 0.0;
  for (const auto& iso : family.isometries) {
    for (int i = 0; i < count; ++i) {
      Eigen::VectorXd moved = iso.apply(section.points[i]);
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < count; ++j) {
        best = std::min(best, ambient.distance(moved, section.points[j]));
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

double reference_independence_check(const WeightedFamily& family, int other_reference,
                                    const SolverConfig& config) {
  WeightedFamily alt = family;
  alt.reference_index = other_reference;
  AveragedSection base = average_family(family, config);
  AveragedSection moved = average_family(alt, config);

  ParametricSubmanifold base_curve = section_to_curve(family.reference(), base);
  ParametricSubmanifold alt_curve = section_to_curve(alt.reference(), moved);

  double worst = 0.0;
  for (const auto& q : moved.points) worst = std::max(worst, nearest_point(base_curve, q).rho);
  for (const auto& q : base.points) worst = std::max(worst, nearest_point(alt_curve, q).rho);
  return worst;
}

Eigen::VectorXd equidistant_oracle(const ParametricSubmanifold& n1,
                                   const ParametricSubmanifold& n2,
                                   const Eigen::VectorXd& p_param, double search_radius,
                                   double tol) {
  if (n1.codim() != 1 || n2.codim() != 1) {
    raise(ErrorCode::Unsupported, "equidistant oracle needs codimension-1 members");
  }
  const AmbientSpace& ambient = n1.ambient();
  Eigen::VectorXd p = n1.embed(p_param);
  Eigen::VectorXd nu = normal_space(n1, p_param).frame.col(0);

  auto gap = [&](double s) {
    Eigen::VectorXd x = ambient.exp_map(p, s * nu);
    return nearest_point(n1, x).rho - nearest_point(n2, x).rho;
  };

  const double at_zero = gap(0.0);
  if (std::abs(at_zero) <= tol) return p;

  const int steps = 64;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int direction : {+1, -1}) {
    double prev_s = 0.0, prev_f = at_zero;
    for (int k = 1; k <= steps; ++k) {
      const double s = direction * search_radius * k / steps;
      const double f = gap(s);
      if ((prev_f < 0.0 && f >= 0.0) || (prev_f > 0.0 && f <= 0.0)) {
        lo = prev_s;
        hi = s;
        bracketed = true;
        break;
      }
      prev_s = s;
      prev_f = f;
    }
    if (bracketed) break;
  }
  if (!bracketed) {
    raise(ErrorCode::NoSignChange, "no equidistant crossing along the normal line");
  }

  double f_lo = gap(lo);
  while (std::abs(hi - lo) > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = gap(mid);
    if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return ambient.exp_map(p, 0.5 * (lo + hi) * nu);
}

}  // namespace mmean
