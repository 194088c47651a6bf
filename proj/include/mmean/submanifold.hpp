#ifndef MMEAN_SUBMANIFOLD_HPP
#define MMEAN_SUBMANIFOLD_HPP

#include <Eigen/Dense>

#include "mmean/shapes.hpp"
#include "mmean/subspace.hpp"

namespace mmean {

/// Nearest-point retraction result: parameter and point of the foot, the
/// tube radius rho = d(x, N), and whether the minimum was isolated.
struct FootpointResult {
  Eigen::VectorXd param;
  Eigen::VectorXd foot;
  double rho = 0.0;
  bool unique = true;
};

/// Tangent space of N at parameter u, as a subspace of the ambient tangent
/// space at embed(u) (in embedding coordinates).
Subspace tangent_space(const ParametricSubmanifold& n, const Eigen::VectorXd& u);

/// Orthogonal complement of the tangent space inside the ambient tangent
/// space at embed(u); dimension equals the codimension.
Subspace normal_space(const ParametricSubmanifold& n, const Eigen::VectorXd& u);

/// Multi-start damped Newton projection onto N. Coarse pass over the mesh,
/// refinement of the best separated basins. Throws NotUnique when a second
/// local minimum comes within the separation margin of the best one, and
/// NoConvergence when no basin converges.
FootpointResult nearest_point(const ParametricSubmanifold& n, const Eigen::VectorXd& x);

/// P_N = rho^2 / 2.
double potential(const ParametricSubmanifold& n, const Eigen::VectorXd& x);

/// grad P_N(x) = -log_x(foot); has norm rho and points away from N.
Eigen::VectorXd grad_potential(const ParametricSubmanifold& n, const Eigen::VectorXd& x);

/// Extended Gauss map: the normal space at the foot point, parallel
/// translated to x along the minimizing geodesic (the vertical space).
Subspace gauss_extended(const ParametricSubmanifold& n, const Eigen::VectorXd& x);

/// Tangent space at x of the normal slice through the foot of x, computed by
/// central differences of w -> exp_p(w) over a frame of the normal space.
Subspace quasi_vertical(const ParametricSubmanifold& n, const Eigen::VectorXd& x);

/// Same, with the slice data already known: foot parameter p and the normal
/// offset w (ambient coordinates) with exp_p(w) = x.
Subspace quasi_vertical_at(const ParametricSubmanifold& n, const Eigen::VectorXd& p_param,
                           const Eigen::VectorXd& w);
Subspace quasi_vertical_from_frame(const ParametricSubmanifold& n, const Eigen::VectorXd& p_point,
                                   const Eigen::MatrixXd& normal_frame, const Eigen::VectorXd& w);

/// Second covariant differential of the potential in an orthonormal frame of
/// T_x M, by central differences of the gradient with parallel transport back
/// to x (one level of Richardson extrapolation). `frame` columns are the
/// basis vectors in embedding coordinates; `asymmetry` is the largest
/// antisymmetric entry before symmetrization.
struct HessianForm {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd frame;
  double asymmetry = 0.0;
};
HessianForm hessian_fd(const ParametricSubmanifold& n, const Eigen::VectorXd& x);

/// Sampled norm of the second fundamental form: max over mesh vertices of
/// sup |B_v(w,w)| over unit tangent w and unit normal v.
double second_form_norm(const ParametricSubmanifold& n);

struct GentlenessReport {
  double second_form_norm = 0.0;
  double curvature_bound = 0.0;
  double injectivity_estimate = 0.0;  // heuristic lower bound on i_N
  double scale_c = 0.0;               // smallest c with geometry bounded by c on the sample
  bool gentle = false;                // scale_c <= 1
};

/// Heuristic bounded-geometry check: the injectivity estimate combines half
/// the self-distance of parameter-separated mesh vertices with the focal
/// bound 1/|B|; curvature and ambient injectivity are exact for the model
/// ambients. The estimate is a sampled heuristic, not a certificate.
GentlenessReport gentleness_report(const ParametricSubmanifold& n);

/// Polyline lengths of a swept path in the r-tube and of its retraction onto
/// N, for the retraction length-ratio estimate. `wiggle` turns the normal
/// direction and modulates the tube radius along the sweep.
struct TubePathLengths {
  double path_length = 0.0;
  double retracted_length = 0.0;
};
TubePathLengths tube_path_lengths(const ParametricSubmanifold& n, double r, double wiggle,
                                  int steps);

}  // namespace mmean

#endif
