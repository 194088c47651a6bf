#ifndef MMEAN_AVERAGING_HPP
#define MMEAN_AVERAGING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mmean/submanifold.hpp"

namespace mmean {

struct FamilyMember {
  double weight;
  ParametricSubmanifold manifold;
};

/// Finitely many submanifolds with probability weights. The reference member
/// plays N_e: the average is solved slice by slice over its mesh.
struct WeightedFamily {
  std::vector<FamilyMember> members;
  int reference_index = 0;
  std::vector<Isometry> isometries;  // retained when built as a group orbit

  const ParametricSubmanifold& reference() const { return members[reference_index].manifold; }
};

/// Throws WeightError / DimensionMismatch when the family is malformed.
void validate_family(const WeightedFamily& family);

/// One-sided C1 distance from N to N2: sup over mesh vertices x' of N2 of
/// max(rho(x'), angle between T_{x'}N2 and the parallel translate of the
/// tangent space at the foot of x' on N). The two parts are reported
/// separately; the distance is their max.
struct C1Detail {
  double c0 = 0.0;
  double angle = 0.0;
  double value() const { return std::max(c0, angle); }
};
C1Detail c1_distance_detail(const ParametricSubmanifold& n, const ParametricSubmanifold& n2,
                            int threads = 0);
double c1_distance(const ParametricSubmanifold& n, const ParametricSubmanifold& n2);

/// Max pairwise C1 data over ordered member pairs.
struct FamilyDistances {
  double eps_c1 = 0.0;
  double eps_c0 = 0.0;
  double eps_angular = 0.0;
  Eigen::MatrixXd pairwise;  // combined C1 value, row = from, col = to
};
FamilyDistances measure_family(const WeightedFamily& family, int threads = 0);

/// Weighted sum of the member potential gradients at x.
Eigen::VectorXd averaged_gradient(const WeightedFamily& family, const Eigen::VectorXd& x);

/// Projection average of the extended Gauss maps at x.
Subspace averaged_gauss_field(const WeightedFamily& family, const Eigen::VectorXd& x);

/// Doubly projected gradient at x = exp_p(w): the averaged gradient pushed
/// through the averaged Gauss projection and then into the reference
/// quasi-vertical space, as coefficients in the slice frame at x.
Eigen::VectorXd v_field(const WeightedFamily& family, const Eigen::VectorXd& p_param,
                        const Eigen::VectorXd& w_ambient);

struct SolverConfig {
  double tol = 1e-10;
  int max_iter = 50;
  double fd_step = 1e-4;
  double r_max_override = -1.0;  // <= 0: use min(0.25, max(100 eps, 10 tol))
  int threads = 0;               // 0: library default
  bool parallel = true;          // false: serial reference path
  double eps_angular_max = 0.05;
  double eps_c0_max = 0.125;
  std::uint64_t seed = 42;       // echoed in reports; sampling commands draw from it
};

struct SliceDiagnostics {
  double residual = 0.0;
  int iterations = 0;
  double min_jacobian_eig = 0.0;
};

struct SliceResult {
  Eigen::VectorXd w_coeffs;  // in the slice normal frame
  Eigen::VectorXd offset;    // same vector in ambient coordinates
  Eigen::VectorXd point;     // exp_p(offset)
  SliceDiagnostics diag;
};

/// Newton zero-finding of the doubly projected gradient along the normal
/// slice at p, started from w = 0, iterates clamped to |w| <= r_max.
/// Throws NoConvergence, LeftTube, NotPositive.
SliceResult solve_slice(const WeightedFamily& family, const Eigen::VectorXd& p_param,
                        const SolverConfig& config, double r_max);

struct AveragedSection {
  int reference_index = 0;
  std::vector<Eigen::VectorXd> params;
  std::vector<Eigen::VectorXd> offsets;
  std::vector<Eigen::VectorXd> points;
  std::vector<SliceDiagnostics> per_slice;
  struct Summary {
    double eps_c1 = 0.0;
    double eps_c0 = 0.0;
    double eps_angular = 0.0;
    double r_max = 0.0;
    double max_offset = 0.0;
    double max_residual = 0.0;
    double min_jacobian_eig = 0.0;
    int max_iterations = 0;
    std::vector<double> c1_to_members;  // measured c1_distance(N_g, N-bar)
  } summary;
};

/// The center-of-mass pipeline: solve every slice over the reference mesh and
/// assemble the section with its diagnostics. Slice failures are aggregated
/// with slice identification. Throws EpsilonTooLarge when the measured
/// angular / C0 spreads exceed the configured thresholds.
AveragedSection average_family(const WeightedFamily& family, const SolverConfig& config = {});

AveragedSection midpoint(const ParametricSubmanifold& n1, const ParametricSubmanifold& n2,
                         const SolverConfig& config = {});

/// Smooth closed curve through the section points over the reference mesh
/// (trig interpolation; curve families only).
ParametricSubmanifold section_to_curve(const ParametricSubmanifold& reference,
                                       const AveragedSection& section);

struct MorphFrame {
  double t;
  std::vector<Eigen::VectorXd> params;
  std::vector<Eigen::VectorXd> points;
};

/// Recursive midpoints at dyadic times: 2^depth + 1 frames, endpoints are the
/// input meshes. Errors are rethrown with the dyadic time attached.
std::vector<MorphFrame> morph(const ParametricSubmanifold& n1, const ParametricSubmanifold& n2,
                              int depth, const SolverConfig& config = {});

/// Max over the retained isometries g and section points q of the distance
/// from g(q) to the section (as an interpolated curve). Returns 0 for a
/// trivial group.
double invariance_check(const WeightedFamily& family, const AveragedSection& section);

/// Hausdorff-style distance between the sections computed with two different
/// reference members.
double reference_independence_check(const WeightedFamily& family, int other_reference,
                                    const SolverConfig& config = {});

/// Bisection root of rho_1 - rho_2 along the normal geodesic through the
/// point of N1 at p_param. Codimension-1 members only; independent of the
/// Grassmann / Newton machinery. Throws NoSignChange when no bracket exists
/// within the search radius.
Eigen::VectorXd equidistant_oracle(const ParametricSubmanifold& n1,
                                   const ParametricSubmanifold& n2,
                                   const Eigen::VectorXd& p_param, double search_radius = 0.25,
                                   double tol = 1e-12);

}  // namespace mmean

#endif
