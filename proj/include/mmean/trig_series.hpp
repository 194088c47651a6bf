#ifndef MMEAN_TRIG_SERIES_HPP
#define MMEAN_TRIG_SERIES_HPP

#include <Eigen/Dense>

namespace mmean {

/// Real trigonometric interpolant through equispaced samples on a periodic
/// interval [0, period). Evaluation and the first two derivatives are exact
/// for the fitted series.
class TrigSeries {
 public:
  TrigSeries() = default;

  /// Least-degree trig polynomial matching samples[j] at u_j = j*period/n.
  static TrigSeries fit(const Eigen::VectorXd& samples, double period);

  double value(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;
  double period() const { return period_; }
  int modes() const { return static_cast<int>(cos_coef_.size()); }

 private:
  double period_ = 0.0;
  double mean_ = 0.0;
  Eigen::VectorXd cos_coef_;  // modes 1..M; Nyquist cosine already halved
  Eigen::VectorXd sin_coef_;
};

}  // namespace mmean

#endif
