#include "mmean/trig_series.hpp"

#include <cmath>

namespace mmean {

TrigSeries TrigSeries::fit(const Eigen::VectorXd& samples, double period) {
  const int n = static_cast<int>(samples.size());
  TrigSeries s;
  s.period_ = period;
  s.mean_ = samples.mean();

  const int m_max = n / 2;
  s.cos_coef_ = Eigen::VectorXd::Zero(m_max);
  s.sin_coef_ = Eigen::VectorXd::Zero(m_max);
  const double step = 2.0 * M_PI / n;
  for (int m = 1; m <= m_max; ++m) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < n; ++j) {
      a += samples(j) * std::cos(m * step * j);
      b += samples(j) * std::sin(m * step * j);
    }
    a *= 2.0 / n;
    b *= 2.0 / n;
    if (n % 2 == 0 && m == m_max) {
      a *= 0.5;  // Nyquist mode is sampled twice per period
      b = 0.0;
    }
    s.cos_coef_(m - 1) = a;
    s.sin_coef_(m - 1) = b;
  }
  return s;
}

double TrigSeries::value(double u) const {
  const double omega = 2.0 * M_PI / period_;
  double out = mean_;
  for (int m = 1; m <= modes(); ++m) {
    out += cos_coef_(m - 1) * std::cos(m * omega * u) + sin_coef_(m - 1) * std::sin(m * omega * u);
  }
  return out;
}

double TrigSeries::derivative(double u) const {
  const double omega = 2.0 * M_PI / period_;
  double out = 0.0;
  for (int m = 1; m <= modes(); ++m) {
    const double w = m * omega;
    out += -cos_coef_(m - 1) * w * std::sin(w * u) + sin_coef_(m - 1) * w * std::cos(w * u);
  }
  return out;
}

double TrigSeries::second_derivative(double u) const {
  const double omega = 2.0 * M_PI / period_;
  double out = 0.0;
  for (int m = 1; m <= modes(); ++m) {
    const double w = m * omega;
    out -= w * w *
           (cos_coef_(m - 1) * std::cos(w * u) + sin_coef_(m - 1) * std::sin(w * u));
  }
  return out;
}

}  // namespace mmean
