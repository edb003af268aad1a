#pragma once

#include <Eigen/Dense>
#include <string>

namespace msd {

/// Uniformly sampled multivariate trajectory. Row k is the state at
/// time t0 + k*dt.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  Eigen::MatrixXd values;  // m x n, one row per snapshot

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index dim() const { return values.cols(); }
  double time(Eigen::Index k) const { return t0 + static_cast<double>(k) * dt; }
  double duration() const { return static_cast<double>(rows() - 1) * dt; }

  /// Contiguous window [start, start+count) as a new series.
  TimeSeries segment(Eigen::Index start, Eigen::Index count) const;

  /// Every stride-th row starting at `start`; dt scales by stride.
  TimeSeries decimate(Eigen::Index stride, Eigen::Index start = 0) const;

  /// Single-channel view as a new series.
  TimeSeries channel(Eigen::Index col) const;
};

/// CSV with header `t,x1,...,xn`, 17 significant digits per value.
void write_csv(const TimeSeries& series, const std::string& path);
TimeSeries read_csv(const std::string& path);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

}  // namespace msd
