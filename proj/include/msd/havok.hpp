#pragma once

#include <Eigen/Dense>
#include <string>

#include "msd/timeseries.hpp"

namespace msd {

/// Delay-embedding geometry. Row spacing d stretches the delay duration
/// D = (q-1)*d*dt without adding rows; column spacing c thins the snapshot
/// columns without shortening the covered span. The shifted matrix H'
/// always advances by a single fine step dt.
struct HankelConfig {
  int q = 128;  // delays (block rows per channel)
  int d = 1;    // row spacing
  int c = 1;    // column spacing
  double dt = 0.0;

  double delay_duration() const { return static_cast<double>(q - 1) * static_cast<double>(d) * dt; }
};

struct HankelPair {
  Eigen::MatrixXd H;   // (q*n) x p
  Eigen::MatrixXd Hp;  // same indices advanced by one fine step
  HankelConfig config;
  int n_channels = 1;
  double t0 = 0.0;  // time of H(0, 0)

  Eigen::Index numel() const { return H.size(); }
};

/// Linear delay-space model x(t) = sum_k phi_k exp(omega_k (t - t_ref)) b_k.
struct HavokModel {
  int rank = 0;
  Eigen::VectorXcd omega;      // continuous-time eigenvalues, 1/time
  Eigen::MatrixXcd modes;      // (q*n) x r
  Eigen::VectorXcd amplitudes; // r
  HankelConfig config;
  int n_channels = 1;
  double t_ref = 0.0;

  /// Triangle-inequality bound on |prediction| at any time (per channel,
  /// summed over modes); finite for a stabilized model.
  double amplitude_bound() const;
};

/// Shift-stacked snapshot pair with maximal column count for the series;
/// pass max_cols to pin p (e.g. to hold numel constant across a sweep).
HankelPair build_hankel(const TimeSeries& series, const HankelConfig& config, Eigen::Index max_cols = -1);

/// Exact DMD of rank r on the pair: truncated SVD of H, reduced operator
/// U* H' V S^-1, exact modes H' V S^-1 w, amplitudes fit to the first
/// column of H, omega = log(lambda)/dt on the principal branch.
HavokModel fit_dmd(const HankelPair& pair, int r);

/// Zero the real part of every eigenvalue; modes and amplitudes unchanged.
HavokModel stabilize(const HavokModel& model);

/// Observable (first channel block) at time t. The conjugate-closed sum must
/// leave an imaginary residue below 1e-8 of the model's amplitude scale.
Eigen::VectorXd predict(const HavokModel& model, double t);

/// predict over a grid of times; rows follow `times`.
Eigen::MatrixXd predict_grid(const HavokModel& model, const Eigen::VectorXd& times);

struct SvdReport {
  Eigen::VectorXd sigma_normalized;  // sigma_k / sum_i sigma_i
  Eigen::MatrixXd leading_modes;     // first k columns of U
};

SvdReport svd_mode_report(const HankelPair& pair, int k);

std::string to_json_string(const HavokModel& model);
HavokModel havok_model_from_json(const std::string& text);

}  // namespace msd
