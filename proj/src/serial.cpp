#include "msd/serial.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace msd {
namespace serial {

Eigen::MatrixXd evaluate_library(const PolynomialLibrary& lib, const Eigen::MatrixXd& X) {
  if (X.cols() != lib.dim) throw std::invalid_argument("serial::evaluate_library: state dimension mismatch");
  const Eigen::Index m = X.rows();
  const Eigen::Index p = lib.size();
  Eigen::MatrixXd Theta(m, p);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& e = lib.terms[static_cast<size_t>(j)];
      double v = 1.0;
      for (int i = 0; i < lib.dim; ++i)
        for (int rep = 0; rep < e[static_cast<size_t>(i)]; ++rep) v *= X(k, i);
      Theta(k, j) = v;
    }
  }
  return Theta;
}

HankelPair build_hankel(const TimeSeries& series, const HankelConfig& config, Eigen::Index max_cols) {
  HankelConfig cfg = config;
  if (cfg.dt <= 0.0) cfg.dt = series.dt;
  const Eigen::Index m = series.rows();
  const Eigen::Index n = series.dim();
  const Eigen::Index reach = static_cast<Eigen::Index>(cfg.q - 1) * cfg.d;
  Eigen::Index p = (m - 2 - reach) / cfg.c + 1;
  if (max_cols > 0 && max_cols < p) p = max_cols;
  if (m - 2 - reach < 0 || p < 1) throw std::invalid_argument("serial::build_hankel: series too short");

  HankelPair pair;
  pair.config = cfg;
  pair.n_channels = static_cast<int>(n);
  pair.t0 = series.t0;
  pair.H.resize(static_cast<Eigen::Index>(cfg.q) * n, p);
  pair.Hp.resize(static_cast<Eigen::Index>(cfg.q) * n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < cfg.q; ++i) {
      const Eigen::Index src = i * cfg.d + j * cfg.c;
      for (Eigen::Index ch = 0; ch < n; ++ch) {
        pair.H(i * n + ch, j) = series.values(src, ch);
        pair.Hp(i * n + ch, j) = series.values(src + 1, ch);
      }
    }
  return pair;
}

Eigen::MatrixXd predict_grid(const HavokModel& model, const Eigen::VectorXd& times) {
  Eigen::MatrixXd out(times.size(), model.n_channels);
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const double s = times[i] - model.t_ref;
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(model.n_channels);
    for (Eigen::Index k = 0; k < model.omega.size(); ++k)
      acc += model.modes.col(k).head(model.n_channels) * (std::exp(model.omega[k] * s) * model.amplitudes[k]);
    out.row(i) = acc.real();
  }
  return out;
}

TrainingData extract_training_pairs(const TimeSeries& series, const BurstSchedule& schedule) {
  const Eigen::Index rows_per_burst = schedule.burst_size - 2;
  TrainingData out;
  out.states.resize(rows_per_burst * schedule.n_bursts, series.dim());
  out.derivs.resize(rows_per_burst * schedule.n_bursts, series.dim());
  const double inv2dt = 1.0 / (2.0 * series.dt);
  for (int b = 0; b < schedule.n_bursts; ++b) {
    const Eigen::Index s = schedule.start_indices[static_cast<size_t>(b)];
    if (s < 0 || s + schedule.burst_size > series.rows())
      throw std::invalid_argument("serial::extract_training_pairs: burst outside the series");
    for (Eigen::Index j = 1; j + 1 < schedule.burst_size; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(b) * rows_per_burst + (j - 1);
      out.states.row(row) = series.values.row(s + j);
      out.derivs.row(row) = (series.values.row(s + j + 1) - series.values.row(s + j - 1)) * inv2dt;
    }
  }
  return out;
}

}  // namespace serial
}  // namespace msd
