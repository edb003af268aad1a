#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "msd/dynamics.hpp"
#include "msd/havok.hpp"
#include "msd/timeseries.hpp"

namespace msd {

/// Two oscillators on a shared fine grid plus their summed single-variable
/// observable.
struct TwoScaleObservable {
  TimeSeries fast_series;
  TimeSeries slow_series;
  TimeSeries summed;
  double F = 1.0;
  double T_fast = 0.0;
  double T_slow = 0.0;
};

/// Fast/slow pair of stabilized delay models; the combined prediction is
/// fast + slow + constant_offset, where the offset collects the removed
/// zero-eigenvalue (constant) mode contributions.
struct TwoScaleModel {
  HavokModel fast_model;
  HavokModel slow_model;
  double constant_offset = 0.0;
};

/// Raised when the fast-model training window carries too much sub-fast
/// oscillatory energy, i.e. the slow dynamics are not approximately constant
/// on the fast time scale (frequency ratio too small for the iterative method).
struct DriftDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Summed Van der Pol pair: the slow unit is the same oscillator with its
/// time scale stretched by F. Observables are the x components. `seed`
/// randomizes the phase of each component; the grid step is T_fast/rate.
TwoScaleObservable make_two_scale_vdp(double F, double rate_per_fast, double n_slow_periods, double mu = 5.0,
                                      std::uint64_t seed = 0);

/// Embedding for a slow delay duration on a fine grid: d = round(T_slow /
/// ((q-1) dt)) so that D lands within one (q-1)*dt quantum of T_slow, and c
/// sized so roughly sample_budget/q columns fit in the training span.
/// Returns d = 1 when T_slow is within one delay duration already.
HankelConfig spaced_config(double T_slow, int q, double dt, Eigen::Index sample_budget, double train_span);

/// Three-step fast/slow decomposition of a summed observable:
/// (1) delay model on 5*T_fast of data at the fine rate; stabilize; move
///     constant modes to the offset; (2) predict that model on a grid
///     coarsened by F over 5*T_slow and subtract; (3) delay model of the
///     residual, stabilized, constants also moved to the offset.
TwoScaleModel iterative_fit(const TimeSeries& summed, double T_fast, double F, int r_fast = 50, int r_slow = 50,
                            int q = 128);

Eigen::VectorXd combined_predict(const TwoScaleModel& model, double t);
Eigen::MatrixXd combined_predict_grid(const TwoScaleModel& model, const Eigen::VectorXd& times);

/// Dominant-peak period suggestion for choosing T_fast; never applied
/// implicitly.
double propose_fast_period(const TimeSeries& series);

std::string to_json_string(const TwoScaleModel& model);
TwoScaleModel two_scale_model_from_json(const std::string& text);

}  // namespace msd
