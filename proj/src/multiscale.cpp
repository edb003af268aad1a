#include "msd/multiscale.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

#include "msd/rng.hpp"
#include "msd/spectral.hpp"

using nlohmann::json;

namespace msd {

TwoScaleObservable make_two_scale_vdp(double F, double rate_per_fast, double n_slow_periods, double mu,
                                      std::uint64_t seed) {
  if (F < 1.0) throw std::invalid_argument("make_two_scale_vdp: F must be at least 1");
  const SystemSpec base = make_system("vanderpol", {{"mu", mu}});

  SystemSpec slow = base;
  slow.name = "vanderpol-slow";
  const double inv = 1.0 / F;
  const auto f = base.rhs;
  slow.rhs = [f, inv](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    f(x, dx);
    dx *= inv;
  };
  slow.period = F * base.period;  // exact under uniform time scaling

  Rng rng(seed);
  const double phase_fast = rng.uniform();
  const double phase_slow = rng.uniform();

  TwoScaleObservable obs;
  obs.F = F;
  obs.T_fast = base.period;
  obs.T_slow = slow.period;
  TimeSeries fast_full = simulate(base, base.x0_default, rate_per_fast, F * n_slow_periods, 10.0 + phase_fast);
  TimeSeries slow_full = simulate(slow, slow.x0_default, F * rate_per_fast, n_slow_periods, 10.0 + phase_slow);
  obs.fast_series = fast_full.channel(0);
  obs.slow_series = slow_full.channel(0);
  obs.fast_series.t0 = 0.0;
  obs.slow_series.t0 = 0.0;
  obs.summed = obs.fast_series;
  obs.summed.values += obs.slow_series.values;
  return obs;
}

HankelConfig spaced_config(double T_slow, int q, double dt, Eigen::Index sample_budget, double train_span) {
  if (q < 2 || dt <= 0.0 || T_slow <= 0.0) throw std::invalid_argument("spaced_config: bad parameters");
  HankelConfig cfg;
  cfg.q = q;
  cfg.dt = dt;
  const double base_duration = static_cast<double>(q - 1) * dt;
  cfg.d = T_slow <= base_duration ? 1 : static_cast<int>(std::llround(T_slow / base_duration));
  const Eigen::Index m = static_cast<Eigen::Index>(std::floor(train_span / dt));
  const Eigen::Index p_target = std::max<Eigen::Index>(2, sample_budget / q);
  const Eigen::Index usable = m - 2 - static_cast<Eigen::Index>(q - 1) * cfg.d;
  if (usable < 0) throw std::invalid_argument("spaced_config: training span shorter than one column");
  cfg.c = static_cast<int>(std::max<Eigen::Index>(1, usable / (p_target - 1)));
  return cfg;
}

namespace {

// Energy of a mode as seen by the observable: |b| * |phi| on the first block.
double mode_energy(const HavokModel& model, Eigen::Index k) {
  return std::abs(model.amplitudes[k]) * model.modes.col(k).head(model.n_channels).cwiseAbs().maxCoeff();
}

HavokModel drop_modes(const HavokModel& model, const std::vector<bool>& drop) {
  int keep = 0;
  for (bool d : drop)
    if (!d) ++keep;
  HavokModel out = model;
  out.rank = keep;
  out.omega.resize(keep);
  out.modes.resize(model.modes.rows(), keep);
  out.amplitudes.resize(keep);
  Eigen::Index j = 0;
  for (Eigen::Index k = 0; k < model.omega.size(); ++k) {
    if (drop[static_cast<size_t>(k)]) continue;
    out.omega[j] = model.omega[k];
    out.modes.col(j) = model.modes.col(k);
    out.amplitudes[j] = model.amplitudes[k];
    ++j;
  }
  return out;
}

// Splits constants (|Im w| below omega_zero) out of a stabilized model and
// accumulates their observable contribution into `offset`.
HavokModel remove_constant_modes(const HavokModel& model, double omega_zero, double& offset) {
  std::vector<bool> drop(static_cast<size_t>(model.omega.size()), false);
  for (Eigen::Index k = 0; k < model.omega.size(); ++k) {
    if (std::abs(model.omega[k].imag()) < omega_zero) {
      drop[static_cast<size_t>(k)] = true;
      offset += (model.modes(0, k) * model.amplitudes[k]).real();
    }
  }
  return drop_modes(model, drop);
}

}  // namespace

TwoScaleModel iterative_fit(const TimeSeries& summed, double T_fast, double F, int r_fast, int r_slow, int q) {
  if (summed.dim() != 1) throw std::invalid_argument("iterative_fit: expects a single-variable observable");
  if (F <= 1.0) throw std::invalid_argument("iterative_fit: F must exceed 1");
  const double T_slow = F * T_fast;
  if (summed.duration() < 5.0 * T_slow - 0.5 * summed.dt)
    throw std::invalid_argument("iterative_fit: series must cover five slow periods");

  // step 1: fast model from five fast periods at the fine rate
  const Eigen::Index m_fast = static_cast<Eigen::Index>(std::llround(5.0 * T_fast / summed.dt));
  if (m_fast < q + 2) throw std::invalid_argument("iterative_fit: fast window too short for the embedding");
  const TimeSeries fast_window = summed.segment(0, m_fast);
  HankelConfig cfg{q, 1, 1, summed.dt};
  HavokModel fast_model = stabilize(fit_dmd(build_hankel(fast_window, cfg), r_fast));

  // drift check: sub-fast oscillatory energy in the window model means the
  // slow component is not close to constant here, so the method's assumption fails.
  const double omega_zero = 2.0 * std::numbers::pi / (10.0 * T_slow);
  const double omega_subfast = 2.0 * std::numbers::pi / (1.5 * T_fast);
  double drift_energy = 0.0, oscillatory_energy = 0.0;
  for (Eigen::Index k = 0; k < fast_model.omega.size(); ++k) {
    const double w = std::abs(fast_model.omega[k].imag());
    if (w < omega_zero) continue;  // constants are expected, not drift
    const double e = mode_energy(fast_model, k);
    oscillatory_energy += e;
    if (w < omega_subfast) drift_energy += e;
  }
  if (oscillatory_energy > 0.0 && drift_energy > 0.3 * oscillatory_energy)
    throw DriftDetected("iterative_fit: sub-fast band carries " +
                        std::to_string(drift_energy / oscillatory_energy) +
                        " of the oscillatory energy; frequency ratio too small");

  TwoScaleModel result;
  result.constant_offset = 0.0;
  result.fast_model = remove_constant_modes(fast_model, omega_zero, result.constant_offset);

  // step 2: sample five slow periods at the rate reduced by F and subtract
  // the fast model's closed-form prediction
  const Eigen::Index stride = static_cast<Eigen::Index>(std::llround(F));
  const Eigen::Index m_slow = static_cast<Eigen::Index>(std::llround(5.0 * T_slow / (summed.dt * static_cast<double>(stride))));
  if (m_slow < q + 2) throw std::invalid_argument("iterative_fit: slow window too short for the embedding");
  TimeSeries residual;
  residual.t0 = summed.t0;
  residual.dt = summed.dt * static_cast<double>(stride);
  residual.values.resize(m_slow, 1);
  Eigen::VectorXd times(m_slow);
  for (Eigen::Index k = 0; k < m_slow; ++k) times[k] = residual.t0 + static_cast<double>(k) * residual.dt;
  const Eigen::MatrixXd fast_at = predict_grid(result.fast_model, times);
  for (Eigen::Index k = 0; k < m_slow; ++k)
    residual.values(k, 0) = summed.values(k * stride, 0) - fast_at(k, 0) - result.constant_offset;

  // step 3: slow model from the residual
  const double fast_scale = std::sqrt(fast_window.values.col(0).squaredNorm() / static_cast<double>(m_fast));
  const double residual_rms = std::sqrt(residual.values.col(0).squaredNorm() / static_cast<double>(m_slow));
  if (residual_rms < 1e-10 * std::max(fast_scale, 1.0)) {
    // degenerate slow scale: nothing left to model
    result.slow_model = result.fast_model;
    result.slow_model.rank = 0;
    result.slow_model.omega.resize(0);
    result.slow_model.modes.resize(result.fast_model.modes.rows(), 0);
    result.slow_model.amplitudes.resize(0);
    result.slow_model.config.dt = residual.dt;
    return result;
  }
  HankelConfig slow_cfg{q, 1, 1, residual.dt};
  HavokModel slow_model = stabilize(fit_dmd(build_hankel(residual, slow_cfg), r_slow));
  result.slow_model = remove_constant_modes(slow_model, omega_zero, result.constant_offset);
  return result;
}

Eigen::VectorXd combined_predict(const TwoScaleModel& model, double t) {
  Eigen::VectorXd out = predict(model.fast_model, t);
  if (model.slow_model.rank > 0) out += predict(model.slow_model, t);
  out.array() += model.constant_offset;
  return out;
}

Eigen::MatrixXd combined_predict_grid(const TwoScaleModel& model, const Eigen::VectorXd& times) {
  Eigen::MatrixXd out = predict_grid(model.fast_model, times);
  if (model.slow_model.rank > 0) out += predict_grid(model.slow_model, times);
  out.array() += model.constant_offset;
  return out;
}

double propose_fast_period(const TimeSeries& series) {
  return 1.0 / dominant_frequency(series.values.col(0), series.dt);
}

std::string to_json_string(const TwoScaleModel& model) {
  json j;
  j["fast"] = json::parse(to_json_string(model.fast_model));
  j["slow"] = json::parse(to_json_string(model.slow_model));
  j["constant_offset"] = model.constant_offset;
  return j.dump(2);
}

TwoScaleModel two_scale_model_from_json(const std::string& text) {
  const json j = json::parse(text);
  TwoScaleModel model;
  model.fast_model = havok_model_from_json(j["fast"].dump());
  model.slow_model = havok_model_from_json(j["slow"].dump());
  model.constant_offset = j["constant_offset"].get<double>();
  return model;
}

}  // namespace msd
