#include "msd/havok.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>

using nlohmann::json;

namespace msd {

double HavokModel::amplitude_bound() const {
  double bound = 0.0;
  for (Eigen::Index k = 0; k < omega.size(); ++k)
    bound += std::abs(amplitudes[k]) * modes.col(k).head(n_channels).cwiseAbs().maxCoeff();
  return bound;
}

HankelPair build_hankel(const TimeSeries& series, const HankelConfig& config, Eigen::Index max_cols) {
  if (config.q < 1 || config.d < 1 || config.c < 1) throw std::invalid_argument("build_hankel: q, d, c must be positive");
  if (config.dt <= 0.0 && series.dt <= 0.0) throw std::invalid_argument("build_hankel: dt must be positive");

  HankelConfig cfg = config;
  if (cfg.dt <= 0.0) cfg.dt = series.dt;
  if (std::abs(cfg.dt - series.dt) > 1e-12 * series.dt)
    throw std::invalid_argument("build_hankel: config dt does not match the series grid");

  const Eigen::Index m = series.rows();
  const Eigen::Index n = series.dim();
  const Eigen::Index reach = static_cast<Eigen::Index>(cfg.q - 1) * cfg.d;
  // last H' entry is x[(q-1)d + (p-1)c + 1]
  Eigen::Index p = (m - 2 - reach) / cfg.c + 1;
  if (max_cols > 0 && max_cols < p) p = max_cols;
  if (m - 2 - reach < 0 || p < 1) throw std::invalid_argument("build_hankel: series too short for one column");

  HankelPair pair;
  pair.config = cfg;
  pair.n_channels = static_cast<int>(n);
  pair.t0 = series.t0;
  pair.H.resize(static_cast<Eigen::Index>(cfg.q) * n, p);
  pair.Hp.resize(static_cast<Eigen::Index>(cfg.q) * n, p);
#pragma omp parallel for schedule(static) if (p > 64)
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < cfg.q; ++i) {
      const Eigen::Index src = i * cfg.d + j * cfg.c;
      for (Eigen::Index ch = 0; ch < n; ++ch) {
        pair.H(i * n + ch, j) = series.values(src, ch);
        pair.Hp(i * n + ch, j) = series.values(src + 1, ch);
      }
    }
  }
  return pair;
}

HavokModel fit_dmd(const HankelPair& pair, int r) {
  const Eigen::Index rows = pair.H.rows();
  const Eigen::Index cols = pair.H.cols();
  if (r < 1 || r > std::min(rows, cols)) throw std::invalid_argument("fit_dmd: rank out of range");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(pair.H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  if (sigma[r - 1] <= 1e-13 * sigma[0])
    throw std::runtime_error("fit_dmd: singular value " + std::to_string(r) +
                             " is numerically zero; reduce the rank");

  const Eigen::MatrixXd Ur = svd.matrixU().leftCols(r);
  const Eigen::MatrixXd Vr = svd.matrixV().leftCols(r);
  const Eigen::VectorXd sr = sigma.head(r);

  const Eigen::MatrixXd HpVS = pair.Hp * (Vr * sr.cwiseInverse().asDiagonal());  // (q n) x r
  const Eigen::MatrixXd Atilde = Ur.transpose() * HpVS;

  Eigen::EigenSolver<Eigen::MatrixXd> eig(Atilde);
  if (eig.info() != Eigen::Success) throw std::runtime_error("fit_dmd: eigendecomposition failed");
  const Eigen::VectorXcd lambda = eig.eigenvalues();
  const Eigen::MatrixXcd W = eig.eigenvectors();

  HavokModel model;
  model.rank = r;
  model.config = pair.config;
  model.n_channels = pair.n_channels;
  model.t_ref = pair.t0;
  model.modes = HpVS.cast<std::complex<double>>() * W;  // exact DMD modes
  model.omega.resize(r);
  for (int k = 0; k < r; ++k) {
    if (std::abs(lambda[k]) < 1e-12)
      throw std::runtime_error("fit_dmd: zero discrete eigenvalue (mode " + std::to_string(k) +
                               "); reduce the rank");
    model.omega[k] = std::log(lambda[k]) / pair.config.dt;
  }
  // amplitudes: least-squares fit of the modes to the first snapshot
  model.amplitudes = model.modes.colPivHouseholderQr().solve(pair.H.col(0).cast<std::complex<double>>());
  return model;
}

HavokModel stabilize(const HavokModel& model) {
  HavokModel out = model;
  for (Eigen::Index k = 0; k < out.omega.size(); ++k) out.omega[k] = std::complex<double>(0.0, out.omega[k].imag());
  return out;
}

namespace {

Eigen::VectorXcd predict_complex(const HavokModel& model, double t) {
  const double s = t - model.t_ref;
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(model.n_channels);
  for (Eigen::Index k = 0; k < model.omega.size(); ++k) {
    const std::complex<double> w = std::exp(model.omega[k] * s) * model.amplitudes[k];
    acc += model.modes.col(k).head(model.n_channels) * w;
  }
  return acc;
}

}  // namespace

Eigen::VectorXd predict(const HavokModel& model, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("predict: time must be finite");
  const Eigen::VectorXcd value = predict_complex(model, t);
  const double scale = std::max(model.amplitude_bound(), 1e-300);
  if (value.imag().cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::runtime_error("predict: imaginary residue exceeds tolerance; spectrum is not conjugate closed");
  return value.real();
}

Eigen::MatrixXd predict_grid(const HavokModel& model, const Eigen::VectorXd& times) {
  Eigen::MatrixXd out(times.size(), model.n_channels);
  const double scale = std::max(model.amplitude_bound(), 1e-300);
  double max_residue = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_residue) if (times.size() > 64)
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const Eigen::VectorXcd value = predict_complex(model, times[i]);
    const double residue = value.imag().cwiseAbs().maxCoeff();
    if (residue > max_residue) max_residue = residue;
    out.row(i) = value.real();
  }
  if (max_residue > 1e-8 * scale)
    throw std::runtime_error("predict_grid: imaginary residue exceeds tolerance");
  return out;
}

SvdReport svd_mode_report(const HankelPair& pair, int k) {
  if (k < 1 || k > std::min(pair.H.rows(), pair.H.cols()))
    throw std::invalid_argument("svd_mode_report: k out of range");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(pair.H, Eigen::ComputeThinU);
  SvdReport report;
  const double total = svd.singularValues().sum();
  report.sigma_normalized = svd.singularValues().head(k) / (total > 0.0 ? total : 1.0);
  report.leading_modes = svd.matrixU().leftCols(k);
  return report;
}

namespace {

json interleaved(const Eigen::VectorXcd& v) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(2 * v.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    out.push_back(v[k].real());
    out.push_back(v[k].imag());
  }
  return json(out);
}

Eigen::VectorXcd deinterleaved(const json& j) {
  const auto flat = j.get<std::vector<double>>();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(flat.size() / 2));
  for (Eigen::Index k = 0; k < v.size(); ++k)
    v[k] = std::complex<double>(flat[2 * static_cast<size_t>(k)], flat[2 * static_cast<size_t>(k) + 1]);
  return v;
}

}  // namespace

std::string to_json_string(const HavokModel& model) {
  json j;
  j["config"] = {{"q", model.config.q}, {"d", model.config.d}, {"c", model.config.c}, {"dt", model.config.dt}};
  j["rank"] = model.rank;
  j["n_channels"] = model.n_channels;
  j["t_ref"] = model.t_ref;
  j["omega"] = interleaved(model.omega);
  // modes stored column-major, interleaved re/im
  std::vector<double> modes;
  modes.reserve(static_cast<size_t>(2 * model.modes.size()));
  for (Eigen::Index c = 0; c < model.modes.cols(); ++c)
    for (Eigen::Index r = 0; r < model.modes.rows(); ++r) {
      modes.push_back(model.modes(r, c).real());
      modes.push_back(model.modes(r, c).imag());
    }
  j["modes"] = modes;
  j["mode_rows"] = model.modes.rows();
  j["amplitudes"] = interleaved(model.amplitudes);
  return j.dump(2);
}

HavokModel havok_model_from_json(const std::string& text) {
  const json j = json::parse(text);
  HavokModel model;
  model.config.q = j["config"]["q"].get<int>();
  model.config.d = j["config"]["d"].get<int>();
  model.config.c = j["config"]["c"].get<int>();
  model.config.dt = j["config"]["dt"].get<double>();
  model.rank = j["rank"].get<int>();
  model.n_channels = j["n_channels"].get<int>();
  model.t_ref = j["t_ref"].get<double>();
  model.omega = deinterleaved(j["omega"]);
  const auto flat = j["modes"].get<std::vector<double>>();
  const Eigen::Index rows = j["mode_rows"].get<Eigen::Index>();
  const Eigen::Index cols = model.omega.size();
  model.modes.resize(rows, cols);
  size_t pos = 0;
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      model.modes(r, c) = std::complex<double>(flat[pos], flat[pos + 1]);
      pos += 2;
    }
  model.amplitudes = deinterleaved(j["amplitudes"]);
  return model;
}

}  // namespace msd
