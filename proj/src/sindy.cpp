#include "msd/sindy.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

using nlohmann::json;

namespace msd {

TrainingData center_difference(const TimeSeries& series) {
  const Eigen::Index m = series.rows();
  if (m < 3) throw std::invalid_argument("center_difference: need at least 3 rows");
  TrainingData out;
  out.states = series.values.middleRows(1, m - 2);
  out.derivs = (series.values.bottomRows(m - 2) - series.values.topRows(m - 2)) / (2.0 * series.dt);
  return out;
}

namespace {

// Least squares restricted to `active` rows of the coefficient vector.
// Returns the solution scattered back to full length; flags rank deficiency.
Eigen::VectorXd restricted_lstsq(const Eigen::MatrixXd& Theta, const Eigen::VectorXd& y,
                                 const std::vector<Eigen::Index>& active, bool& rank_deficient) {
  Eigen::MatrixXd sub(Theta.rows(), static_cast<Eigen::Index>(active.size()));
  for (Eigen::Index j = 0; j < sub.cols(); ++j) sub.col(j) = Theta.col(active[static_cast<size_t>(j)]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
  rank_deficient = cod.rank() < sub.cols();
  const Eigen::VectorXd coeffs = cod.solve(y);  // minimum-norm when rank deficient
  Eigen::VectorXd full = Eigen::VectorXd::Zero(Theta.cols());
  for (Eigen::Index j = 0; j < sub.cols(); ++j) full[active[static_cast<size_t>(j)]] = coeffs[j];
  return full;
}

}  // namespace

SparseModel stlsq(const PolynomialLibrary& lib, const Eigen::MatrixXd& Theta, const Eigen::MatrixXd& Xdot,
                  double lambda, int max_iter) {
  if (lambda <= 0.0) throw std::invalid_argument("stlsq: lambda must be positive");
  if (Theta.rows() != Xdot.rows()) throw std::invalid_argument("stlsq: row count mismatch");
  if (Theta.rows() < 1) throw std::invalid_argument("stlsq: empty data");
  if (Theta.cols() != lib.size()) throw std::invalid_argument("stlsq: Theta does not match library size");
  if (max_iter < 1) max_iter = 1;

  const Eigen::Index p = Theta.cols();
  const Eigen::Index n = Xdot.cols();

  SparseModel model;
  model.library = lib;
  model.lambda = lambda;
  model.Xi = Eigen::MatrixXd::Zero(p, n);

  std::vector<bool> col_rank_deficient(static_cast<size_t>(n), false);

  // initial dense fit
  {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Theta);
    const bool deficient = cod.rank() < p;
    model.Xi = cod.solve(Xdot);
    if (deficient) col_rank_deficient.assign(static_cast<size_t>(n), true);
  }

  BoolArray support = model.Xi.array().abs() >= lambda;
  int iterations = 0;
#pragma omp parallel for schedule(dynamic) if (n > 1)
  for (Eigen::Index col = 0; col < n; ++col) {
    int iters_col = 0;
    Eigen::Array<bool, Eigen::Dynamic, 1> active = support.col(col);
    for (int it = 0; it < max_iter; ++it) {
      ++iters_col;
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < p; ++j)
        if (active[j]) idx.push_back(j);
      Eigen::VectorXd xi;
      if (idx.empty()) {
        xi = Eigen::VectorXd::Zero(p);
      } else {
        bool deficient = false;
        xi = restricted_lstsq(Theta, Xdot.col(col), idx, deficient);
        if (deficient) col_rank_deficient[static_cast<size_t>(col)] = true;
      }
      Eigen::Array<bool, Eigen::Dynamic, 1> next = xi.array().abs() >= lambda;
      xi = (next).select(xi, Eigen::VectorXd::Zero(p));
      model.Xi.col(col) = xi;
      if ((next == active).all()) break;
      active = next;
    }
#pragma omp critical
    if (iters_col > iterations) iterations = iters_col;
  }
  model.iterations_used = iterations;
  for (Eigen::Index col = 0; col < n; ++col)
    if (col_rank_deficient[static_cast<size_t>(col)]) model.rank_deficient_columns.push_back(static_cast<int>(col));
  return model;
}

bool support_matches(const SparseModel& model, const BoolArray& truth) {
  if (model.Xi.rows() != truth.rows() || model.Xi.cols() != truth.cols())
    throw std::invalid_argument("support_matches: shape mismatch");
  return (model.support() == truth).all();
}

SparseModel fit_sindy(const TimeSeries& series, double lambda, int degree) {
  const auto data = center_difference(series);
  const auto lib = PolynomialLibrary::make(static_cast<int>(series.dim()), degree);
  const Eigen::MatrixXd Theta = evaluate_library(lib, data.states);
  return stlsq(lib, Theta, data.derivs, lambda);
}

std::string equation_report(const SparseModel& model) {
  std::ostringstream out;
  for (Eigen::Index col = 0; col < model.Xi.cols(); ++col) {
    out << "dx" << (col + 1) << "/dt =";
    bool any = false;
    for (Eigen::Index j = 0; j < model.Xi.rows(); ++j) {
      const double coef = model.Xi(j, col);
      if (coef == 0.0) continue;
      out << (any ? (coef < 0 ? " - " : " + ") : (coef < 0 ? " -" : " "));
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", std::abs(coef));
      out << buf;
      const std::string name = model.library.term_name(j);
      if (name != "1") out << " " << name;
      any = true;
    }
    if (!any) out << " 0";
    out << "\n";
  }
  return out.str();
}

std::string to_json_string(const SparseModel& model) {
  json j;
  j["library"] = {{"dim", model.library.dim}, {"degree", model.library.max_degree}};
  j["terms"] = model.library.terms;
  std::vector<std::vector<double>> xi(static_cast<size_t>(model.Xi.rows()));
  for (Eigen::Index r = 0; r < model.Xi.rows(); ++r)
    for (Eigen::Index c = 0; c < model.Xi.cols(); ++c) xi[static_cast<size_t>(r)].push_back(model.Xi(r, c));
  j["xi"] = xi;
  j["lambda"] = model.lambda;
  j["iterations"] = model.iterations_used;
  j["rank_deficient_columns"] = model.rank_deficient_columns;
  return j.dump(2);
}

SparseModel sparse_model_from_json(const std::string& text) {
  const json j = json::parse(text);
  SparseModel model;
  model.library = PolynomialLibrary::make(j["library"]["dim"].get<int>(), j["library"]["degree"].get<int>());
  const auto terms = j["terms"].get<std::vector<std::vector<int>>>();
  if (terms != model.library.terms) throw std::runtime_error("sparse_model_from_json: term list mismatch");
  const auto xi = j["xi"].get<std::vector<std::vector<double>>>();
  const Eigen::Index p = static_cast<Eigen::Index>(xi.size());
  if (p != model.library.size()) throw std::runtime_error("sparse_model_from_json: coefficient shape mismatch");
  const Eigen::Index n = p > 0 ? static_cast<Eigen::Index>(xi[0].size()) : 0;
  model.Xi.resize(p, n);
  for (Eigen::Index r = 0; r < p; ++r)
    for (Eigen::Index c = 0; c < n; ++c) model.Xi(r, c) = xi[static_cast<size_t>(r)][static_cast<size_t>(c)];
  model.lambda = j["lambda"].get<double>();
  model.iterations_used = j["iterations"].get<int>();
  model.rank_deficient_columns = j["rank_deficient_columns"].get<std::vector<int>>();
  return model;
}

}  // namespace msd
