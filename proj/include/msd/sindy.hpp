#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "msd/dynamics.hpp"
#include "msd/library.hpp"
#include "msd/timeseries.hpp"

namespace msd {

/// Snapshot/derivative training pair with rows aligned.
struct TrainingData {
  Eigen::MatrixXd states;  // m x n
  Eigen::MatrixXd derivs;  // m x n
};

/// Result of the sequentially thresholded least-squares regression.
struct SparseModel {
  PolynomialLibrary library;
  Eigen::MatrixXd Xi;  // p x n; column j holds the coefficients of xj'
  double lambda = 0.0;
  int iterations_used = 0;
  std::vector<int> rank_deficient_columns;  // columns that fell back to the min-norm solution

  BoolArray support() const { return Xi.array().abs() > 0.0; }
};

/// Second-order center differences on the uniform grid; the two boundary
/// rows are dropped from both the states and the derivatives.
TrainingData center_difference(const TimeSeries& series);

/// Sequentially thresholded least squares for Xdot = Theta * Xi.
/// Each iteration zeroes coefficients below lambda in magnitude and refits
/// each column on its surviving terms; stops when the support is stable or
/// after max_iter iterations. Rank-deficient restricted subproblems fall
/// back to the minimum-norm solution and are reported in the model.
SparseModel stlsq(const PolynomialLibrary& lib, const Eigen::MatrixXd& Theta, const Eigen::MatrixXd& Xdot,
                  double lambda, int max_iter = 10);

/// True iff the nonzero pattern of Xi equals `truth` exactly.
bool support_matches(const SparseModel& model, const BoolArray& truth);

/// center_difference -> evaluate_library -> stlsq.
SparseModel fit_sindy(const TimeSeries& series, double lambda, int degree = 3);

/// Human-readable equations, one line per state derivative.
std::string equation_report(const SparseModel& model);

std::string to_json_string(const SparseModel& model);
SparseModel sparse_model_from_json(const std::string& text);

}  // namespace msd
