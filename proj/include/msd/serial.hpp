#pragma once

#include "msd/havok.hpp"
#include "msd/library.hpp"
#include "msd/sampling.hpp"

namespace msd {
namespace serial {

/// Reference implementations of the parallel kernels: plain single-threaded
/// loops with the same arithmetic, used by the tests (exact-equality checks
/// against the OpenMP paths) and by the benchmark.

Eigen::MatrixXd evaluate_library(const PolynomialLibrary& lib, const Eigen::MatrixXd& X);

HankelPair build_hankel(const TimeSeries& series, const HankelConfig& config, Eigen::Index max_cols = -1);

Eigen::MatrixXd predict_grid(const HavokModel& model, const Eigen::VectorXd& times);

TrainingData extract_training_pairs(const TimeSeries& series, const BurstSchedule& schedule);

}  // namespace serial
}  // namespace msd
