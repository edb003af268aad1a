#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msd/sindy.hpp"
#include "msd/timeseries.hpp"

namespace msd {

/// A set of short, non-overlapping, densely sampled windows on a fine grid.
struct BurstSchedule {
  int burst_size = 8;
  int n_bursts = 0;
  std::vector<Eigen::Index> start_indices;  // sorted fine-grid indices
  double fine_dt = 0.0;
  double span = 0.0;  // duration covered, time units
  std::uint64_t seed = 0;

  Eigen::Index total_samples() const { return static_cast<Eigen::Index>(n_bursts) * burst_size; }
};

/// Every (fine_rate/target_rate)-th fine index over `duration` periods,
/// half-open: indices k*stride with k*stride < fine_rate*duration.
/// target_rate must divide fine_rate.
std::vector<Eigen::Index> uniform_schedule(long fine_rate, long target_rate, double duration_periods);

/// Evenly spaced bursts, each shifted by a uniform offset over the maximal
/// slack that keeps bursts inside their own slot (hence non-overlapping).
BurstSchedule jittered_burst_schedule(double duration, double fine_dt, int burst_size, int n_bursts,
                                      std::uint64_t seed);

/// Burst starts as Poisson arrivals with intensity target_rate/burst_size per
/// unit time; an arrival overlapping the previous burst is dropped.
BurstSchedule poisson_burst_schedule(double duration, double fine_dt, int burst_size, double target_rate,
                                     std::uint64_t seed);

/// (X, Xdot) rows for SINDy. Burst schedules difference within each burst at
/// the fine dt (burst_size - 2 rows per burst); a uniform index list
/// differences on the decimated grid.
TrainingData extract_training_pairs(const TimeSeries& series, const BurstSchedule& schedule);
TrainingData extract_training_pairs(const TimeSeries& series, const std::vector<Eigen::Index>& indices);

std::string to_json_string(const BurstSchedule& schedule);
BurstSchedule burst_schedule_from_json(const std::string& text);

}  // namespace msd
