#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "msd/dynamics.hpp"
#include "msd/multiscale.hpp"
#include "msd/sampling.hpp"

namespace msd {

struct TrialRecord {
  bool success = false;
  bool failed = false;  // infrastructure failure; metrics invalid
  double duration = std::numeric_limits<double>::quiet_NaN();  // periods
  double rmse = std::numeric_limits<double>::quiet_NaN();
  long long numel = -1;
  long long samples = -1;
};

struct SweepCell {
  std::map<std::string, double> coords;
  std::vector<TrialRecord> trials;
};

/// One experiment's grid of parameter cells, n_trials records per cell, plus
/// derived per-experiment summary values. Serializes deterministically.
struct SweepResult {
  std::string experiment;
  std::map<std::string, std::vector<double>> axes;
  std::vector<SweepCell> cells;
  int n_trials = 0;
  std::uint64_t seed = 0;
  nlohmann::json summary;
};

/// Root-mean-square error; the normalized variant divides by the RMS of truth.
double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth, bool normalize);

struct DataRequirementOptions {
  double lambda = 0.1;
  int degree = 3;
  double max_duration = 2.0;       // periods
  double resolution = 0.05;        // periods, bisection lattice
  double phase_span = 10.0;        // periods over which trial phases spread
  double transient = 10.0;         // periods
};

/// Minimal identifying duration per sampling rate, bisected on a 0.05-period
/// lattice over n_trials random attractor phases. Summary holds per-rate
/// mean/min/max durations and any monotonicity anomalies.
SweepResult data_requirement_sweep(const SystemSpec& spec, const std::vector<long>& rates, int n_trials,
                                   std::uint64_t seed, const DataRequirementOptions& opts = {});

struct BurstSweepOptions {
  long fine_rate = 2048;           // samples per fast period
  double duration_slow = 2.0;      // slow periods covered by each schedule
  int burst_size = 8;
  double lambda = 0.1;
  int degree = 3;
  double phase_span_slow = 2.0;    // slow periods of phase spread
  double transient_slow = 10.0;    // slow periods
  std::vector<long> uniform_rates  // samples per slow period
      {16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192};
  std::vector<int> burst_counts{2, 4, 8, 16, 32, 64, 128, 256, 512};
};

/// Minimal total sample count for 100% identification over n_trials, per
/// frequency ratio, for uniform decimation vs jittered bursts. Summary holds
/// samples_required per (F, method).
SweepResult burst_vs_uniform_sweep(const std::string& kind, const std::vector<double>& F_grid, int n_trials,
                                   std::uint64_t seed, const BurstSweepOptions& opts = {});

struct SpacingSweepOptions {
  int q = 128;
  int rank = 100;
  long fine_rate = 127;            // samples per fast period
  double train_slow = 5.0;         // slow periods
  double test_slow = 2.0;
  double mu = 5.0;
};

/// Size/error trade-off of three embeddings (large-dt, small-dt, spaced) on
/// the summed two-Van-der-Pol observable across frequency ratios.
SweepResult spacing_tradeoff_sweep(const std::vector<double>& F_grid, std::uint64_t seed,
                                   const SpacingSweepOptions& opts = {});

struct RankDelayOptions {
  int q = 128;
  double train_periods = 5.0;
  double test_periods = 2.0;
  int spectrum_terms = 20;
  int observable = 0;
};

/// Training/test reconstruction error over model ranks plus normalized
/// singular-value spectra over delay counts, for one system's observable.
SweepResult rank_delay_study(const SystemSpec& spec, const std::vector<int>& ranks,
                             const std::vector<int>& delay_counts, const RankDelayOptions& opts = {});

void write_sweep_json(const SweepResult& result, const std::string& path);
void write_sweep_csv(const SweepResult& result, const std::string& path);
std::string to_json_string(const SweepResult& result);
SweepResult sweep_result_from_json(const std::string& text);

}  // namespace msd
