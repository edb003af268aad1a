#include "msd/sampling.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msd/rng.hpp"

using nlohmann::json;

namespace msd {

std::vector<Eigen::Index> uniform_schedule(long fine_rate, long target_rate, double duration_periods) {
  if (fine_rate < 1 || target_rate < 1) throw std::invalid_argument("uniform_schedule: rates must be positive");
  if (fine_rate % target_rate != 0)
    throw std::invalid_argument("uniform_schedule: target_rate must divide fine_rate");
  if (duration_periods <= 0.0) throw std::invalid_argument("uniform_schedule: duration must be positive");
  const long stride = fine_rate / target_rate;
  const double limit = static_cast<double>(fine_rate) * duration_periods;
  std::vector<Eigen::Index> idx;
  for (long k = 0;; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(stride);
    if (pos >= limit) break;
    idx.push_back(static_cast<Eigen::Index>(k * stride));
  }
  return idx;
}

BurstSchedule jittered_burst_schedule(double duration, double fine_dt, int burst_size, int n_bursts,
                                      std::uint64_t seed) {
  if (burst_size < 3) throw std::invalid_argument("jittered_burst_schedule: burst_size must be at least 3");
  if (n_bursts < 1) throw std::invalid_argument("jittered_burst_schedule: n_bursts must be positive");
  if (fine_dt <= 0.0 || duration <= 0.0) throw std::invalid_argument("jittered_burst_schedule: bad duration or dt");

  const Eigen::Index total_steps = static_cast<Eigen::Index>(std::floor(duration / fine_dt));
  const Eigen::Index slot = total_steps / n_bursts;
  if (slot < burst_size)
    throw std::invalid_argument("jittered_burst_schedule: bursts do not fit in the duration");
  const Eigen::Index slack = slot - burst_size;

  Rng rng(seed);
  BurstSchedule schedule;
  schedule.burst_size = burst_size;
  schedule.n_bursts = n_bursts;
  schedule.fine_dt = fine_dt;
  schedule.span = duration;
  schedule.seed = seed;
  schedule.start_indices.reserve(static_cast<size_t>(n_bursts));
  for (int i = 0; i < n_bursts; ++i) {
    const Eigen::Index offset = slack > 0 ? rng.uniform_int(0, slack) : 0;
    schedule.start_indices.push_back(static_cast<Eigen::Index>(i) * slot + offset);
  }
  return schedule;
}

BurstSchedule poisson_burst_schedule(double duration, double fine_dt, int burst_size, double target_rate,
                                     std::uint64_t seed) {
  if (burst_size < 3) throw std::invalid_argument("poisson_burst_schedule: burst_size must be at least 3");
  if (fine_dt <= 0.0 || duration <= 0.0) throw std::invalid_argument("poisson_burst_schedule: bad duration or dt");
  if (target_rate * duration < static_cast<double>(burst_size))
    throw std::invalid_argument("poisson_burst_schedule: budget below one burst");

  const double intensity = target_rate / static_cast<double>(burst_size);  // bursts per unit time
  const Eigen::Index total_steps = static_cast<Eigen::Index>(std::floor(duration / fine_dt));
  const Eigen::Index last_start = total_steps - burst_size;
  if (last_start < 0) throw std::invalid_argument("poisson_burst_schedule: duration shorter than one burst");

  Rng rng(seed);
  BurstSchedule schedule;
  schedule.burst_size = burst_size;
  schedule.fine_dt = fine_dt;
  schedule.span = duration;
  schedule.seed = seed;
  double t = 0.0;
  Eigen::Index prev_end = -1;
  while (true) {
    t += rng.exponential(intensity);
    if (t >= duration) break;
    const Eigen::Index start = static_cast<Eigen::Index>(std::floor(t / fine_dt));
    if (start > last_start) break;
    if (start < prev_end) continue;  // overlapping arrival dropped
    schedule.start_indices.push_back(start);
    prev_end = start + burst_size;
  }
  schedule.n_bursts = static_cast<int>(schedule.start_indices.size());
  return schedule;
}

TrainingData extract_training_pairs(const TimeSeries& series, const BurstSchedule& schedule) {
  if (schedule.burst_size < 3) throw std::invalid_argument("extract_training_pairs: burst_size below 3 leaves no interior rows");
  const Eigen::Index rows_per_burst = schedule.burst_size - 2;
  const Eigen::Index n = series.dim();
  const Eigen::Index total = rows_per_burst * schedule.n_bursts;
  for (const Eigen::Index s : schedule.start_indices)
    if (s < 0 || s + schedule.burst_size > series.rows())
      throw std::invalid_argument("extract_training_pairs: burst outside the series");
  TrainingData out;
  out.states.resize(total, n);
  out.derivs.resize(total, n);
  const double inv2dt = 1.0 / (2.0 * series.dt);
#pragma omp parallel for schedule(static) if (schedule.n_bursts > 16)
  for (int b = 0; b < schedule.n_bursts; ++b) {
    const Eigen::Index s = schedule.start_indices[static_cast<size_t>(b)];
    for (Eigen::Index j = 1; j + 1 < schedule.burst_size; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(b) * rows_per_burst + (j - 1);
      out.states.row(row) = series.values.row(s + j);
      out.derivs.row(row) = (series.values.row(s + j + 1) - series.values.row(s + j - 1)) * inv2dt;
    }
  }
  return out;
}

TrainingData extract_training_pairs(const TimeSeries& series, const std::vector<Eigen::Index>& indices) {
  const Eigen::Index m = static_cast<Eigen::Index>(indices.size());
  if (m < 3) throw std::invalid_argument("extract_training_pairs: need at least 3 indices");
  const Eigen::Index stride = indices[1] - indices[0];
  for (Eigen::Index k = 1; k < m; ++k)
    if (indices[static_cast<size_t>(k)] - indices[static_cast<size_t>(k - 1)] != stride)
      throw std::invalid_argument("extract_training_pairs: index list must be uniformly strided");
  if (indices.front() < 0 || indices.back() >= series.rows())
    throw std::invalid_argument("extract_training_pairs: indices outside the series");

  TimeSeries sub;
  sub.t0 = series.time(indices.front());
  sub.dt = series.dt * static_cast<double>(stride);
  sub.values.resize(m, series.dim());
  for (Eigen::Index k = 0; k < m; ++k) sub.values.row(k) = series.values.row(indices[static_cast<size_t>(k)]);
  return center_difference(sub);
}

std::string to_json_string(const BurstSchedule& schedule) {
  json j;
  j["burst_size"] = schedule.burst_size;
  j["n_bursts"] = schedule.n_bursts;
  j["starts"] = schedule.start_indices;
  j["fine_dt"] = schedule.fine_dt;
  j["span"] = schedule.span;
  j["seed"] = schedule.seed;
  return j.dump(2);
}

BurstSchedule burst_schedule_from_json(const std::string& text) {
  const json j = json::parse(text);
  BurstSchedule schedule;
  schedule.burst_size = j["burst_size"].get<int>();
  schedule.n_bursts = j["n_bursts"].get<int>();
  schedule.start_indices = j["starts"].get<std::vector<Eigen::Index>>();
  schedule.fine_dt = j["fine_dt"].get<double>();
  schedule.span = j["span"].get<double>();
  schedule.seed = j["seed"].get<std::uint64_t>();
  return schedule;
}

}  // namespace msd
