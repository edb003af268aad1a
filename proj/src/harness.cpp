#include "msd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "msd/rng.hpp"
#include "msd/sindy.hpp"

using nlohmann::json;

namespace msd {

double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth, bool normalize) {
  if (pred.size() != truth.size()) throw std::invalid_argument("rmse: length mismatch");
  if (pred.size() == 0) throw std::invalid_argument("rmse: empty input");
  const double err = std::sqrt((pred - truth).squaredNorm() / static_cast<double>(pred.size()));
  if (!normalize) return err;
  const double ref = std::sqrt(truth.squaredNorm() / static_cast<double>(truth.size()));
  if (ref == 0.0) throw std::invalid_argument("rmse: cannot normalize against an all-zero reference");
  return err / ref;
}

namespace {

bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

SweepResult data_requirement_sweep(const SystemSpec& spec, const std::vector<long>& rates, int n_trials,
                                   std::uint64_t seed, const DataRequirementOptions& opts) {
  for (long r : rates)
    if (!is_power_of_two(r) || r < 32 || r > (1L << 18))
      throw std::invalid_argument("data_requirement_sweep: rates must be powers of two in [2^5, 2^18]");
  if (n_trials < 1) throw std::invalid_argument("data_requirement_sweep: n_trials must be positive");

  SweepResult result;
  result.experiment = "data-requirement";
  result.axes["rate"] = std::vector<double>(rates.begin(), rates.end());
  result.n_trials = n_trials;
  result.seed = seed;

  const auto lib = PolynomialLibrary::make(spec.dim, opts.degree);
  const int lattice = static_cast<int>(std::llround(opts.max_duration / opts.resolution));
  std::atomic<int> anomalies{0};
  json per_rate = json::array();

  for (size_t ci = 0; ci < rates.size(); ++ci) {
    const long rate = rates[ci];
    const TimeSeries sim =
        simulate(spec, spec.x0_default, static_cast<double>(rate), opts.max_duration + opts.phase_span, opts.transient);
    const Eigen::Index max_window = static_cast<Eigen::Index>(std::llround(opts.max_duration * static_cast<double>(rate)));
    const Eigen::Index phase_rows = sim.rows() - max_window - 1;
    if (phase_rows < 1) throw std::runtime_error("data_requirement_sweep: phase span too small");

    SweepCell cell;
    cell.coords["rate"] = static_cast<double>(rate);
    cell.trials.resize(static_cast<size_t>(n_trials));

#pragma omp parallel for schedule(dynamic)
    for (int trial = 0; trial < n_trials; ++trial) {
      Rng rng(Rng::mix(seed, ci * 100003u + static_cast<std::uint64_t>(trial)));
      const Eigen::Index start = rng.uniform_int(0, phase_rows - 1);
      auto identified = [&](int k) {
        const Eigen::Index rows =
            static_cast<Eigen::Index>(std::llround(static_cast<double>(k) * opts.resolution * static_cast<double>(rate)));
        if (rows < 3) return false;
        const auto data = center_difference(sim.segment(start, rows));
        const Eigen::MatrixXd Theta = evaluate_library(lib, data.states);
        const SparseModel model = stlsq(lib, Theta, data.derivs, opts.lambda);
        return support_matches(model, spec.true_support);
      };
      TrialRecord rec;
      try {
        if (identified(lattice)) {
          int lo = 1, hi = lattice;
          while (lo < hi) {
            const int mid = lo + (hi - lo) / 2;
            if (identified(mid))
              hi = mid;
            else
              lo = mid + 1;
          }
          rec.success = true;
          rec.duration = static_cast<double>(lo) * opts.resolution;
          rec.samples = std::llround(rec.duration * static_cast<double>(rate));
          if (lo < lattice && !identified(lo + 1)) anomalies.fetch_add(1);
        }
      } catch (const std::exception&) {
        rec = TrialRecord{};
        rec.failed = true;
      }
      cell.trials[static_cast<size_t>(trial)] = rec;
    }

    double sum = 0.0, lo = 1e300, hi = 0.0;
    int ok = 0;
    for (const auto& t : cell.trials) {
      if (!t.success) continue;
      ++ok;
      sum += t.duration;
      lo = std::min(lo, t.duration);
      hi = std::max(hi, t.duration);
    }
    json entry;
    entry["rate"] = rate;
    entry["n_identified"] = ok;
    entry["mean_duration"] = ok > 0 ? sum / ok : -1.0;
    entry["min_duration"] = ok > 0 ? lo : -1.0;
    entry["max_duration"] = ok > 0 ? hi : -1.0;
    per_rate.push_back(entry);
    result.cells.push_back(std::move(cell));
  }
  result.summary["per_rate"] = per_rate;
  result.summary["anomalies"] = anomalies.load();
  return result;
}

SweepResult burst_vs_uniform_sweep(const std::string& kind, const std::vector<double>& F_grid, int n_trials,
                                   std::uint64_t seed, const BurstSweepOptions& opts) {
  if (n_trials < 1) throw std::invalid_argument("burst_vs_uniform_sweep: n_trials must be positive");
  for (size_t i = 1; i < F_grid.size(); ++i)
    if (F_grid[i] <= F_grid[i - 1]) throw std::invalid_argument("burst_vs_uniform_sweep: F grid must increase");

  SweepResult result;
  result.experiment = "burst-vs-uniform";
  result.axes["F"] = F_grid;
  result.axes["method"] = {0.0, 1.0};  // 0 = uniform, 1 = burst
  result.n_trials = n_trials;
  result.seed = seed;
  json required = json::array();

  for (size_t fi = 0; fi < F_grid.size(); ++fi) {
    const double F = F_grid[fi];
    const CoupledSpec coupled = make_coupled(kind, F);
    const int n_fast = coupled.fast.dim;
    const double T_slow = coupled.slow_period();
    const long fine_per_slow = static_cast<long>(std::llround(static_cast<double>(opts.fine_rate) * F));

    const TimeSeries sim = simulate(coupled, coupled.combined.x0_default, static_cast<double>(opts.fine_rate),
                                    (opts.duration_slow + opts.phase_span_slow) * F, opts.transient_slow * F);
    const Eigen::Index window_rows =
        static_cast<Eigen::Index>(std::llround(opts.duration_slow * static_cast<double>(fine_per_slow)));
    const Eigen::Index phase_rows = sim.rows() - window_rows - 2;
    const auto lib = PolynomialLibrary::make(coupled.combined.dim, opts.degree);

    // candidate budgets per method, skipping infeasible ones
    std::vector<long> uniform_rates;
    for (long r : opts.uniform_rates)
      if (fine_per_slow % r == 0 && r <= fine_per_slow) uniform_rates.push_back(r);
    std::vector<int> burst_counts;
    for (int k : opts.burst_counts)
      if (static_cast<Eigen::Index>(k) * opts.burst_size <= window_rows) burst_counts.push_back(k);

    struct Task {
      int method;
      size_t budget_idx;
      long samples_planned;
    };
    std::vector<Task> tasks;
    for (size_t bi = 0; bi < uniform_rates.size(); ++bi)
      tasks.push_back({0, bi, static_cast<long>(uniform_schedule(fine_per_slow, uniform_rates[bi], opts.duration_slow).size())});
    for (size_t bi = 0; bi < burst_counts.size(); ++bi)
      tasks.push_back({1, bi, static_cast<long>(burst_counts[bi]) * opts.burst_size});

    std::vector<SweepCell> cells(tasks.size());
    for (size_t ti = 0; ti < tasks.size(); ++ti) {
      cells[ti].coords["F"] = F;
      cells[ti].coords["method"] = static_cast<double>(tasks[ti].method);
      cells[ti].coords["samples"] = static_cast<double>(tasks[ti].samples_planned);
      cells[ti].trials.resize(static_cast<size_t>(n_trials));
    }

#pragma omp parallel for collapse(2) schedule(dynamic)
    for (size_t ti = 0; ti < tasks.size(); ++ti) {
      for (int trial = 0; trial < n_trials; ++trial) {
        const Task& task = tasks[ti];
        Rng rng(Rng::mix(seed, (fi * 1000003u + static_cast<std::uint64_t>(trial)) * 2u + 1u));
        const Eigen::Index start = rng.uniform_int(0, phase_rows - 1);
        TrialRecord rec;
        try {
          TrainingData data;
          if (task.method == 0) {
            auto indices = uniform_schedule(fine_per_slow, uniform_rates[task.budget_idx], opts.duration_slow);
            for (auto& ix : indices) ix += start;
            rec.samples = static_cast<long long>(indices.size());
            data = extract_training_pairs(sim, indices);
          } else {
            BurstSchedule schedule =
                jittered_burst_schedule(opts.duration_slow * T_slow, sim.dt, opts.burst_size,
                                        burst_counts[task.budget_idx],
                                        Rng::mix(seed, (fi * 4099u + static_cast<std::uint64_t>(trial)) * 31u + task.budget_idx));
            for (auto& ix : schedule.start_indices) ix += start;
            rec.samples = schedule.total_samples();
            data = extract_training_pairs(sim, schedule);
          }
          // regress against the paper's written form tau*x' = f + coupling, so
          // the target coefficients stay O(1) across frequency ratios
          data.derivs.leftCols(n_fast) *= coupled.tau_fast;
          data.derivs.rightCols(coupled.slow.dim) *= coupled.tau_slow;
          const Eigen::MatrixXd Theta = evaluate_library(lib, data.states);
          const SparseModel model = stlsq(lib, Theta, data.derivs, opts.lambda);
          rec.success = support_matches(model, coupled.combined.true_support);
        } catch (const std::exception&) {
          rec.failed = true;
        }
        cells[ti].trials[static_cast<size_t>(trial)] = rec;
      }
    }

    long long best_uniform = -1, best_burst = -1;
    for (size_t ti = 0; ti < tasks.size(); ++ti) {
      bool all_ok = true;
      for (const auto& t : cells[ti].trials) all_ok = all_ok && t.success;
      if (!all_ok) continue;
      long long& best = tasks[ti].method == 0 ? best_uniform : best_burst;
      if (best < 0 || tasks[ti].samples_planned < best) best = tasks[ti].samples_planned;
    }
    json entry;
    entry["F"] = F;
    entry["uniform_samples"] = best_uniform;
    entry["burst_samples"] = best_burst;
    required.push_back(entry);
    for (auto& cell : cells) result.cells.push_back(std::move(cell));
  }
  result.summary["required"] = required;
  return result;
}

namespace {

double test_window_rmse(const HavokModel& model, const TimeSeries& truth_series, Eigen::Index start,
                        Eigen::Index count, Eigen::Index stride) {
  Eigen::VectorXd times(count), truth(count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const Eigen::Index row = start + k * stride;
    times[k] = truth_series.time(row);
    truth[k] = truth_series.values(row, 0);
  }
  const Eigen::MatrixXd pred = predict_grid(model, times);
  return rmse(pred.col(0), truth, true);
}

}  // namespace

SweepResult spacing_tradeoff_sweep(const std::vector<double>& F_grid, std::uint64_t seed,
                                   const SpacingSweepOptions& opts) {
  SweepResult result;
  result.experiment = "spacing-tradeoff";
  result.axes["F"] = F_grid;
  result.axes["model"] = {0.0, 1.0, 2.0};  // 0 large-dt, 1 small-dt, 2 spaced
  result.n_trials = 1;
  result.seed = seed;
  json per_F = json::array();

  for (size_t fi = 0; fi < F_grid.size(); ++fi) {
    const double F = F_grid[fi];
    const Eigen::Index stride = static_cast<Eigen::Index>(std::llround(F));
    const TwoScaleObservable obs = make_two_scale_vdp(F, static_cast<double>(opts.fine_rate),
                                                      opts.train_slow + opts.test_slow, opts.mu, Rng::mix(seed, fi));
    const double dt = obs.summed.dt;
    const Eigen::Index m_train =
        static_cast<Eigen::Index>(std::llround(opts.train_slow * obs.T_slow / dt));
    const TimeSeries train = obs.summed.segment(0, m_train);
    const Eigen::Index n_test =
        static_cast<Eigen::Index>(std::llround(opts.test_slow * obs.T_slow / (dt * static_cast<double>(stride)))) - 1;

    const Eigen::Index p_target = (m_train / stride) - 2 - (opts.q - 1) + 1;
    json entry;
    entry["F"] = F;
    const char* names[3] = {"large_dt", "small_dt", "spaced"};
    for (int mi = 0; mi < 3; ++mi) {
      SweepCell cell;
      cell.coords["F"] = F;
      cell.coords["model"] = static_cast<double>(mi);
      TrialRecord rec;
      try {
        HankelPair pair;
        if (mi == 0) {
          const TimeSeries coarse = train.decimate(stride);
          pair = build_hankel(coarse, HankelConfig{opts.q, 1, 1, coarse.dt}, p_target);
        } else if (mi == 1) {
          const int q_big = static_cast<int>(opts.q - 1) * static_cast<int>(stride) + 1;
          pair = build_hankel(train, HankelConfig{q_big, 1, 1, dt});
        } else {
          const HankelConfig cfg =
              spaced_config(obs.T_slow, opts.q, dt, static_cast<Eigen::Index>(opts.q) * p_target, opts.train_slow * obs.T_slow);
          pair = build_hankel(train, cfg, p_target);
        }
        rec.numel = pair.numel();
        const HavokModel model = stabilize(fit_dmd(pair, opts.rank));
        rec.rmse = test_window_rmse(model, obs.summed, m_train, n_test, stride);
        rec.success = true;
        entry[names[mi]] = {{"numel", rec.numel}, {"rmse", rec.rmse}};
      } catch (const std::exception& err) {
        rec.failed = true;
        entry[names[mi]] = {{"numel", rec.numel}, {"error", err.what()}};
      }
      cell.trials.push_back(rec);
      result.cells.push_back(std::move(cell));
    }
    per_F.push_back(entry);
  }
  result.summary["per_F"] = per_F;
  return result;
}

SweepResult rank_delay_study(const SystemSpec& spec, const std::vector<int>& ranks,
                             const std::vector<int>& delay_counts, const RankDelayOptions& opts) {
  SweepResult result;
  result.experiment = "rank-delay";
  result.axes["rank"] = std::vector<double>(ranks.begin(), ranks.end());
  result.axes["delays"] = std::vector<double>(delay_counts.begin(), delay_counts.end());
  result.n_trials = 1;
  result.seed = 0;

  const double dt = spec.period / static_cast<double>(opts.q - 1);
  const double rate = static_cast<double>(opts.q - 1);
  const TimeSeries sim = simulate(spec, spec.x0_default, rate, opts.train_periods + opts.test_periods);
  const TimeSeries observable = sim.channel(opts.observable);
  const Eigen::Index m_train = static_cast<Eigen::Index>(std::llround(opts.train_periods * rate));
  const TimeSeries train = observable.segment(0, m_train);
  const Eigen::Index n_test = observable.rows() - m_train - 1;

  const HankelPair pair = build_hankel(train, HankelConfig{opts.q, 1, 1, dt});
  json rank_entries = json::array();
  for (int r : ranks) {
    SweepCell cell;
    cell.coords["rank"] = static_cast<double>(r);
    TrialRecord rec;
    const HavokModel model = stabilize(fit_dmd(pair, r));
    const double train_err = test_window_rmse(model, observable, 0, m_train, 1);
    rec.rmse = test_window_rmse(model, observable, m_train, n_test, 1);
    rec.success = true;
    cell.trials.push_back(rec);
    result.cells.push_back(std::move(cell));
    rank_entries.push_back({{"rank", r}, {"train_rmse", train_err}, {"test_rmse", rec.rmse}});
  }

  json delay_entries = json::array();
  for (int q : delay_counts) {
    SweepCell cell;
    cell.coords["delays"] = static_cast<double>(q);
    TrialRecord rec;
    const HankelPair dq = build_hankel(train, HankelConfig{q, 1, 1, dt});
    const int k = std::min<int>(opts.spectrum_terms, std::min(dq.H.rows(), dq.H.cols()));
    const SvdReport report = svd_mode_report(dq, k);
    rec.rmse = report.sigma_normalized[0];  // leading energy fraction
    rec.success = true;
    cell.trials.push_back(rec);
    result.cells.push_back(std::move(cell));
    json entry;
    entry["delays"] = q;
    entry["sigma_normalized"] = std::vector<double>(report.sigma_normalized.data(),
                                                    report.sigma_normalized.data() + report.sigma_normalized.size());
    std::vector<std::vector<double>> mode_shapes;
    for (Eigen::Index c = 0; c < std::min<Eigen::Index>(3, report.leading_modes.cols()); ++c)
      mode_shapes.emplace_back(report.leading_modes.col(c).data(),
                               report.leading_modes.col(c).data() + report.leading_modes.rows());
    entry["leading_modes"] = mode_shapes;
    delay_entries.push_back(entry);
  }
  result.summary["ranks"] = rank_entries;
  result.summary["delays"] = delay_entries;
  return result;
}

namespace {

json cell_to_json(const SweepCell& cell) {
  json trials = json::array();
  for (const auto& t : cell.trials) {
    json r;
    r["success"] = t.success;
    r["failed"] = t.failed;
    if (std::isfinite(t.duration)) r["duration"] = t.duration;
    if (std::isfinite(t.rmse)) r["rmse"] = t.rmse;
    if (t.numel >= 0) r["numel"] = t.numel;
    if (t.samples >= 0) r["samples"] = t.samples;
    trials.push_back(r);
  }
  return json{{"coords", cell.coords}, {"trials", trials}};
}

SweepCell cell_from_json(const json& j) {
  SweepCell cell;
  cell.coords = j["coords"].get<std::map<std::string, double>>();
  for (const auto& t : j["trials"]) {
    TrialRecord rec;
    rec.success = t["success"].get<bool>();
    rec.failed = t["failed"].get<bool>();
    if (t.contains("duration")) rec.duration = t["duration"].get<double>();
    if (t.contains("rmse")) rec.rmse = t["rmse"].get<double>();
    if (t.contains("numel")) rec.numel = t["numel"].get<long long>();
    if (t.contains("samples")) rec.samples = t["samples"].get<long long>();
    cell.trials.push_back(rec);
  }
  return cell;
}

}  // namespace

std::string to_json_string(const SweepResult& result) {
  json j;
  j["experiment"] = result.experiment;
  j["axes"] = result.axes;
  j["n_trials"] = result.n_trials;
  j["seed"] = result.seed;
  j["summary"] = result.summary;
  json cells = json::array();
  for (const auto& cell : result.cells) cells.push_back(cell_to_json(cell));
  j["cells"] = cells;
  return j.dump(2);
}

SweepResult sweep_result_from_json(const std::string& text) {
  const json j = json::parse(text);
  SweepResult result;
  result.experiment = j["experiment"].get<std::string>();
  result.axes = j["axes"].get<std::map<std::string, std::vector<double>>>();
  result.n_trials = j["n_trials"].get<int>();
  result.seed = j["seed"].get<std::uint64_t>();
  result.summary = j["summary"];
  for (const auto& c : j["cells"]) result.cells.push_back(cell_from_json(c));
  return result;
}

void write_sweep_json(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_json_string(result) << "\n";
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  // union of coordinate keys, sorted for a stable header
  std::map<std::string, bool> keys;
  for (const auto& cell : result.cells)
    for (const auto& [k, v] : cell.coords) keys[k] = true;
  out << "experiment";
  for (const auto& [k, v] : keys) out << "," << k;
  out << ",trial,success,failed,duration,rmse,numel,samples\n";
  for (const auto& cell : result.cells) {
    for (size_t t = 0; t < cell.trials.size(); ++t) {
      const auto& rec = cell.trials[t];
      out << result.experiment;
      for (const auto& [k, v] : keys) {
        out << ",";
        const auto it = cell.coords.find(k);
        if (it != cell.coords.end()) out << format_double(it->second);
      }
      out << "," << t << "," << (rec.success ? 1 : 0) << "," << (rec.failed ? 1 : 0) << ",";
      if (std::isfinite(rec.duration)) out << format_double(rec.duration);
      out << ",";
      if (std::isfinite(rec.rmse)) out << format_double(rec.rmse);
      out << ",";
      if (rec.numel >= 0) out << rec.numel;
      out << ",";
      if (rec.samples >= 0) out << rec.samples;
      out << "\n";
    }
  }
}

}  // namespace msd
