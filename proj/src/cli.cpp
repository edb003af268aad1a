#include "msd/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "msd/harness.hpp"
#include "msd/havok.hpp"
#include "msd/multiscale.hpp"
#include "msd/rng.hpp"
#include "msd/sampling.hpp"
#include "msd/sindy.hpp"

using nlohmann::json;

namespace msd {

namespace {

constexpr const char* kVersion = "0.1.0";

const std::map<std::string, std::vector<std::string>> kSystemParams = {
    {"lorenz", {"sigma", "rho", "beta"}},
    {"vanderpol", {"mu"}},
    {"duffing", {"delta", "alpha", "beta"}},
    {"rossler", {"a", "b", "c", "tau"}},
};

SystemSpec system_from_config(const RunConfig& config) {
  const std::string name = config.str("system", "");
  if (name.empty()) throw std::invalid_argument("missing --system");
  const auto it = kSystemParams.find(name);
  if (it == kSystemParams.end()) throw std::invalid_argument("unknown system '" + name + "'");
  std::map<std::string, double> params;
  for (const auto& key : it->second)
    if (config.has(key)) params[key] = config.options.at(key).get<double>();
  return make_system(name, params);
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  return vals;
}

json run_block(const RunConfig& config) {
  return json{{"command", config.command}, {"options", config.options}, {"version", kVersion}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

void write_sidecar(const RunConfig& config, const std::string& data_path) {
  write_text(data_path + ".run.json", run_block(config).dump(2));
}

/// Wrap a module's JSON payload with the run provenance block.
void write_payload(const RunConfig& config, const std::string& path, const std::string& payload) {
  json j = json::parse(payload);
  j["run"] = run_block(config);
  write_text(path, j.dump(2));
}

void require_seed(const RunConfig& config) {
  if (!config.has("seed")) throw std::invalid_argument("--seed is required for stochastic commands");
}

}  // namespace

double RunConfig::num(const std::string& key, double fallback) const {
  return has(key) ? options.at(key).get<double>() : fallback;
}

long RunConfig::integer(const std::string& key, long fallback) const {
  return has(key) ? options.at(key).get<long>() : fallback;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = options.at(key);
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string RunConfig::to_json_string() const {
  return json{{"command", command}, {"options", options}}.dump(2);
}

RunConfig RunConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  RunConfig config;
  config.command = j.at("command").get<std::string>();
  config.options = j.at("options");
  return config;
}

double parse_duration(const std::string& text, double T, double T_slow) {
  if (text.size() > 5 && text.substr(text.size() - 5) == "Tslow") return std::stod(text.substr(0, text.size() - 5)) * T_slow;
  if (text.size() > 1 && text.back() == 'T') return std::stod(text.substr(0, text.size() - 1)) * T;
  return std::stod(text);
}

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  const char* base = std::getenv("MSD_OUT_DIR");
  if (base == nullptr || base[0] == '\0') return path;
  return (std::filesystem::path(base) / path).string();
}

int cmd_simulate(const RunConfig& config) {
  const double rate = config.num("rate", 4096.0);
  const double transient = config.num("transient", 10.0);
  const std::string out = resolve_output_path(config.str("out", "trajectory.csv"));

  TimeSeries series;
  if (config.has("coupled")) {
    const CoupledSpec spec = make_coupled(config.str("coupled", ""), config.num("F", 4.0), config.num("c1", 0.25),
                                          config.num("c2", 0.25));
    const double periods = config.has("periods")
                               ? parse_duration(config.str("periods", "2Tslow"), spec.fast_period(), spec.slow_period()) /
                                     spec.fast_period()
                               : 2.0 * config.num("F", 4.0);
    const Eigen::VectorXd x0 =
        config.has("x0") ? parse_vector(config.str("x0", "")) : spec.combined.x0_default;
    series = simulate(spec, x0, rate, periods, transient);
  } else {
    const SystemSpec spec = system_from_config(config);
    const double periods =
        config.has("periods") ? parse_duration(config.str("periods", "5T"), spec.period, spec.period) / spec.period : 5.0;
    const Eigen::VectorXd x0 = config.has("x0") ? parse_vector(config.str("x0", "")) : spec.x0_default;
    series = simulate(spec, x0, rate, periods, transient);
  }
  write_csv(series, out);
  write_sidecar(config, out);
  std::cerr << "simulate: wrote " << series.rows() << " rows to " << out << "\n";
  return 0;
}

int cmd_sindy(const RunConfig& config) {
  const double lambda = config.num("lambda", 0.1);
  const int degree = static_cast<int>(config.integer("degree", 3));
  const std::string out = resolve_output_path(config.str("out", "model.json"));

  TimeSeries series;
  const SystemSpec* truth = nullptr;
  SystemSpec spec;
  double T = 0.0, T_slow = 0.0;
  if (config.has("input")) {
    series = read_csv(config.str("input", ""));
    T = config.num("period", series.duration());
    T_slow = T;
  } else {
    spec = system_from_config(config);
    truth = &spec;
    T = spec.period;
    T_slow = T;
    const double periods =
        config.has("periods") ? parse_duration(config.str("periods", "1T"), T, T_slow) / T : 1.0;
    series = simulate(spec, spec.x0_default, config.num("rate", 4096.0), periods, config.num("transient", 10.0));
  }

  SparseModel model;
  if (config.has("burst-size") || config.has("bursts")) {
    require_seed(config);
    const int burst_size = static_cast<int>(config.integer("burst-size", 8));
    const int bursts = static_cast<int>(config.integer("bursts", 40));
    const double span = config.has("span") ? parse_duration(config.str("span", "2T"), T, T_slow)
                                           : series.duration();
    const BurstSchedule schedule = jittered_burst_schedule(
        std::min(span, series.duration()), series.dt, burst_size, bursts,
        static_cast<std::uint64_t>(config.integer("seed", 0)));
    const TrainingData data = extract_training_pairs(series, schedule);
    const auto lib = PolynomialLibrary::make(static_cast<int>(series.dim()), degree);
    model = stlsq(lib, evaluate_library(lib, data.states), data.derivs, lambda);
    write_payload(config, resolve_output_path(config.str("schedule-out", out + ".schedule.json")),
                  to_json_string(schedule));
  } else {
    model = fit_sindy(series, lambda, degree);
  }

  write_payload(config, out, to_json_string(model));

  std::ostringstream report;
  report << equation_report(model);
  if (truth != nullptr) {
    const bool match = support_matches(model, truth->true_support);
    report << "support-match: " << (match ? "true" : "false") << "\n";
  }
  const std::string report_path = config.str("report", "");
  if (!report_path.empty()) write_text(resolve_output_path(report_path), report.str());
  std::cerr << report.str();
  return 0;
}

int cmd_havok(const RunConfig& config) {
  const std::string out = resolve_output_path(config.str("out", "havok.json"));
  const int q = static_cast<int>(config.integer("q", 128));
  const int rank = static_cast<int>(config.integer("rank", 24));

  if (config.has("iterative")) {
    const double F = config.num("F", 20.0);
    TimeSeries summed;
    double T_fast = 0.0;
    if (config.has("input")) {
      summed = read_csv(config.str("input", ""));
      if (!config.has("T-fast")) throw std::invalid_argument("--iterative with --input requires --T-fast");
      T_fast = config.num("T-fast", 0.0);
    } else {
      const TwoScaleObservable obs =
          make_two_scale_vdp(F, config.num("rate", 128.0), config.num("slow-periods", 6.0), config.num("mu", 5.0),
                             static_cast<std::uint64_t>(config.integer("seed", 0)));
      summed = obs.summed;
      T_fast = obs.T_fast;
    }
    const TwoScaleModel model = iterative_fit(summed, T_fast, F, rank, rank, q);
    write_payload(config, out, to_json_string(model));
    std::cerr << "havok: iterative two-scale model written to " << out << "\n";
    return 0;
  }

  TimeSeries observable;
  double T = 0.0;
  if (config.has("input")) {
    const TimeSeries series = read_csv(config.str("input", ""));
    observable = series.channel(config.integer("variable", 0));
    T = config.num("period", observable.duration());
  } else {
    const SystemSpec spec = system_from_config(config);
    T = spec.period;
    const double train = config.has("periods") ? parse_duration(config.str("periods", "5T"), T, T) / T : 5.0;
    const double rate = config.num("rate", static_cast<double>(q - 1));
    const TimeSeries series = simulate(spec, spec.x0_default, rate, train, config.num("transient", 10.0));
    observable = series.channel(config.integer("variable", 0));
  }

  HankelConfig cfg;
  cfg.q = q;
  cfg.d = static_cast<int>(config.integer("d", 1));
  cfg.c = static_cast<int>(config.integer("c", 1));
  cfg.dt = observable.dt;
  const HankelPair pair = build_hankel(observable, cfg);
  const HavokModel model = stabilize(fit_dmd(pair, rank));
  write_payload(config, out, to_json_string(model));

  const std::string pred_path = config.str("pred", "");
  if (!pred_path.empty()) {
    const double horizon = config.has("pred-periods") ? config.num("pred-periods", 2.0) : 2.0;
    const Eigen::Index total = observable.rows() + static_cast<Eigen::Index>(std::llround(horizon * T / observable.dt));
    Eigen::VectorXd times(total);
    for (Eigen::Index k = 0; k < total; ++k) times[k] = observable.t0 + static_cast<double>(k) * observable.dt;
    TimeSeries pred;
    pred.t0 = observable.t0;
    pred.dt = observable.dt;
    pred.values = predict_grid(model, times);
    const std::string resolved = resolve_output_path(pred_path);
    write_csv(pred, resolved);
    write_sidecar(config, resolved);
  }
  std::cerr << "havok: rank-" << rank << " model written to " << out << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& config) {
  require_seed(config);
  const std::string experiment = config.str("experiment", "");
  const std::uint64_t seed = static_cast<std::uint64_t>(config.integer("seed", 0));
  const int trials = static_cast<int>(config.integer("trials", 20));
  const std::string outdir = resolve_output_path(config.str("outdir", "."));
  std::filesystem::create_directories(outdir);

  SweepResult result;
  if (experiment == "data-requirement") {
    const SystemSpec spec = system_from_config(config);
    std::vector<long> rates;
    for (double r : parse_list(config.str("rates", "4096"))) rates.push_back(static_cast<long>(r));
    result = data_requirement_sweep(spec, rates, trials, seed);
  } else if (experiment == "burst-vs-uniform") {
    const std::vector<double> F_grid = parse_list(config.str("F", "2,4,8,16"));
    result = burst_vs_uniform_sweep(config.str("kind", "vdp-vdp"), F_grid, trials, seed);
  } else if (experiment == "spacing-tradeoff") {
    const std::vector<double> F_grid = parse_list(config.str("F", "4,8,16"));
    SpacingSweepOptions opts;
    opts.rank = static_cast<int>(config.integer("rank", 100));
    result = spacing_tradeoff_sweep(F_grid, seed, opts);
  } else if (experiment == "rank-delay") {
    const SystemSpec spec = config.has("system") ? system_from_config(config) : make_system("vanderpol");
    std::vector<int> ranks, delays;
    for (double r : parse_list(config.str("ranks", "2,8,32"))) ranks.push_back(static_cast<int>(r));
    for (double d : parse_list(config.str("delays", "8,64"))) delays.push_back(static_cast<int>(d));
    result = rank_delay_study(spec, ranks, delays);
  } else {
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }

  const auto base = std::filesystem::path(outdir) / (result.experiment + ".json");
  json j = json::parse(to_json_string(result));
  j["run"] = run_block(config);
  write_text(base.string(), j.dump(2));
  write_sweep_csv(result, (std::filesystem::path(outdir) / (result.experiment + ".csv")).string());
  std::cerr << "sweep: " << experiment << " written to " << outdir << "\n";
  return 0;
}

int run_command(const RunConfig& config) {
  if (config.command == "simulate") return cmd_simulate(config);
  if (config.command == "sindy") return cmd_sindy(config);
  if (config.command == "havok") return cmd_havok(config);
  if (config.command == "sweep") return cmd_sweep(config);
  throw std::invalid_argument("unknown command '" + config.command + "'");
}

}  // namespace msd
