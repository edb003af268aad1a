#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "msd/cli.hpp"

namespace {

// Options are collected as strings and coerced to numbers when they parse as
// such, so the RunConfig json mirrors exactly what was requested.
void set_option(nlohmann::json& options, const std::string& key, const std::string& value) {
  if (value.empty()) {
    options[key] = true;
    return;
  }
  try {
    size_t pos = 0;
    const double num = std::stod(value, &pos);
    if (pos == value.size()) {
      if (num == static_cast<long long>(num) && value.find_first_of(".eE") == std::string::npos)
        options[key] = static_cast<long long>(num);
      else
        options[key] = num;
      return;
    }
  } catch (...) {
  }
  options[key] = value;
}

struct OptionSpec {
  const char* name;
  const char* help;
  bool flag = false;
};

void add_options(CLI::App* cmd, nlohmann::json& options, const std::vector<OptionSpec>& specs) {
  for (const auto& spec : specs) {
    const std::string key = spec.name;
    if (spec.flag) {
      cmd->add_flag_callback("--" + key, [&options, key]() { options[key] = true; }, spec.help);
    } else {
      cmd->add_option_function<std::string>(
          "--" + key, [&options, key](const std::string& v) { set_option(options, key, v); }, spec.help);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"msd: sparse system identification and delay-embedding models for multiscale dynamics"};
  app.require_subcommand(1);

  msd::RunConfig config;
  std::string config_file;

  auto* sim = app.add_subcommand("simulate", "integrate a benchmark system and write a trajectory CSV");
  add_options(sim, config.options,
              {{"system", "lorenz | rossler | vanderpol | duffing"},
               {"coupled", "coupled kind: vdp-vdp | slowvdp-fastlorenz | fastvdp-slowlorenz"},
               {"F", "frequency ratio for coupled systems"},
               {"c1", "fast<-slow coupling strength"},
               {"c2", "slow<-fast coupling strength"},
               {"rate", "samples per period"},
               {"periods", "duration (number, or 2T / 2Tslow)"},
               {"transient", "periods to discard"},
               {"x0", "initial state, comma separated"},
               {"sigma", "lorenz sigma"}, {"rho", "lorenz rho"}, {"beta", "lorenz/duffing beta"},
               {"mu", "van der pol mu"}, {"delta", "duffing delta"}, {"alpha", "duffing alpha"},
               {"a", "rossler a"}, {"b", "rossler b"}, {"c", "rossler c"}, {"tau", "rossler tau"},
               {"seed", "run seed (recorded)"},
               {"out", "output CSV path"}});

  auto* sindy = app.add_subcommand("sindy", "fit sparse governing equations from a trajectory");
  add_options(sindy, config.options,
              {{"input", "trajectory CSV (otherwise simulate --system)"},
               {"system", "benchmark system to simulate"},
               {"rate", "samples per period"},
               {"periods", "training duration (number, or 1T)"},
               {"transient", "periods to discard"},
               {"lambda", "coefficient threshold"},
               {"degree", "library polynomial degree"},
               {"burst-size", "samples per burst (enables burst sampling)"},
               {"bursts", "number of bursts"},
               {"span", "burst schedule span (number, or 2T / 2Tslow)"},
               {"seed", "schedule seed (required with bursts)"},
               {"period", "period of an --input series"},
               {"sigma", "lorenz sigma"}, {"rho", "lorenz rho"}, {"beta", "lorenz/duffing beta"},
               {"mu", "van der pol mu"}, {"delta", "duffing delta"}, {"alpha", "duffing alpha"},
               {"a", "rossler a"}, {"b", "rossler b"}, {"c", "rossler c"}, {"tau", "rossler tau"},
               {"out", "model JSON path"},
               {"report", "equation report path"},
               {"schedule-out", "burst schedule JSON path"}});

  auto* havok = app.add_subcommand("havok", "fit a linear delay-embedding model of one observable");
  add_options(havok, config.options,
              {{"input", "trajectory CSV (otherwise simulate --system)"},
               {"system", "benchmark system to simulate"},
               {"variable", "observable column index"},
               {"q", "number of delays"},
               {"rank", "model rank"},
               {"d", "row spacing"},
               {"c", "column spacing"},
               {"rate", "samples per period (default q-1)"},
               {"periods", "training duration (number, or 5T)"},
               {"transient", "periods to discard"},
               {"period", "period of an --input series"},
               {"iterative", "two-scale iterative fit", true},
               {"F", "frequency ratio (iterative)"},
               {"T-fast", "fast period of an --input series (iterative)"},
               {"mu", "van der pol mu"},
               {"slow-periods", "slow periods to cover (iterative)"},
               {"rho", "lorenz rho"}, {"sigma", "lorenz sigma"}, {"beta", "lorenz beta"},
               {"a", "rossler a"}, {"b", "rossler b"},
               {"seed", "phase seed"},
               {"out", "model JSON path"},
               {"pred", "prediction CSV path"},
               {"pred-periods", "prediction horizon beyond training"}});

  auto* sweep = app.add_subcommand("sweep", "run a named experiment sweep");
  sweep->add_option_function<std::string>(
      "experiment", [&](const std::string& v) { config.options["experiment"] = v; },
      "data-requirement | burst-vs-uniform | spacing-tradeoff | rank-delay");
  add_options(sweep, config.options,
              {{"system", "benchmark system"},
               {"kind", "coupled kind"},
               {"F", "frequency ratio grid, comma separated"},
               {"rates", "sampling rate grid, comma separated"},
               {"ranks", "rank grid, comma separated"},
               {"delays", "delay count grid, comma separated"},
               {"rank", "fixed model rank"},
               {"trials", "trials per cell"},
               {"seed", "sweep seed (required)"},
               {"sigma", "lorenz sigma"}, {"rho", "lorenz rho"}, {"beta", "lorenz/duffing beta"},
               {"mu", "van der pol mu"}, {"delta", "duffing delta"}, {"alpha", "duffing alpha"},
               {"a", "rossler a"}, {"b", "rossler b"}, {"c", "rossler c"}, {"tau", "rossler tau"},
               {"outdir", "output directory"}});

  for (auto* cmd : {sim, sindy, havok, sweep})
    cmd->add_option("--config", config_file, "JSON config file; command-line flags override its values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw std::runtime_error("cannot open config file: " + config_file);
      std::stringstream buf;
      buf << in.rdbuf();
      const msd::RunConfig from_file = msd::RunConfig::from_json_string(buf.str());
      nlohmann::json merged = from_file.options;
      merged.update(config.options);  // flags win
      config.options = merged;
    }
    for (auto* cmd : {sim, sindy, havok, sweep})
      if (cmd->parsed()) config.command = cmd->get_name();
    return msd::run_command(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
