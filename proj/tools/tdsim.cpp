// Command-line front end: runs an experiment sweep and writes the CSV.

#include "tdcoop/errors.hpp"
#include "tdcoop/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kOutput = 3 };

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw tdcoop::ConfigError("--snr expects start:step:stop");
    }
  }
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
    throw tdcoop::ConfigError("--snr expects start:step:stop with step > 0");
  }
  std::vector<double> grid;
  for (long long i = 0;; ++i) {
    const double x = parts[0] + static_cast<double>(i) * parts[1];
    if (x > parts[2] + 1e-9 * parts[1]) break;
    grid.push_back(x);
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage simulation and bounds for time-duplexed cooperative multiaccess networks"};

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string snr;
  std::string strategies;
  std::string output;
  std::optional<unsigned> workers;
  std::string export_path;
  bool bounds_only = false;
  bool per_user = false;

  app.add_option("config", config_path, "JSON experiment file (defaults used when omitted)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--trials", trials, "fixed number of trials per job (disables adaptive rounds)");
  app.add_option("--snr", snr, "sweep grid in dB as start:step:stop");
  app.add_option("--strategies", strategies, "comma separated strategy ids (mac, rc-ddf, uc2-ddf, ucmh-ddf, rc-af, uc2-af, ucmh-af)");
  app.add_option("-o,--output", output, "output CSV path");
  app.add_option("-j,--workers", workers, "worker threads (0 = all cores)");
  app.add_flag("--bounds-only", bounds_only, "skip Monte Carlo, emit analytic bounds only");
  app.add_flag("--per-user", per_user, "also emit per-user rows");
  app.add_option("--export-placements", export_path, "write the placements CSV to this path and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    tdcoop::ExperimentConfig cfg =
        config_path.empty() ? tdcoop::ExperimentConfig{} : tdcoop::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (trials) {
      cfg.trials.min_trials = cfg.trials.max_trials = cfg.trials.first_round = *trials;
      cfg.trials.min_events = 0;
    }
    if (!snr.empty()) cfg.sweep_db = parse_grid(snr);
    if (!strategies.empty()) {
      cfg.strategies.clear();
      std::stringstream ss(strategies);
      std::string name;
      while (std::getline(ss, name, ',')) cfg.strategies.push_back(tdcoop::parse_strategy(name));
    }
    if (!output.empty()) cfg.output_path = output;
    if (workers) cfg.workers = *workers;
    cfg.bounds_only = cfg.bounds_only || bounds_only;
    cfg.per_user_rows = cfg.per_user_rows || per_user;
    cfg.validate();

    if (!export_path.empty()) {
      tdcoop::write_placements(export_path, tdcoop::experiment_placements(cfg));
      return kOk;
    }
    tdcoop::write_csv(cfg.output_path, tdcoop::run_experiment(cfg));
    return kOk;
  } catch (const tdcoop::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const tdcoop::OutputError& e) {
    std::fprintf(stderr, "output error: %s\n", e.what());
    return kOutput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}
