#pragma once

#include "tdcoop/ddf.hpp"
#include "tdcoop/network.hpp"
#include "tdcoop/power.hpp"
#include "tdcoop/strategy.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tdcoop {

/// Adaptive trial budget for one (strategy, placement, user, SNR) job.
/// Trials run in rounds of first_round, 2 first_round, 4 first_round, ...
/// until min_events outages (and min_trials trials) have been seen, the
/// optional relative-precision target is met, or max_trials is reached.
struct TrialPolicy {
  std::uint64_t min_trials = 2000;
  std::uint64_t max_trials = 10'000'000;
  std::uint64_t min_events = 100;
  std::uint64_t first_round = 2000;
  /// Stop early only once half_width <= target * outage (0 disables).
  double target_rel_halfwidth = 0.0;

  /// Bias each link toward deep fades and reweight (see FadingBias).
  bool importance_sampling = true;
  /// Per-link biased mean: min(1, bias_scale (2^R - 1) d^gamma / P_tx).
  double bias_scale = 0.5;
  double defensive_mix = 0.5;
  /// Two-hop AF: average the outage over the direct-link gain and one helper
  /// phase analytically instead of sampling them.
  bool conditional_af = true;

  void validate() const;
};

struct OutageEstimate {
  double outage = 0.0;
  double half_width = 0.0;  ///< 95% confidence half-width
  double variance = 0.0;    ///< variance of `outage` as an estimator
  std::uint64_t trials = 0;
  std::uint64_t events = 0;  ///< trials with nonzero outage contribution
  bool ceiling = false;     ///< stopped at max_trials before min_events
  std::optional<BoundPair> bounds;
  std::vector<double> per_placement;  ///< user-averaged estimate per placement
  std::vector<double> per_user;       ///< placement-averaged estimate per user
};

/// Closed-form TD-MAC outage of user k:
/// 1 - exp(-(2^R - 1) d^gamma / (K P_k)).
double mac_outage(const PowerConfig& pc, double d_dk, double gamma, std::size_t num_users,
                  std::size_t k = 0);

/// Monte Carlo outage of one user on one placement. Fading keys depend only
/// on (seed, placement.index(), k), so strategies and power levels share
/// draws.
OutageEstimate estimate_user_outage(const StrategySpec& spec, const NodePlacement& placement,
                                    const PowerConfig& pc, double gamma, std::size_t k,
                                    const TrialPolicy& policy, std::uint64_t seed);

/// Analytic bounds of user k, clamped to [0, 1]; empty for strategies
/// without bounds. TD-MAC reports its closed form as both bounds.
std::optional<BoundPair> user_bounds(const StrategySpec& spec, const NodePlacement& placement,
                                     const PowerConfig& pc, double gamma, std::size_t k);

/// Outage averaged over the users of one placement. Throws ConfigError when
/// the policy allows no trials.
OutageEstimate estimate_outage(const StrategySpec& spec, const NodePlacement& placement,
                               const PowerConfig& pc, double gamma, const TrialPolicy& policy,
                               std::uint64_t seed, unsigned workers = 1);

/// Arithmetic mean of per-user, per-placement estimates. Results do not
/// depend on the order of `placements` or on `workers`.
OutageEstimate combine_estimates(std::vector<std::pair<std::uint64_t, std::vector<OutageEstimate>>> per_placement);

/// Least-squares slope of -log10(p) against snr_db / 10.
/// Throws InsufficientDataError for fewer than two points or p <= 0.
double diversity_slope(const std::vector<std::pair<double, double>>& points);

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware
/// concurrency). Each index runs exactly once; exceptions are rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------- experiments

enum class XAxis { TransmitSnr, TotalPower };

struct ExperimentConfig {
  GeometryParams geometry;
  PowerConfig power = PowerConfig::uniform(3, 1.0, 0.25, 0.01, 0.01, 0.5);
  std::vector<StrategySpec> strategies = default_strategies();
  std::vector<double> sweep_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  XAxis x_axis = XAxis::TransmitSnr;
  TrialPolicy trials;
  std::size_t num_placements = 100;
  /// When non-empty, used instead of sampled placements.
  std::vector<NodePlacement> placements;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  bool bounds_only = false;
  bool per_user_rows = false;
  std::string output_path = "results.csv";

  /// Throws ConfigError.
  void validate() const;
};

struct ResultRow {
  std::string strategy;
  std::string user;  ///< "avg" or the one-based user number
  double snr_db = 0.0;
  double ptot_db = 0.0;
  double outage = 0.0;
  double ci95 = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  std::uint64_t trials = 0;
  bool ceiling = false;
};

/// Placements of an experiment: the explicit list, or num_placements
/// area-uniform samples keyed by (seed, index).
std::vector<NodePlacement> experiment_placements(const ExperimentConfig& cfg);

/// User budget P_1 that gives total power `ptot` under `spec`; nullopt when
/// processing alone already exceeds it.
std::optional<double> user_power_for_total(const StrategySpec& spec, const PowerConfig& pc,
                                           double ptot);

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

std::string csv_header();
std::string format_row(const ResultRow& row);
/// Throws OutputError when the file cannot be written.
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);

/// "placement,node,x,y" rows with node labels d, r, 1..K.
void write_placements(const std::string& path, const std::vector<NodePlacement>& placements);
/// Inverse of write_placements. Throws ConfigError on malformed files.
std::vector<NodePlacement> read_placements(const std::string& path);

/// Loads a JSON experiment description. Throws ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace tdcoop
