#include "tdcoop/harness.hpp"

#include "tdcoop/af.hpp"
#include "tdcoop/errors.hpp"
#include "tdcoop/mathcore.hpp"
#include "tdcoop/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>

namespace tdcoop {

namespace {

double exp2m1(double e) { return std::expm1(e * std::numbers::ln2); }

FadingBias make_bias(const std::vector<Link>& links, const std::vector<double>& power,
                     const NodePlacement& placement, double gamma, double rate,
                     const TrialPolicy& policy, bool direct_integrated) {
  FadingBias bias;
  bias.defensive_mix = policy.defensive_mix;
  if (!policy.importance_sampling) return bias;
  const double eta = exp2m1(rate);
  for (std::size_t i = 0; i < links.size(); ++i) {
    const double d = link_distance(placement, links[i].rx, links[i].tx);
    double mu = policy.bias_scale * eta * std::pow(d, gamma) / power[i];
    if (!(mu > 0.0) || !std::isfinite(mu)) mu = 1.0;
    if (direct_integrated && i == 0) mu = 1.0;
    bias.mean.push_back(std::min(1.0, mu));
  }
  return bias;
}

template <class Trial>
OutageEstimate run_trials(const Trial& trial, bool phases, const NodePlacement& placement,
                          double gamma, double rate, const TrialPolicy& policy,
                          std::uint64_t key) {
  bool conditional = false;
  if constexpr (requires { trial.outage_probability(std::declval<const ChannelDraw&>(), rate); }) {
    conditional = policy.conditional_af && trial.conditional();
  }
  const FadingSampler sampler(
      placement, trial.links(), gamma, phases,
      make_bias(trial.links(), trial.link_power(), placement, gamma, rate, policy, conditional));
  const CounterRng rng(key);
  ChannelDraw draw;

  std::uint64_t n = 0;
  std::uint64_t events = 0;
  double s1 = 0.0;
  double s2 = 0.0;
  std::uint64_t round = std::max<std::uint64_t>(1, policy.first_round);
  OutageEstimate est;
  bool satisfied = false;
  while (true) {
    const std::uint64_t target = std::min(policy.max_trials, n + round);
    for (; n < target; ++n) {
      sampler.draw(rng, n, draw);
      double hit = 0.0;
      if constexpr (requires { trial.outage_probability(draw, rate); }) {
        if (conditional) {
          hit = trial.outage_probability(draw, rate);
        } else {
          hit = trial.mutual_info(draw) < rate ? 1.0 : 0.0;
        }
      } else {
        hit = trial.mutual_info(draw) < rate ? 1.0 : 0.0;
      }
      if (hit > 0.0) {
        ++events;
        const double w = draw.weight * hit;
        s1 += w;
        s2 += w * w;
      }
    }
    const double dn = static_cast<double>(n);
    est.outage = s1 / dn;
    est.variance = std::max(0.0, s2 / dn - est.outage * est.outage) / dn;
    est.half_width = 1.96 * std::sqrt(est.variance);
    satisfied = n >= policy.min_trials && events >= policy.min_events &&
                (policy.target_rel_halfwidth <= 0.0 ||
                 est.half_width <= policy.target_rel_halfwidth * est.outage);
    if (satisfied || n >= policy.max_trials) break;
    round *= 2;
  }
  est.outage = std::min(1.0, est.outage);
  est.trials = n;
  est.events = events;
  est.ceiling = !satisfied;
  return est;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void TrialPolicy::validate() const {
  if (max_trials == 0) throw ConfigError("trials: at least one trial is required");
  if (min_trials > max_trials) throw ConfigError("trials: min exceeds max");
  if (!(bias_scale > 0.0)) throw ConfigError("trials: bias_scale must be positive");
  if (!(defensive_mix > 0.0 && defensive_mix <= 1.0)) {
    throw ConfigError("trials: defensive_mix must lie in (0, 1]");
  }
  if (!(target_rel_halfwidth >= 0.0)) throw ConfigError("trials: negative precision target");
}

double mac_outage(const PowerConfig& pc, double d_dk, double gamma, std::size_t num_users,
                  std::size_t k) {
  const double p = pc.user_power.at(k) * static_cast<double>(num_users);
  if (!(p > 0.0)) return pc.rate.at(k) > 0.0 ? 1.0 : 0.0;
  return -std::expm1(-exp2m1(pc.rate.at(k)) * std::pow(d_dk, gamma) / p);
}

OutageEstimate estimate_user_outage(const StrategySpec& spec, const NodePlacement& placement,
                                    const PowerConfig& pc, double gamma, std::size_t k,
                                    const TrialPolicy& policy, std::uint64_t seed) {
  policy.validate();
  const double rate = pc.rate.at(k);
  const std::uint64_t key = derive_key(seed, StreamDomain::Fading, placement.index(), k);
  if (spec.protocol == Protocol::Af) {
    return run_trials(AfTrial(spec, placement, pc, k), true, placement, gamma, rate, policy, key);
  }
  return run_trials(DdfTrial(spec, placement, pc, k), false, placement, gamma, rate, policy, key);
}

std::optional<BoundPair> user_bounds(const StrategySpec& spec, const NodePlacement& placement,
                                     const PowerConfig& pc, double gamma, std::size_t k) {
  BoundPair b;
  try {
    switch (spec.protocol) {
      case Protocol::None: {
        const double d = link_distance(placement, NodeId::destination(), NodeId::user(k));
        b.lower = b.upper = mac_outage(pc, d, gamma, pc.num_users(), k);
        b.bracket = 1.0;
        return b;
      }
      case Protocol::Ddf: b = ddf_bounds(spec, placement, pc, gamma, k); break;
      case Protocol::Af: b = af_bounds(spec, placement, pc, gamma, k); break;
    }
  } catch (const DomainError&) {
    return std::nullopt;
  }
  b.lower = clamp01(b.lower);
  b.upper = clamp01(b.upper);
  return b;
}

OutageEstimate combine_estimates(
    std::vector<std::pair<std::uint64_t, std::vector<OutageEstimate>>> per_placement) {
  std::sort(per_placement.begin(), per_placement.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  OutageEstimate out;
  std::size_t count = 0;
  double var = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool all_bounds = true;
  std::size_t users = 0;
  for (const auto& [index, ests] : per_placement) users = std::max(users, ests.size());
  out.per_user.assign(users, 0.0);
  std::vector<std::size_t> per_user_count(users, 0);

  for (const auto& [index, ests] : per_placement) {
    double place_sum = 0.0;
    for (std::size_t k = 0; k < ests.size(); ++k) {
      const OutageEstimate& e = ests[k];
      out.outage += e.outage;
      var += e.variance;
      out.trials += e.trials;
      out.events += e.events;
      out.ceiling = out.ceiling || e.ceiling;
      place_sum += e.outage;
      out.per_user[k] += e.outage;
      ++per_user_count[k];
      if (e.bounds) {
        lower += e.bounds->lower;
        upper += e.bounds->upper;
      } else {
        all_bounds = false;
      }
      ++count;
    }
    out.per_placement.push_back(ests.empty() ? 0.0 : place_sum / static_cast<double>(ests.size()));
  }
  if (count == 0) return out;
  const double n = static_cast<double>(count);
  out.outage /= n;
  out.variance = var / (n * n);
  out.half_width = 1.96 * std::sqrt(out.variance);
  for (std::size_t k = 0; k < users; ++k) {
    if (per_user_count[k] > 0) out.per_user[k] /= static_cast<double>(per_user_count[k]);
  }
  if (all_bounds) {
    BoundPair b;
    b.lower = lower / n;
    b.upper = upper / n;
    b.bracket = b.lower > 0.0 ? b.upper / b.lower : 1.0;
    out.bounds = b;
  }
  return out;
}

OutageEstimate estimate_outage(const StrategySpec& spec, const NodePlacement& placement,
                               const PowerConfig& pc, double gamma, const TrialPolicy& policy,
                               std::uint64_t seed, unsigned workers) {
  policy.validate();
  spec.validate(pc.num_users());
  const std::size_t users = pc.num_users();
  std::vector<OutageEstimate> ests(users);
  parallel_for(users, workers, [&](std::size_t k) {
    ests[k] = estimate_user_outage(spec, placement, pc, gamma, k, policy, seed);
    ests[k].bounds = user_bounds(spec, placement, pc, gamma, k);
  });
  return combine_estimates({{placement.index(), std::move(ests)}});
}

double diversity_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw InsufficientDataError("slope: need at least two points");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [db, p] : points) {
    if (!(p > 0.0) || !std::isfinite(p)) throw InsufficientDataError("slope: zero outage in window");
    sx += db / 10.0;
    sy += -std::log10(p);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [db, p] : points) {
    const double dx = db / 10.0 - mx;
    sxx += dx * dx;
    sxy += dx * (-std::log10(p) - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("slope: SNR points coincide");
  return sxy / sxx;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = n;
  {
    std::vector<std::jthread> pool;
    const std::size_t count = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w < count; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            const std::lock_guard lock(mu);
            if (i < error_index) {
              error_index = i;
              error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tdcoop
