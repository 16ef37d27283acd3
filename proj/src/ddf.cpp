#include "tdcoop/ddf.hpp"

#include "tdcoop/errors.hpp"
#include "tdcoop/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tdcoop {

namespace {

// 2^e - 1 without cancellation at small e.
double exp2m1(double e) { return std::expm1(e * std::numbers::ln2); }

// min(1, R / C(snr)); 1 when the helper cannot decode within the period.
double fraction_from_snr(double snr, double rate) {
  const double c = capacity(snr);
  return c > rate ? rate / c : 1.0;
}

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("bounds: theta* must lie in (0, 1)");
}

struct UserGeometry {
  double rate = 0.0;
  double burst_k = 0.0;
  std::vector<std::size_t> helpers;
  std::vector<double> helper_burst;
};

UserGeometry user_geometry(const StrategySpec& spec, const PowerConfig& pc, std::size_t k) {
  UserGeometry g;
  const std::size_t num = pc.num_users();
  if (k >= num) throw DomainError("user index out of range");
  g.rate = pc.rate.at(k);
  g.burst_k = nominal_burst_power(spec, pc, NodeId::user(k));
  g.helpers = cooperating_set(spec, num, k);
  for (std::size_t j : g.helpers) g.helper_burst.push_back(nominal_burst_power(spec, pc, NodeId::user(j)));
  return g;
}

double dpow(const NodePlacement& p, NodeId a, NodeId b, double gamma) {
  return std::pow(link_distance(p, a, b), gamma);
}

// Leading term of the L x 1 distributed MIMO outage with the given
// per-antenna SNR scales.
double mimo_leading(const std::vector<double>& weights, double rate) {
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("bounds: transmit powers must be positive");
  }
  return hypoexp_leading_cdf_term(WeightedExpSum(weights), exp2m1(rate));
}

double rc_bracket(double rate, double theta, double lambda, double d_rk, double d_dr) {
  const double tb = 1.0 - theta;
  const double e = exp2m1(rate);
  const double a = exp2m1(rate / tb);
  const double b = exp2m1(rate / theta);
  return a * a * tb / (e * e) + 2.0 * lambda * d_rk * b * b / (d_dr * e * e);
}

double uc2_bracket(double rate, double theta, std::size_t L, double sum_djk, double prod_c,
                   double burst_k) {
  const double tb = 1.0 - theta;
  const double eL = std::pow(exp2m1(rate), static_cast<double>(L));
  const double a = exp2m1(rate / tb);
  const double b = exp2m1(rate / theta);
  const double first = std::pow(a, static_cast<double>(L)) * std::pow(tb, static_cast<double>(L - 1)) / eL;
  const double second = b * b * sum_djk * factorial(L) *
                        std::pow(burst_k, static_cast<double>(L) - 2.0) / (eL * prod_c);
  return first + second;
}

template <class F>
double best_theta(bool optimize, double theta, F&& bracket) {
  if (!optimize) return theta;
  double best = theta;
  double best_val = bracket(theta);
  for (int i = 1; i <= 99; ++i) {
    const double t = i / 100.0;
    const double v = bracket(t);
    if (v < best_val) {
      best_val = v;
      best = t;
    }
  }
  return best;
}

}  // namespace

double listen_fraction_rc(double a_sq, double d_rk, double burst_k, double rate, double gamma) {
  if (!(d_rk > 0.0)) throw DomainError("listen fraction: zero source-helper distance");
  return fraction_from_snr(a_sq * std::pow(d_rk, -gamma) * burst_k, rate);
}

double trial_mutual_info_rc(double direct_snr, double relay_snr, double theta) {
  const double g1 = capacity(direct_snr);
  if (theta >= 1.0) return g1;
  const double tb = 1.0 - theta;
  return theta * g1 + tb * capacity(direct_snr + relay_snr / tb);
}

double listen_fraction_uc2(std::span<const double> helper_snr, double rate) {
  double theta = helper_snr.empty() ? 1.0 : 0.0;
  for (double x : helper_snr) theta = std::max(theta, fraction_from_snr(x, rate));
  return theta;
}

double trial_mutual_info_uc2(double direct_snr, std::span<const double> helper_dest_snr,
                             double theta) {
  const double g1 = capacity(direct_snr);
  if (theta >= 1.0 || helper_dest_snr.empty()) return g1;
  const double tb = 1.0 - theta;
  double s = direct_snr;
  for (double x : helper_dest_snr) s += x / tb;
  return theta * g1 + tb * capacity(s);
}

FractionSchedule multihop_schedule(const MultihopChannel& ch, double rate, MultihopMode mode) {
  const std::size_t L = ch.size;
  FractionSchedule s;
  s.order.push_back(0);
  s.start.push_back(0.0);

  std::array<bool, kMaxUsers> decoded{};
  std::array<double, kMaxUsers> collected{};
  std::array<double, kMaxUsers> speed{};
  decoded[0] = true;
  double t = 0.0;

  while (s.order.size() < L) {
    const double remaining = 1.0 - t;
    std::size_t next = L;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < L; ++j) {
      if (decoded[j]) continue;
      double snr = 0.0;
      for (std::size_t l = 0; l < s.order.size(); ++l) {
        const std::size_t m = s.order[l];
        snr += mode == MultihopMode::Accumulating
                   ? ch.listen_gain[j][m] * ch.burst[m] / (1.0 - s.start[l])
                   : ch.listen_gain[j][m] * ch.burst[m];
      }
      speed[j] = capacity(snr);
      const double need = mode == MultihopMode::Accumulating ? rate - collected[j] : rate;
      const double tau = speed[j] > 0.0 ? std::max(0.0, need) / speed[j]
                                        : std::numeric_limits<double>::infinity();
      if (tau < best) {
        best = tau;
        next = j;
      }
    }
    if (next == L || !(best < remaining)) break;

    s.fractions.push_back(best);
    t += best;
    if (mode == MultihopMode::Accumulating) {
      for (std::size_t j = 1; j < L; ++j) {
        if (!decoded[j]) collected[j] += speed[j] * best;
      }
    }
    decoded[next] = true;
    s.order.push_back(next);
    s.start.push_back(t);
  }
  s.fractions.push_back(1.0 - t);
  return s;
}

double trial_mutual_info_multihop(const MultihopChannel& ch, const FractionSchedule& sched) {
  double info = 0.0;
  double snr = 0.0;
  for (std::size_t l = 0; l < sched.order.size(); ++l) {
    const std::size_t m = sched.order[l];
    snr += ch.dest_gain[m] * ch.burst[m] / (1.0 - sched.start[l]);
    info += sched.fractions[l] * capacity(snr);
  }
  return info;
}

BoundPair ddf_bounds(const StrategySpec& spec, const NodePlacement& placement,
                     const PowerConfig& pc, double gamma, std::size_t k) {
  check_theta(spec.theta_star);
  if (spec.protocol != Protocol::Ddf) throw DomainError("ddf_bounds: not a DDF strategy");
  const UserGeometry g = user_geometry(spec, pc, k);
  const NodeId d = NodeId::destination();
  const NodeId uk = NodeId::user(k);
  const double d_dk = dpow(placement, d, uk, gamma);

  BoundPair out;
  if (spec.network == NetworkKind::RelayCoop) {
    const NodeId r = NodeId::relay();
    const double pr = pc.relay_power();
    const double d_dr = dpow(placement, d, r, gamma);
    const double d_rk = dpow(placement, r, uk, gamma);
    out.lower = mimo_leading({g.burst_k / d_dk, pr / d_dr}, g.rate);
    const double lambda = pr / g.burst_k;
    auto bracket = [&](double t) { return rc_bracket(g.rate, t, lambda, d_rk, d_dr); };
    out.bracket = bracket(best_theta(spec.optimize_theta_star, spec.theta_star, bracket));
    out.upper = out.bracket * out.lower;
    return out;
  }

  const std::size_t L = g.helpers.size() + 1;
  std::vector<double> weights{g.burst_k / d_dk};
  double sum_djk = 0.0;
  double prod_c = 1.0;  // prod_{j in C_k} d_dj^gamma / lambda_j
  double prod_kd = 1.0;  // prod_{j in C_k} d_jk^gamma lambda_j / d_dj^gamma
  for (std::size_t i = 0; i < g.helpers.size(); ++i) {
    const NodeId uj = NodeId::user(g.helpers[i]);
    const double d_dj = dpow(placement, d, uj, gamma);
    const double d_jk = dpow(placement, uj, uk, gamma);
    const double lambda = g.helper_burst[i] / g.burst_k;
    weights.push_back(g.helper_burst[i] / d_dj);
    sum_djk += d_jk;
    prod_c *= d_dj / lambda;
    prod_kd *= d_jk * lambda / d_dj;
  }
  out.lower = mimo_leading(weights, g.rate);

  if (spec.network == NetworkKind::UserCoopTwoHop) {
    auto bracket = [&](double t) { return uc2_bracket(g.rate, t, L, sum_djk, prod_c, g.burst_k); };
    out.bracket = bracket(best_theta(spec.optimize_theta_star, spec.theta_star, bracket));
    out.upper = out.bracket * out.lower;
    return out;
  }
  if (spec.network != NetworkKind::UserCoopMultiHop) throw DomainError("ddf_bounds: unsupported network");

  std::vector<double> theta = spec.theta_star_multihop;
  if (theta.empty()) theta.assign(L - 1, 1.0 / static_cast<double>(L));
  if (theta.size() != L - 1) throw ConfigError("bounds: need L_k - 1 multi-hop fractions");
  double used = 0.0;
  double prod_bar = 1.0;  // prod_{l=1}^{L} (1 - sum_{m<l} theta*_m)
  for (double t : theta) {
    check_theta(t);
    prod_bar *= 1.0 - used;
    used += t;
  }
  const double last = 1.0 - used;
  if (!(last > 0.0)) throw ConfigError("bounds: multi-hop fractions leave no final stage");
  prod_bar *= last;
  const double eL = std::pow(exp2m1(g.rate), static_cast<double>(L));
  const double kc = std::pow(exp2m1(g.rate / last), static_cast<double>(L)) * prod_bar / eL;
  const double kd = std::pow(exp2m1(g.rate / theta.front()), static_cast<double>(L)) * factorial(L) /
                    eL * prod_kd;
  out.bracket = kc + kd;
  out.upper = out.bracket * out.lower;
  return out;
}

double clustering_threshold(const StrategySpec& spec, const NodePlacement& placement,
                            const PowerConfig& pc, double gamma, double theta_star, std::size_t k) {
  check_theta(theta_star);
  if (!spec.is_user_coop()) throw DomainError("clustering condition: needs user cooperation");
  const UserGeometry g = user_geometry(spec, pc, k);
  const std::size_t L = g.helpers.size() + 1;
  if (L <= 2) throw DomainError("clustering condition: needs more than two transmitters");
  double prod_c = 1.0;
  for (std::size_t i = 0; i < g.helpers.size(); ++i) {
    const double d_dj = dpow(placement, NodeId::destination(), NodeId::user(g.helpers[i]), gamma);
    prod_c *= d_dj / (g.helper_burst[i] / g.burst_k);
  }
  const double n = static_cast<double>(L) - 2.0;
  return std::pow(exp2m1(g.rate / (1.0 - theta_star)), n) /
         (factorial(L) * std::pow(g.burst_k, n)) * prod_c;
}

bool clustering_condition(const StrategySpec& spec, const NodePlacement& placement,
                          const PowerConfig& pc, double gamma, double theta_star, std::size_t k) {
  const double threshold = clustering_threshold(spec, placement, pc, gamma, theta_star, k);
  double sum = 0.0;
  for (std::size_t j : cooperating_set(spec, pc.num_users(), k)) {
    sum += dpow(placement, NodeId::user(j), NodeId::user(k), gamma);
  }
  return sum <= threshold;
}

DdfTrial::DdfTrial(const StrategySpec& spec, const NodePlacement& placement, const PowerConfig& pc,
                   std::size_t k)
    : network_(spec.network), mode_(spec.multihop_mode) {
  if (spec.protocol == Protocol::Af) throw DomainError("DdfTrial: AF strategy");
  const UserGeometry g = user_geometry(spec, pc, k);
  rate_ = g.rate;
  helpers_ = g.helpers.size();
  const NodeId d = NodeId::destination();
  const NodeId uk = NodeId::user(k);
  links_.push_back({d, uk});
  link_power_.push_back(g.burst_k);

  switch (network_) {
    case NetworkKind::Mac:
      break;
    case NetworkKind::RelayCoop:
      links_.push_back({NodeId::relay(), uk});
      link_power_.push_back(g.burst_k);
      links_.push_back({d, NodeId::relay()});
      link_power_.push_back(pc.relay_power());
      break;
    case NetworkKind::UserCoopTwoHop:
      for (std::size_t i = 0; i < helpers_; ++i) {
        const NodeId uj = NodeId::user(g.helpers[i]);
        links_.push_back({uj, uk});
        link_power_.push_back(g.burst_k);
        links_.push_back({d, uj});
        link_power_.push_back(g.helper_burst[i]);
      }
      break;
    case NetworkKind::UserCoopMultiHop: {
      const std::size_t L = helpers_ + 1;
      if (L > kMaxUsers) throw ConfigError("too many cooperating users");
      proto_.size = L;
      std::vector<NodeId> nodes{uk};
      proto_.burst[0] = g.burst_k;
      for (std::size_t i = 0; i < helpers_; ++i) {
        nodes.push_back(NodeId::user(g.helpers[i]));
        proto_.burst[i + 1] = g.helper_burst[i];
        links_.push_back({d, nodes.back()});
        link_power_.push_back(g.helper_burst[i]);
      }
      for (std::size_t i = 1; i < L; ++i) {
        for (std::size_t m = 0; m < L; ++m) {
          if (m == i) continue;
          listen_index_[i][m] = links_.size();
          links_.push_back({nodes[i], nodes[m]});
          link_power_.push_back(proto_.burst[m]);
        }
      }
      break;
    }
  }
  // Validates every link length once, up front.
  for (const Link& l : links_) link_distance(placement, l.rx, l.tx);
}

double DdfTrial::mutual_info(const ChannelDraw& draw) const {
  const auto& f = draw.links;
  const double direct = f[0].gain_sq() * link_power_[0];
  switch (network_) {
    case NetworkKind::Mac:
      return capacity(direct);
    case NetworkKind::RelayCoop: {
      const double theta = fraction_from_snr(f[1].gain_sq() * link_power_[1], rate_);
      return trial_mutual_info_rc(direct, f[2].gain_sq() * link_power_[2], theta);
    }
    case NetworkKind::UserCoopTwoHop: {
      std::array<double, kMaxUsers> listen{};
      std::array<double, kMaxUsers> forward{};
      for (std::size_t i = 0; i < helpers_; ++i) {
        listen[i] = f[1 + 2 * i].gain_sq() * link_power_[1 + 2 * i];
        forward[i] = f[2 + 2 * i].gain_sq() * link_power_[2 + 2 * i];
      }
      const double theta = listen_fraction_uc2(std::span<const double>(listen.data(), helpers_), rate_);
      return trial_mutual_info_uc2(direct, std::span<const double>(forward.data(), helpers_), theta);
    }
    case NetworkKind::UserCoopMultiHop: {
      MultihopChannel ch = proto_;
      for (std::size_t i = 0; i < ch.size; ++i) ch.dest_gain[i] = f[i].gain_sq();
      for (std::size_t i = 1; i < ch.size; ++i) {
        for (std::size_t m = 0; m < ch.size; ++m) {
          if (m != i) ch.listen_gain[i][m] = f[listen_index_[i][m]].gain_sq();
        }
      }
      return trial_mutual_info_multihop(ch, multihop_schedule(ch, rate_, mode_));
    }
  }
  return 0.0;
}

}  // namespace tdcoop
