#pragma once

#include "tdcoop/network.hpp"
#include "tdcoop/power.hpp"
#include "tdcoop/strategy.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tdcoop {

/// Listen fraction of a relay: min(1, R / C(a_sq P / d^gamma)).
/// Throws DomainError for d_rk <= 0.
double listen_fraction_rc(double a_sq, double d_rk, double burst_k, double rate, double gamma);

/// Theta G1 + (1 - Theta) G2 with G1 = C(direct_snr) and
/// G2 = C(direct_snr + relay_snr / (1 - Theta)); relay_snr = |H_dr|^2 P_r.
/// Returns G1 when Theta = 1.
double trial_mutual_info_rc(double direct_snr, double relay_snr, double theta);

/// Worst-helper listen fraction: min(1, max_j R / C(helper_snr[j])) where
/// helper_snr[j] = |H_jk|^2 P_k.
double listen_fraction_uc2(std::span<const double> helper_snr, double rate);

/// Theta G1 + (1 - Theta) C(direct_snr + sum_j helper_dest_snr[j] / (1 - Theta)),
/// helper_dest_snr[j] = |H_dj|^2 P_j.
double trial_mutual_info_uc2(double direct_snr, std::span<const double> helper_dest_snr,
                             double theta);

/// Node 0 is the source; nodes 1..size-1 are its helpers in user order.
struct MultihopChannel {
  std::size_t size = 1;
  std::array<double, kMaxUsers> burst{};    ///< nominal burst power per node
  std::array<double, kMaxUsers> dest_gain{};  ///< |H_{d,i}|^2
  /// listen_gain[i][m] = |H_{i,m}|^2 (node i listening to node m)
  std::array<std::array<double, kMaxUsers>, kMaxUsers> listen_gain{};
};

/// Realized decoding order and stage lengths. order[0] = 0 (the source);
/// stage l starts at start[l], lasts fractions[l]; fractions sum to one.
struct FractionSchedule {
  std::vector<std::size_t> order;
  std::vector<double> start;
  std::vector<double> fractions;
};

/// Greedy schedule: each stage ends when the first undecided helper decodes,
/// ties going to the lower node index. A stage that would outlast the
/// period is cut at its end and no further helpers join.
FractionSchedule multihop_schedule(const MultihopChannel& ch, double rate, MultihopMode mode);

/// sum_l Theta_l C(sum_{m<=l} |H_d,pi(m)|^2 P_pi(m) / (1 - start_m)).
double trial_mutual_info_multihop(const MultihopChannel& ch, const FractionSchedule& sched);

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
  double bracket = 1.0;  ///< upper / lower (K_2, K_c + K_d, ...)
};

/// Leading-term DDF bounds for user k (RC, UC two-hop, UC multi-hop).
/// Throws ConfigError for theta* outside (0, 1) and DomainError for MAC specs.
BoundPair ddf_bounds(const StrategySpec& spec, const NodePlacement& placement,
                     const PowerConfig& pc, double gamma, std::size_t k);

/// True when sum_{j in C_k} d_jk^gamma is small enough for the L_k-fold
/// term of the two-hop upper bound to dominate. Throws DomainError when
/// L_k <= 2 or the spec is not user cooperation.
bool clustering_condition(const StrategySpec& spec, const NodePlacement& placement,
                          const PowerConfig& pc, double gamma, double theta_star, std::size_t k);

/// Right-hand side of the clustering inequality.
double clustering_threshold(const StrategySpec& spec, const NodePlacement& placement,
                            const PowerConfig& pc, double gamma, double theta_star, std::size_t k);

/// Evaluates one user's DDF (or TD-MAC) mutual information on channel
/// draws over a fixed placement and power configuration.
class DdfTrial {
public:
  DdfTrial(const StrategySpec& spec, const NodePlacement& placement, const PowerConfig& pc,
           std::size_t k);

  /// Links in the order mutual_info() expects them in a ChannelDraw.
  const std::vector<Link>& links() const { return links_; }
  /// Nominal power of each link's transmitter.
  const std::vector<double>& link_power() const { return link_power_; }

  double mutual_info(const ChannelDraw& draw) const;

private:
  NetworkKind network_;
  MultihopMode mode_;
  double rate_;
  std::size_t helpers_ = 0;
  std::vector<Link> links_;
  std::vector<double> link_power_;
  std::array<std::array<std::size_t, kMaxUsers>, kMaxUsers> listen_index_{};
  MultihopChannel proto_;
};

}  // namespace tdcoop
