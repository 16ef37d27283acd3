#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tdcoop {

enum class NetworkKind { Mac, RelayCoop, UserCoopTwoHop, UserCoopMultiHop };
enum class Protocol { None, Ddf, Af };

/// How multi-hop DDF helpers collect information before they decode.
///  - Accumulating: mutual information adds up across fractions (true DDF).
///  - PerFraction: a candidate decodes only from what it hears within the
///    current fraction, at the helpers' nominal powers (the analyzed variant).
enum class MultihopMode { Accumulating, PerFraction };

/// Which network and cooperative protocol is evaluated.
struct StrategySpec {
  NetworkKind network = NetworkKind::Mac;
  Protocol protocol = Protocol::None;

  /// C_k per (zero-based) user. Empty means "all other users" for user
  /// cooperation and {} for MAC / relay networks.
  std::vector<std::vector<std::size_t>> cooperating_sets;

  /// Bound fraction theta* for two-hop bounds, in (0, 1).
  double theta_star = 0.5;
  /// theta*_{k,l}, l = 1..L_k-1, for multi-hop bounds. Empty means 1/L_k each.
  std::vector<double> theta_star_multihop;
  /// Pick theta* on a 99-point grid that minimizes the two-hop upper bound.
  bool optimize_theta_star = false;

  MultihopMode multihop_mode = MultihopMode::Accumulating;

  /// Short identifier ("mac", "rc-ddf", ...).
  std::string name() const;

  bool is_user_coop() const {
    return network == NetworkKind::UserCoopTwoHop || network == NetworkKind::UserCoopMultiHop;
  }

  /// Throws ConfigError on an inconsistent combination or invalid sets.
  void validate(std::size_t num_users) const;
};

/// Parses "mac", "rc-ddf", "uc2-ddf", "ucmh-ddf", "rc-af", "uc2-af",
/// "ucmh-af". "uc3-*" is accepted as an alias of "ucmh-*".
/// Throws ConfigError for anything else.
StrategySpec parse_strategy(const std::string& name);

/// The seven strategies, in CSV order.
std::vector<StrategySpec> default_strategies();

/// C_k after applying the default rule; sorted, without k.
std::vector<std::size_t> cooperating_set(const StrategySpec& spec, std::size_t num_users,
                                         std::size_t k);

/// N_k: number of users whose messages user k forwards.
std::size_t forwarded_count(const StrategySpec& spec, std::size_t num_users, std::size_t k);

}  // namespace tdcoop
