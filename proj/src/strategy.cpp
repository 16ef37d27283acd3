#include "tdcoop/strategy.hpp"

#include "tdcoop/errors.hpp"

#include <algorithm>

namespace tdcoop {

std::string StrategySpec::name() const {
  std::string net;
  switch (network) {
    case NetworkKind::Mac: return "mac";
    case NetworkKind::RelayCoop: net = "rc"; break;
    case NetworkKind::UserCoopTwoHop: net = "uc2"; break;
    case NetworkKind::UserCoopMultiHop: net = "ucmh"; break;
  }
  std::string name = net + (protocol == Protocol::Ddf ? "-ddf" : "-af");
  if (network == NetworkKind::UserCoopMultiHop && protocol == Protocol::Ddf &&
      multihop_mode == MultihopMode::PerFraction) {
    name += "-pf";
  }
  return name;
}

void StrategySpec::validate(std::size_t num_users) const {
  if ((network == NetworkKind::Mac) != (protocol == Protocol::None)) {
    throw ConfigError("strategy: MAC has no protocol and cooperative networks need one");
  }
  if (!(theta_star > 0.0 && theta_star < 1.0)) {
    throw ConfigError("strategy: theta_star must lie in (0, 1)");
  }
  if (!cooperating_sets.empty()) {
    if (!is_user_coop()) throw ConfigError("strategy: cooperating sets only apply to user cooperation");
    if (cooperating_sets.size() != num_users) {
      throw ConfigError("strategy: one cooperating set per user is required");
    }
    for (std::size_t k = 0; k < num_users; ++k) {
      for (std::size_t j : cooperating_sets[k]) {
        if (j >= num_users || j == k) throw ConfigError("strategy: C_k must be a subset of users \\ {k}");
      }
    }
  }
  if (is_user_coop()) {
    for (std::size_t k = 0; k < num_users; ++k) {
      if (cooperating_set(*this, num_users, k).empty()) {
        throw ConfigError("strategy: user cooperation needs a non-empty C_k for every user");
      }
    }
  }
  if (!theta_star_multihop.empty()) {
    double sum = 0.0;
    for (double t : theta_star_multihop) {
      if (!(t > 0.0 && t < 1.0)) throw ConfigError("strategy: theta*_{k,l} must lie in (0, 1)");
      sum += t;
    }
    if (!(sum < 1.0)) throw ConfigError("strategy: theta*_{k,l} must leave a positive last fraction");
  }
}

StrategySpec parse_strategy(const std::string& name) {
  StrategySpec s;
  std::string rest;
  if (name == "mac") return s;
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw ConfigError("unknown strategy '" + name + "'");
  const std::string net = name.substr(0, dash);
  rest = name.substr(dash + 1);
  if (net == "rc") {
    s.network = NetworkKind::RelayCoop;
  } else if (net == "uc2") {
    s.network = NetworkKind::UserCoopTwoHop;
  } else if (net == "ucmh" || net == "uc3") {
    s.network = NetworkKind::UserCoopMultiHop;
  } else {
    throw ConfigError("unknown strategy '" + name + "'");
  }
  if (rest == "ddf") {
    s.protocol = Protocol::Ddf;
  } else if (rest == "af") {
    s.protocol = Protocol::Af;
  } else if (rest == "ddf-pf" && s.network == NetworkKind::UserCoopMultiHop) {
    s.protocol = Protocol::Ddf;
    s.multihop_mode = MultihopMode::PerFraction;
  } else {
    throw ConfigError("unknown strategy '" + name + "'");
  }
  return s;
}

std::vector<StrategySpec> default_strategies() {
  std::vector<StrategySpec> out;
  for (const char* n : {"mac", "rc-ddf", "uc2-ddf", "ucmh-ddf", "rc-af", "uc2-af", "ucmh-af"}) {
    out.push_back(parse_strategy(n));
  }
  return out;
}

std::vector<std::size_t> cooperating_set(const StrategySpec& spec, std::size_t num_users,
                                         std::size_t k) {
  if (!spec.is_user_coop()) return {};
  std::vector<std::size_t> set;
  if (spec.cooperating_sets.empty()) {
    for (std::size_t j = 0; j < num_users; ++j) {
      if (j != k) set.push_back(j);
    }
  } else {
    set = spec.cooperating_sets.at(k);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
  }
  return set;
}

std::size_t forwarded_count(const StrategySpec& spec, std::size_t num_users, std::size_t k) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < num_users; ++j) {
    if (j == k) continue;
    const auto set = cooperating_set(spec, num_users, j);
    if (std::find(set.begin(), set.end(), k) != set.end()) ++count;
  }
  return count;
}

}  // namespace tdcoop
