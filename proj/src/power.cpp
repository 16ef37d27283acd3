#include "tdcoop/power.hpp"

#include "tdcoop/errors.hpp"

#include <cmath>

namespace tdcoop {

namespace {

std::size_t node_entry(const PowerConfig& pc, NodeId node) {
  switch (node.role()) {
    case NodeId::Role::User: return node.user_index();
    case NodeId::Role::Relay: return pc.num_users();
    case NodeId::Role::Destination: break;
  }
  throw DomainError("power: the destination has no power budget");
}

bool nonneg_finite(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

PowerConfig PowerConfig::uniform(std::size_t num_users, double user_power, double rate,
                                 double encode, double decode, double relay_factor,
                                 double overhead) {
  PowerConfig pc;
  pc.user_power.assign(num_users, user_power);
  pc.rate.assign(num_users, rate);
  pc.relay_factor = relay_factor;
  pc.encode_factor.assign(num_users + 1, encode);
  pc.decode_factor.assign(num_users + 1, decode);
  pc.overhead.assign(num_users + 1, overhead);
  return pc;
}

PowerConfig PowerConfig::with_user_power(double p) const {
  PowerConfig out = *this;
  out.user_power.assign(user_power.size(), p);
  return out;
}

void PowerConfig::validate() const {
  const std::size_t k = user_power.size();
  if (k == 0) throw ConfigError("power: at least one user is required");
  if (rate.size() != k) throw ConfigError("power: one rate per user is required");
  if (encode_factor.size() != k + 1 || decode_factor.size() != k + 1 || overhead.size() != k + 1) {
    throw ConfigError("power: processing vectors need K user entries plus one relay entry");
  }
  for (double p : user_power) {
    if (!nonneg_finite(p)) throw ConfigError("power: user budgets must be finite and >= 0");
  }
  for (double r : rate) {
    if (!(std::isfinite(r) && r > 0.0)) throw ConfigError("power: rates must be positive");
  }
  if (!nonneg_finite(relay_factor)) throw ConfigError("power: relay factor must be >= 0");
  for (std::size_t i = 0; i <= k; ++i) {
    if (!nonneg_finite(encode_factor[i]) || !nonneg_finite(decode_factor[i]) ||
        !nonneg_finite(overhead[i])) {
      throw ConfigError("power: processing factors must be finite and >= 0");
    }
  }
}

double nominal_burst_power(const StrategySpec& spec, const PowerConfig& pc, NodeId node) {
  const std::size_t num = pc.num_users();
  if (node.role() == NodeId::Role::Relay) return pc.relay_power();
  if (!node.is_user()) throw DomainError("power: the destination does not transmit");
  const std::size_t k = node.user_index();
  const double p = pc.user_power.at(k) * static_cast<double>(num);
  if (!spec.is_user_coop()) return p;
  return p / static_cast<double>(forwarded_count(spec, num, k) + 1);
}

double cooperative_burst_power(double nominal, double fraction) {
  if (!(fraction > 0.0)) {
    throw DegenerateFractionError("power: cooperating node scheduled into an empty slot");
  }
  return nominal / fraction;
}

TransmitProfile transmit_power_profile(const StrategySpec& spec, const PowerConfig& pc,
                                       std::size_t k, std::span<const HelperSlot> helpers) {
  TransmitProfile prof;
  prof.owner = k;
  const NodeId owner = NodeId::user(k);
  prof.bursts.push_back({owner, nominal_burst_power(spec, pc, owner), 1.0});
  for (const HelperSlot& h : helpers) {
    const double nominal = nominal_burst_power(spec, pc, h.node);
    prof.bursts.push_back({h.node, cooperative_burst_power(nominal, h.fraction), h.fraction});
  }
  return prof;
}

std::vector<double> frame_average_power(std::span<const TransmitProfile> periods,
                                        std::size_t num_users) {
  std::vector<double> avg(num_users + 1, 0.0);
  const double period = 1.0 / static_cast<double>(num_users);
  for (const TransmitProfile& prof : periods) {
    for (const Burst& b : prof.bursts) {
      const std::size_t i = b.node.is_user() ? b.node.user_index() : num_users;
      avg.at(i) += b.power * b.duration * period;
    }
  }
  return avg;
}

std::vector<ProcessingTask> processing_tasks(const StrategySpec& spec, std::size_t num_users,
                                             NodeId node) {
  std::vector<ProcessingTask> tasks;
  const bool ddf = spec.protocol == Protocol::Ddf;
  if (node.role() == NodeId::Role::Relay) {
    if (spec.network != NetworkKind::RelayCoop) return tasks;
    for (std::size_t j = 0; j < num_users; ++j) tasks.push_back({j, ddf, ddf});
    return tasks;
  }
  if (!node.is_user()) return tasks;
  const std::size_t k = node.user_index();
  tasks.push_back({k, true, false});
  if (!spec.is_user_coop()) return tasks;
  for (std::size_t j = 0; j < num_users; ++j) {
    if (j == k) continue;
    const auto set = cooperating_set(spec, num_users, j);
    for (std::size_t m : set) {
      if (m == k) tasks.push_back({j, ddf, ddf});
    }
  }
  return tasks;
}

double processing_power(std::span<const ProcessingTask> tasks, const PowerConfig& pc, NodeId node) {
  const std::size_t i = node_entry(pc, node);
  double sum = 0.0;
  for (const ProcessingTask& t : tasks) {
    const double factor = (t.encode ? pc.encode_factor.at(i) : 0.0) +
                          (t.decode ? pc.decode_factor.at(i) : 0.0);
    sum += pc.overhead.at(i) + factor * pc.rate.at(t.user);
  }
  return sum;
}

double total_power(const StrategySpec& spec, const PowerConfig& pc) {
  const std::size_t num = pc.num_users();
  double total = 0.0;
  for (std::size_t k = 0; k < num; ++k) {
    const NodeId node = NodeId::user(k);
    total += pc.user_power[k] + processing_power(processing_tasks(spec, num, node), pc, node);
  }
  if (spec.network == NetworkKind::RelayCoop) {
    const NodeId r = NodeId::relay();
    total += pc.relay_power() + processing_power(processing_tasks(spec, num, r), pc, r);
  }
  return total;
}

}  // namespace tdcoop
