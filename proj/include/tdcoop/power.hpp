#pragma once

#include "tdcoop/network.hpp"
#include "tdcoop/strategy.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace tdcoop {

/// Power budgets and processing-cost parameters. All powers are normalized
/// by the receiver noise power, so a budget is also an SNR.
///
/// Per-node vectors hold K user entries followed by one relay entry.
struct PowerConfig {
  std::vector<double> user_power;     ///< P_k, time-averaged transmit budget
  double relay_factor = 0.5;          ///< f_r, P_r = f_r * P_1
  std::vector<double> rate;           ///< R_k, bits per channel use
  std::vector<double> encode_factor;  ///< eta per node (size K + 1)
  std::vector<double> decode_factor;  ///< delta per node (size K + 1)
  std::vector<double> overhead;       ///< P_0^proc per node (size K + 1)

  /// K identical users and a relay sharing one set of processing factors.
  static PowerConfig uniform(std::size_t num_users, double user_power, double rate,
                             double encode, double decode, double relay_factor,
                             double overhead = 0.0);

  std::size_t num_users() const { return user_power.size(); }
  double relay_power() const { return relay_factor * user_power.at(0); }

  /// Copy with every user budget set to `p`.
  PowerConfig with_user_power(double p) const;

  /// Throws ConfigError on negative powers/factors, non-positive rates or
  /// size mismatches.
  void validate() const;
};

/// Power a node uses while transmitting in its own period (users) or the
/// time-averaged budget it spreads over its cooperative slots (relay):
///   TD-MAC, TD-RC user:   K P_k
///   TD-UC user:           K P_k / (N_k + 1)
///   relay:                P_r
double nominal_burst_power(const StrategySpec& spec, const PowerConfig& pc, NodeId node);

/// Burst power of a cooperating node that transmits for `fraction` of a
/// period: nominal / fraction, so its energy per aided period is nominal / K.
/// Throws DegenerateFractionError when fraction is not positive.
double cooperative_burst_power(double nominal, double fraction);

/// Active slot of one node within a user's period.
struct Burst {
  NodeId node;
  double power = 0.0;     ///< burst power
  double duration = 0.0;  ///< fraction of the period
};

/// Who transmits, how strongly and for how long during user k's period.
struct TransmitProfile {
  std::size_t owner = 0;
  std::vector<Burst> bursts;
};

/// A helper together with the fraction of the period it transmits in
/// (1 - Theta for two-hop DDF, 1 - start of its stage for multi-hop,
/// 1/2 or 1/L for AF).
struct HelperSlot {
  NodeId node;
  double fraction = 0.0;
};

/// Builds user k's period profile: the owner transmits the whole period,
/// helpers transmit their fraction at the cooperative burst power (AF
/// helpers forward in a single 1/L slot but use the same energy rule).
TransmitProfile transmit_power_profile(const StrategySpec& spec, const PowerConfig& pc,
                                       std::size_t k, std::span<const HelperSlot> helpers);

/// Time-averaged power of each node (K users, then relay) over a frame of K
/// equal periods described by one profile per user.
std::vector<double> frame_average_power(std::span<const TransmitProfile> periods,
                                        std::size_t num_users);

/// One message a node processes.
struct ProcessingTask {
  std::size_t user = 0;  ///< whose message
  bool encode = false;
  bool decode = false;
};

/// What `node` processes under `spec`: users encode their own message;
/// DDF helpers decode and re-encode each aided message; AF helpers only pay
/// the overhead.
std::vector<ProcessingTask> processing_tasks(const StrategySpec& spec, std::size_t num_users,
                                             NodeId node);

/// Sum over tasks of P_0 + (eta * enc + delta * dec) * R_j.
double processing_power(std::span<const ProcessingTask> tasks, const PowerConfig& pc, NodeId node);

/// Transmit budgets plus processing power of all transmitting nodes; the
/// destination is excluded.
double total_power(const StrategySpec& spec, const PowerConfig& pc);

}  // namespace tdcoop
