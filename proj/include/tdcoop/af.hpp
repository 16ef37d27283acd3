#pragma once

#include "tdcoop/ddf.hpp"
#include "tdcoop/network.hpp"
#include "tdcoop/power.hpp"
#include "tdcoop/strategy.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tdcoop {

using cplx = std::complex<double>;

/// Amplifier gain of a helper that forwards during `slot_fraction` of the
/// period: sqrt((P_j / slot_fraction) / (|H_jk|^2 P_k + 1)). The two-hop
/// scheme uses slot_fraction = 1/2.
double af_amplifier_gain(double h_jk_sq, double burst_j, double burst_k, double slot_fraction = 0.5);

/// Noise-whitened channel seen by the destination over the L fractions of a
/// user's period.
struct EquivalentChannel {
  std::size_t size = 0;
  std::array<std::array<cplx, kMaxUsers>, kMaxUsers> h{};
  /// c_s of each row (1 for the first row).
  std::array<double, kMaxUsers> row_scale{};
};

/// Two-hop channel: row 1 = (H_dk, 0); row 2 = (sum_j c_j H_dj H_jk, H_dk) / c_s
/// with c_s^2 = 1 + sum_j |c_j H_dj|^2.
EquivalentChannel af2_equivalent_channel(cplx h_dk, std::span<const cplx> h_dj,
                                         std::span<const cplx> h_jk, std::span<const double> gain);

/// L-hop channel with one helper per fraction (in the given order): row l
/// holds (c H_d,pi H_pi,k) / c_s,pi in column 1 and H_dk / c_s,pi on the
/// diagonal.
EquivalentChannel afmh_equivalent_channel(cplx h_dk, std::span<const cplx> h_dj,
                                          std::span<const cplx> h_jk, std::span<const double> gain);

/// log2 det(I + P H H^H) through LU with partial pivoting.
/// Throws NumericError for non-finite entries.
double log2_det_gram(const EquivalentChannel& ch, double burst_k);

/// (1 / L) log2 det(I + P H H^H), L = ch.size.
double af_trial_mutual_info(const EquivalentChannel& ch, double burst_k);

/// Leading-term AF bounds for user k (two-hop RC/UC, multi-hop UC).
BoundPair af_bounds(const StrategySpec& spec, const NodePlacement& placement, const PowerConfig& pc,
                    double gamma, std::size_t k);

/// Evaluates one user's AF mutual information on channel draws.
class AfTrial {
public:
  AfTrial(const StrategySpec& spec, const NodePlacement& placement, const PowerConfig& pc,
          std::size_t k);

  const std::vector<Link>& links() const { return links_; }
  const std::vector<double>& link_power() const { return link_power_; }

  double mutual_info(const ChannelDraw& draw) const;

  /// Two-hop only: whether outage_probability() is available.
  bool conditional() const { return !multihop_; }

  /// Pr(outage | draw) with the direct-link gain |A_dk|^2 and the phase of
  /// the last helper's destination link integrated out; the draw's values
  /// for those two quantities are ignored. Equals the expectation of the
  /// indicator mutual_info(draw) < rate over them.
  double outage_probability(const ChannelDraw& draw, double rate) const;

private:
  bool multihop_;
  double burst_k_;
  double slot_fraction_;
  std::size_t helpers_ = 0;
  std::vector<Link> links_;
  std::vector<double> link_power_;
};

}  // namespace tdcoop
