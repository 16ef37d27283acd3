#pragma once

#include "tdcoop/rng.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace tdcoop {

/// Largest supported number of users. Equivalent channels are at most
/// kMaxUsers x kMaxUsers.
inline constexpr std::size_t kMaxUsers = 8;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// A node of the network: one of the K users, the relay, or the destination.
class NodeId {
public:
  enum class Role : std::uint8_t { User, Relay, Destination };

  /// The destination.
  NodeId() : NodeId(Role::Destination, 0) {}

  static NodeId user(std::size_t k) { return NodeId(Role::User, k); }
  static NodeId relay() { return NodeId(Role::Relay, 0); }
  static NodeId destination() { return NodeId(Role::Destination, 0); }

  Role role() const { return role_; }
  /// Zero-based user index; only meaningful for users.
  std::size_t user_index() const { return user_; }
  bool is_user() const { return role_ == Role::User; }

  /// "d", "r", or the one-based user number.
  std::string label() const;
  /// Inverse of label(). Throws ConfigError on malformed input.
  static NodeId parse(const std::string& text);

  friend bool operator==(const NodeId&, const NodeId&) = default;

private:
  NodeId(Role role, std::size_t user) : role_(role), user_(user) {}
  Role role_;
  std::size_t user_;
};

/// Directed link: `tx` transmits, `rx` listens.
struct Link {
  NodeId rx;
  NodeId tx;
  friend bool operator==(const Link&, const Link&) = default;
};

struct GeometryParams {
  double sector_radius = 1.0;
  double sector_angle = std::numbers::pi / 3.0;
  double exclusion_radius = 0.3;
  Point2 destination{0.0, 0.0};
  Point2 relay{0.5, 0.0};
  double path_loss_exponent = 4.0;
  std::size_t num_users = 3;

  /// Throws ConfigError when the parameters describe an empty or invalid
  /// region.
  void validate() const;
};

/// Positions of destination, relay and users plus all pairwise distances.
class NodePlacement {
public:
  NodePlacement(std::vector<Point2> users, Point2 relay, Point2 destination,
                std::uint64_t index = 0);

  std::size_t num_users() const { return users_.size(); }
  const std::vector<Point2>& users() const { return users_; }
  Point2 relay() const { return relay_; }
  Point2 destination() const { return destination_; }
  Point2 position(NodeId node) const;

  /// Identifier used to key this placement's fading streams. Survives
  /// reordering of placement lists.
  std::uint64_t index() const { return index_; }

  /// Dense node index: users 0..K-1, relay K, destination K+1.
  std::size_t slot(NodeId node) const;
  std::size_t num_nodes() const { return users_.size() + 2; }

  /// Entry of the symmetric distance matrix (zero diagonal).
  double distance(NodeId a, NodeId b) const { return dist_[slot(a) * num_nodes() + slot(b)]; }

private:
  std::vector<Point2> users_;
  Point2 relay_;
  Point2 destination_;
  std::uint64_t index_;
  std::vector<double> dist_;
};

/// K users i.i.d. uniform over the area of the annular sector
/// {exclusion_radius <= r <= sector_radius, 0 <= phi <= sector_angle}.
NodePlacement sample_placement(const GeometryParams& params, RandomStream& rng,
                               std::uint64_t index = 0);

/// Euclidean distance between two distinct nodes. Throws DomainError for a == b.
double link_distance(const NodePlacement& p, NodeId a, NodeId b);

/// One realization of the fading amplitude of a link.
struct LinkFading {
  Link link;
  double path_gain = 1.0;        ///< d^{-gamma}
  double amplitude_sq = 0.0;     ///< |A|^2, unit-mean exponential under the true law
  std::complex<double> amplitude{0.0, 0.0};  ///< A (only when phases are drawn)

  /// |H|^2 = |A|^2 / d^gamma
  double gain_sq() const { return amplitude_sq * path_gain; }
  /// H = A / d^{gamma/2}
  std::complex<double> gain() const { return amplitude * std::sqrt(path_gain); }
};

/// Fading of every link a strategy uses in one coherence interval.
struct ChannelDraw {
  std::vector<LinkFading> links;
  /// Likelihood ratio of this draw when importance sampling is active; 1
  /// otherwise.
  double weight = 1.0;
};

/// Per-link sampling law. A link with bias mean mu < 1 draws |A|^2 from the
/// defensive mixture  mix * Exp(1) + (1 - mix) * Exp(mu)  and multiplies the
/// draw weight by the likelihood ratio; mu >= 1 samples the true law.
struct FadingBias {
  std::vector<double> mean;
  double defensive_mix = 0.5;
};

/// Reusable sampler for a fixed link set over one placement.
class FadingSampler {
public:
  FadingSampler(const NodePlacement& placement, std::vector<Link> links, double path_loss_exponent,
                bool need_phases, FadingBias bias = {});

  std::size_t num_links() const { return links_.size(); }
  const std::vector<Link>& links() const { return links_; }

  /// Fills `out` with the realization for `trial`. Reuses out's storage.
  void draw(const CounterRng& rng, std::uint64_t trial, ChannelDraw& out) const;

private:
  std::vector<Link> links_;
  std::vector<double> path_gain_;
  std::vector<std::uint32_t> link_id_;
  std::vector<double> bias_mean_;
  double mix_;
  bool need_phases_;
};

/// Convenience wrapper: one unbiased draw for `trial`.
/// Throws DomainError for an empty link set or a zero-length link.
ChannelDraw sample_channel_draw(const NodePlacement& p, std::span<const Link> links,
                                double path_loss_exponent, const CounterRng& rng,
                                std::uint64_t trial, bool need_phases);

}  // namespace tdcoop
