#include "tdcoop/network.hpp"

#include "tdcoop/errors.hpp"

#include <cmath>
#include <numbers>

namespace tdcoop {

std::string NodeId::label() const {
  switch (role_) {
    case Role::Destination: return "d";
    case Role::Relay: return "r";
    case Role::User: break;
  }
  return std::to_string(user_ + 1);
}

NodeId NodeId::parse(const std::string& text) {
  if (text == "d") return destination();
  if (text == "r") return relay();
  try {
    std::size_t used = 0;
    const long value = std::stol(text, &used);
    if (used == text.size() && value >= 1) return user(static_cast<std::size_t>(value - 1));
  } catch (const std::exception&) {
  }
  throw ConfigError("unrecognized node id '" + text + "'");
}

void GeometryParams::validate() const {
  if (!(exclusion_radius >= 0.0) || !(exclusion_radius < sector_radius)) {
    throw ConfigError("geometry: need 0 <= exclusion_radius < sector_radius");
  }
  if (!(sector_angle > 0.0) || sector_angle > 2.0 * std::numbers::pi) {
    throw ConfigError("geometry: sector_angle must lie in (0, 2*pi]");
  }
  if (!(path_loss_exponent > 0.0)) {
    throw ConfigError("geometry: path_loss_exponent must be positive");
  }
  if (num_users < 1 || num_users > kMaxUsers) {
    throw ConfigError("geometry: num_users must be in [1, " + std::to_string(kMaxUsers) + "]");
  }
}

NodePlacement::NodePlacement(std::vector<Point2> users, Point2 relay, Point2 destination,
                             std::uint64_t index)
    : users_(std::move(users)), relay_(relay), destination_(destination), index_(index) {
  if (users_.empty() || users_.size() > kMaxUsers) {
    throw ConfigError("placement: number of users out of range");
  }
  const std::size_t n = num_nodes();
  std::vector<Point2> pos(users_);
  pos.push_back(relay_);
  pos.push_back(destination_);
  dist_.assign(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = std::hypot(pos[a].x - pos[b].x, pos[a].y - pos[b].y);
      dist_[a * n + b] = d;
      dist_[b * n + a] = d;
    }
  }
}

std::size_t NodePlacement::slot(NodeId node) const {
  switch (node.role()) {
    case NodeId::Role::User:
      if (node.user_index() >= users_.size()) throw DomainError("placement: no such user");
      return node.user_index();
    case NodeId::Role::Relay: return users_.size();
    case NodeId::Role::Destination: return users_.size() + 1;
  }
  return 0;
}

Point2 NodePlacement::position(NodeId node) const {
  switch (node.role()) {
    case NodeId::Role::User: return users_.at(node.user_index());
    case NodeId::Role::Relay: return relay_;
    case NodeId::Role::Destination: return destination_;
  }
  return {};
}

NodePlacement sample_placement(const GeometryParams& params, RandomStream& rng,
                               std::uint64_t index) {
  params.validate();
  const double r0sq = params.exclusion_radius * params.exclusion_radius;
  const double r1sq = params.sector_radius * params.sector_radius;
  std::vector<Point2> users;
  users.reserve(params.num_users);
  for (std::size_t k = 0; k < params.num_users; ++k) {
    // Inverse CDF of the area-uniform radius: F(r) = (r^2 - r0^2) / (r1^2 - r0^2).
    const double r = std::sqrt(r0sq + rng.uniform() * (r1sq - r0sq));
    const double phi = rng.uniform() * params.sector_angle;
    users.push_back({params.destination.x + r * std::cos(phi),
                     params.destination.y + r * std::sin(phi)});
  }
  return NodePlacement(std::move(users), params.relay, params.destination, index);
}

double link_distance(const NodePlacement& p, NodeId a, NodeId b) {
  if (a == b) throw DomainError("link_distance: self-links carry no fading gain");
  return p.distance(a, b);
}

FadingSampler::FadingSampler(const NodePlacement& placement, std::vector<Link> links,
                             double path_loss_exponent, bool need_phases, FadingBias bias)
    : links_(std::move(links)), mix_(bias.defensive_mix), need_phases_(need_phases) {
  if (links_.empty()) throw DomainError("channel draw: link set is empty");
  if (!bias.mean.empty() && bias.mean.size() != links_.size()) {
    throw ConfigError("channel draw: one bias mean per link is required");
  }
  if (!(mix_ > 0.0 && mix_ <= 1.0)) throw ConfigError("channel draw: defensive_mix must be in (0, 1]");
  const std::size_t n = placement.num_nodes();
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const double d = link_distance(placement, links_[i].rx, links_[i].tx);
    if (!(d > 0.0)) throw DomainError("channel draw: zero-length link");
    path_gain_.push_back(std::pow(d, -path_loss_exponent));
    link_id_.push_back(
        static_cast<std::uint32_t>(placement.slot(links_[i].rx) * n + placement.slot(links_[i].tx)));
    bias_mean_.push_back(bias.mean.empty() ? 1.0 : bias.mean[i]);
  }
}

void FadingSampler::draw(const CounterRng& rng, std::uint64_t trial, ChannelDraw& out) const {
  out.links.resize(links_.size());
  out.weight = 1.0;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    LinkFading& f = out.links[i];
    f.link = links_[i];
    f.path_gain = path_gain_[i];

    const auto u = rng.uniforms(trial, link_id_[i], 0);
    const double unit_exp = -std::log1p(-u[1]);
    const double mu = bias_mean_[i];
    if (mu < 1.0) {
      const double x = (u[0] < mix_) ? unit_exp : mu * unit_exp;
      f.amplitude_sq = x;
      // f(x)/g(x) with f = Exp(1), g = mix Exp(1) + (1-mix) Exp(mu)
      out.weight /= mix_ + (1.0 - mix_) / mu * std::exp(x * (1.0 - 1.0 / mu));
    } else {
      f.amplitude_sq = unit_exp;
    }

    if (need_phases_) {
      const double phase = 2.0 * std::numbers::pi * rng.uniforms(trial, link_id_[i], 1)[0];
      f.amplitude = std::polar(std::sqrt(f.amplitude_sq), phase);
    } else {
      f.amplitude = {0.0, 0.0};
    }
  }
}

ChannelDraw sample_channel_draw(const NodePlacement& p, std::span<const Link> links,
                                double path_loss_exponent, const CounterRng& rng,
                                std::uint64_t trial, bool need_phases) {
  FadingSampler sampler(p, std::vector<Link>(links.begin(), links.end()), path_loss_exponent,
                        need_phases);
  ChannelDraw out;
  sampler.draw(rng, trial, out);
  return out;
}

}  // namespace tdcoop
