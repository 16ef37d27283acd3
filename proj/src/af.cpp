#include "tdcoop/af.hpp"

#include "tdcoop/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace tdcoop {

namespace {

double exp2m1(double e) { return std::expm1(e * std::numbers::ln2); }

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

void check_sizes(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw DomainError("AF channel: helper arrays differ in length");
  if (a + 1 > kMaxUsers) throw DomainError("AF channel: too many helpers");
}

// 24-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
constexpr std::array<double, 12> kGlNode = {
    0.0640568928626056, 0.1911188674736163, 0.3150426796961634, 0.4337935076260451,
    0.5454214713888395, 0.6480936519369755, 0.7401241915785544, 0.8200019859739029,
    0.8864155270044011, 0.9382745520027328, 0.9747285559713095, 0.9951872199970213};
constexpr std::array<double, 12> kGlWeight = {
    0.1279381953467522, 0.1258374563468283, 0.1216704729278034, 0.1155056680537256,
    0.1074442701159656, 0.0976186521041139, 0.0861901615319533, 0.0733464814110803,
    0.0592985849154368, 0.0442774388174198, 0.0285313886289337, 0.0123412297999872};

}  // namespace

double af_amplifier_gain(double h_jk_sq, double burst_j, double burst_k, double slot_fraction) {
  return std::sqrt(burst_j / slot_fraction / (h_jk_sq * burst_k + 1.0));
}

EquivalentChannel af2_equivalent_channel(cplx h_dk, std::span<const cplx> h_dj,
                                         std::span<const cplx> h_jk, std::span<const double> gain) {
  check_sizes(h_dj.size(), h_jk.size(), gain.size());
  EquivalentChannel ch;
  ch.size = 2;
  ch.h[0][0] = h_dk;
  ch.row_scale[0] = 1.0;
  cplx cross{0.0, 0.0};
  double noise = 1.0;
  for (std::size_t j = 0; j < h_dj.size(); ++j) {
    const cplx forwarded = gain[j] * h_dj[j];
    cross += forwarded * h_jk[j];
    noise += std::norm(forwarded);
  }
  const double cs = std::sqrt(noise);
  ch.row_scale[1] = cs;
  ch.h[1][0] = cross / cs;
  ch.h[1][1] = h_dk / cs;
  return ch;
}

EquivalentChannel afmh_equivalent_channel(cplx h_dk, std::span<const cplx> h_dj,
                                          std::span<const cplx> h_jk, std::span<const double> gain) {
  check_sizes(h_dj.size(), h_jk.size(), gain.size());
  EquivalentChannel ch;
  ch.size = h_dj.size() + 1;
  ch.h[0][0] = h_dk;
  ch.row_scale[0] = 1.0;
  for (std::size_t j = 0; j < h_dj.size(); ++j) {
    const cplx forwarded = gain[j] * h_dj[j];
    const cplx cross = cplx{0.0, 0.0} + forwarded * h_jk[j];
    const double cs = std::sqrt(1.0 + std::norm(forwarded));
    ch.row_scale[j + 1] = cs;
    ch.h[j + 1][0] = cross / cs;
    ch.h[j + 1][j + 1] = h_dk / cs;
  }
  return ch;
}

double log2_det_gram(const EquivalentChannel& ch, double burst_k) {
  const std::size_t n = ch.size;
  std::array<std::array<cplx, kMaxUsers>, kMaxUsers> m{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(ch.h[i][j].real()) || !std::isfinite(ch.h[i][j].imag())) {
        throw NumericError("AF channel: non-finite matrix entry");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{0.0, 0.0};
      for (std::size_t l = 0; l < n; ++l) s += ch.h[i][l] * std::conj(ch.h[j][l]);
      m[i][j] = burst_k * s + (i == j ? 1.0 : 0.0);
    }
  }
  double log_det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    if (piv != c) std::swap(m[piv], m[c]);
    const cplx d = m[c][c];
    if (d == cplx{0.0, 0.0}) throw NumericError("AF channel: singular matrix");
    log_det += std::log2(std::abs(d));
    for (std::size_t r = c + 1; r < n; ++r) {
      const cplx f = m[r][c] / d;
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  if (!std::isfinite(log_det)) throw NumericError("AF channel: non-finite determinant");
  return log_det;
}

double af_trial_mutual_info(const EquivalentChannel& ch, double burst_k) {
  if (ch.size == 0) return 0.0;
  return log2_det_gram(ch, burst_k) / static_cast<double>(ch.size);
}

BoundPair af_bounds(const StrategySpec& spec, const NodePlacement& placement, const PowerConfig& pc,
                    double gamma, std::size_t k) {
  if (spec.protocol != Protocol::Af) throw DomainError("af_bounds: not an AF strategy");
  const std::size_t num = pc.num_users();
  if (k >= num) throw DomainError("user index out of range");
  const double rate = pc.rate.at(k);
  const double p = nominal_burst_power(spec, pc, NodeId::user(k));
  if (!(p > 0.0)) throw DomainError("af_bounds: transmit power must be positive");
  const NodeId d = NodeId::destination();
  const NodeId uk = NodeId::user(k);
  const double d_dk = std::pow(link_distance(placement, d, uk), gamma);

  std::vector<NodeId> helpers;
  if (spec.network == NetworkKind::RelayCoop) {
    helpers.push_back(NodeId::relay());
  } else {
    for (std::size_t j : cooperating_set(spec, num, k)) helpers.push_back(NodeId::user(j));
  }
  if (helpers.empty()) throw DomainError("af_bounds: no helpers");

  BoundPair out;
  if (spec.network != NetworkKind::UserCoopMultiHop) {
    double inv_sum = 0.0;
    double worst = 0.0;
    for (NodeId j : helpers) {
      const double d_dj = std::pow(link_distance(placement, d, j), gamma);
      const double d_jk = std::pow(link_distance(placement, j, uk), gamma);
      inv_sum += 1.0 / d_dj;
      worst = std::max(worst, d_jk + d_dj);
    }
    const double e1 = exp2m1(rate);
    const double e2 = exp2m1(2.0 * rate);
    out.lower = e1 * e1 * d_dk / (2.0 * p * p * inv_sum);
    out.upper = e2 * e2 * d_dk * worst / (2.0 * p * p);
  } else {
    const std::size_t L = helpers.size() + 1;
    double prod_lower = d_dk;
    double prod_upper = d_dk;
    for (NodeId j : helpers) {
      const double d_dj = std::pow(link_distance(placement, d, j), gamma);
      const double d_jk = std::pow(link_distance(placement, j, uk), gamma);
      prod_lower *= d_dj;
      prod_upper *= d_dj + d_jk;
    }
    const double Ld = static_cast<double>(L);
    const double denom = factorial(L) * std::pow(p, Ld);
    out.lower = std::pow(exp2m1(rate), Ld) * prod_lower / denom;
    out.upper = std::pow(exp2m1(Ld * rate), Ld) * prod_upper / denom;
  }
  out.bracket = out.upper / out.lower;
  return out;
}

AfTrial::AfTrial(const StrategySpec& spec, const NodePlacement& placement, const PowerConfig& pc,
                 std::size_t k)
    : multihop_(spec.network == NetworkKind::UserCoopMultiHop) {
  if (spec.protocol != Protocol::Af) throw DomainError("AfTrial: not an AF strategy");
  const std::size_t num = pc.num_users();
  if (k >= num) throw DomainError("user index out of range");
  const NodeId d = NodeId::destination();
  const NodeId uk = NodeId::user(k);
  burst_k_ = nominal_burst_power(spec, pc, uk);

  std::vector<NodeId> helpers;
  if (spec.network == NetworkKind::RelayCoop) {
    helpers.push_back(NodeId::relay());
  } else {
    for (std::size_t j : cooperating_set(spec, num, k)) helpers.push_back(NodeId::user(j));
  }
  helpers_ = helpers.size();
  if (helpers_ + 1 > kMaxUsers) throw ConfigError("too many cooperating users");
  slot_fraction_ = multihop_ ? 1.0 / static_cast<double>(helpers_ + 1) : 0.5;

  links_.push_back({d, uk});
  link_power_.push_back(burst_k_);
  for (NodeId j : helpers) {
    links_.push_back({j, uk});
    link_power_.push_back(burst_k_);
    links_.push_back({d, j});
    link_power_.push_back(nominal_burst_power(spec, pc, j));
  }
  for (const Link& l : links_) link_distance(placement, l.rx, l.tx);
}

double AfTrial::mutual_info(const ChannelDraw& draw) const {
  const auto& f = draw.links;
  std::array<cplx, kMaxUsers> h_dj{};
  std::array<cplx, kMaxUsers> h_jk{};
  std::array<double, kMaxUsers> gain{};
  for (std::size_t i = 0; i < helpers_; ++i) {
    const LinkFading& listen = f[1 + 2 * i];
    const LinkFading& forward = f[2 + 2 * i];
    h_jk[i] = listen.gain();
    h_dj[i] = forward.gain();
    gain[i] = af_amplifier_gain(listen.gain_sq(), link_power_[2 + 2 * i], burst_k_, slot_fraction_);
  }
  const std::span<const cplx> dj(h_dj.data(), helpers_);
  const std::span<const cplx> jk(h_jk.data(), helpers_);
  const std::span<const double> g(gain.data(), helpers_);
  const EquivalentChannel ch = multihop_ ? afmh_equivalent_channel(f[0].gain(), dj, jk, g)
                                         : af2_equivalent_channel(f[0].gain(), dj, jk, g);
  return af_trial_mutual_info(ch, burst_k_);
}

double AfTrial::outage_probability(const ChannelDraw& draw, double rate) const {
  if (multihop_) throw DomainError("AfTrial: conditional outage needs the two-hop scheme");
  const auto& f = draw.links;
  const double P = burst_k_;
  const double g_dk = f[0].path_gain;
  if (!(P > 0.0)) return rate > 0.0 ? 1.0 : 0.0;

  // cross = u + v e^{i psi}, psi the free phase of the last helper's link.
  cplx u{0.0, 0.0};
  double v = 0.0;
  double cs2 = 1.0;
  for (std::size_t i = 0; i < helpers_; ++i) {
    const LinkFading& listen = f[1 + 2 * i];
    const LinkFading& forward = f[2 + 2 * i];
    const double c = af_amplifier_gain(listen.gain_sq(), link_power_[2 + 2 * i], burst_k_, slot_fraction_);
    cs2 += c * c * forward.gain_sq();
    const double mag = c * std::sqrt(forward.gain_sq() * listen.gain_sq());
    if (i + 1 < helpers_) {
      u += c * forward.gain() * listen.gain();
    } else {
      v = mag;
    }
  }
  const double target = std::exp2(2.0 * rate);  // det threshold
  const double qa = P * P / cs2;
  const double qb = P * (1.0 + 1.0 / cs2);

  // Pr(|A_dk|^2 g_dk below the root of the det quadratic) for cross power b2.
  auto given_cross = [&](double b2) {
    const double qc = 1.0 + P * b2 / cs2 - target;
    if (qc >= 0.0) return 0.0;
    const double x = 2.0 * -qc / (qb + std::sqrt(qb * qb - 4.0 * qa * qc));
    return -std::expm1(-x / g_dk);
  };

  const double uu = std::abs(u);
  if (uu * v == 0.0) return given_cross(uu * uu + v * v);

  // Outage needs cos(psi) below c0; average over psi in [0, pi].
  const double c0 = ((target - 1.0) * cs2 / P - uu * uu - v * v) / (2.0 * uu * v);
  if (c0 <= -1.0) return 0.0;
  const double lo = c0 >= 1.0 ? 0.0 : std::acos(c0);
  const double half = 0.5 * (std::numbers::pi - lo);
  const double mid = lo + half;
  double sum = 0.0;
  for (std::size_t n = 0; n < kGlNode.size(); ++n) {
    for (double sign : {-1.0, 1.0}) {
      const double psi = mid + sign * half * kGlNode[n];
      sum += kGlWeight[n] * given_cross(uu * uu + v * v + 2.0 * uu * v * std::cos(psi));
    }
  }
  return std::clamp(sum * half / std::numbers::pi, 0.0, 1.0);
}

}  // namespace tdcoop
