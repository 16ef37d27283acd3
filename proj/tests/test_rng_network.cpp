#include "tdcoop/errors.hpp"
#include "tdcoop/network.hpp"
#include "tdcoop/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace tdcoop;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter rng is a pure function of its indices") {
  const CounterRng a(derive_key(9, StreamDomain::Fading, 3, 1));
  const CounterRng b(derive_key(9, StreamDomain::Fading, 3, 1));
  CHECK(a.uniforms(77, 2, 0) == b.uniforms(77, 2, 0));
  CHECK(a.uniforms(77, 2, 0) != a.uniforms(78, 2, 0));
  CHECK(a.uniforms(77, 2, 0) != a.uniforms(77, 3, 0));
  CHECK(derive_key(9, StreamDomain::Fading, 3, 1) != derive_key(9, StreamDomain::Geometry, 3, 1));
  CHECK(derive_key(9, StreamDomain::Fading, 3, 1) != derive_key(10, StreamDomain::Fading, 3, 1));

  RandomStream s(derive_key(1, StreamDomain::Test));
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("node labels") {
  CHECK(NodeId::user(0).label() == "1");
  CHECK(NodeId::relay().label() == "r");
  CHECK(NodeId::destination().label() == "d");
  CHECK(NodeId::parse("3") == NodeId::user(2));
  CHECK(NodeId::parse("r") == NodeId::relay());
  CHECK_THROWS_AS(NodeId::parse("0"), ConfigError);
  CHECK_THROWS_AS(NodeId::parse("x"), ConfigError);
}

TEST_CASE("geometry validation") {
  GeometryParams g;
  CHECK_NOTHROW(g.validate());
  g.exclusion_radius = 1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = {};
  g.sector_angle = 0.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = {};
  g.num_users = 0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.num_users = kMaxUsers + 1;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = {};
  g.path_loss_exponent = 0.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("placements stay inside the sector and are area uniform") {
  GeometryParams g;
  RandomStream rng(derive_key(2, StreamDomain::Geometry));
  double r_sum = 0.0;
  std::size_t n = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto p = sample_placement(g, rng, i);
    REQUIRE(p.num_users() == 3);
    CHECK(p.index() == static_cast<std::uint64_t>(i));
    for (const auto& u : p.users()) {
      const double r = std::hypot(u.x, u.y);
      const double phi = std::atan2(u.y, u.x);
      REQUIRE(r >= 0.3 - 1e-12);
      REQUIRE(r <= 1.0 + 1e-12);
      REQUIRE(phi >= -1e-12);
      REQUIRE(phi <= std::numbers::pi / 3 + 1e-12);
      r_sum += r;
      ++n;
    }
  }
  // E[r] = (2/3)(1 - a^3)/(1 - a^2) with a = 0.3
  const double mean_r = r_sum / static_cast<double>(n);
  CHECK(mean_r == doctest::Approx(2.0 / 3.0 * (1 - 0.027) / (1 - 0.09)).epsilon(3e-3));
  CHECK(std::abs(mean_r - 0.71282) < 0.005);
}

TEST_CASE("link distances") {
  const NodePlacement p({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.0}, {0.0, 0.0});
  CHECK(link_distance(p, NodeId::user(0), NodeId::destination()) == doctest::Approx(1.0));
  CHECK(link_distance(p, NodeId::user(0), NodeId::relay()) == doctest::Approx(0.5));
  CHECK(link_distance(p, NodeId::user(0), NodeId::user(1)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(p.distance(NodeId::user(1), NodeId::user(0)) == p.distance(NodeId::user(0), NodeId::user(1)));
  CHECK_THROWS_AS(link_distance(p, NodeId::relay(), NodeId::relay()), DomainError);
  CHECK_THROWS_AS(p.slot(NodeId::user(5)), DomainError);
  CHECK(p.slot(NodeId::relay()) == 2);
  CHECK(p.slot(NodeId::destination()) == 3);
}

TEST_CASE("fading statistics") {
  const NodePlacement p({{1.0, 0.0}, {0.5, 0.0}}, {0.5, 0.5}, {0.0, 0.0});
  const std::vector<Link> links = {{NodeId::destination(), NodeId::user(0)},
                                   {NodeId::destination(), NodeId::user(1)}};
  const CounterRng rng(derive_key(4, StreamDomain::Fading));
  const FadingSampler sampler(p, links, 4.0, true);
  ChannelDraw draw;
  const int n = 1'000'000;
  double a0 = 0, h1 = 0, prod = 0, a1 = 0, a0sq = 0, a1sq = 0, re = 0, re2 = 0, im = 0, im2 = 0, reim = 0;
  for (int t = 0; t < n; ++t) {
    sampler.draw(rng, t, draw);
    REQUIRE(draw.weight == 1.0);
    const auto& l0 = draw.links[0];
    const auto& l1 = draw.links[1];
    CHECK(std::abs(std::norm(l0.amplitude) - l0.amplitude_sq) < 1e-9 * (1 + l0.amplitude_sq));
    a0 += l0.amplitude_sq;
    a1 += l1.amplitude_sq;
    a0sq += l0.amplitude_sq * l0.amplitude_sq;
    a1sq += l1.amplitude_sq * l1.amplitude_sq;
    prod += l0.amplitude_sq * l1.amplitude_sq;
    h1 += l1.gain_sq();
    re += l0.amplitude.real();
    im += l0.amplitude.imag();
    re2 += l0.amplitude.real() * l0.amplitude.real();
    im2 += l0.amplitude.imag() * l0.amplitude.imag();
    reim += l0.amplitude.real() * l0.amplitude.imag();
  }
  a0 /= n;
  a1 /= n;
  CHECK(std::abs(a0 - 1.0) < 0.004);
  CHECK(std::abs(h1 / n - 16.0) < 0.1);
  const double cov = prod / n - a0 * a1;
  const double corr = cov / std::sqrt((a0sq / n - a0 * a0) * (a1sq / n - a1 * a1));
  CHECK(std::abs(corr) < 0.01);
  CHECK(std::abs(re / n) < 0.003);
  CHECK(std::abs(im / n) < 0.003);
  CHECK(std::abs(re2 / n - 0.5) < 0.003);
  CHECK(std::abs(im2 / n - 0.5) < 0.003);
  CHECK(std::abs(reim / n) < 0.003);
}

TEST_CASE("fading draws are reproducible and keyed per link") {
  const NodePlacement p({{1.0, 0.0}, {0.5, 0.3}}, {0.5, 0.0}, {0.0, 0.0});
  const CounterRng rng(derive_key(4, StreamDomain::Fading));
  const std::vector<Link> ab = {{NodeId::destination(), NodeId::user(0)},
                                {NodeId::destination(), NodeId::user(1)}};
  const std::vector<Link> ba = {ab[1], ab[0]};
  const auto x = sample_channel_draw(p, ab, 4.0, rng, 12, false);
  const auto y = sample_channel_draw(p, ba, 4.0, rng, 12, false);
  const auto z = sample_channel_draw(p, ab, 4.0, rng, 12, false);
  CHECK(x.links[0].amplitude_sq == y.links[1].amplitude_sq);
  CHECK(x.links[1].amplitude_sq == y.links[0].amplitude_sq);
  CHECK(x.links[0].amplitude_sq == z.links[0].amplitude_sq);
  CHECK_THROWS_AS(sample_channel_draw(p, std::vector<Link>{}, 4.0, rng, 0, false), DomainError);
  const NodePlacement coincident({{0.5, 0.0}}, {0.5, 0.0}, {0.0, 0.0});
  const std::vector<Link> zero = {{NodeId::relay(), NodeId::user(0)}};
  CHECK_THROWS_AS(sample_channel_draw(coincident, zero, 4.0, rng, 0, false), DomainError);
}

TEST_CASE("importance sampling weights are unbiased") {
  const NodePlacement p({{1.0, 0.0}}, {0.5, 0.0}, {0.0, 0.0});
  const std::vector<Link> links = {{NodeId::destination(), NodeId::user(0)}};
  const CounterRng rng(derive_key(8, StreamDomain::Fading));
  const FadingSampler sampler(p, links, 4.0, false, FadingBias{{0.01}, 0.5});
  ChannelDraw draw;
  const int n = 1'000'000;
  double w = 0, event = 0, event_sq = 0;
  const double eta = 1e-3;
  for (int t = 0; t < n; ++t) {
    sampler.draw(rng, t, draw);
    w += draw.weight;
    const double e = draw.links[0].amplitude_sq <= eta ? draw.weight : 0.0;
    event += e;
    event_sq += e * e;
  }
  CHECK(std::abs(w / n - 1.0) < 0.01);
  const double p_hat = event / n;
  const double se = std::sqrt((event_sq / n - p_hat * p_hat) / n);
  const double truth = -std::expm1(-eta);
  CHECK(std::abs(p_hat - truth) < 4 * se);
  // The biased law should resolve a 1e-3 event far better than plain sampling.
  CHECK(se < 0.3 * std::sqrt(truth / n));
  CHECK_THROWS_AS(FadingSampler(p, links, 4.0, false, FadingBias{{0.5, 0.5}, 0.5}), ConfigError);
  CHECK_THROWS_AS(FadingSampler(p, links, 4.0, false, FadingBias{{0.5}, 0.0}), ConfigError);
}
