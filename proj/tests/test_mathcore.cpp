#include "tdcoop/errors.hpp"
#include "tdcoop/mathcore.hpp"
#include "tdcoop/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace tdcoop;

namespace {

std::vector<double> exp_sum_samples(const std::vector<double>& c, std::size_t n, std::uint64_t seed) {
  const CounterRng rng(derive_key(seed, StreamDomain::Test));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (std::size_t l = 0; l < c.size(); ++l) {
      h += c[l] * -std::log1p(-rng.uniforms(i, static_cast<std::uint32_t>(l), 0)[0]);
    }
    out[i] = h;
  }
  return out;
}

double ecdf_sup_distance(std::vector<double> samples, const WeightedExpSum& w) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = hypoexp_cdf(w, samples[i]);
    sup = std::max({sup, std::abs(f - static_cast<double>(i + 1) / n), std::abs(f - static_cast<double>(i) / n)});
  }
  return sup;
}

}  // namespace

TEST_CASE("capacity") {
  CHECK(capacity(0.0) == 0.0);
  CHECK(capacity(1.0) == doctest::Approx(1.0));
  CHECK(capacity(3.0) == doctest::Approx(2.0));
  CHECK(capacity(1e-12) > 0.0);
  CHECK_THROWS_AS(capacity(-1e-9), DomainError);
  CHECK_THROWS_AS(capacity(std::nan("")), DomainError);
  CHECK_THROWS_AS(capacity(INFINITY), DomainError);
}

TEST_CASE("hypoexp coefficients") {
  auto one = hypoexp_coefficients(WeightedExpSum({1.0}));
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.0));

  auto two = hypoexp_coefficients(WeightedExpSum({1.0, 2.0}));
  CHECK(two[0] == doctest::Approx(-1.0));
  CHECK(two[1] == doctest::Approx(2.0));

  auto three = hypoexp_coefficients(WeightedExpSum({1.0, 2.0, 3.0}));
  CHECK(three[0] == doctest::Approx(0.5));
  CHECK(three[1] == doctest::Approx(-4.0));
  CHECK(three[2] == doctest::Approx(4.5));

  CHECK_THROWS_AS(hypoexp_coefficients(WeightedExpSum::unseparated({2.0, 2.0})), DegenerateWeightsError);
  CHECK_THROWS_AS(WeightedExpSum({}), DomainError);
  CHECK_THROWS_AS(WeightedExpSum({1.0, -1.0}), DomainError);
}

TEST_CASE("hypoexp coefficients sum to one for random weight sets") {
  RandomStream rng(derive_key(5, StreamDomain::Test));
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t L = 1 + rep % 6;
    std::vector<double> c;
    for (std::size_t l = 0; l < L; ++l) c.push_back(std::exp(4.0 * rng.uniform() - 2.0));
    const auto coeffs = hypoexp_coefficients(WeightedExpSum(c));
    const double sum = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
}

TEST_CASE("separation of repeated weights") {
  WeightedExpSum w({1.0, 1.0, 1.0});
  const auto c = w.weights();
  CHECK(c[0] != c[1]);
  CHECK(c[1] != c[2]);
  CHECK(c[0] != c[2]);
  for (double x : c) CHECK(std::abs(x - 1.0) < 1e-5);
  // Erlang-3 at eta = 1: 1 - e^{-1}(1 + 1 + 1/2)
  CHECK(hypoexp_cdf(w, 1.0) == doctest::Approx(1.0 - std::exp(-1.0) * 2.5).epsilon(1e-5));
}

TEST_CASE("repeated weights stay accurate far into the tail") {
  // Erlang-4 with unit weights.
  WeightedExpSum w({1.0, 1.0, 1.0, 1.0});
  for (double eta : {0.5, 2.5, 4.0, 10.0, 30.0}) {
    const double erlang = 1.0 - std::exp(-eta) * (1 + eta + eta * eta / 2 + eta * eta * eta / 6);
    CHECK(std::abs(hypoexp_cdf(w, eta) - erlang) < 1e-5);
  }
  // A well separated weight next to a tight cluster.
  WeightedExpSum mixed({0.05, 2.0, 2.0 * (1 + 2e-6), 2.0 * (1 - 3e-6)});
  double prev = 0.0;
  for (double eta = 0.01; eta < 100.0; eta *= 1.3) {
    const double f = hypoexp_cdf(mixed, eta);
    CHECK(f >= prev - 1e-12);
    prev = f;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hypoexp cdf examples") {
  CHECK(hypoexp_cdf(WeightedExpSum({1.0}), std::log(2.0)) == doctest::Approx(0.5));
  CHECK(hypoexp_cdf(WeightedExpSum({1.0, 2.0}), 1.0) == doctest::Approx(0.154818).epsilon(1e-5));
  // Near-degenerate pair against the Erlang-2 closed form.
  const double erlang = 1.0 - 2.0 * std::exp(-1.0);
  CHECK(hypoexp_cdf(WeightedExpSum({1.0, 1.0 + 1e-9}), 1.0) == doctest::Approx(erlang).epsilon(1e-5));
  CHECK(hypoexp_cdf(WeightedExpSum({1.0, 2.0}), 0.0) == 0.0);
  CHECK(hypoexp_cdf(WeightedExpSum({1.0, 2.0}), INFINITY) == 1.0);
  CHECK_THROWS_AS(hypoexp_cdf(WeightedExpSum({1.0}), -0.1), DomainError);
}

TEST_CASE("hypoexp cdf matches a Monte Carlo oracle at weights (1,2)") {
  const auto s = exp_sum_samples({1.0, 2.0}, 10'000'000, 17);
  const double frac =
      static_cast<double>(std::count_if(s.begin(), s.end(), [](double h) { return h <= 1.0; })) / s.size();
  const double se = std::sqrt(frac * (1 - frac) / s.size());
  CHECK(std::abs(frac - hypoexp_cdf(WeightedExpSum({1.0, 2.0}), 1.0)) < 4.0 * se);
}

TEST_CASE("hypoexp cdf tracks empirical CDFs in sup norm") {
  const std::vector<std::vector<double>> sets = {
      {0.7}, {1.0, 2.5}, {0.3, 1.0, 4.0}, {0.5, 0.9, 1.7, 3.1}, {2.0, 2.0 * (1 + 1e-8), 0.4}};
  std::uint64_t seed = 100;
  for (const auto& c : sets) {
    const double d = ecdf_sup_distance(exp_sum_samples(c, 1'000'000, seed++), WeightedExpSum(c));
    CHECK(d < 3e-3);
  }
}

TEST_CASE("series and coefficient forms agree") {
  // Just below and above the switch point the two evaluation paths meet.
  for (const auto& c : std::vector<std::vector<double>>{{1.0, 2.0}, {0.5, 1.5, 2.0}, {1.0, 1.1, 1.2, 1.3}}) {
    WeightedExpSum w(c);
    const double switch_at = 2.0 * *std::min_element(c.begin(), c.end());
    const double below = hypoexp_cdf(w, switch_at * (1 - 1e-12));
    const double above = hypoexp_cdf(w, switch_at * (1 + 1e-12));
    CHECK(std::abs(below - above) < 1e-9);
  }
}

TEST_CASE("leading term") {
  CHECK(hypoexp_leading_cdf_term(WeightedExpSum({1.0}), 0.01) == doctest::Approx(0.01));
  CHECK(hypoexp_leading_cdf_term(WeightedExpSum({1.0, 2.0}), 0.1) == doctest::Approx(0.0025));
  CHECK(hypoexp_leading_cdf_term(WeightedExpSum({1.0, 2.0}), 0.0) == 0.0);
  const WeightedExpSum w({1.0, 2.0});
  CHECK(std::abs(hypoexp_cdf(w, 1e-3) / hypoexp_leading_cdf_term(w, 1e-3) - 1.0) < 1e-3);
}

TEST_CASE("leading term ratio tends to one for random sets") {
  RandomStream rng(derive_key(6, StreamDomain::Test));
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t L = 1 + rep % 6;
    std::vector<double> c;
    for (std::size_t l = 0; l < L; ++l) c.push_back(std::exp(4.0 * rng.uniform() - 2.0));
    WeightedExpSum w(c);
    const double eta = 1e-3 * *std::min_element(c.begin(), c.end());
    CHECK(std::abs(hypoexp_cdf(w, eta) / hypoexp_leading_cdf_term(w, eta) - 1.0) < 0.01);
  }
}

TEST_CASE("hypoexp cdf is monotone") {
  for (const auto& c : std::vector<std::vector<double>>{{1.0}, {1.0, 3.0}, {0.2, 0.21, 5.0}, {1, 2, 3, 4, 5, 6}}) {
    WeightedExpSum w(c);
    double prev = 0.0;
    for (double eta = 1e-6; eta < 200.0; eta *= 1.05) {
      const double f = hypoexp_cdf(w, eta);
      CHECK(f >= prev);
      CHECK(f <= 1.0);
      prev = f;
    }
    CHECK(prev == doctest::Approx(1.0));
  }
}
