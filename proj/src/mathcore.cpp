#include "tdcoop/mathcore.hpp"

#include "tdcoop/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdcoop {

double capacity(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError("capacity: argument must be finite and non-negative");
  }
  return std::log2(1.0 + x);
}

namespace {

void validate_weights(const std::vector<double>& weights) {
  if (weights.empty()) {
    throw DomainError("WeightedExpSum: at least one weight is required");
  }
  for (double c : weights) {
    if (!std::isfinite(c) || c <= 0.0) {
      throw DomainError("WeightedExpSum: weights must be finite and positive");
    }
  }
}

bool nearly_equal(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(a, b);
}

// 0, +1, -1, +2, -2, ...
double separation_step(std::size_t member) {
  if (member == 0) return 0.0;
  const auto k = static_cast<double>((member + 1) / 2);
  return (member % 2 == 1) ? k : -k;
}

}  // namespace

WeightedExpSum::WeightedExpSum(std::vector<double> weights, Raw)
    : weights_(std::move(weights)) {
  validate_weights(weights_);
}

WeightedExpSum WeightedExpSum::unseparated(std::vector<double> weights) {
  return WeightedExpSum(std::move(weights), Raw{});
}

WeightedExpSum::WeightedExpSum(std::vector<double> weights)
    : weights_(std::move(weights)) {
  validate_weights(weights_);

  // Cluster on sorted order; consecutive near-equal weights share a cluster.
  std::vector<std::size_t> order(weights_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return weights_[a] < weights_[b];
  });

  std::vector<double> adjusted = weights_;
  std::size_t member = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double prev = weights_[order[i - 1]];
    const double cur = weights_[order[i]];
    if (nearly_equal(prev, cur, kSeparationTolerance)) {
      ++member;
      adjusted[order[i]] = cur * (1.0 + separation_step(member) * kSeparationTolerance);
    } else {
      member = 0;
    }
  }
  weights_ = std::move(adjusted);
}

std::vector<double> hypoexp_coefficients(const WeightedExpSum& w) {
  const auto c = w.weights();
  const std::size_t n = c.size();
  if (n == 1) return {1.0};

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (nearly_equal(c[i], c[j], 1e-9)) {
        throw DegenerateWeightsError("hypoexp_coefficients: duplicate weights");
      }
    }
  }

  std::vector<double> coeffs(n);
  for (std::size_t l = 0; l < n; ++l) {
    long double num = 1.0L;
    long double den = 1.0L;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == l) continue;
      num *= -static_cast<long double>(c[l]);
      den *= static_cast<long double>(c[j]) - static_cast<long double>(c[l]);
    }
    coeffs[l] = static_cast<double>(num / den);
  }
  return coeffs;
}

namespace {

// F(eta) = prod(lambda) * sum_{m>=0} (-1)^m h_m(lambda) eta^{L+m} / (L+m)!
// with h_m the complete homogeneous symmetric polynomial of the rates.
long double cdf_series(std::span<const double> weights, long double eta) {
  const std::size_t n = weights.size();
  std::vector<long double> rate(n);
  long double rate_prod = 1.0L;
  for (std::size_t i = 0; i < n; ++i) {
    rate[i] = 1.0L / static_cast<long double>(weights[i]);
    rate_prod *= rate[i];
  }

  // h[i] holds h_m over the first i+1 rates for the current degree m.
  std::vector<long double> h(n, 1.0L);

  // term_m = eta^{L+m} / (L+m)!
  long double term = 1.0L;
  for (std::size_t i = 1; i <= n; ++i) term *= eta / static_cast<long double>(i);

  long double sum = term;  // m = 0, h_0 = 1
  for (std::size_t m = 1; m < 400; ++m) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      acc += rate[i] * h[i];
      h[i] = acc;
    }
    term *= eta / static_cast<long double>(n + m);
    const long double contrib = term * h[n - 1];
    sum += (m % 2 == 1) ? -contrib : contrib;
    if (contrib <= 1e-22L * std::abs(sum)) break;
  }
  return rate_prod * sum;
}

// Uniformization of the pure-death chain that passes through one phase per
// weight: F(eta) = sum_n Pois(n; Lambda eta) a_n, with a_n the probability of
// absorption within n steps of the embedded chain. Every term is
// non-negative, so nearly equal weights cause no cancellation.
long double cdf_uniformized(std::span<const double> weights, double eta) {
  const std::size_t n = weights.size();
  std::vector<long double> rate(n);
  long double lambda = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    rate[i] = 1.0L / static_cast<long double>(weights[i]);
    lambda = std::max(lambda, rate[i]);
  }
  const long double mean = lambda * eta;
  const auto last = static_cast<std::size_t>(mean + 12.0L * std::sqrt(mean) + 40.0L);

  std::vector<long double> phase(n, 0.0L);
  phase[0] = 1.0L;
  long double absorbed = 0.0L;
  long double sum = 0.0L;
  const long double log_mean = std::log(mean);
  // Poisson weights by recurrence while exp(-mean) is representable.
  const bool recur = mean < 10000.0L;
  long double pois = std::exp(-mean);
  for (std::size_t step = 0; step <= last; ++step) {
    const long double k = static_cast<long double>(step);
    if (recur && step > 0) pois *= mean / k;
    if (absorbed > 0.0L) {
      const long double p = recur ? pois : std::exp(-mean + k * log_mean - std::lgamma(k + 1.0L));
      sum += p * absorbed;
    }
    // One step of the embedded chain, last phase first.
    absorbed += phase[n - 1] * rate[n - 1] / lambda;
    for (std::size_t i = n - 1; i > 0; --i) {
      phase[i] = phase[i] * (1.0L - rate[i] / lambda) + phase[i - 1] * rate[i - 1] / lambda;
    }
    phase[0] *= 1.0L - rate[0] / lambda;
  }
  return sum;
}

// Coefficient form is used only while rounding in the coefficients stays
// below this absolute error.
constexpr double kMaxCoefficient = 1e6;
// Work limit for uniformization (expected number of steps).
constexpr double kMaxUniformSteps = 2e6;

}  // namespace

double hypoexp_cdf(const WeightedExpSum& w, double eta) {
  if (!(eta >= 0.0)) throw DomainError("hypoexp_cdf: eta must be non-negative");
  if (eta == 0.0) return 0.0;
  if (std::isinf(eta)) return 1.0;

  const auto c = w.weights();
  const double c_min = *std::min_element(c.begin(), c.end());

  long double value = 0.0L;
  if (eta <= 2.0 * c_min) {
    value = cdf_series(c, eta);
  } else {
    const auto coeffs = hypoexp_coefficients(w);
    double largest = 0.0;
    for (double x : coeffs) largest = std::max(largest, std::abs(x));
    if (largest > kMaxCoefficient && eta / c_min <= kMaxUniformSteps) {
      return std::clamp(static_cast<double>(cdf_uniformized(c, eta)), 0.0, 1.0);
    }
    for (std::size_t l = 0; l < c.size(); ++l) {
      value += -static_cast<long double>(coeffs[l]) *
               std::expm1(-static_cast<long double>(eta) / static_cast<long double>(c[l]));
    }
  }
  return std::clamp(static_cast<double>(value), 0.0, 1.0);
}

double hypoexp_leading_cdf_term(const WeightedExpSum& w, double eta) {
  if (!(eta >= 0.0)) throw DomainError("hypoexp_leading_cdf_term: eta must be non-negative");
  if (eta == 0.0) return 0.0;
  double value = 1.0;
  std::size_t l = 1;
  for (double c : w.weights()) {
    value *= eta / (static_cast<double>(l) * c);
    ++l;
  }
  return value;
}

}  // namespace tdcoop
