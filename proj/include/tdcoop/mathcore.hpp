#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tdcoop {

/// Shannon capacity log2(1 + x) in bits per channel use.
/// Throws DomainError for negative or non-finite x.
double capacity(double x);

/// Weighted sum H = sum_l c_l E_l of i.i.d. unit-mean exponentials.
///
/// Weights must be finite and strictly positive. Weights that agree to within
/// a relative 1e-6 are pulled apart multiplicatively (factors 1, 1+1e-6,
/// 1-1e-6, 1+2e-6, ...) so the distinct-weight closed form applies; the
/// induced CDF error is O(1e-6).
class WeightedExpSum {
public:
  static constexpr double kSeparationTolerance = 1e-6;

  explicit WeightedExpSum(std::vector<double> weights);

  /// Builds the sum without the separation step. Only useful for exercising
  /// the degenerate-weight error path.
  static WeightedExpSum unseparated(std::vector<double> weights);

  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }

private:
  struct Raw {};
  WeightedExpSum(std::vector<double> weights, Raw);

  std::vector<double> weights_;
};

/// Mixing coefficients C_l of the hypoexponential density. They sum to one.
/// Throws DegenerateWeightsError if two weights are still (relatively) equal.
std::vector<double> hypoexp_coefficients(const WeightedExpSum& w);

/// Pr(H <= eta). Exactly 0 at eta = 0. Throws DomainError for eta < 0.
///
/// Small arguments (eta <= 2 min c_l) are summed through the alternating
/// power series whose coefficients are complete homogeneous symmetric
/// polynomials of the rates 1/c_l; larger arguments use the coefficient form
/// accumulated in long double, or uniformization of the equivalent phase-type
/// chain when the coefficients are too large for that to be accurate
/// (clusters of nearly equal weights).
double hypoexp_cdf(const WeightedExpSum& w, double eta);

/// First non-vanishing Taylor term of the CDF at zero, eta^L / (L! prod c_l).
double hypoexp_leading_cdf_term(const WeightedExpSum& w, double eta);

}  // namespace tdcoop
