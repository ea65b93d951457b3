#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace adjes {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Probability levels closer than this are treated as the same breakpoint.
inline constexpr double kLevelTol = 1e-14;

struct Atom {
  double value;
  double mass;
};

/// Left-continuous, piecewise-constant quantile function p -> VaR_p on [0, 1].
///
/// The function equals values()[k] on (b_{k-1}, b_k] with b_{-1} = 0, and
/// values()[0] at p = 0. The last breakpoint is always exactly 1. The
/// integrated quantile H(p) = int_p^1 VaR_u du is cached at construction, so
/// every evaluation is exact and O(log n).
class StepQuantile {
 public:
  StepQuantile(std::vector<double> breakpoints, std::vector<double> values);

  static StepQuantile constant(double value);

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double var(double p) const;
  double es(double p) const;
  double tail_integral(double p) const;

  double mean() const noexcept { return tail_.front(); }
  double min() const noexcept { return values_.front(); }
  double max() const noexcept { return values_.back(); }

  /// (value, probability mass) per interval, in ascending order.
  std::vector<Atom> atoms() const;

  StepQuantile shifted(double m) const;
  /// Quantile of lambda * X for lambda >= 0.
  StepQuantile scaled(double lambda) const;
  /// Same function with the given levels in (0, 1) added as breakpoints.
  StepQuantile refined(std::span<const double> levels) const;
  /// Adjacent intervals with equal values merged.
  StepQuantile canonical() const;

 private:
  std::size_t interval_of(double p) const;

  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> tail_;  // tail_[k] = H(start of interval k); tail_.back() = 0
};

/// Normal loss N(mu, sigma^2); sigma = 0 is a constant loss.
class GaussianLoss {
 public:
  GaussianLoss(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }

 private:
  double mu_;
  double sigma_;
};

/// ES curve p -> ES_p(X) of a step quantile; H is piecewise affine on the
/// quantile's breakpoints.
class ESCurve {
 public:
  explicit ESCurve(StepQuantile source);

  double operator()(double p) const { return source_.es(p); }
  double tail_integral(double p) const { return source_.tail_integral(p); }

  /// 0 followed by every breakpoint below 1.
  const std::vector<double>& knots() const noexcept { return knots_; }
  /// Curve values at knots().
  const std::vector<double>& knot_values() const noexcept { return knot_values_; }
  const StepQuantile& source() const noexcept { return source_; }

 private:
  StepQuantile source_;
  std::vector<double> knots_;
  std::vector<double> knot_values_;
};

StepQuantile empirical_from_samples(std::span<const double> samples);
StepQuantile empirical_from_samples(std::span<const double> samples,
                                    std::span<const double> weights);

double var(const StepQuantile& dist, double p);
double var(const GaussianLoss& dist, double p);
double es(const StepQuantile& dist, double p);
double es(const GaussianLoss& dist, double p);

/// mu + sigma * phi(Phi^{-1}(p)) / (1 - p) for p in (0, 1).
double gaussian_es(double mu, double sigma, double p);

ESCurve es_curve(const StepQuantile& dist);

/// Equiprobable discretization with `atoms` bins; each bin carries the
/// conditional mean of the normal law on it, so ES is exact at every level
/// that is a multiple of 1/atoms.
StepQuantile discretize(const GaussianLoss& dist, std::size_t atoms);

/// Quantile of the comonotone sum: quantiles add pointwise.
StepQuantile comonotone_sum(std::span<const StepQuantile> parts);

/// Sorted union of level sets, dropping near-duplicates (kLevelTol).
std::vector<double> merge_levels(std::span<const double> a, std::span<const double> b);

void check_level(double p);

}  // namespace adjes
