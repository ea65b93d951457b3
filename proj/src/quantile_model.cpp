#include "adjes/quantile_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "adjes/errors.hpp"
#include "adjes/normal.hpp"

namespace adjes {

void check_level(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::OutOfRangeLevel, "probability level " + std::to_string(p) +
                                                " outside [0, 1]");
  }
}

StepQuantile::StepQuantile(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
    throw Error(ErrorCode::InvalidQuantile,
                "breakpoints and values must be nonempty and of equal length");
  }
  if (std::abs(breakpoints_.back() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidQuantile, "last breakpoint must be 1");
  }
  breakpoints_.back() = 1.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > prev) || breakpoints_[k] > 1.0) {
      throw Error(ErrorCode::InvalidQuantile,
                  "breakpoints must be strictly increasing in (0, 1]");
    }
    if (!std::isfinite(values_[k])) {
      throw Error(ErrorCode::InvalidQuantile, "quantile values must be finite");
    }
    if (k > 0 && values_[k] < values_[k - 1]) {
      throw Error(ErrorCode::InvalidQuantile, "quantile values must be nondecreasing");
    }
    prev = breakpoints_[k];
  }

  const std::size_t n = values_.size();
  tail_.assign(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const double start = k == 0 ? 0.0 : breakpoints_[k - 1];
    tail_[k] = tail_[k + 1] + values_[k] * (breakpoints_[k] - start);
  }
}

StepQuantile StepQuantile::constant(double value) { return StepQuantile({1.0}, {value}); }

std::size_t StepQuantile::interval_of(double p) const {
  if (p <= 0.0) return 0;
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), p);
  const auto k = static_cast<std::size_t>(it - breakpoints_.begin());
  return std::min(k, values_.size() - 1);
}

double StepQuantile::var(double p) const {
  check_level(p);
  return values_[interval_of(p)];
}

double StepQuantile::tail_integral(double p) const {
  check_level(p);
  if (p == 1.0) return 0.0;
  const std::size_t k = interval_of(p);
  return values_[k] * (breakpoints_[k] - p) + tail_[k + 1];
}

double StepQuantile::es(double p) const {
  check_level(p);
  if (p == 0.0) return mean();
  const std::size_t k = interval_of(p);
  if (k + 1 == values_.size()) return values_[k];
  return (values_[k] * (breakpoints_[k] - p) + tail_[k + 1]) / (1.0 - p);
}

std::vector<Atom> StepQuantile::atoms() const {
  std::vector<Atom> out;
  out.reserve(values_.size());
  double start = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    out.push_back({values_[k], breakpoints_[k] - start});
    start = breakpoints_[k];
  }
  return out;
}

StepQuantile StepQuantile::shifted(double m) const {
  std::vector<double> v(values_);
  for (double& x : v) x += m;
  return StepQuantile(breakpoints_, std::move(v));
}

StepQuantile StepQuantile::scaled(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidArgument, "scale factor must be finite and nonnegative");
  }
  std::vector<double> v(values_);
  for (double& x : v) x *= lambda;
  return StepQuantile(breakpoints_, std::move(v));
}

StepQuantile StepQuantile::refined(std::span<const double> levels) const {
  std::vector<double> inner;
  for (double p : levels) {
    if (p > 0.0 && p < 1.0) inner.push_back(p);
  }
  std::sort(inner.begin(), inner.end());
  std::vector<double> bps = merge_levels(breakpoints_, inner);
  std::vector<double> vals;
  vals.reserve(bps.size());
  double start = 0.0;
  for (double b : bps) {
    vals.push_back(var(0.5 * (start + b)));
    start = b;
  }
  return StepQuantile(std::move(bps), std::move(vals));
}

StepQuantile StepQuantile::canonical() const {
  std::vector<double> bps;
  std::vector<double> vals;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!vals.empty() && vals.back() == values_[k]) {
      bps.back() = breakpoints_[k];
    } else {
      bps.push_back(breakpoints_[k]);
      vals.push_back(values_[k]);
    }
  }
  return StepQuantile(std::move(bps), std::move(vals));
}

GaussianLoss::GaussianLoss(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "GaussianLoss needs finite mu and sigma >= 0");
  }
}

ESCurve::ESCurve(StepQuantile source) : source_(std::move(source)) {
  knots_.push_back(0.0);
  for (double b : source_.breakpoints()) {
    if (b < 1.0) knots_.push_back(b);
  }
  knot_values_.reserve(knots_.size());
  for (double p : knots_) knot_values_.push_back(source_.es(p));
}

namespace {

StepQuantile from_sorted_groups(std::vector<std::pair<double, double>> value_mass,
                                double total) {
  std::sort(value_mass.begin(), value_mass.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> bps;
  std::vector<double> vals;
  double cum = 0.0;
  for (const auto& [value, mass] : value_mass) {
    if (mass <= 0.0) continue;
    cum += mass;
    const double level = cum / total;
    if (!vals.empty() && vals.back() == value) {
      bps.back() = level;
    } else if (!bps.empty() && level <= bps.back()) {
      continue;  // mass too small to move the cumulative level
    } else {
      bps.push_back(level);
      vals.push_back(value);
    }
  }
  bps.back() = 1.0;
  return StepQuantile(std::move(bps), std::move(vals));
}

void check_samples(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptySample, "no samples");
  for (double x : samples) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite sample");
  }
}

}  // namespace

StepQuantile empirical_from_samples(std::span<const double> samples) {
  check_samples(samples);
  // Unit masses divided by n keep equal-weight levels exact (k / n).
  std::vector<std::pair<double, double>> vm;
  vm.reserve(samples.size());
  for (double x : samples) vm.emplace_back(x, 1.0);
  return from_sorted_groups(std::move(vm), static_cast<double>(samples.size()));
}

StepQuantile empirical_from_samples(std::span<const double> samples,
                                    std::span<const double> weights) {
  check_samples(samples);
  if (weights.size() != samples.size()) {
    throw Error(ErrorCode::BadWeights, "weights and samples differ in length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::BadWeights, "weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::BadWeights, "weights sum to " + std::to_string(total) + ", not 1");
  }
  std::vector<std::pair<double, double>> vm;
  vm.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) vm.emplace_back(samples[i], weights[i]);
  return from_sorted_groups(std::move(vm), total);
}

double var(const StepQuantile& dist, double p) { return dist.var(p); }

double var(const GaussianLoss& dist, double p) {
  check_level(p);
  if (dist.sigma() == 0.0) return dist.mu();
  if (p == 0.0 || p == 1.0) {
    throw Error(ErrorCode::UnboundedQuantile, "Gaussian quantile is infinite at p = 0 and 1");
  }
  return dist.mu() + dist.sigma() * normal_quantile(p);
}

double es(const StepQuantile& dist, double p) { return dist.es(p); }

double es(const GaussianLoss& dist, double p) {
  check_level(p);
  if (p == 0.0 || dist.sigma() == 0.0) return dist.mu();
  if (p == 1.0) return kInf;
  return gaussian_es(dist.mu(), dist.sigma(), p);
}

double gaussian_es(double mu, double sigma, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::OutOfRangeLevel, "gaussian_es needs p in (0, 1)");
  }
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (sigma == 0.0) return mu;
  return mu + sigma * normal_pdf(normal_quantile(p)) / (1.0 - p);
}

ESCurve es_curve(const StepQuantile& dist) { return ESCurve(dist); }

StepQuantile discretize(const GaussianLoss& dist, std::size_t atoms) {
  if (atoms == 0) throw Error(ErrorCode::InvalidArgument, "atom count must be positive");
  if (dist.sigma() == 0.0) return StepQuantile::constant(dist.mu());
  const double n = static_cast<double>(atoms);
  std::vector<double> bps(atoms);
  std::vector<double> vals(atoms);
  // phi(Phi^{-1}(u)) at the bin edges; zero at u = 0 and u = 1.
  double left_density = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    const double right = static_cast<double>(i + 1) / n;
    const double right_density = i + 1 == atoms ? 0.0 : normal_pdf(normal_quantile(right));
    bps[i] = right;
    vals[i] = dist.mu() + dist.sigma() * (left_density - right_density) * n;
    left_density = right_density;
  }
  // Keep the step function monotone against rounding in the far tails.
  for (std::size_t i = 1; i < atoms; ++i) vals[i] = std::max(vals[i], vals[i - 1]);
  return StepQuantile(std::move(bps), std::move(vals));
}

std::vector<double> merge_levels(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  out.reserve(all.size());
  for (double p : all) {
    if (out.empty() || p - out.back() > kLevelTol) {
      out.push_back(p);
    } else if (p == 1.0) {
      out.back() = 1.0;
    }
  }
  return out;
}

StepQuantile comonotone_sum(std::span<const StepQuantile> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "empty comonotone sum");
  std::vector<double> bps(parts.front().breakpoints().begin(),
                          parts.front().breakpoints().end());
  for (std::size_t i = 1; i < parts.size(); ++i) bps = merge_levels(bps, parts[i].breakpoints());
  std::vector<double> vals;
  vals.reserve(bps.size());
  double start = 0.0;
  for (double b : bps) {
    const double mid = 0.5 * (start + b);
    double sum = 0.0;
    for (const auto& part : parts) sum += part.var(mid);
    vals.push_back(vals.empty() ? sum : std::max(sum, vals.back()));
    start = b;
  }
  return StepQuantile(std::move(bps), std::move(vals));
}

}  // namespace adjes
