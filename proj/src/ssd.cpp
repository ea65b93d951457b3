#include "adjes/ssd.hpp"

#include <algorithm>
#include <cmath>

#include "adjes/errors.hpp"

namespace adjes {

double expected_utility(const StepQuantile& x, const RampUtility& u, double shift) {
  double total = 0.0;
  for (const auto& atom : x.atoms()) total += atom.mass * u(shift - atom.value);
  return total;
}

SsdCurve ssd_curve(const StepQuantile& x, const StepQuantile& z) {
  SsdCurve curve;
  curve.levels.push_back(0.0);
  for (double p : merge_levels(x.breakpoints(), z.breakpoints())) {
    if (p > 0.0 && p < 1.0) curve.levels.push_back(p);
  }
  curve.levels.push_back(1.0);
  curve.differences.reserve(curve.levels.size());
  for (double p : curve.levels) curve.differences.push_back(x.es(p) - z.es(p));
  return curve;
}

bool ssd_dominates(const StepQuantile& x, const StepQuantile& z, double tol) {
  const SsdCurve curve = ssd_curve(x, z);
  return std::all_of(curve.differences.begin(), curve.differences.end(),
                     [tol](double d) { return d <= tol; });
}

double ssd_based_risk(const StepQuantile& x, const StepQuantile& z) {
  const SsdCurve curve = ssd_curve(x, z);
  return *std::max_element(curve.differences.begin(), curve.differences.end());
}

SsdReport ssd_report(const StepQuantile& x, const StepQuantile& z, double tol) {
  const SsdCurve curve = ssd_curve(x, z);
  SsdReport report{true, *std::max_element(curve.differences.begin(), curve.differences.end()),
                   std::nullopt};
  const auto& lv = curve.levels;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (curve.differences[i] <= tol) continue;
    report.dominates = false;
    if (i == 0) {
      report.violation_from = 0.0;
    } else if (lv[i] == 1.0) {
      // ES difference is constant on the last piece.
      report.violation_from = lv[i - 1];
    } else {
      // H_X - H_Z is affine between the two levels; locate its zero.
      const double a = lv[i - 1];
      const double b = lv[i];
      const double na = x.tail_integral(a) - z.tail_integral(a);
      const double nb = x.tail_integral(b) - z.tail_integral(b);
      const double root = a + (b - a) * (-na) / (nb - na);
      report.violation_from = std::clamp(root, a, b);
    }
    break;
  }
  return report;
}

MinimumCheck acceptance_minimum_check(const StepQuantile& z,
                                      std::span<const StepQuantile> samples) {
  if (ssd_based_risk(z, z) > 0.0) return {false, std::nullopt};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (ssd_based_risk(samples[i], z) > 1e-12) continue;
    if (!ssd_dominates(samples[i], z)) return {false, i};
  }
  return {true, std::nullopt};
}

UtilityRequirement utility_requirement(const StepQuantile& x, const StepQuantile& z,
                                       const RampUtility& u) {
  const double target = expected_utility(z, u);
  const auto feasible = [&](double m) { return expected_utility(x, u, m) >= target; };
  double lo = x.min() - z.max() - 1.0;
  double hi = ssd_based_risk(x, z) + 1.0;
  if (feasible(lo)) return {lo, true};
  if (!feasible(hi)) {
    throw Error(ErrorCode::TargetUnreachable, "upper bracket edge misses the utility target");
  }
  for (int it = 0; it < 400 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return {hi, false};
}

}  // namespace adjes
