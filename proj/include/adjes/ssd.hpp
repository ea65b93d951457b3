#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adjes/quantile_model.hpp"

namespace adjes {

/// u(y) = min(y - kink, 0).
struct RampUtility {
  double kink;

  double operator()(double y) const noexcept { return y < kink ? y - kink : 0.0; }
};

/// E[u(shift - X)].
double expected_utility(const StepQuantile& x, const RampUtility& u, double shift = 0.0);

/// ES_p(X) - ES_p(Z) at every level where the difference can change monotonicity.
struct SsdCurve {
  std::vector<double> levels;
  std::vector<double> differences;
};

SsdCurve ssd_curve(const StepQuantile& x, const StepQuantile& z);

bool ssd_dominates(const StepQuantile& x, const StepQuantile& z, double tol = 1e-12);

/// inf { m : X - m dominates Z } = sup_p { ES_p(X) - ES_p(Z) }.
double ssd_based_risk(const StepQuantile& x, const StepQuantile& z);

struct SsdReport {
  bool dominates;
  double risk;
  /// inf { p : ES_p(X) > ES_p(Z) } when dominance fails.
  std::optional<double> violation_from;
};

SsdReport ssd_report(const StepQuantile& x, const StepQuantile& z, double tol = 1e-12);

struct MinimumCheck {
  bool holds;
  /// Index of a sample that is acceptable but does not dominate Z.
  std::optional<std::size_t> witness;
};

/// Z is acceptable and every acceptable sample dominates it.
MinimumCheck acceptance_minimum_check(const StepQuantile& z,
                                      std::span<const StepQuantile> samples);

struct UtilityRequirement {
  double value;
  /// The lower bracket edge already met the target; value is that edge.
  bool vacuous;
};

/// Smallest m with E[u(m - X)] >= E[u(-Z)], by bisection to 1e-10.
UtilityRequirement utility_requirement(const StepQuantile& x, const StepQuantile& z,
                                       const RampUtility& u);

}  // namespace adjes
