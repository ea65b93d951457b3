#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "adjes/quantile_model.hpp"
#include "adjes/risk_profile.hpp"

namespace adjes {

inline constexpr std::size_t kDefaultGaussianAtoms = 10000;

struct AdjustedESResult {
  double value;
  /// Smallest level attaining the supremum.
  double argmax_p;
  bool finite;
  /// Set when the loss was discretized before evaluation.
  bool discretized = false;
};

/// sup_p { ES_p(X) - g(p) } with inf - inf = -inf.
AdjustedESResult adjusted_es(const StepQuantile& x, const RiskProfile& g);
AdjustedESResult adjusted_es(const GaussianLoss& x, const RiskProfile& g,
                             std::size_t atoms = kDefaultGaussianAtoms);

/// Levels where ES_p(X) - g(p) can attain its supremum: 0, the knots of X's
/// integrated quantile and of h_g inside the finite region, and 1 when g(1)
/// is finite.
std::vector<double> candidate_levels(const StepQuantile& x, const RiskProfile& g);

bool is_acceptable(const StepQuantile& x, const RiskProfile& g, double tol = 1e-12);

/// g constant on (0, p).
bool has_p_tail_property(const RiskProfile& g, double p);

struct HomogeneityResult {
  bool homogeneous;
  /// sup { q : g(q) = 0 } when homogeneous.
  double level;
};

HomogeneityResult homogeneity_analysis(const RiskProfile& g);

struct DualCertificate {
  std::vector<Atom> atoms;
  /// dQ/dP on each atom of X.
  std::vector<double> density;
  double level;
  double dual_value;
};

/// Tail measure attaining ES at argmax_p.
DualCertificate dual_certificate(const StepQuantile& x, const RiskProfile& g);

/// E_Q[X] - g(1 - 1 / max dQ/dP) for a density given on X's atoms.
double dual_objective(std::span<const Atom> atoms, std::span<const double> density,
                      const RiskProfile& g);

/// A loss as values on scenarios with probabilities; scenarios listed in
/// increasing order of an underlying uniform variable.
struct ScenarioLoss {
  std::vector<double> values;
  std::vector<double> probs;
};

/// Scenarios are the intervals of X's quantile refined at `levels`.
ScenarioLoss scenarios_from_quantile(const StepQuantile& x, std::span<const double> levels);
StepQuantile quantile_of(const ScenarioLoss& loss);

/// One vector of scenario values per part.
using Allocation = std::vector<std::vector<double>>;
using AllocationSampler =
    std::function<std::vector<Allocation>(const ScenarioLoss& x, std::size_t parts)>;

struct InfConvolutionResult {
  double lower_bound;
  double best_found;
  std::size_t best_index;
  std::size_t evaluated;
};

/// Bounds the inf-convolution of ES^{g_1}, ..., ES^{g_n} at X.
///
/// The scenario space is X's quantile refined at every profile breakpoint;
/// the sampler returns allocations over it.
InfConvolutionResult inf_convolution_value(const StepQuantile& x, std::span<const RiskProfile> gs,
                                           const AllocationSampler& search);

/// Sum of ES^{g_i}(X_i); throws BadAllocation if the parts do not add to X.
double allocation_risk(const ScenarioLoss& x, const Allocation& parts,
                       std::span<const RiskProfile> gs);

Allocation equal_split(const ScenarioLoss& x, std::size_t parts);
/// Comonotone allocation with ES_p(X_i - m_i) <= ES_p(Z_i) for every part,
/// where the m_i add up to ES^{g_1 + ... + g_n}(X); needs benchmark profiles
/// and scenarios refined at their breakpoints.
Allocation comonotone_split(const ScenarioLoss& x, std::span<const RiskProfile> gs);

struct ArbitrageResult {
  double gap;
  double limit;
  /// sup { p : g(p) = 0 }
  double zero_until;
};

/// Capital saved by splitting X into ever more equal parts.
ArbitrageResult regulatory_arbitrage(const StepQuantile& x, const RiskProfile& g);

/// sup { p : g(p) = 0 }; g(0) must be 0.
double zero_region_end(const RiskProfile& g);

struct Decomposition {
  double base;
  double exceedance;
};

/// ES^g(X) = ES_p(X) + exceedance for g vanishing below p.
Decomposition comparability_decomposition(const StepQuantile& x, const RiskProfile& g, double p);

}  // namespace adjes
