#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adjes/quantile_model.hpp"
#include "adjes/risk_profile.hpp"

namespace adjes {

struct MarketState {
  double p;  // physical probability
  double q;  // risk-neutral probability
};

/// Finite complete market; every state has positive physical probability.
class MarketModel {
 public:
  explicit MarketModel(std::vector<MarketState> states);

  std::span<const MarketState> states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }
  /// dQ/dP in state i.
  double density(std::size_t i) const { return states_.at(i).q / states_.at(i).p; }
  /// State indices by increasing density, ties by index.
  std::vector<std::size_t> density_order() const;

 private:
  std::vector<MarketState> states_;
};

/// Loss vector over a refinement of the market's states.
///
/// Entry k lives on a sub-state of state[k] with physical mass prob[k]; the
/// density of Q against P is inherited from the parent state.
struct Position {
  std::vector<double> loss;
  std::vector<double> prob;
  std::vector<double> density;
  std::vector<std::size_t> state;

  std::size_t size() const noexcept { return loss.size(); }
  double expectation_p() const;
  double expectation_q() const;
  StepQuantile law() const;
  Position shifted(double z) const;
};

/// Position with one entry per market state.
Position position_on_states(const MarketModel& market, std::span<const double> loss);

/// Piecewise-affine, concave, nondecreasing utility.
///
/// slopes[0] applies left of kinks[0], slopes[i] on [kinks[i-1], kinks[i]],
/// slopes.back() right of the last kink; u(0) = value_at_zero.
class UtilityFn {
 public:
  UtilityFn(std::vector<double> kinks, std::vector<double> slopes, double value_at_zero = 0.0);

  static UtilityFn linear();
  /// min(y - kink, 0)
  static UtilityFn ramp(double kink);

  double operator()(double y) const;
  double infimum() const;
  double supremum() const;
  std::span<const double> kinks() const noexcept { return kinks_; }
  std::span<const double> slopes() const noexcept { return slopes_; }

  /// E_P[u(w - X)].
  double expected(const Position& x, double w) const;

 private:
  double integral_from_first_kink(double y) const;

  std::vector<double> kinks_;
  std::vector<double> slopes_;
  std::vector<double> at_kinks_;
  double offset_;
};

/// rho'(X) = sum_i w_i ES_{p_i}(X).
class SpectralFunctional {
 public:
  SpectralFunctional(std::vector<double> levels, std::vector<double> weights);

  double operator()(const StepQuantile& x) const;
  std::span<const double> levels() const noexcept { return levels_; }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<double> levels_;
  std::vector<double> weights_;
};

/// Random variable with quantile `z`, comonotone with dQ/dP, splitting
/// states where the quantile's breakpoints fall inside them.
Position assign_comonotone(const MarketModel& market, const StepQuantile& z);

/// Loss with ES profile g, comonotone with dQ/dP.
Position construct_optimal_Z(const MarketModel& market, const RiskProfile& g);

/// Same law as x, rearranged to be comonotone with dQ/dP.
Position comonotone_rearrangement(const MarketModel& market, std::span<const double> loss);

struct Solution {
  Position position;
  /// X* = Z + shift.
  double shift;
  double value;
};

/// min ES^g(X) s.t. E_Q[w - X] <= x.
Solution solve_problem_A(const MarketModel& market, const RiskProfile& g, double w, double x);
/// min E_Q[w - X] s.t. ES^g(X) <= x; value is the price.
Solution solve_problem_B(const MarketModel& market, const RiskProfile& g, double w, double x);
/// min ES^g(X) s.t. E[u(w - X)] = x.
Solution solve_problem_C(const MarketModel& market, const RiskProfile& g, double w, double x,
                         const UtilityFn& u);
/// min E[u(w - X)] s.t. ES^g(X) = x; value is the worst utility.
Solution solve_problem_D(const MarketModel& market, const RiskProfile& g, double w, double x,
                         const UtilityFn& u);
/// max rho'(X) s.t. ES^g(X) = x; value is the worst risk.
Solution solve_problem_E(const MarketModel& market, const RiskProfile& g, double x,
                         const SpectralFunctional& rho_prime);

enum class Functional { AdjustedES, Price, Utility, Spectral };

struct OracleProblem {
  Functional objective;
  bool maximize;
  /// The constraint functional is made to equal `bound`.
  Functional constraint;
  double bound;
  RiskProfile g;
  double w = 0.0;
  std::optional<UtilityFn> u;
  std::optional<SpectralFunctional> spectral;
};

struct GridSpec {
  double step;
  int radius;
};

struct OracleResult {
  std::vector<double> loss;
  double value;
  std::size_t evaluated;
};

/// Exhaustive search over state-wise payoffs on a grid (at most 4 states).
///
/// Grid points fix the shape of X relative to state 0; each shape is
/// translated so the constraint holds with equality.
OracleResult brute_force_oracle(const MarketModel& market, const OracleProblem& problem,
                                const GridSpec& grid);

/// Value of a functional at a state-wise loss vector.
double evaluate_functional(const MarketModel& market, const OracleProblem& problem,
                           Functional f, std::span<const double> loss);

}  // namespace adjes
