#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "adjes/quantile_model.hpp"

namespace adjes {

enum class ProfileKind { PiecewiseConstant, BenchmarkES, Hyperbolic, Composite };
enum class ProfileClass { GeneralOnly, VaRClass, ESClass };

std::string_view to_string(ProfileKind kind) noexcept;
std::string_view to_string(ProfileClass cls) noexcept;

/// One piece of a risk profile, covering (previous upto, upto].
///
/// On the piece g(p) = level + excess / (1 - p), so that
/// h_g(p) = (1 - p) g(p) = level (1 - p) + excess is affine. All supported
/// variants and their sums have this form:
///   piecewise constant  -> excess = 0
///   hyperbolic s/(1-p)  -> level = 0, excess = s
///   ES profile of Z     -> level = VaR of Z on the piece, excess = int_b^1 (VaR_u - level) du
struct ProfilePiece {
  double upto;
  double level;
  double excess;
};

/// Nondecreasing target profile g : [0, 1] -> (-inf, inf].
///
/// g is finite on [0, finite_until()] (except possibly at 1) and +inf on
/// (finite_until(), 1]. g(0) is always finite.
class RiskProfile {
 public:
  /// g = levels[i] on (thresholds[i-1], thresholds[i]], g(0) = levels[0], +inf above
  /// the last threshold (none if it equals 1).
  static RiskProfile piecewise_constant(std::vector<double> levels,
                                        std::vector<double> thresholds);
  /// g(p) = ES_p(Z).
  static RiskProfile benchmark_es(const StepQuantile& z);
  /// g(p) = scale / (1 - p), g(1) = +inf.
  static RiskProfile hyperbolic(double scale);
  /// General piecewise form; value_at_one is g(1) when the last piece ends at 1.
  static RiskProfile from_pieces(std::vector<ProfilePiece> pieces, double value_at_one);

  ProfileKind kind() const noexcept { return kind_; }
  double eval(double p) const;
  double operator()(double p) const { return eval(p); }

  std::span<const ProfilePiece> pieces() const noexcept { return pieces_; }
  /// Right ends of the pieces, ascending; the last one is finite_until().
  std::vector<double> breakpoints() const;
  double finite_until() const noexcept { return pieces_.back().upto; }
  double value_at_one() const noexcept { return value_at_one_; }

  const std::optional<StepQuantile>& benchmark() const noexcept { return benchmark_; }
  std::optional<double> truncated_at() const noexcept { return truncated_at_; }

  RiskProfile truncated(double level) const;
  RiskProfile scaled(double factor) const;

 private:
  RiskProfile(ProfileKind kind, std::vector<ProfilePiece> pieces, double value_at_one);
  std::size_t piece_of(double p) const;

  ProfileKind kind_;
  std::vector<ProfilePiece> pieces_;
  double value_at_one_;
  std::optional<StepQuantile> benchmark_;
  std::optional<double> truncated_at_;

  friend RiskProfile sum_profiles(std::span<const RiskProfile> gs);
};

/// h_g(p) = (1 - p) g(p) with h_g(1) = 0; affine on each profile piece.
class HFunction {
 public:
  explicit HFunction(const RiskProfile& g);

  double operator()(double p) const;
  /// Slope on each piece (-level).
  std::vector<double> slopes() const;
  std::vector<double> knots() const;
  /// lim_{p -> 1-} h_g(p); +inf when g is infinite below 1.
  double limit_at_one() const;
  /// Concave on (0, finite_until()): continuous at interior knots with
  /// nonincreasing slopes, decided with a relative tolerance.
  bool is_concave(double tol = 1e-12) const;
  std::span<const ProfilePiece> pieces() const noexcept { return pieces_; }

 private:
  std::vector<ProfilePiece> pieces_;
};

/// Quantile function of Z = g(U) for a profile in the VaR class.
class ProfileQuantile {
 public:
  explicit ProfileQuantile(RiskProfile g);

  double var(double p) const;
  bool bounded_above() const noexcept;
  /// The step representation when g is piecewise constant.
  const std::optional<StepQuantile>& step() const noexcept { return step_; }

 private:
  RiskProfile g_;
  std::optional<StepQuantile> step_;
};

double eval(const RiskProfile& g, double p);
HFunction h_function(const RiskProfile& g);
ProfileClass classify(const RiskProfile& g);

/// Z with quantile -h_g' (left derivative); ES_p(Z) = g(p).
StepQuantile benchmark_from_es_profile(const RiskProfile& g);
/// Z = g(U); VaR_p(Z) = g(p).
ProfileQuantile var_benchmark_from_profile(const RiskProfile& g);

RiskProfile sum_profiles(std::span<const RiskProfile> gs);
RiskProfile scale_profile(const RiskProfile& g, double factor);
RiskProfile truncate_profile(const RiskProfile& g, double level);

double var(const ProfileQuantile& dist, double p);

}  // namespace adjes
