#include "adjes/risk_profile.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "adjes/errors.hpp"

namespace adjes {
namespace {

bool le_rel(double a, double b, double tol) {
  return a <= b + tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double piece_value(const ProfilePiece& piece, double p) {
  return piece.excess == 0.0 ? piece.level : piece.level + piece.excess / (1.0 - p);
}

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidProfile, what);
}

}  // namespace

std::string_view to_string(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::PiecewiseConstant: return "piecewise_constant";
    case ProfileKind::BenchmarkES: return "benchmark_es";
    case ProfileKind::Hyperbolic: return "hyperbolic";
    case ProfileKind::Composite: return "composite";
  }
  return "unknown";
}

std::string_view to_string(ProfileClass cls) noexcept {
  switch (cls) {
    case ProfileClass::GeneralOnly: return "General";
    case ProfileClass::VaRClass: return "VaR";
    case ProfileClass::ESClass: return "ES";
  }
  return "unknown";
}

RiskProfile::RiskProfile(ProfileKind kind, std::vector<ProfilePiece> pieces, double value_at_one)
    : kind_(kind), pieces_(std::move(pieces)), value_at_one_(value_at_one) {
  constexpr double tol = 1e-12;
  if (pieces_.empty()) invalid("profile needs at least one piece");
  double prev = 0.0;
  for (auto& piece : pieces_) {
    if (!(piece.upto > prev) || piece.upto > 1.0) {
      invalid("piece ends must be strictly increasing in (0, 1]");
    }
    if (!std::isfinite(piece.level) || !std::isfinite(piece.excess)) {
      invalid("piece coefficients must be finite");
    }
    if (piece.excess < 0.0) {
      if (piece.excess < -tol * std::max(1.0, std::abs(piece.level))) {
        invalid("profile must be nondecreasing within each piece");
      }
      piece.excess = 0.0;
    }
    prev = piece.upto;
  }
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const double t = pieces_[k].upto;
    if (!le_rel(piece_value(pieces_[k], t), piece_value(pieces_[k + 1], t), tol)) {
      invalid("profile must be nondecreasing across breakpoint " + std::to_string(t));
    }
  }
  if (std::isnan(value_at_one_)) invalid("g(1) is NaN");
  if (finite_until() < 1.0) {
    value_at_one_ = kInf;
  } else {
    const auto& last = pieces_.back();
    const double limit = last.excess > 0.0 ? kInf : last.level;
    if (std::isinf(limit) && std::isfinite(value_at_one_)) {
      invalid("g(1) must be +inf when g is unbounded near 1");
    }
    if (std::isfinite(limit) && !le_rel(limit, value_at_one_, tol)) {
      invalid("g(1) must not be below the limit of g at 1");
    }
  }
}

RiskProfile RiskProfile::piecewise_constant(std::vector<double> levels,
                                            std::vector<double> thresholds) {
  if (levels.empty() || levels.size() != thresholds.size()) {
    invalid("piecewise constant profile needs equally many levels and thresholds");
  }
  std::vector<ProfilePiece> pieces;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && levels[i] < levels[i - 1]) invalid("levels must be nondecreasing");
    pieces.push_back({thresholds[i], levels[i], 0.0});
  }
  const double at_one = thresholds.back() == 1.0 ? levels.back() : kInf;
  return RiskProfile(ProfileKind::PiecewiseConstant, std::move(pieces), at_one);
}

RiskProfile RiskProfile::benchmark_es(const StepQuantile& z) {
  std::vector<ProfilePiece> pieces;
  const auto bps = z.breakpoints();
  const auto vals = z.values();
  for (std::size_t k = 0; k < bps.size(); ++k) {
    const double excess = z.tail_integral(bps[k]) - vals[k] * (1.0 - bps[k]);
    pieces.push_back({bps[k], vals[k], excess});
  }
  RiskProfile g(ProfileKind::BenchmarkES, std::move(pieces), z.max());
  g.benchmark_ = z;
  return g;
}

RiskProfile RiskProfile::hyperbolic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) invalid("hyperbolic scale must be positive");
  return RiskProfile(ProfileKind::Hyperbolic, {{1.0, 0.0, scale}}, kInf);
}

RiskProfile RiskProfile::from_pieces(std::vector<ProfilePiece> pieces, double value_at_one) {
  return RiskProfile(ProfileKind::Composite, std::move(pieces), value_at_one);
}

std::size_t RiskProfile::piece_of(double p) const {
  const auto it = std::lower_bound(pieces_.begin(), pieces_.end(), p,
                                   [](const ProfilePiece& piece, double x) { return piece.upto < x; });
  return static_cast<std::size_t>(it - pieces_.begin());
}

double RiskProfile::eval(double p) const {
  check_level(p);
  if (p == 0.0) return pieces_.front().level + pieces_.front().excess;
  if (p > finite_until()) return kInf;
  if (p == 1.0) return value_at_one_;
  return piece_value(pieces_[piece_of(p)], p);
}

std::vector<double> RiskProfile::breakpoints() const {
  std::vector<double> out;
  out.reserve(pieces_.size());
  for (const auto& piece : pieces_) out.push_back(piece.upto);
  return out;
}

RiskProfile RiskProfile::truncated(double level) const {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::OutOfRangeLevel, "truncation level must lie in (0, 1)");
  }
  std::vector<ProfilePiece> pieces;
  for (const auto& piece : pieces_) {
    if (piece.upto < level) {
      pieces.push_back(piece);
    } else {
      pieces.push_back({level, piece.level, piece.excess});
      break;
    }
  }
  RiskProfile out(kind_, std::move(pieces), kInf);
  out.benchmark_ = benchmark_;
  out.truncated_at_ = truncated_at_ ? std::min(*truncated_at_, level) : level;
  return out;
}

RiskProfile RiskProfile::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorCode::InvalidArgument, "profile scale factor must be positive");
  }
  std::vector<ProfilePiece> pieces(pieces_);
  for (auto& piece : pieces) {
    piece.level *= factor;
    piece.excess *= factor;
  }
  RiskProfile out(kind_, std::move(pieces), value_at_one_ * factor);
  if (benchmark_) out.benchmark_ = benchmark_->scaled(factor);
  out.truncated_at_ = truncated_at_;
  return out;
}

RiskProfile sum_profiles(std::span<const RiskProfile> gs) {
  if (gs.empty()) throw Error(ErrorCode::InvalidArgument, "sum of an empty profile list");
  if (gs.size() == 1) return gs.front();

  double finite_until = 1.0;
  std::vector<double> knots;
  for (const auto& g : gs) {
    finite_until = std::min(finite_until, g.finite_until());
    knots = merge_levels(knots, g.breakpoints());
  }
  std::vector<ProfilePiece> pieces;
  double start = 0.0;
  for (double t : knots) {
    if (t > finite_until + kLevelTol) break;
    const double end = std::min(t, finite_until);
    const double mid = 0.5 * (start + end);
    ProfilePiece piece{end, 0.0, 0.0};
    for (const auto& g : gs) {
      const auto& src = g.pieces()[g.piece_of(mid)];
      piece.level += src.level;
      piece.excess += src.excess;
    }
    pieces.push_back(piece);
    start = end;
  }
  double at_one = 0.0;
  for (const auto& g : gs) at_one += g.value_at_one();

  ProfileKind kind = gs.front().kind();
  for (const auto& g : gs) {
    if (g.kind() != kind) kind = ProfileKind::Composite;
  }
  RiskProfile out(kind, std::move(pieces), at_one);
  if (kind == ProfileKind::BenchmarkES) {
    std::vector<StepQuantile> zs;
    bool all = true;
    for (const auto& g : gs) {
      if (g.benchmark()) zs.push_back(*g.benchmark());
      else all = false;
    }
    if (all) out.benchmark_ = comonotone_sum(zs);
  }
  for (const auto& g : gs) {
    if (g.truncated_at()) {
      out.truncated_at_ = out.truncated_at_ ? std::min(*out.truncated_at_, *g.truncated_at())
                                            : *g.truncated_at();
    }
  }
  return out;
}

RiskProfile scale_profile(const RiskProfile& g, double factor) { return g.scaled(factor); }

RiskProfile truncate_profile(const RiskProfile& g, double level) { return g.truncated(level); }

double eval(const RiskProfile& g, double p) { return g.eval(p); }

HFunction::HFunction(const RiskProfile& g) : pieces_(g.pieces().begin(), g.pieces().end()) {}

double HFunction::operator()(double p) const {
  check_level(p);
  if (p == 1.0) return 0.0;
  if (p == 0.0) return pieces_.front().level + pieces_.front().excess;
  if (p > pieces_.back().upto) return kInf;
  const auto it = std::lower_bound(pieces_.begin(), pieces_.end(), p,
                                   [](const ProfilePiece& piece, double x) { return piece.upto < x; });
  return it->level * (1.0 - p) + it->excess;
}

std::vector<double> HFunction::slopes() const {
  std::vector<double> out;
  out.reserve(pieces_.size());
  for (const auto& piece : pieces_) out.push_back(-piece.level);
  return out;
}

std::vector<double> HFunction::knots() const {
  std::vector<double> out{0.0};
  for (const auto& piece : pieces_) out.push_back(piece.upto);
  return out;
}

double HFunction::limit_at_one() const {
  if (pieces_.back().upto < 1.0) return kInf;
  return pieces_.back().excess;
}

bool HFunction::is_concave(double tol) const {
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) {
    const auto& left = pieces_[k];
    const auto& right = pieces_[k + 1];
    const double t = left.upto;
    const double hl = left.level * (1.0 - t) + left.excess;
    const double hr = right.level * (1.0 - t) + right.excess;
    const double scale = std::max({1.0, std::abs(left.level), std::abs(right.level),
                                   std::abs(left.excess), std::abs(right.excess)});
    if (std::abs(hl - hr) > tol * scale) return false;
    // slopes -level must not increase
    if (right.level < left.level - tol * scale) return false;
  }
  return true;
}

HFunction h_function(const RiskProfile& g) { return HFunction(g); }

ProfileClass classify(const RiskProfile& g) {
  if (g.finite_until() < 1.0) return ProfileClass::GeneralOnly;
  const auto& last = g.pieces().back();
  // Left continuity at 1.
  if (last.excess == 0.0 && g.value_at_one() != last.level &&
      !(std::abs(g.value_at_one() - last.level) <=
        1e-12 * std::max(1.0, std::abs(last.level)))) {
    return ProfileClass::GeneralOnly;
  }
  const HFunction h(g);
  const double scale = std::max(1.0, std::abs(last.level));
  if (h.is_concave() && std::abs(h.limit_at_one()) <= 1e-12 * scale) {
    return ProfileClass::ESClass;
  }
  return ProfileClass::VaRClass;
}

StepQuantile benchmark_from_es_profile(const RiskProfile& g) {
  if (classify(g) != ProfileClass::ESClass) {
    throw Error(ErrorCode::NotESClass, "profile is not the ES profile of any loss");
  }
  std::vector<double> bps;
  std::vector<double> vals;
  for (const auto& piece : g.pieces()) {
    bps.push_back(piece.upto);
    // -h' on the piece; clamp tolerance-level slope noise to keep monotone
    vals.push_back(vals.empty() ? piece.level : std::max(piece.level, vals.back()));
  }
  return StepQuantile(std::move(bps), std::move(vals)).canonical();
}

ProfileQuantile::ProfileQuantile(RiskProfile g) : g_(std::move(g)) {
  const auto pieces = g_.pieces();
  const bool constant_pieces = std::all_of(pieces.begin(), pieces.end(),
                                           [](const ProfilePiece& piece) { return piece.excess == 0.0; });
  if (constant_pieces && std::isfinite(g_.value_at_one())) {
    std::vector<double> bps;
    std::vector<double> vals;
    for (const auto& piece : pieces) {
      bps.push_back(piece.upto);
      vals.push_back(piece.level);
    }
    step_ = StepQuantile(std::move(bps), std::move(vals));
  }
}

double ProfileQuantile::var(double p) const { return step_ ? step_->var(p) : g_.eval(p); }

bool ProfileQuantile::bounded_above() const noexcept { return std::isfinite(g_.value_at_one()); }

ProfileQuantile var_benchmark_from_profile(const RiskProfile& g) {
  if (classify(g) == ProfileClass::GeneralOnly) {
    throw Error(ErrorCode::NotVaRClass, "profile is not the quantile function of any loss");
  }
  return ProfileQuantile(g);
}

double var(const ProfileQuantile& dist, double p) { return dist.var(p); }

}  // namespace adjes
