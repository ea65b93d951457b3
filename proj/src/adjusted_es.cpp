#include "adjes/adjusted_es.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "adjes/errors.hpp"

namespace adjes {
namespace {

constexpr double kTieTol = 1e-13;

bool same_value(double a, double b) {
  return std::abs(a - b) <= kTieTol * std::max({1.0, std::abs(a), std::abs(b)});
}

using Point = std::array<double, 2>;  // (H, a)

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Keeps the part of a convex polygon with sign * (H - bound) <= 0.
std::vector<Point> clip(const std::vector<Point>& poly, double sign, double bound) {
  std::vector<Point> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % n];
    const double fc = sign * (cur[0] - bound);
    const double fn = sign * (nxt[0] - bound);
    if (fc <= 0.0) out.push_back(cur);
    if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
      const double t = fc / (fc - fn);
      out.push_back({bound, cur[1] + t * (nxt[1] - cur[1])});
    }
  }
  return convex_hull(std::move(out));
}

// Range of a over the polygon's points with the given H (clamped into range).
std::pair<double, double> a_range(const std::vector<Point>& poly, double h) {
  double hmin = kInf, hmax = -kInf;
  for (const auto& p : poly) {
    hmin = std::min(hmin, p[0]);
    hmax = std::max(hmax, p[0]);
  }
  h = std::clamp(h, hmin, hmax);
  double lo = kInf, hi = -kInf;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % n];
    if (a[0] == h) {
      lo = std::min(lo, a[1]);
      hi = std::max(hi, a[1]);
    }
    if ((a[0] - h) * (b[0] - h) < 0.0) {
      const double t = (h - a[0]) / (b[0] - a[0]);
      const double v = a[1] + t * (b[1] - a[1]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo > hi) {
    // h sits on an extreme vertex up to rounding.
    const auto nearest = std::min_element(poly.begin(), poly.end(), [h](const Point& a, const Point& b) {
      return std::abs(a[0] - h) < std::abs(b[0] - h);
    });
    lo = hi = (*nearest)[1];
  }
  return {lo, hi};
}

// Cell values q of a part Y1 of the nondecreasing cell vector y such that q
// and y - q are both nondecreasing and the tail integral of q stays within
// [lower, upper] at every cell start. Reachable (tail integral, current
// value) pairs form a convex polygon, propagated from the top cell down.
std::optional<std::vector<double>> band_split(const std::vector<double>& y,
                                              const std::vector<double>& probs,
                                              const std::vector<double>& upper,
                                              const std::vector<double>& lower, double scale) {
  const std::size_t cells = y.size();
  const double eps = 1e-12 * scale;
  const double box = 4.0 * scale;
  std::vector<std::vector<Point>> reach(cells + 1);
  reach[cells] = {{0.0, -box}, {0.0, box}};
  for (std::size_t j = cells; j-- > 0;) {
    const double len = probs[j];
    const double drop = j + 1 < cells ? y[j + 1] - y[j] : 0.0;
    std::vector<Point> pts;
    for (const auto& p : reach[j + 1]) {
      const Point moved{p[0] + len * p[1], p[1]};
      pts.push_back(moved);
      if (drop > 0.0) pts.push_back({moved[0] - drop * len, moved[1] - drop});
    }
    auto poly = clip(clip(convex_hull(std::move(pts)), 1.0, upper[j] + eps), -1.0, lower[j] - eps);
    if (poly.empty()) return std::nullopt;
    reach[j] = std::move(poly);
  }

  std::vector<double> q(cells);
  Point at{0.0, 0.0};
  for (const auto& p : reach[0]) {
    at[0] += p[0] / static_cast<double>(reach[0].size());
    at[1] += p[1] / static_cast<double>(reach[0].size());
  }
  if (cells == 0) return q;
  q[0] = at[1];
  double h = at[0];
  for (std::size_t j = 0; j + 1 < cells; ++j) {
    h -= probs[j] * q[j];
    const double drop = y[j + 1] - y[j];
    const auto [lo, hi] = a_range(reach[j + 1], h);
    const double a = std::max(lo, q[j]);
    const double b = std::min(hi, q[j] + drop);
    q[j + 1] = a <= b ? 0.5 * (a + b) : std::clamp(0.5 * (lo + hi), q[j], q[j] + drop);
  }
  return q;
}

}  // namespace

std::vector<double> candidate_levels(const StepQuantile& x, const RiskProfile& g) {
  const double until = g.finite_until();
  std::vector<double> inner;
  for (double b : x.breakpoints()) {
    if (b < 1.0 && b <= until) inner.push_back(b);
  }
  std::vector<double> knots;
  for (double b : g.breakpoints()) {
    if (b < 1.0) knots.push_back(b);
  }
  std::vector<double> out{0.0};
  for (double p : merge_levels(inner, knots)) {
    if (p > 0.0 && p < 1.0) out.push_back(p);
  }
  if (until == 1.0 && std::isfinite(g.value_at_one())) out.push_back(1.0);
  return out;
}

AdjustedESResult adjusted_es(const StepQuantile& x, const RiskProfile& g) {
  const auto levels = candidate_levels(x, g);
  std::vector<double> values;
  values.reserve(levels.size());
  double best = -kInf;
  for (double p : levels) {
    const double v = x.es(p) - g.eval(p);
    values.push_back(v);
    best = std::max(best, v);
  }
  if (const HomogeneityResult h = homogeneity_analysis(g); h.homogeneous) best = x.es(h.level);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (same_value(values[i], best)) {
      return {best, levels[i], std::isfinite(best)};
    }
  }
  return {best, levels.front(), std::isfinite(best)};
}

AdjustedESResult adjusted_es(const GaussianLoss& x, const RiskProfile& g, std::size_t atoms) {
  AdjustedESResult r = adjusted_es(discretize(x, atoms), g);
  r.discretized = x.sigma() > 0.0;
  return r;
}

bool is_acceptable(const StepQuantile& x, const RiskProfile& g, double tol) {
  return adjusted_es(x, g).value <= tol;
}

bool has_p_tail_property(const RiskProfile& g, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::OutOfRangeLevel, "p-tail level must lie in (0, 1)");
  }
  if (p > g.finite_until()) return false;
  double start = 0.0;
  const double level = g.pieces().front().level;
  for (const auto& piece : g.pieces()) {
    if (start >= p) break;
    if (piece.excess != 0.0 || piece.level != level) return false;
    start = piece.upto;
  }
  return true;
}

HomogeneityResult homogeneity_analysis(const RiskProfile& g) {
  if (g.eval(0.0) != 0.0) return {false, 0.0};
  for (const auto& piece : g.pieces()) {
    if (piece.level != 0.0 || piece.excess != 0.0) return {false, 0.0};
  }
  // g vanishes on [0, finite_until]; only g(1) can be finite and positive.
  return {true, g.finite_until()};
}

double dual_objective(std::span<const Atom> atoms, std::span<const double> density,
                      const RiskProfile& g) {
  if (atoms.size() != density.size() || atoms.empty()) {
    throw Error(ErrorCode::InvalidArgument, "density must have one entry per atom");
  }
  double eq = 0.0;
  double total = 0.0;
  double dmax = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(density[i] >= 0.0) || !std::isfinite(density[i])) {
      throw Error(ErrorCode::InvalidArgument, "density must be finite and nonnegative");
    }
    eq += atoms[i].mass * density[i] * atoms[i].value;
    total += atoms[i].mass * density[i];
    dmax = std::max(dmax, density[i]);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "density must integrate to 1");
  }
  double level = std::clamp(1.0 - 1.0 / dmax, 0.0, 1.0);
  for (double b : g.breakpoints()) {
    if (std::abs(level - b) <= kLevelTol) level = b;
  }
  const double penalty = g.eval(level);
  return std::isinf(penalty) ? -kInf : eq - penalty;
}

DualCertificate dual_certificate(const StepQuantile& x, const RiskProfile& g) {
  const AdjustedESResult primal = adjusted_es(x, g);
  const double p = primal.argmax_p;
  if (p >= 1.0) {
    throw Error(ErrorCode::ArgmaxAtOne, "supremum attained at p = 1; no tail measure exists");
  }
  DualCertificate cert{x.atoms(), {}, p, 0.0};
  cert.density.reserve(cert.atoms.size());
  double start = 0.0;
  double eq = 0.0;
  for (const auto& atom : cert.atoms) {
    const double end = start + atom.mass;
    const double overlap = std::max(0.0, end - std::max(start, p));
    const double d = overlap / (atom.mass * (1.0 - p));
    cert.density.push_back(d);
    eq += atom.mass * d * atom.value;
    start = end;
  }
  cert.dual_value = eq - g.eval(p);
  return cert;
}

ScenarioLoss scenarios_from_quantile(const StepQuantile& x, std::span<const double> levels) {
  const StepQuantile fine = x.refined(levels);
  ScenarioLoss out;
  out.values.assign(fine.values().begin(), fine.values().end());
  double start = 0.0;
  for (double b : fine.breakpoints()) {
    out.probs.push_back(b - start);
    start = b;
  }
  return out;
}

StepQuantile quantile_of(const ScenarioLoss& loss) {
  if (loss.values.size() != loss.probs.size()) {
    throw Error(ErrorCode::InvalidArgument, "scenario values and probabilities differ in length");
  }
  return empirical_from_samples(loss.values, loss.probs);
}

double allocation_risk(const ScenarioLoss& x, const Allocation& parts,
                       std::span<const RiskProfile> gs) {
  if (parts.size() != gs.size()) {
    throw Error(ErrorCode::BadAllocation, "allocation has " + std::to_string(parts.size()) +
                                              " parts for " + std::to_string(gs.size()) +
                                              " profiles");
  }
  for (const auto& part : parts) {
    if (part.size() != x.values.size()) {
      throw Error(ErrorCode::BadAllocation, "allocation part has the wrong scenario count");
    }
  }
  for (std::size_t s = 0; s < x.values.size(); ++s) {
    double sum = 0.0;
    double scale = std::abs(x.values[s]);
    for (const auto& part : parts) {
      sum += part[s];
      scale = std::max(scale, std::abs(part[s]));
    }
    if (std::abs(sum - x.values[s]) > 1e-12 * std::max(1.0, scale)) {
      throw Error(ErrorCode::BadAllocation,
                  "parts do not add up to X in scenario " + std::to_string(s));
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    total += adjusted_es(quantile_of({parts[i], x.probs}), gs[i]).value;
  }
  return total;
}

InfConvolutionResult inf_convolution_value(const StepQuantile& x, std::span<const RiskProfile> gs,
                                           const AllocationSampler& search) {
  if (gs.empty()) throw Error(ErrorCode::InvalidArgument, "no profiles to convolve");
  std::vector<double> levels;
  for (const auto& g : gs) levels = merge_levels(levels, g.breakpoints());
  const ScenarioLoss scenarios = scenarios_from_quantile(x, levels);

  InfConvolutionResult out{adjusted_es(x, sum_profiles(gs)).value, kInf, 0, 0};
  if (!search) return out;
  const auto allocations = search(scenarios, gs.size());
  for (std::size_t i = 0; i < allocations.size(); ++i) {
    const double risk = allocation_risk(scenarios, allocations[i], gs);
    if (risk < out.best_found) {
      out.best_found = risk;
      out.best_index = i;
    }
    ++out.evaluated;
  }
  return out;
}

Allocation equal_split(const ScenarioLoss& x, std::size_t parts) {
  if (parts == 0) throw Error(ErrorCode::InvalidArgument, "cannot split into zero parts");
  const double n = static_cast<double>(parts);
  std::vector<double> share(x.values.size());
  for (std::size_t s = 0; s < share.size(); ++s) share[s] = x.values[s] / n;
  Allocation out(parts, share);
  // Put the rounding remainder on the first part so the parts add up exactly.
  for (std::size_t s = 0; s < share.size(); ++s) {
    out[0][s] = x.values[s] - share[s] * (n - 1.0);
  }
  return out;
}

Allocation comonotone_split(const ScenarioLoss& x, std::span<const RiskProfile> gs) {
  if (gs.empty()) throw Error(ErrorCode::InvalidArgument, "no profiles to split along");
  for (const auto& g : gs) {
    if (!g.benchmark()) {
      throw Error(ErrorCode::InvalidArgument, "comonotone split needs benchmark ES profiles");
    }
  }
  const std::size_t cells = x.values.size();
  std::vector<double> knots(cells + 1, 0.0);
  for (std::size_t j = 0; j < cells; ++j) knots[j + 1] = knots[j] + x.probs[j];
  knots.back() = 1.0;

  Allocation out(gs.size());
  std::vector<double> rest = x.values;
  for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
    const StepQuantile& z = *gs[i].benchmark();
    const RiskProfile others = sum_profiles(gs.subspan(i + 1));
    const double v = adjusted_es(quantile_of({rest, x.probs}), sum_profiles(gs.subspan(i))).value;

    std::vector<double> y(cells);
    for (std::size_t j = 0; j < cells; ++j) y[j] = rest[j] - v;
    std::vector<double> upper(cells + 1), lower(cells + 1);
    double tail = 0.0;
    double scale = 1.0 + std::abs(v);
    for (std::size_t j = cells + 1; j-- > 0;) {
      if (j < cells) tail += y[j] * x.probs[j];
      upper[j] = z.tail_integral(knots[j]);
      lower[j] = tail - others.benchmark()->tail_integral(knots[j]);
    }
    for (double t : y) scale = std::max(scale, std::abs(t));
    scale += std::max(std::abs(z.min()), std::abs(z.max())) +
             std::max(std::abs(others.benchmark()->min()), std::abs(others.benchmark()->max()));

    const auto part = band_split(y, x.probs, upper, lower, scale);
    if (!part) {
      throw Error(ErrorCode::InvalidArgument, "no comonotone allocation meets the benchmarks");
    }
    out[i].resize(cells);
    for (std::size_t j = 0; j < cells; ++j) {
      out[i][j] = (*part)[j] + v;
      rest[j] = y[j] - (*part)[j];
    }
  }
  out.back() = rest;
  return out;
}

double zero_region_end(const RiskProfile& g) {
  if (g.eval(0.0) != 0.0) {
    throw Error(ErrorCode::ProfileNotNormalized, "g(0) = " + std::to_string(g.eval(0.0)));
  }
  double start = 0.0;
  for (const auto& piece : g.pieces()) {
    if (piece.level != 0.0 || piece.excess != 0.0) return start;
    start = piece.upto;
  }
  return start;
}

ArbitrageResult regulatory_arbitrage(const StepQuantile& x, const RiskProfile& g) {
  const double p0 = zero_region_end(g);
  const double limit = x.es(p0);
  const double value = adjusted_es(x, g).value;
  return {value - limit, limit, p0};
}

Decomposition comparability_decomposition(const StepQuantile& x, const RiskProfile& g, double p) {
  check_level(p);
  const double flat = g.eval(0.0) == 0.0 ? zero_region_end(g) : 0.0;
  if (g.eval(0.0) != 0.0 || p > flat) {
    throw Error(ErrorCode::ProfileNotFlatBelowP, "g is not zero on [0, " + std::to_string(p) + ")");
  }
  const double base = x.es(p);
  return {base, std::max(0.0, adjusted_es(x, g).value - base)};
}

}  // namespace adjes
