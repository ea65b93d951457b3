#include "adjes/market_opt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "adjes/adjusted_es.hpp"
#include "adjes/errors.hpp"

namespace adjes {
namespace {

constexpr double kSolveTol = 1e-10;
constexpr int kMaxBisection = 200;

// Smallest t with f(t) <= target for continuous nonincreasing f.
std::optional<double> smallest_crossing(const std::function<double(double)>& f, double target,
                                        double start) {
  double lo = start;
  double hi = start;
  double step = 1.0;
  if (f(start) <= target) {
    do {
      hi = lo;
      lo = start - step;
      step *= 2.0;
      if (step > 1e15) return std::nullopt;
    } while (f(lo) <= target);
  } else {
    do {
      lo = hi;
      hi = start + step;
      step *= 2.0;
      if (step > 1e15) return std::nullopt;
    } while (f(hi) > target);
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    if (hi - lo <= kSolveTol && std::abs(f(hi) - target) <= kSolveTol) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

void require_es_class(const RiskProfile& g) {
  if (classify(g) != ProfileClass::ESClass) {
    throw Error(ErrorCode::NotESClass, "solver needs a profile in the ES class");
  }
}

}  // namespace

MarketModel::MarketModel(std::vector<MarketState> states) : states_(std::move(states)) {
  if (states_.empty()) throw Error(ErrorCode::InvalidMarket, "market has no states");
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    if (!(s.p > 0.0) || !std::isfinite(s.p)) {
      throw Error(ErrorCode::InvalidMarket, "states[" + std::to_string(i) + "].p must be positive");
    }
    if (!(s.q >= 0.0) || !std::isfinite(s.q)) {
      throw Error(ErrorCode::InvalidMarket,
                  "states[" + std::to_string(i) + "].q must be nonnegative");
    }
    sp += s.p;
    sq += s.q;
  }
  if (std::abs(sp - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidMarket, "physical probabilities sum to " + std::to_string(sp));
  }
  if (std::abs(sq - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidMarket, "risk-neutral probabilities sum to " + std::to_string(sq));
  }
}

std::vector<std::size_t> MarketModel::density_order() const {
  std::vector<std::size_t> order(states_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [this](std::size_t a, std::size_t b) { return density(a) < density(b); });
  return order;
}

double Position::expectation_p() const {
  double total = 0.0;
  for (std::size_t k = 0; k < loss.size(); ++k) total += prob[k] * loss[k];
  return total;
}

double Position::expectation_q() const {
  double total = 0.0;
  for (std::size_t k = 0; k < loss.size(); ++k) total += prob[k] * density[k] * loss[k];
  return total;
}

StepQuantile Position::law() const { return empirical_from_samples(loss, prob); }

Position Position::shifted(double z) const {
  Position out(*this);
  for (double& v : out.loss) v += z;
  return out;
}

Position position_on_states(const MarketModel& market, std::span<const double> loss) {
  if (loss.size() != market.size()) {
    throw Error(ErrorCode::InvalidArgument, "loss vector needs one entry per state");
  }
  Position out;
  for (std::size_t i = 0; i < market.size(); ++i) {
    out.loss.push_back(loss[i]);
    out.prob.push_back(market.states()[i].p);
    out.density.push_back(market.density(i));
    out.state.push_back(i);
  }
  return out;
}

UtilityFn::UtilityFn(std::vector<double> kinks, std::vector<double> slopes, double value_at_zero)
    : kinks_(std::move(kinks)), slopes_(std::move(slopes)) {
  if (slopes_.size() != kinks_.size() + 1) {
    throw Error(ErrorCode::InvalidArgument, "utility needs exactly one more slope than kinks");
  }
  for (std::size_t i = 0; i < kinks_.size(); ++i) {
    if (!std::isfinite(kinks_[i]) || (i > 0 && !(kinks_[i] > kinks_[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "utility kinks must be finite and increasing");
    }
  }
  bool nonconstant = false;
  for (std::size_t i = 0; i < slopes_.size(); ++i) {
    if (!(slopes_[i] >= 0.0) || !std::isfinite(slopes_[i])) {
      throw Error(ErrorCode::InvalidArgument, "utility slopes must be finite and nonnegative");
    }
    if (i > 0 && slopes_[i] > slopes_[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "utility slopes must be nonincreasing");
    }
    nonconstant = nonconstant || slopes_[i] > 0.0;
  }
  if (!nonconstant) throw Error(ErrorCode::InvalidArgument, "utility must not be constant");
  if (!std::isfinite(value_at_zero)) {
    throw Error(ErrorCode::InvalidArgument, "u(0) must be finite");
  }
  at_kinks_.assign(kinks_.size(), 0.0);
  for (std::size_t i = 1; i < kinks_.size(); ++i) {
    at_kinks_[i] = at_kinks_[i - 1] + slopes_[i] * (kinks_[i] - kinks_[i - 1]);
  }
  offset_ = value_at_zero - integral_from_first_kink(0.0);
}

UtilityFn UtilityFn::linear() { return UtilityFn({}, {1.0}); }

UtilityFn UtilityFn::ramp(double kink) { return UtilityFn({kink}, {1.0, 0.0}, std::min(-kink, 0.0)); }

double UtilityFn::integral_from_first_kink(double y) const {
  if (kinks_.empty()) return slopes_[0] * y;
  if (y < kinks_.front()) return slopes_[0] * (y - kinks_.front());
  const auto it = std::upper_bound(kinks_.begin(), kinks_.end(), y);
  const auto j = static_cast<std::size_t>(it - kinks_.begin());  // kinks_[j-1] <= y
  return at_kinks_[j - 1] + slopes_[j] * (y - kinks_[j - 1]);
}

double UtilityFn::operator()(double y) const { return offset_ + integral_from_first_kink(y); }

double UtilityFn::infimum() const {
  if (slopes_.front() > 0.0) return -kInf;
  return (*this)(kinks_.front());
}

double UtilityFn::supremum() const {
  if (slopes_.back() > 0.0) return kInf;
  return (*this)(kinks_.back());
}

double UtilityFn::expected(const Position& x, double w) const {
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) total += x.prob[k] * (*this)(w - x.loss[k]);
  return total;
}

SpectralFunctional::SpectralFunctional(std::vector<double> levels, std::vector<double> weights)
    : levels_(std::move(levels)), weights_(std::move(weights)) {
  if (levels_.empty() || levels_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidArgument, "spectral levels and weights must match in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!(levels_[i] >= 0.0 && levels_[i] < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "spectral levels must lie in [0, 1)");
    }
    if (!(weights_[i] >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "spectral weights must be nonnegative");
    }
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "spectral weights must sum to 1");
  }
}

double SpectralFunctional::operator()(const StepQuantile& x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) total += weights_[i] * x.es(levels_[i]);
  return total;
}

Position assign_comonotone(const MarketModel& market, const StepQuantile& z) {
  const auto order = market.density_order();
  std::vector<double> ends;
  double cum = 0.0;
  for (std::size_t j : order) {
    cum += market.states()[j].p;
    ends.push_back(cum);
  }
  ends.back() = 1.0;
  const std::vector<double> levels = merge_levels(ends, z.breakpoints());

  struct Piece {
    std::size_t parent;
    double loss;
    double prob;
  };
  std::vector<std::vector<Piece>> by_state(market.size());
  std::size_t j = 0;
  double start = 0.0;
  for (double end : levels) {
    const double mid = 0.5 * (start + end);
    while (j + 1 < ends.size() && mid > ends[j]) ++j;
    const std::size_t parent = order[j];
    const double value = z.var(mid);
    auto& pieces = by_state[parent];
    if (!pieces.empty() && pieces.back().loss == value) {
      pieces.back().prob += end - start;
    } else {
      pieces.push_back({parent, value, end - start});
    }
    start = end;
  }
  Position out;
  for (std::size_t i = 0; i < by_state.size(); ++i) {
    if (by_state[i].empty()) {
      throw Error(ErrorCode::IncompatibleAtoms,
                  "state " + std::to_string(i) + " received no probability mass");
    }
    for (const auto& piece : by_state[i]) {
      out.loss.push_back(piece.loss);
      out.prob.push_back(piece.prob);
      out.density.push_back(market.density(i));
      out.state.push_back(i);
    }
  }
  return out;
}

Position construct_optimal_Z(const MarketModel& market, const RiskProfile& g) {
  return assign_comonotone(market, benchmark_from_es_profile(g));
}

Position comonotone_rearrangement(const MarketModel& market, std::span<const double> loss) {
  const Position x = position_on_states(market, loss);
  return assign_comonotone(market, x.law());
}

Solution solve_problem_A(const MarketModel& market, const RiskProfile& g, double w, double x) {
  require_es_class(g);
  const Position z = construct_optimal_Z(market, g);
  const double shift = w - x - z.expectation_q();
  return {z.shifted(shift), shift, shift};
}

Solution solve_problem_B(const MarketModel& market, const RiskProfile& g, double w, double x) {
  require_es_class(g);
  const Position z = construct_optimal_Z(market, g);
  return {z.shifted(x), x, w - x - z.expectation_q()};
}

Solution solve_problem_C(const MarketModel& market, const RiskProfile& g, double w, double x,
                         const UtilityFn& u) {
  require_es_class(g);
  const Position z = construct_optimal_Z(market, g);
  const auto f = [&](double t) {
    double total = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) total += z.prob[k] * u(w - z.loss[k] - t);
    return total;
  };
  const auto shift = smallest_crossing(f, x, w - z.expectation_p());
  if (!shift || std::abs(f(*shift) - x) > kSolveTol) {
    throw Error(ErrorCode::TargetUnreachable,
                "no shift attains expected utility " + std::to_string(x));
  }
  return {z.shifted(*shift), *shift, *shift};
}

Solution solve_problem_D(const MarketModel& market, const RiskProfile& g, double w, double x,
                         const UtilityFn& u) {
  require_es_class(g);
  const Position pos = construct_optimal_Z(market, g).shifted(x);
  return {pos, x, u.expected(pos, w)};
}

Solution solve_problem_E(const MarketModel& market, const RiskProfile& g, double x,
                         const SpectralFunctional& rho_prime) {
  require_es_class(g);
  const Position pos = construct_optimal_Z(market, g).shifted(x);
  double worst = x;
  for (std::size_t i = 0; i < rho_prime.levels().size(); ++i) {
    worst += rho_prime.weights()[i] * g.eval(rho_prime.levels()[i]);
  }
  return {pos, x, worst};
}

double evaluate_functional(const MarketModel& market, const OracleProblem& problem,
                           Functional f, std::span<const double> loss) {
  switch (f) {
    case Functional::AdjustedES:
      return adjusted_es(position_on_states(market, loss).law(), problem.g).value;
    case Functional::Price: {
      double eq = 0.0;
      for (std::size_t i = 0; i < loss.size(); ++i) eq += market.states()[i].q * loss[i];
      return problem.w - eq;
    }
    case Functional::Utility: {
      if (!problem.u) throw Error(ErrorCode::InvalidArgument, "utility functional needs u");
      return problem.u->expected(position_on_states(market, loss), problem.w);
    }
    case Functional::Spectral: {
      if (!problem.spectral) {
        throw Error(ErrorCode::InvalidArgument, "spectral functional needs levels and weights");
      }
      return (*problem.spectral)(position_on_states(market, loss).law());
    }
  }
  return 0.0;
}

OracleResult brute_force_oracle(const MarketModel& market, const OracleProblem& problem,
                                const GridSpec& grid) {
  const std::size_t n = market.size();
  if (n > 4) throw Error(ErrorCode::InvalidArgument, "oracle supports at most 4 states");
  if (!(grid.step > 0.0) || grid.radius < 0) {
    throw Error(ErrorCode::InvalidArgument, "grid needs a positive step and radius >= 0");
  }
  const double side = 2.0 * grid.radius + 1.0;
  const double points = std::pow(side, static_cast<double>(n - 1));
  if (points > 1e8) {
    throw Error(ErrorCode::GridTooLarge, std::to_string(points) + " grid points");
  }
  const auto total = static_cast<std::size_t>(points);

  OracleResult best{{}, problem.maximize ? -kInf : kInf, 0};
  std::vector<double> shape(n, 0.0);
  std::vector<double> x(n);
  for (std::size_t index = 0; index < total; ++index) {
    std::size_t rest = index;
    for (std::size_t i = 1; i < n; ++i) {
      const auto k = static_cast<int>(rest % static_cast<std::size_t>(side)) - grid.radius;
      rest /= static_cast<std::size_t>(side);
      shape[n - i] = k * grid.step;
    }
    const auto at = [&](double t) {
      for (std::size_t i = 0; i < n; ++i) x[i] = shape[i] + t;
      return evaluate_functional(market, problem, problem.constraint, x);
    };
    double t = 0.0;
    switch (problem.constraint) {
      case Functional::AdjustedES:
      case Functional::Spectral:
        t = problem.bound - at(0.0);
        break;
      case Functional::Price:
        t = at(0.0) - problem.bound;
        break;
      case Functional::Utility: {
        const auto root = smallest_crossing(at, problem.bound, 0.0);
        if (!root) continue;
        t = *root;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = shape[i] + t;
    const double value = evaluate_functional(market, problem, problem.objective, x);
    ++best.evaluated;
    if (problem.maximize ? value > best.value : value < best.value) {
      best.value = value;
      best.loss = x;
    }
  }
  return best;
}

}  // namespace adjes
