#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "adjes/adjusted_es.hpp"
#include "adjes/errors.hpp"
#include "adjes/io.hpp"
#include "adjes/market_opt.hpp"
#include "test_support.hpp"

namespace adjes {
namespace {

using testing::Rng;

const MarketModel kTwoState({{0.5, 0.75}, {0.5, 0.25}});
const RiskProfile kZ0 = RiskProfile::benchmark_es(StepQuantile({0.5, 1.0}, {0.0, 1.0}));

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

MarketModel random_market(Rng& rng, int max_states = 3) {
  const int n = testing::uniform_int(rng, 1, max_states);
  std::vector<double> p(n), q(n);
  double sp = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    p[i] = 0.2 + testing::uniform(rng);
    q[i] = 0.2 + testing::uniform(rng);
    sp += p[i];
    sq += q[i];
  }
  std::vector<MarketState> states;
  double rp = 1.0, rq = 1.0;
  for (int i = 0; i + 1 < n; ++i) {
    states.push_back({p[i] / sp, q[i] / sq});
    rp -= p[i] / sp;
    rq -= q[i] / sq;
  }
  states.push_back({rp, rq});
  return MarketModel(states);
}

// ES profile of a loss with at most three atoms in [-1, 1].
RiskProfile random_benchmark(Rng& rng) {
  const int n = testing::uniform_int(rng, 1, 3);
  std::vector<double> values(n);
  for (double& v : values) v = testing::uniform(rng, -1.0, 1.0);
  std::sort(values.begin(), values.end());
  std::vector<double> bps;
  for (int i = 1; i < n; ++i) bps.push_back(static_cast<double>(i) / n + testing::uniform(rng, -0.1, 0.1));
  bps.push_back(1.0);
  return RiskProfile::benchmark_es(StepQuantile(bps, values));
}

double es_g(const Position& x, const RiskProfile& g) { return adjusted_es(x.law(), g).value; }

TEST(Market, Validation) {
  EXPECT_EQ(code_of([] { MarketModel({}); }), ErrorCode::InvalidMarket);
  EXPECT_EQ(code_of([] { MarketModel({{0.0, 0.5}, {1.0, 0.5}}); }), ErrorCode::InvalidMarket);
  EXPECT_EQ(code_of([] { MarketModel({{0.5, -0.1}, {0.5, 1.1}}); }), ErrorCode::InvalidMarket);
  EXPECT_EQ(code_of([] { MarketModel({{0.5, 0.5}, {0.6, 0.5}}); }), ErrorCode::InvalidMarket);
  EXPECT_EQ(code_of([] { MarketModel({{0.5, 0.5}, {0.5, 0.6}}); }), ErrorCode::InvalidMarket);
  try {
    MarketModel({{0.5, 0.5}, {0.5, -0.5}});
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("states[1].q"), std::string::npos);
  }
  EXPECT_DOUBLE_EQ(kTwoState.density(0), 1.5);
  EXPECT_EQ(kTwoState.density_order(), (std::vector<std::size_t>{1, 0}));
  const MarketModel tied({{0.25, 0.25}, {0.5, 0.5}, {0.25, 0.25}});
  EXPECT_EQ(tied.density_order(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Market, FromJson) {
  const MarketModel m = market_from_json(R"({"states":[{"p":0.5,"q":0.75},{"p":0.5,"q":0.25}]})");
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.states()[0].q, 0.75);
  EXPECT_EQ(code_of([] { market_from_json(R"({"states":[{"p":1.0}]})"); }), ErrorCode::InvalidMarket);
}

TEST(UtilityFnTest, Evaluation) {
  const UtilityFn ramp = UtilityFn::ramp(0.0);
  EXPECT_EQ(ramp(-2.0), -2.0);
  EXPECT_EQ(ramp(3.0), 0.0);
  EXPECT_EQ(ramp.supremum(), 0.0);
  EXPECT_TRUE(std::isinf(ramp.infimum()));
  const UtilityFn lin = UtilityFn::linear();
  EXPECT_EQ(lin(2.5), 2.5);
  const UtilityFn u({-1.0, 1.0}, {3.0, 1.0, 0.5}, 0.25);
  EXPECT_EQ(u(0.0), 0.25);
  EXPECT_EQ(u(1.0), 1.25);
  EXPECT_EQ(u(3.0), 2.25);
  EXPECT_EQ(u(-1.0), -0.75);
  EXPECT_EQ(u(-2.0), -3.75);
  EXPECT_EQ(code_of([] { UtilityFn({0.0}, {1.0, 2.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { UtilityFn({0.0}, {0.0, 0.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { UtilityFn({0.0}, {1.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { SpectralFunctional({1.0}, {1.0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { SpectralFunctional({0.5}, {0.9}); }), ErrorCode::InvalidArgument);
}

TEST(OptimalZ, Examples) {
  const Position z = construct_optimal_Z(kTwoState, kZ0);
  ASSERT_EQ(z.size(), 2u);
  EXPECT_EQ(z.state, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(z.loss, (std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(z.expectation_q(), 0.75);

  const Position c = construct_optimal_Z(kTwoState, RiskProfile::piecewise_constant({2.0}, {1.0}));
  for (double v : c.loss) EXPECT_EQ(v, 2.0);

  const MarketModel one({{1.0, 1.0}});
  const Position k = construct_optimal_Z(one, RiskProfile::piecewise_constant({-0.5}, {1.0}));
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k.loss[0], -0.5);

  EXPECT_EQ(code_of([] { construct_optimal_Z(kTwoState, RiskProfile::hyperbolic(1.0)); }),
            ErrorCode::NotESClass);
}

TEST(OptimalZ, SplitsStatesToMatchTheProfile) {
  Rng rng(81);
  for (int trial = 0; trial < 200; ++trial) {
    const MarketModel market = random_market(rng, 5);
    const RiskProfile g = testing::random_es_profile(rng, 8);
    const Position z = construct_optimal_Z(market, g);
    const StepQuantile law = z.law();
    for (double b : g.breakpoints()) EXPECT_NEAR(law.es(b), g(b), 1e-9);
    for (int k = 0; k <= 20; ++k) EXPECT_NEAR(law.es(k / 20.0), g(k / 20.0), 1e-9);
    EXPECT_NEAR(es_g(z, g), 0.0, 1e-9);
    double mass = 0.0;
    std::vector<double> per_state(market.size(), 0.0);
    for (std::size_t k = 0; k < z.size(); ++k) {
      mass += z.prob[k];
      per_state[z.state[k]] += z.prob[k];
      EXPECT_EQ(z.density[k], market.density(z.state[k]));
      for (std::size_t j = 0; j < z.size(); ++j) {
        if (z.density[k] > z.density[j]) EXPECT_GE(z.loss[k], z.loss[j]);
      }
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    for (std::size_t i = 0; i < market.size(); ++i) EXPECT_NEAR(per_state[i], market.states()[i].p, 1e-12);
  }
}

TEST(ProblemA, Examples) {
  const Solution s = solve_problem_A(kTwoState, kZ0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(s.value, -0.75);
  EXPECT_DOUBLE_EQ(s.position.loss[0], 0.25);
  EXPECT_DOUBLE_EQ(s.position.loss[1], -0.75);

  const RiskProfile zero = RiskProfile::piecewise_constant({0.0}, {1.0});
  const Solution d = solve_problem_A(kTwoState, zero, 1.5, 1.5);
  for (double v : d.position.loss) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(d.value, 0.0);

  const Solution moved = solve_problem_A(kTwoState, kZ0, 0.0, 0.3);
  EXPECT_NEAR(moved.value, s.value - 0.3, 1e-15);
}

TEST(ProblemB, ExamplesAndDualityWithA) {
  const Solution s = solve_problem_B(kTwoState, kZ0, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(s.value, -0.75);
  EXPECT_EQ(s.position.loss, (std::vector<double>{1.0, 0.0}));
  EXPECT_NEAR(solve_problem_B(kTwoState, kZ0, 0.0, 0.4).value, -1.15, 1e-15);

  Rng rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const MarketModel market = random_market(rng);
    const RiskProfile g = random_benchmark(rng);
    const double w = testing::normal(rng), x = testing::normal(rng);
    const Solution b = solve_problem_B(market, g, w, x);
    const Solution a = solve_problem_A(market, g, w, b.value);
    EXPECT_NEAR(a.value, x, 1e-12);
  }
}

TEST(ProblemC, LinearUtilityClosedForm) {
  Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const MarketModel market = random_market(rng);
    const RiskProfile g = random_benchmark(rng);
    const double w = testing::normal(rng), x = testing::normal(rng);
    const Solution s = solve_problem_C(market, g, w, x, UtilityFn::linear());
    const Position z = construct_optimal_Z(market, g);
    EXPECT_NEAR(s.shift, w - x - z.expectation_p(), 1e-10);
    EXPECT_NEAR(s.value, s.shift, 0.0);
  }
}

TEST(ProblemC, RampExample) {
  const Solution s = solve_problem_C(kTwoState, kZ0, 0.0, -0.75, UtilityFn::ramp(0.0));
  EXPECT_NEAR(s.shift, 0.25, 1e-10);
  EXPECT_NEAR(UtilityFn::ramp(0.0).expected(s.position, 0.0), -0.75, 1e-10);
  // Larger required utility needs a smaller shift.
  const Solution t = solve_problem_C(kTwoState, kZ0, 0.0, -0.5, UtilityFn::ramp(0.0));
  EXPECT_LT(t.shift, s.shift);
  EXPECT_EQ(code_of([] { solve_problem_C(kTwoState, kZ0, 0.0, 0.5, UtilityFn::ramp(0.0)); }),
            ErrorCode::TargetUnreachable);
}

TEST(ProblemD, Examples) {
  const Solution s = solve_problem_D(kTwoState, kZ0, 0.0, 0.0, UtilityFn::ramp(0.0));
  EXPECT_DOUBLE_EQ(s.value, -0.5);
  const Solution lin = solve_problem_D(kTwoState, kZ0, 1.0, 0.25, UtilityFn::linear());
  EXPECT_NEAR(lin.value, 1.0 - 0.5 - 0.25, 1e-15);
}

TEST(ProblemE, Examples) {
  const Solution mean = solve_problem_E(kTwoState, kZ0, 0.3, SpectralFunctional({0.0}, {1.0}));
  EXPECT_NEAR(mean.value, 0.3 + 0.5, 1e-15);
  const Solution tail = solve_problem_E(kTwoState, kZ0, 0.3, SpectralFunctional({0.5}, {1.0}));
  EXPECT_NEAR(tail.value, 1.3, 1e-15);
  EXPECT_NEAR(SpectralFunctional({0.5}, {1.0})(tail.position.law()), tail.value, 1e-12);
}

TEST(Solvers, BindingAndStructure) {
  Rng rng(84);
  for (int trial = 0; trial < 100; ++trial) {
    const MarketModel market = random_market(rng, 4);
    const RiskProfile g = testing::random_es_profile(rng, 6);
    const Position z = construct_optimal_Z(market, g);
    const double w = testing::normal(rng), x = testing::normal(rng);
    const auto check_form = [&](const Solution& s) {
      ASSERT_EQ(s.position.size(), z.size());
      for (std::size_t k = 0; k < z.size(); ++k) EXPECT_NEAR(s.position.loss[k], z.loss[k] + s.shift, 1e-12);
    };
    const Solution a = solve_problem_A(market, g, w, x);
    check_form(a);
    EXPECT_NEAR(w - a.position.expectation_q(), x, 1e-9);
    EXPECT_NEAR(es_g(a.position, g), a.value, 1e-9);

    const Solution b = solve_problem_B(market, g, w, x);
    check_form(b);
    EXPECT_NEAR(es_g(b.position, g), x, 1e-9);
    EXPECT_NEAR(w - b.position.expectation_q(), b.value, 1e-12);

    const UtilityFn u({-0.5, 0.5}, {2.0, 1.0, 0.25});
    const double target = u.expected(z, w) + testing::uniform(rng, -0.5, 0.1);
    const Solution c = solve_problem_C(market, g, w, target, u);
    check_form(c);
    EXPECT_NEAR(u.expected(c.position, w), target, 1e-10);
    EXPECT_NEAR(es_g(c.position, g), c.value, 1e-9);

    const Solution d = solve_problem_D(market, g, w, x, u);
    check_form(d);
    EXPECT_NEAR(es_g(d.position, g), x, 1e-9);
    EXPECT_NEAR(u.expected(d.position, w), d.value, 1e-12);

    const SpectralFunctional rho({0.0, 0.5, 0.9}, {0.2, 0.3, 0.5});
    const Solution e = solve_problem_E(market, g, x, rho);
    check_form(e);
    EXPECT_NEAR(es_g(e.position, g), x, 1e-9);
    EXPECT_NEAR(rho(e.position.law()), e.value, 1e-9);
  }
}

TEST(Solvers, OptimaComonotoneWithDensity) {
  Rng rng(85);
  for (int trial = 0; trial < 100; ++trial) {
    const MarketModel market = random_market(rng, 5);
    const RiskProfile g = testing::random_es_profile(rng, 6);
    for (const Solution& s : {solve_problem_A(market, g, 0.0, 0.0), solve_problem_B(market, g, 0.0, 0.0)}) {
      const Position& x = s.position;
      for (std::size_t k = 0; k < x.size(); ++k) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          if (x.density[k] > x.density[j]) EXPECT_GE(x.loss[k], x.loss[j]);
        }
      }
    }
  }
}

TEST(HardyLittlewood, RearrangementRaisesRiskNeutralMean) {
  Rng rng(86);
  for (int trial = 0; trial < 300; ++trial) {
    const MarketModel market = random_market(rng, 6);
    std::vector<double> loss(market.size());
    for (double& v : loss) v = testing::normal(rng);
    const Position original = position_on_states(market, loss);
    const Position re = comonotone_rearrangement(market, loss);
    EXPECT_GE(re.expectation_q(), original.expectation_q() - 1e-12);
    EXPECT_NEAR(re.expectation_p(), original.expectation_p(), 1e-12);
    const StepQuantile a = re.law(), b = original.law();
    for (int k = 0; k <= 20; ++k) EXPECT_NEAR(a.es(k / 20.0), b.es(k / 20.0), 1e-12);
  }
}

OracleProblem oracle_problem(char which, const RiskProfile& g, double w, double x) {
  OracleProblem p{Functional::AdjustedES, false, Functional::Price, x, g, w, std::nullopt,
                  std::nullopt};
  switch (which) {
    case 'A': break;
    case 'B': p.objective = Functional::Price; p.constraint = Functional::AdjustedES; break;
    case 'C': p.constraint = Functional::Utility; break;
    case 'D': p.objective = Functional::Utility; p.constraint = Functional::AdjustedES; break;
    default:
      p.objective = Functional::Spectral;
      p.maximize = true;
      p.constraint = Functional::AdjustedES;
      break;
  }
  return p;
}

TEST(Oracle, TwoStateFixture) {
  const GridSpec grid{0.05, 40};
  const OracleResult a = brute_force_oracle(kTwoState, oracle_problem('A', kZ0, 0.0, 0.0), grid);
  EXPECT_NEAR(a.value, -0.75, 1e-2 * grid.step);
  EXPECT_EQ(a.evaluated, 81u);
  const OracleResult b = brute_force_oracle(kTwoState, oracle_problem('B', kZ0, 0.0, 0.0), grid);
  EXPECT_NEAR(b.value, solve_problem_B(kTwoState, kZ0, 0.0, 0.0).value, 1e-2 * grid.step);

  const MarketModel one({{1.0, 1.0}});
  const RiskProfile g = RiskProfile::piecewise_constant({0.25}, {1.0});
  const OracleResult single = brute_force_oracle(one, oracle_problem('A', g, 1.0, 0.5), grid);
  EXPECT_EQ(single.evaluated, 1u);
  EXPECT_DOUBLE_EQ(single.loss[0], 0.5);
  EXPECT_DOUBLE_EQ(single.value, 0.25);
}

TEST(Oracle, Errors) {
  const MarketModel four({{0.25, 0.25}, {0.25, 0.25}, {0.25, 0.25}, {0.25, 0.25}});
  EXPECT_EQ(code_of([&] { brute_force_oracle(four, oracle_problem('A', kZ0, 0, 0), {0.01, 500}); }),
            ErrorCode::GridTooLarge);
  const MarketModel five({{0.2, 0.2}, {0.2, 0.2}, {0.2, 0.2}, {0.2, 0.2}, {0.2, 0.2}});
  EXPECT_EQ(code_of([&] { brute_force_oracle(five, oracle_problem('A', kZ0, 0, 0), {0.1, 1}); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { brute_force_oracle(kTwoState, oracle_problem('D', kZ0, 0, 0), {0.1, 1}); }),
            ErrorCode::InvalidArgument);
}

TEST(Oracle, ClosedFormsAreNotBeaten) {
  Rng rng(87);
  const GridSpec grid{0.05, 40};
  for (int trial = 0; trial < 6; ++trial) {
    const MarketModel market = random_market(rng);
    const RiskProfile g = random_benchmark(rng);
    const double w = testing::uniform(rng, -0.5, 0.5), x = testing::uniform(rng, -0.5, 0.5);
    const UtilityFn u = UtilityFn::ramp(0.0);
    const SpectralFunctional rho({0.25, 0.75}, {0.5, 0.5});

    const double slack = 2.0 * grid.step;
    const OracleResult a = brute_force_oracle(market, oracle_problem('A', g, w, x), grid);
    EXPECT_GE(a.value, solve_problem_A(market, g, w, x).value - 1e-9);
    EXPECT_LE(a.value, solve_problem_A(market, g, w, x).value + slack);

    const OracleResult b = brute_force_oracle(market, oracle_problem('B', g, w, x), grid);
    EXPECT_GE(b.value, solve_problem_B(market, g, w, x).value - 1e-9);

    OracleProblem dp = oracle_problem('D', g, w, x);
    dp.u = u;
    EXPECT_GE(brute_force_oracle(market, dp, grid).value, solve_problem_D(market, g, w, x, u).value - 1e-9);

    OracleProblem ep = oracle_problem('E', g, w, x);
    ep.spectral = rho;
    EXPECT_LE(brute_force_oracle(market, ep, grid).value, solve_problem_E(market, g, x, rho).value + 1e-9);
  }
}

}  // namespace
}  // namespace adjes
