#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dualrisk/oracle.hpp"
#include "dualrisk/policy.hpp"

using namespace dualrisk;
using Catch::Approx;

namespace {

// worked instance used throughout: f = t^2, p = 0.5, loading 0.6, c(x) = 0.1 x
PolicyScenario worked() {
    return {{0.0, 100.0, 0.5}, 0.6, CostSchedule::linear(0.1), Distortion::power(2.0)};
}

PolicyScenario random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double gamma = 1.2 + 2.0 * unit(rng);
    const Distortion f = Distortion::power(gamma);
    const double p = 0.2 + 0.6 * unit(rng);
    const BinaryLossLottery s{unit(rng) * 50.0, 10.0 + 190.0 * unit(rng), p};
    const double threshold = lambda_star(f, s);
    const double loading = threshold * (1.05 + unit(rng)) + 0.02;
    // keep the marginal cost below f'(1-p) so the surplus opens positive
    const double k = (0.1 + 0.8 * unit(rng)) * f.derivative(1.0 - p);
    return {s, loading, CostSchedule::linear(k), f};
}

}  // namespace

TEST_CASE("cost schedules") {
    const auto lin = CostSchedule::linear(0.1);
    CHECK(lin.unit_cost(0.0) == 0.0);
    CHECK(lin.unit_cost(0.2) == Approx(0.02).margin(1e-15));
    CHECK(lin.marginal_unit_cost(0.4) == 0.1);
    const auto pw = CostSchedule::power_law(2.0, 3.0);
    CHECK(pw.unit_cost(0.1) == Approx(0.002).margin(1e-15));
    CHECK(pw.marginal_unit_cost(0.1) == Approx(0.06).margin(1e-15));
    CHECK_THROWS_AS(CostSchedule::linear(0.0), DomainError);
    CHECK_THROWS_AS(CostSchedule::power_law(1.0, 0.5), DomainError);
}

TEST_CASE("surplus: worked values and domain") {
    const auto ps = worked();
    CHECK(surplus(ps, 0.0) == 0.0);
    CHECK(surplus(ps, 0.2) == Approx(22.0).margin(1e-12));
    CHECK(surplus(ps, 0.02) == Approx(1.84).margin(1e-12));
    CHECK_THROWS_AS(surplus(ps, 0.5), DomainError);
    CHECK_THROWS_AS(surplus(ps, -0.01), DomainError);
}

TEST_CASE("admissible_set: full interval, empty, and zero-surplus boundary") {
    const auto full = admissible_set(worked(), 1000);
    REQUIRE(full.size() == 1);
    CHECK(full[0].lo == 0.0);
    CHECK(full[0].hi == Approx(0.5).margin(1e-9));
    CHECK(full[0].lo < 1e-12);
    CHECK(full[0].hi > 0.3);

    const PolicyScenario costly{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(2.0),
                                Distortion::identity()};
    CHECK_THROWS_AS(admissible_set(costly, 1000), EmptyAdmissibleError);

    // identity with unit cost: surplus identically zero, everything admissible
    const PolicyScenario wash{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(1.0),
                              Distortion::identity()};
    const auto all = admissible_set(wash, 1000);
    REQUIRE(all.size() == 1);
    CHECK(all[0].lo == 0.0);
    CHECK(all[0].hi == Approx(0.4).margin(1e-12));

    CHECK_THROWS_AS(admissible_set(worked(), 50), DomainError);
}

TEST_CASE("admissible_set: disconnected regions are reported separately") {
    // quartic WTP against quadratic cost: surplus is positive near zero,
    // dips negative, then recovers, so E splits in two
    const PolicyScenario ps{{0.0, 100.0, 0.8}, 0.5, CostSchedule::power_law(1.0, 2.0),
                            Distortion::power(4.0)};
    const auto sets = admissible_set(ps, 4000);
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].lo == 0.0);
    CHECK(sets[0].hi == Approx(0.0445).margin(5e-3));
    CHECK(sets[1].lo == Approx(0.528).margin(5e-3));
    CHECK(sets[1].hi == Approx(0.8).margin(1e-9));
    // refined boundaries sit on the surplus zero set
    CHECK(surplus(ps, sets[0].hi) == Approx(0.0).margin(1e-6));
    CHECK(surplus(ps, sets[1].lo) == Approx(0.0).margin(1e-6));
}

TEST_CASE("admissible_set: interior boundary is refined by bisection") {
    // strongly convex distortion, steep initial cost: surplus opens negative
    // and turns positive at (0.4 + x)^3 - 0.064 = 0.5 x
    const PolicyScenario ps{{0.0, 100.0, 0.6}, 2.0, CostSchedule::linear(0.5),
                            Distortion::power(3.0)};
    const auto sets = admissible_set(ps, 2000);
    REQUIRE(sets.size() == 1);
    CHECK(sets[0].lo > 0.0);
    CHECK(surplus(ps, sets[0].lo) == Approx(0.0).margin(1e-7));
    CHECK(surplus(ps, sets[0].lo - 1e-6) < 0.0);
    CHECK(surplus(ps, sets[0].lo + 1e-6) > 0.0);
}

TEST_CASE("coverage_regime_interval: worked values") {
    CHECK(coverage_regime_interval(worked()).hi == 0.03125);  // exact

    // boundary loading: interval collapses
    const auto f = Distortion::power(2.0);
    const BinaryLossLottery s{0.0, 100.0, 0.5};
    const PolicyScenario at_star{s, lambda_star(f, s), CostSchedule::linear(0.1), f};
    CHECK(coverage_regime_interval(at_star).empty());

    // identity distortion: x_max = p - (1 - (1-p)) / (1 + loading)
    const PolicyScenario id{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(1.0),
                            Distortion::identity()};
    CHECK(coverage_regime_interval(id).hi == Approx(0.4 - 0.4 / 1.5).margin(1e-15));
}

TEST_CASE("alpha_coverage: worked values") {
    const auto ps = worked();
    CHECK(alpha_coverage(ps, 0.02) == Approx(1.84 / 3.84).margin(1e-12));

    // vanishing reduction buys vanishing coverage
    CHECK(alpha_coverage(ps, 1e-9) == Approx(0.0).margin(1e-7));

    // beyond the regime bound the denominator loses its sign
    const PolicyScenario steep{{0.0, 100.0, 0.5}, 0.6, CostSchedule::linear(0.1),
                               Distortion::power(2.0)};
    CHECK_THROWS_AS(alpha_coverage(steep, 0.2), SignError);

    CHECK_THROWS_AS(alpha_coverage(ps, 0.0), DomainError);
    CHECK_THROWS_AS(alpha_coverage(ps, 0.5), DomainError);

    // zero surplus with positive slack: alpha vanishes
    const PolicyScenario wash{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(1.0),
                              Distortion::identity()};
    CHECK(alpha_coverage(wash, 0.05) == Approx(0.0).margin(1e-12));
}

TEST_CASE("alpha_coverage: both groupings of the closed form agree") {
    std::mt19937_64 rng(192837);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    long violations = 0;
    for (int i = 0; i < 500; ++i) {
        const PolicyScenario ps = random_instance(rng);
        const double x_max = coverage_regime_interval(ps).hi;
        const double x = x_max * unit(rng);
        if (!(x > 0.0)) continue;
        const double a = alpha_coverage(ps, x);
        const double b = alpha_coverage_grouped(ps, x);
        if (std::abs(a - b) > 1e-12) ++violations;
    }
    REQUIRE(violations == 0);
}

TEST_CASE("participation constraint: saturation and rearranged algebra") {
    std::mt19937_64 rng(654987);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    long violations = 0;
    for (int i = 0; i < 200; ++i) {
        const PolicyScenario ps = random_instance(rng);
        const double x_max = coverage_regime_interval(ps).hi;
        const double x = x_max * unit(rng);
        if (!(x > 0.0)) continue;
        const double alpha = alpha_coverage(ps, x);
        const double loss = ps.scenario.loss;
        const double p = ps.scenario.p;

        // saturated constraint: the contract leaves the agent exactly at the
        // reservation dual value
        const double reservation = dt_initial_wealth(ps.distortion, ps.scenario);
        if (std::abs(agent_dt_with_contract(ps, x, alpha) - reservation) > 1e-9 * loss)
            ++violations;

        // rearranged inequality form vs direct dual-value comparison on a
        // random (not saturating) coverage level
        const double alpha_try = unit(rng);
        const WtpQuery q{ps.scenario, p, p - x};
        const double lhs = wtp_partial(ps.distortion, q) - ps.cost.total_cost(x, loss);
        const double rhs = alpha_try * loss *
                           ((p - x) * (1.0 + ps.loading) - 1.0 +
                            ps.distortion.value(1.0 - (p - x)));
        const bool rearranged_ok = lhs >= rhs - 1e-10 * loss;
        const bool direct_ok = agent_dt_with_contract(ps, x, alpha_try) >=
                               reservation - 1e-10 * loss;
        if (rearranged_ok != direct_ok) {
            // disagreement is only legitimate within rounding of the boundary
            if (std::abs(lhs - rhs) > 1e-9 * loss) ++violations;
        }
    }
    REQUIRE(violations == 0);
}

TEST_CASE("alpha_coverage: increasing in x and below one inside the regime") {
    std::mt19937_64 rng(111213);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    long violations = 0;
    for (int i = 0; i < 100; ++i) {
        const PolicyScenario ps = random_instance(rng);
        const double x_max = coverage_regime_interval(ps).hi;
        const double x = x_max * unit(rng);
        const double h = x_max * 1e-5;
        if (!(x - h > 0.0 && x + h < x_max)) continue;
        const double marginal_surplus =
            ps.distortion.derivative(1.0 - ps.scenario.p + x) - ps.cost.marginal_unit_cost(x);
        const double alpha = alpha_coverage(ps, x);
        if (!(alpha < 1.0)) ++violations;
        if (marginal_surplus > 0.0) {
            const double slope =
                (alpha_coverage(ps, x + h) - alpha_coverage(ps, x - h)) / (2.0 * h);
            if (!(slope > 0.0)) ++violations;
        }
    }
    REQUIRE(violations == 0);
}

TEST_CASE("insurer_objective: worked values") {
    const auto ps = worked();
    const double alpha = alpha_coverage(ps, 0.02);
    CHECK(insurer_objective(ps, 0.02) ==
          Approx(0.48 * 1.6 * alpha * 100.0 + 0.2).margin(1e-12));
    CHECK(insurer_objective(ps, 0.02) == Approx(37.0).margin(1e-6));
    CHECK(net_expected_profit(ps, 0.02, alpha) ==
          Approx(0.6 * 0.48 * alpha * 100.0).margin(1e-12));

    // zero coverage leaves only the reduction fee
    const PolicyScenario wash{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(1.0),
                              Distortion::identity()};
    CHECK(alpha_coverage(wash, 0.05) == Approx(0.0).margin(1e-12));
    CHECK(insurer_objective(wash, 0.05) == Approx(0.05 * 100.0).margin(1e-12));

    // neutral agent, fair premium, cost-recovery fee: the constraint pins
    // nothing down (0/0) and no coverage is sold
    const PolicyScenario fair{{0.0, 100.0, 0.4}, 0.0, CostSchedule::linear(1.0),
                              Distortion::identity()};
    CHECK(alpha_coverage(fair, 0.1) == 0.0);
    CHECK(insurer_objective(fair, 0.1) == Approx(0.1 * 100.0).margin(1e-12));
    // with surplus left over the same denominator is a hard error
    const PolicyScenario fair_cheap{{0.0, 100.0, 0.4}, 0.0, CostSchedule::linear(0.5),
                                    Distortion::identity()};
    CHECK_THROWS_AS(alpha_coverage(fair_cheap, 0.1), SignError);
}

TEST_CASE("optimize_policy: worked instance peaks at the regime boundary") {
    const auto ps = worked();
    const auto sol = optimize_policy(ps, 20000);
    CHECK(sol.x_star > 0.0);
    CHECK(sol.x_star <= 0.03125);
    CHECK(sol.objective >= insurer_objective(ps, 0.02));
    CHECK(sol.objective >= 37.0);
    CHECK(sol.alpha_star < 1.0);
    CHECK(std::abs(sol.pc_residual) <= 1e-9 * ps.scenario.loss);
    CHECK(sol.surplus_at_x == Approx(surplus(ps, sol.x_star)).margin(1e-12));
    // the whole regime interval is admissible here
    CHECK(sol.admissible_interval.lo == 0.0);
    CHECK(sol.admissible_interval.hi == Approx(0.03125).margin(1e-12));
}

TEST_CASE("optimize_policy: interior optimum is stationary") {
    const PolicyScenario ps{{0.0, 100.0, 0.5}, 0.6, CostSchedule::power_law(40.0, 2.0),
                            Distortion::power(2.0)};
    const auto sol = optimize_policy(ps, 100000);
    const double x_max = coverage_regime_interval(ps).hi;
    REQUIRE(sol.x_star > 1e-4);
    REQUIRE(sol.x_star < x_max - 1e-4);
    const double h = 1e-6;
    const double slope =
        (insurer_objective(ps, sol.x_star + h) - insurer_objective(ps, sol.x_star - h)) /
        (2.0 * h);
    CHECK(std::abs(slope) < 1e-6 * ps.scenario.loss);
    CHECK(std::abs(sol.pc_residual) <= 1e-9 * ps.scenario.loss);
}

TEST_CASE("optimize_policy: failure modes") {
    // identity with k >= 1: costs exceed the WTP everywhere
    const PolicyScenario costly{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(2.0),
                                Distortion::identity()};
    CHECK_THROWS_AS(optimize_policy(costly, 1000), EmptyAdmissibleError);

    // k = 1 boundary: zero surplus everywhere, fee-only revenue, optimum at
    // the right end of the regime interval
    const PolicyScenario wash{{0.0, 100.0, 0.4}, 0.5, CostSchedule::linear(1.0),
                              Distortion::identity()};
    const auto sol = optimize_policy(wash, 10000);
    const double x_max = coverage_regime_interval(wash).hi;
    CHECK(sol.x_star == Approx(x_max).margin(1e-8));
    CHECK(sol.alpha_star == Approx(0.0).margin(1e-12));
    CHECK(sol.objective == Approx(x_max * 100.0).margin(1e-6));

    // loading at or below the acceptance threshold violates the regime
    const auto f = Distortion::power(2.0);
    const BinaryLossLottery s{0.0, 100.0, 0.5};
    const PolicyScenario bad{s, lambda_star(f, s), CostSchedule::linear(0.1), f};
    CHECK_THROWS_AS(optimize_policy(bad, 1000), DomainError);
}

TEST_CASE("optimize_policy: matches exhaustive grid search") {
    std::mt19937_64 rng(222333);
    long violations = 0;
    for (int i = 0; i < 5; ++i) {
        const PolicyScenario ps = random_instance(rng);
        const auto sol = optimize_policy(ps, 100000);
        const double x_max = coverage_regime_interval(ps).hi;
        auto objective = [&](double x) { return insurer_objective(ps, x); };
        const auto best = oracle::grid_maximize(objective, x_max * 1e-9, x_max, 1000001);
        if (std::abs(best.value - sol.objective) > 1e-8 * ps.scenario.loss) ++violations;
    }
    REQUIRE(violations == 0);
}
