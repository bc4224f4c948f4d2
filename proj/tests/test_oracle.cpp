#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dualrisk/oracle.hpp"
#include "dualrisk/wtp.hpp"

using namespace dualrisk;
using Catch::Approx;

TEST_CASE("indifference_wtp: worked values") {
    const BinaryLossLottery s{50.0, 100.0, 0.2};
    CHECK(oracle::indifference_wtp(Distortion::identity(), s, 0.0) ==
          Approx(20.0).margin(1e-8));
    CHECK(oracle::indifference_wtp(Distortion::power(2.0), s, 0.1) ==
          Approx(17.0).margin(1e-8));
    CHECK(oracle::indifference_wtp(Distortion::power(2.0), s, 0.2) == 0.0);
}

TEST_CASE("indifference_wtp: bracketing and iteration failures") {
    const BinaryLossLottery s{0.0, 100.0, 0.2};
    // raising the loss probability needs a negative payment: no bracket in [0, L]
    CHECK_THROWS_AS(oracle::indifference_wtp(Distortion::power(2.0), s, 0.6), NoBracketError);
    // starved iteration budget
    oracle::BisectionConfig cfg;
    cfg.abs_tol = 1e-14;
    cfg.max_iter = 3;
    CHECK_THROWS_AS(oracle::indifference_wtp(Distortion::power(2.0), s, 0.1, cfg), MaxIterError);
    CHECK_THROWS_AS(oracle::indifference_wtp(Distortion::power(2.0), s, 1.5), DomainError);

    oracle::BisectionConfig bad;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(oracle::indifference_wtp(Distortion::power(2.0), s, 0.1, bad), DomainError);
}

TEST_CASE("indifference_wtp: converges within the bisection iteration bound") {
    const BinaryLossLottery s{10.0, 100.0, 0.35};
    oracle::BisectionConfig cfg;
    cfg.abs_tol = 1e-10;
    // |gap'| = 1 in the payment, so halving needs at most
    // ceil(log2(L / (tol * L))) steps once bracketed
    cfg.max_iter = static_cast<int>(std::ceil(std::log2(1.0 / cfg.abs_tol))) + 1;
    const double v = oracle::indifference_wtp(Distortion::power(3.0), s, 0.1, cfg);
    CHECK(v == Approx(wtp_partial(Distortion::power(3.0), {s, 0.35, 0.1})).margin(1e-7));
}

TEST_CASE("indifference_wtp: deterministic") {
    const BinaryLossLottery s{123.0, 321.0, 0.37};
    const auto f = Distortion::prelec(0.8, 1.2);
    const double a = oracle::indifference_wtp(f, s, 0.11);
    const double b = oracle::indifference_wtp(f, s, 0.11);
    CHECK(a == b);  // bit-identical
}

TEST_CASE("grid_maximize: corner cases and tie-breaking") {
    const auto constant = [](double) { return 3.5; };
    const auto flat = oracle::grid_maximize(constant, 2.0, 7.0, 11);
    CHECK(flat.x == 2.0);  // ties to the smallest x
    CHECK(flat.value == 3.5);

    const auto linear = [](double x) { return 0.25 * x; };
    const auto top = oracle::grid_maximize(linear, 0.0, 100.0, 101);
    CHECK(top.x == 100.0);
    CHECK(top.value == 25.0);

    CHECK_THROWS_AS(oracle::grid_maximize(linear, 1.0, 1.0, 10), DomainError);
    CHECK_THROWS_AS(oracle::grid_maximize(linear, 0.0, 1.0, 1), DomainError);
}

TEST_CASE("grid_maximize: evaluation failures carry the offending point") {
    const auto faulty = [](double x) -> double {
        if (x > 0.5) throw DomainError("boom");
        return x;
    };
    try {
        oracle::grid_maximize(faulty, 0.0, 1.0, 5);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("x=0.75") != std::string::npos);
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
}

TEST_CASE("grid_maximize: deterministic") {
    const auto bump = [](double x) { return -(x - 0.3) * (x - 0.3); };
    const auto a = oracle::grid_maximize(bump, 0.0, 1.0, 1000);
    const auto b = oracle::grid_maximize(bump, 0.0, 1.0, 1000);
    CHECK(a.x == b.x);
    CHECK(a.value == b.value);
}
