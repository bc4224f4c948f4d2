#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "dualrisk/errors.hpp"
#include "dualrisk/lottery.hpp"

// Verification solvers for the test suites. Everything here works off the
// dual functional alone; none of the closed forms these routines check are
// allowed to appear below.

namespace dualrisk::oracle {

struct BisectionConfig {
    double abs_tol = 1e-10;  // on the indifference gap, relative to the loss size
    int max_iter = 200;

    void validate() const {
        if (!(abs_tol > 0.0)) throw DomainError("bisection tolerance must be positive");
        if (max_iter < 1) throw DomainError("bisection needs at least one iteration");
    }
};

/// Willingness to pay for reducing the loss probability to p_to, found as the
/// payment v at which the agent is indifferent between keeping the original
/// exposure and paying v for the reduced one. Pure bisection on the dual
/// values of the two positions over v in [0, L].
inline double indifference_wtp(const Distortion& f, const BinaryLossLottery& s, double p_to,
                               const BisectionConfig& cfg = {}) {
    s.validate();
    cfg.validate();
    if (!(p_to >= 0.0 && p_to <= 1.0)) {
        throw DomainError("p_to must lie in [0,1], got " + std::to_string(p_to));
    }
    const double reference = dt_value(f, s.wealth_lottery());
    auto gap = [&](double v) {
        const BinaryLossLottery reduced{s.wealth - v, s.loss, p_to};
        return dt_value(f, reduced.wealth_lottery()) - reference;
    };
    const double tol = cfg.abs_tol * s.loss;
    double lo = 0.0;
    double hi = s.loss;
    double g_lo = gap(lo);
    double g_hi = gap(hi);
    if (std::abs(g_lo) <= tol) return lo;
    if (std::abs(g_hi) <= tol) return hi;
    if (g_lo * g_hi > 0.0) {
        throw NoBracketError("indifference gap does not change sign on [0, L]");
    }
    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = gap(mid);
        if (std::abs(g_mid) <= tol) return mid;
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    throw MaxIterError("indifference bisection did not converge in " +
                       std::to_string(cfg.max_iter) + " iterations");
}

struct GridMaximum {
    double x = 0.0;
    double value = 0.0;
};

/// Argmax of any one-variable objective over n equally spaced points on
/// [lo, hi], ties broken toward the smallest x. Deterministic by
/// construction; evaluation failures are rethrown with the offending point.
inline GridMaximum grid_maximize(const std::function<double(double)>& objective, double lo,
                                 double hi, int n) {
    if (!(lo < hi)) throw DomainError("grid search needs lo < hi");
    if (n < 2) throw DomainError("grid search needs at least 2 points");
    GridMaximum best{lo, -INFINITY};
    for (int i = 0; i < n; ++i) {
        const double x = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
        double v;
        try {
            v = objective(x);
        } catch (const std::exception& e) {
            throw std::runtime_error("objective evaluation failed at x=" + std::to_string(x) +
                                     ": " + e.what());
        }
        if (v > best.value) {
            best.x = x;
            best.value = v;
        }
    }
    return best;
}

}  // namespace dualrisk::oracle
