#pragma once

#include <cmath>
#include <string>

#include "dualrisk/distortion.hpp"
#include "dualrisk/errors.hpp"
#include "dualrisk/lottery.hpp"

namespace dualrisk {

/// A coverage offer: indemnity Q in [0, L] at loading lambda over the
/// actuarially fair rate.
struct InsuranceQuote {
    BinaryLossLottery scenario;
    double loading = 0.0;    // lambda >= -1
    double indemnity = 0.0;  // Q in [0, L]

    void validate() const {
        scenario.validate();
        if (!(loading >= -1.0) || !std::isfinite(loading)) {
            throw DomainError("loading must be >= -1, got " + std::to_string(loading));
        }
        if (!(indemnity >= 0.0 && indemnity <= scenario.loss)) {
            throw DomainError("indemnity must lie in [0, loss], got " +
                              std::to_string(indemnity));
        }
    }
};

/// Premium for indemnity Q at loading lambda: p * Q * (1 + lambda).
inline double premium(const InsuranceQuote& q) {
    q.validate();
    return q.scenario.p * q.indemnity * (1.0 + q.loading);
}

/// Loading threshold below which coverage raises the agent's dual value:
/// [(1-p) - f(1-p)] / p. Equals risk_premium / (p * L); zero under identity.
inline double lambda_star(const Distortion& f, const BinaryLossLottery& s) {
    s.validate();
    if (s.p <= 0.0) throw DomainError("lambda_star undefined at zero loss probability");
    const double q = 1.0 - s.p;
    return (q - f.value(q)) / s.p;
}

/// Per unit of indemnity, the dual-value gain of coverage at loading lambda:
/// a(lambda) = (1 - p(1+lambda)) - f(1-p). Positive iff lambda < lambda_star.
inline double coverage_unit_gain(const Distortion& f, const BinaryLossLottery& s,
                                 double loading) {
    s.validate();
    return (1.0 - s.p * (1.0 + loading)) - f.value(1.0 - s.p);
}

struct CoverageDecision {
    bool accept = false;       // true iff coverage does not lower the dual value
    bool indifferent = false;  // gain is zero to within tolerance
    double q_star = 0.0;       // chosen indemnity: L when accepted, else 0
    double lambda_star = 0.0;  // acceptance threshold of this scenario
    double utility_gain = 0.0; // dual-value change of full coverage, a(lambda) * L
};

/// Corner-solution coverage choice. The dual value is linear in the
/// indemnity, so the optimum is full coverage when the per-unit gain is
/// nonnegative and no coverage otherwise. utility_gain reports the
/// full-coverage margin a(lambda) * L in either case, so that
/// accept <=> utility_gain >= 0 and the margin is strictly decreasing in
/// the loading.
inline CoverageDecision optimal_coverage(const Distortion& f, const BinaryLossLottery& s,
                                         double loading) {
    s.validate();
    if (s.p <= 0.0) throw DomainError("coverage decision undefined at zero loss probability");
    const double unit_gain = coverage_unit_gain(f, s, loading);
    constexpr double kTol = 1e-12;

    CoverageDecision d;
    d.lambda_star = lambda_star(f, s);
    d.utility_gain = unit_gain * s.loss;
    d.indifferent = std::abs(unit_gain) <= kTol;
    d.accept = unit_gain >= -kTol;
    d.q_star = d.accept ? s.loss : 0.0;
    return d;
}

}  // namespace dualrisk
