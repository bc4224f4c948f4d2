#pragma once

#include <cmath>
#include <string>

#include "dualrisk/distortion.hpp"
#include "dualrisk/errors.hpp"
#include "dualrisk/lottery.hpp"

namespace dualrisk {

/// A request to price the reduction of the loss probability from p_from
/// down to p_to (p_to <= p_from).
struct WtpQuery {
    BinaryLossLottery scenario;
    double p_from = 0.0;
    double p_to = 0.0;

    void validate() const {
        scenario.validate();
        if (!(p_from >= 0.0 && p_from <= 1.0)) {
            throw DomainError("p_from must lie in [0,1], got " + std::to_string(p_from));
        }
        if (!(p_to >= 0.0 && p_to <= 1.0)) {
            throw DomainError("p_to must lie in [0,1], got " + std::to_string(p_to));
        }
        if (p_to > p_from) {
            throw DomainError("p_to (" + std::to_string(p_to) + ") exceeds p_from (" +
                              std::to_string(p_from) + ")");
        }
    }
};

/// Maximum sure payment to eliminate the loss entirely: [1 - f(1-p)] * L.
/// Wealth drops out; equals the expected loss plus the risk premium.
inline double wtp_total(const Distortion& f, const BinaryLossLottery& s) {
    s.validate();
    return (1.0 - f.value(1.0 - s.p)) * s.loss;
}

/// Maximum sure payment to lower the loss probability from p_from to p_to:
/// [f(1-p_to) - f(1-p_from)] * L. Exactly zero when the probabilities match.
inline double wtp_partial(const Distortion& f, const WtpQuery& q) {
    q.validate();
    if (q.p_from == q.p_to) return 0.0;
    return (f.value(1.0 - q.p_to) - f.value(1.0 - q.p_from)) * q.scenario.loss;
}

struct WtpDecomposition {
    double total_from;  // elimination value at p_from
    double total_to;    // elimination value at p_to
    double partial;     // their difference
};

/// Partial willingness to pay as the difference of two total-elimination
/// values, computed so that partial == total_from - total_to exactly.
inline WtpDecomposition wtp_decompose(const Distortion& f, const WtpQuery& q) {
    q.validate();
    BinaryLossLottery at_from = q.scenario;
    at_from.p = q.p_from;
    BinaryLossLottery at_to = q.scenario;
    at_to.p = q.p_to;
    const double total_from = wtp_total(f, at_from);
    const double total_to = wtp_total(f, at_to);
    return {total_from, total_to, total_from - total_to};
}

struct MeanValuePoint {
    double point;  // c with f'(c) * (p_from - p_to) * L == wtp_partial
    bool unique;   // false when f' is constant and any interior point works
};

/// Locates the mean-value abscissa of the partial WTP on the interval
/// (1-p_from, 1-p_to). Requires a distortion whose derivative is strictly
/// monotone there; constant-derivative families return the flagged midpoint.
inline MeanValuePoint mean_value_point(const Distortion& f, const WtpQuery& q) {
    q.validate();
    if (!(q.p_to < q.p_from)) {
        throw DomainError("mean value point requires p_to < p_from");
    }
    const double lo = 1.0 - q.p_from;
    const double hi = 1.0 - q.p_to;
    if (f.has_constant_derivative()) {
        return {0.5 * (lo + hi), false};
    }
    if (!f.has_monotone_derivative()) {
        throw DomainError("mean value search needs a strictly monotone derivative; " +
                          f.describe() + " does not provide one");
    }
    const double target = wtp_partial(f, q) / ((q.p_from - q.p_to) * q.scenario.loss);
    auto residual = [&](double c) { return f.derivative(c) - target; };

    double a = lo;
    double b = hi;
    double ga = residual(a);
    double gb = residual(b);
    if (ga == 0.0) return {std::nextafter(a, b), true};
    if (gb == 0.0) return {std::nextafter(b, a), true};
    if (ga * gb > 0.0) {
        // rounding pushed the target marginally outside [f'(a), f'(b)];
        // the true point sits next to the endpoint with the smaller residual
        return {std::abs(ga) < std::abs(gb) ? std::nextafter(a, b) : std::nextafter(b, a), true};
    }
    for (int iter = 0; iter < 200 && b - a > 0.0; ++iter) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double gm = residual(mid);
        if (gm == 0.0) return {mid, true};
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return {0.5 * (a + b), true};
}

/// Central finite-difference slope in p of the value of cutting the loss
/// probability by the proportion `alpha` (p -> (1-alpha)p).
inline double proportional_wtp_slope(const Distortion& f, double loss, double p, double alpha,
                                     double step = 1e-5) {
    if (!(loss > 0.0)) throw DomainError("loss must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("reduction proportion must lie in (0,1], got " + std::to_string(alpha));
    }
    if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
    if (!(p - step > 0.0 && p + step < 1.0)) {
        throw DomainError("p +/- step must stay inside (0,1)");
    }
    auto value_at = [&](double pp) {
        return (f.value(1.0 - (1.0 - alpha) * pp) - f.value(1.0 - pp)) * loss;
    };
    return (value_at(p + step) - value_at(p - step)) / (2.0 * step);
}

}  // namespace dualrisk
