#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dualrisk/distortion.hpp"
#include "dualrisk/errors.hpp"
#include "dualrisk/insurance.hpp"
#include "dualrisk/lottery.hpp"
#include "dualrisk/wtp.hpp"

namespace dualrisk {

// Unit cost c(x) of reducing the loss probability by x; the money cost of a
// reduction is c(x) * L.
struct LinearCost {
    double k;  // c(x) = k * x
};

struct PowerLawCost {
    double k;  // scale, > 0
    double m;  // exponent, >= 1; c(x) = k * x^m
};

class CostSchedule {
public:
    using Family = std::variant<LinearCost, PowerLawCost>;

    explicit CostSchedule(Family family) : family_(family) { validate(); }

    static CostSchedule linear(double k) { return CostSchedule(LinearCost{k}); }
    static CostSchedule power_law(double k, double m) { return CostSchedule(PowerLawCost{k, m}); }

    const Family& family() const { return family_; }

    double unit_cost(double x) const {
        if (const auto* lin = std::get_if<LinearCost>(&family_)) return lin->k * x;
        const auto& p = std::get<PowerLawCost>(family_);
        return p.k * std::pow(x, p.m);
    }

    double marginal_unit_cost(double x) const {
        if (const auto* lin = std::get_if<LinearCost>(&family_)) return lin->k;
        const auto& p = std::get<PowerLawCost>(family_);
        if (p.m == 1.0) return p.k;
        return p.k * p.m * std::pow(x, p.m - 1.0);
    }

    double total_cost(double x, double loss) const { return unit_cost(x) * loss; }

private:
    void validate() const {
        if (const auto* lin = std::get_if<LinearCost>(&family_)) {
            if (!(lin->k > 0.0) || !std::isfinite(lin->k)) {
                throw DomainError("linear cost slope must be positive");
            }
            return;
        }
        const auto& p = std::get<PowerLawCost>(family_);
        if (!(p.k > 0.0) || !std::isfinite(p.k)) throw DomainError("cost scale must be positive");
        if (!(p.m >= 1.0) || !std::isfinite(p.m)) throw DomainError("cost exponent must be >= 1");
    }

    Family family_;
};

/// Instance of the insurer's joint reduction-plus-coverage problem. The
/// loading is required to exceed lambda_star, so the agent refuses plain
/// coverage and risk reduction is the insurer's lever.
struct PolicyScenario {
    BinaryLossLottery scenario;
    double loading = 0.0;
    CostSchedule cost;
    Distortion distortion;

    void validate() const {
        scenario.validate();
        if (!(scenario.p > 0.0 && scenario.p < 1.0)) {
            throw DomainError("policy problems need a loss probability strictly inside (0,1)");
        }
        const double threshold = lambda_star(distortion, scenario);
        if (!(loading > threshold)) {
            throw DomainError("loading " + std::to_string(loading) +
                              " must exceed the acceptance threshold lambda_star = " +
                              std::to_string(threshold) +
                              "; below it the agent simply buys full coverage");
        }
    }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(hi > lo); }
    double width() const { return hi - lo; }
};

namespace detail {

constexpr int kDefaultGrid = 100000;

// Feasibility tolerance for the surplus: S >= -kSurplusTol * L counts as
// admissible, so the zero-surplus boundary case keeps its whole interval.
constexpr double kSurplusRelTol = 1e-12;

inline double golden_section_maximize(const std::function<double(double)>& fn, double lo,
                                      double hi, double xtol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - (b - a) * inv_phi;
    double d = a + (b - a) * inv_phi;
    double fc = fn(c);
    double fd = fn(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = fn(d);
        }
    }
    // pick the best of the bracket representatives, ties to smallest x
    double best_x = c;
    double best_v = fc;
    if (fd > best_v || (fd == best_v && d < best_x)) {
        best_x = d;
        best_v = fd;
    }
    for (double x : {a, b}) {
        const double v = fn(x);
        if (v > best_v || (v == best_v && x < best_x)) {
            best_x = x;
            best_v = v;
        }
    }
    return best_x;
}

}  // namespace detail

/// Surplus of reducing the loss probability by x: willingness to pay for the
/// reduction minus its total cost, S(x) = [f(1-p+x) - f(1-p)] * L - c(x) * L.
inline double surplus(const PolicyScenario& ps, double x) {
    ps.scenario.validate();
    if (!(x >= 0.0 && x < ps.scenario.p)) {
        throw DomainError("reduction must lie in [0, p), got " + std::to_string(x));
    }
    const WtpQuery q{ps.scenario, ps.scenario.p, ps.scenario.p - x};
    return wtp_partial(ps.distortion, q) - ps.cost.total_cost(x, ps.scenario.loss);
}

/// Reductions whose cost the agent is willing to bear: the subset of (0, p)
/// where the surplus is nonnegative, reported as maximal subintervals of a
/// grid scan with sign-change endpoints refined by bisection to 1e-10.
inline std::vector<Interval> admissible_set(const PolicyScenario& ps, int grid_n = 1000) {
    ps.scenario.validate();
    if (grid_n < 100) throw DomainError("admissible-set scan needs at least 100 grid points");
    const double p = ps.scenario.p;
    const double tol = detail::kSurplusRelTol * ps.scenario.loss;
    auto ok = [&](double x) { return surplus(ps, x) >= -tol; };

    auto refine = [&](double inside, double outside) {
        for (int iter = 0; iter < 200 && std::abs(outside - inside) > 1e-10; ++iter) {
            const double mid = 0.5 * (inside + outside);
            if (ok(mid)) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        return 0.5 * (inside + outside);
    };

    std::vector<Interval> intervals;
    const double dx = p / (grid_n + 1);
    bool in_run = false;
    Interval current;
    double prev_x = 0.0;
    for (int i = 1; i <= grid_n; ++i) {
        const double x = dx * i;
        const bool good = ok(x);
        if (good && !in_run) {
            current.lo = (i == 1) ? 0.0 : refine(x, prev_x);
            in_run = true;
        } else if (!good && in_run) {
            current.hi = refine(prev_x, x);
            intervals.push_back(current);
            in_run = false;
        }
        prev_x = x;
    }
    if (in_run) {
        current.hi = p;
        intervals.push_back(current);
    }
    if (intervals.empty()) {
        throw EmptyAdmissibleError("no reduction level has cost within the agent's WTP");
    }
    return intervals;
}

/// The money-scale term A(x) = [(p-x)(1+lambda) + f(1-p) - 1] * L. Positive
/// exactly on the partial-coverage interval (0, x_max).
inline double coverage_slack(const PolicyScenario& ps, double x) {
    const double p = ps.scenario.p;
    return ((p - x) * (1.0 + ps.loading) + ps.distortion.value(1.0 - p) - 1.0) *
           ps.scenario.loss;
}

/// Coverage fraction that saturates the participation constraint at
/// reduction x: alpha(x) = (WTP - TC) / (WTP + A). The agent pays the whole
/// surplus and ends up exactly at the no-contract dual value.
inline double alpha_coverage(const PolicyScenario& ps, double x) {
    ps.scenario.validate();
    const double p = ps.scenario.p;
    if (!(x > 0.0 && x < p)) {
        throw DomainError("coverage fraction needs a reduction strictly inside (0, p)");
    }
    const double loss = ps.scenario.loss;
    const WtpQuery q{ps.scenario, p, p - x};
    const double wtp = wtp_partial(ps.distortion, q);
    const double cost = ps.cost.total_cost(x, loss);
    const double numer = wtp - cost;
    const double denom = wtp + coverage_slack(ps, x);
    const double tol = detail::kSurplusRelTol * loss;
    if (denom <= tol) {
        // Degenerate constraint: with zero surplus every coverage level is a
        // matter of indifference and none is sold; a positive surplus cannot
        // be absorbed by any alpha.
        if (std::abs(numer) <= tol) return 0.0;
        throw SignError("participation constraint cannot pin down a coverage fraction: "
                        "denominator " +
                        std::to_string(denom) + " is not positive at x = " + std::to_string(x));
    }
    return numer / denom;
}

/// Same fraction grouped exactly as the closed form
/// [f(1-(p-x)) - f(1-p) - c(x)] / [(p-x)(1+lambda) + f(1-(p-x)) - 1];
/// agrees with alpha_coverage to rounding and exists for cross-checks.
inline double alpha_coverage_grouped(const PolicyScenario& ps, double x) {
    ps.scenario.validate();
    const double p = ps.scenario.p;
    if (!(x > 0.0 && x < p)) {
        throw DomainError("coverage fraction needs a reduction strictly inside (0, p)");
    }
    const Distortion& f = ps.distortion;
    const double numer = f.value(1.0 - (p - x)) - f.value(1.0 - p) - ps.cost.unit_cost(x);
    const double denom = (p - x) * (1.0 + ps.loading) + f.value(1.0 - (p - x)) - 1.0;
    const double tol = detail::kSurplusRelTol;
    if (denom <= tol) {
        if (std::abs(numer) <= tol) return 0.0;
        throw SignError("participation constraint cannot pin down a coverage fraction");
    }
    return numer / denom;
}

/// Upper reduction bound x_max = p - (1 - f(1-p)) / (1 + lambda). On
/// (0, x_max) the slack A(x) is positive, saturated coverage stays below
/// one, and it increases with x wherever the marginal surplus is positive.
/// Empty whenever the loading does not exceed lambda_star.
inline Interval coverage_regime_interval(const PolicyScenario& ps) {
    ps.scenario.validate();
    const double p = ps.scenario.p;
    const double x_max =
        p - (1.0 - ps.distortion.value(1.0 - p)) / (1.0 + ps.loading);
    if (!(x_max > 0.0)) return {0.0, 0.0};
    return {0.0, x_max};
}

/// Insurer revenue at reduction x with saturated coverage:
/// (p-x)(1+lambda) * alpha(x) * L + c(x) * L.
inline double insurer_objective(const PolicyScenario& ps, double x) {
    const double alpha = alpha_coverage(ps, x);
    const double p = ps.scenario.p;
    const double loss = ps.scenario.loss;
    return (p - x) * (1.0 + ps.loading) * alpha * loss + ps.cost.total_cost(x, loss);
}

/// Premium income net of expected indemnity: lambda * (p-x) * alpha * L.
inline double net_expected_profit(const PolicyScenario& ps, double x, double alpha) {
    return ps.loading * (ps.scenario.p - x) * alpha * ps.scenario.loss;
}

/// Dual value the agent ends up with under contract (x, alpha); the
/// participation constraint compares this to the no-contract value.
inline double agent_dt_with_contract(const PolicyScenario& ps, double x, double alpha) {
    const double p = ps.scenario.p;
    const double loss = ps.scenario.loss;
    const double fee = ps.cost.total_cost(x, loss);
    const double prem = (p - x) * (1.0 + ps.loading) * alpha * loss;
    const double insured_floor = ps.scenario.wealth - fee - prem + alpha * loss;
    if (alpha >= 1.0) {
        // fully covered: wealth is certain
        return dt_value(ps.distortion, Lottery::degenerate(insured_floor));
    }
    const BinaryLossLottery reduced{insured_floor, (1.0 - alpha) * loss, p - x};
    return dt_value(ps.distortion, reduced.wealth_lottery());
}

struct PolicySolution {
    double x_star = 0.0;
    double alpha_star = 0.0;
    double objective = 0.0;
    double surplus_at_x = 0.0;
    double pc_residual = 0.0;         // agent dual value at the solution minus reservation
    double net_expected_profit = 0.0; // lambda * (p - x*) * alpha* * L
    Interval admissible_interval;     // feasible x-range the optimum was taken over
};

/// Maximizes the insurer objective over reductions that are admissible,
/// lie in the partial-coverage regime, and produce a coverage fraction in
/// [0,1]. Dense grid scan followed by golden-section refinement of the best
/// bracket to 1e-10 in x; ties break toward the smallest x.
inline PolicySolution optimize_policy(const PolicyScenario& ps,
                                      int grid_n = detail::kDefaultGrid) {
    ps.validate();
    if (grid_n < 3) throw DomainError("policy optimization needs at least 3 grid points");
    const double p = ps.scenario.p;
    const double loss = ps.scenario.loss;
    const Interval regime = coverage_regime_interval(ps);
    if (regime.empty()) {
        throw DomainError("loading does not exceed lambda_star; no reduction regime exists");
    }

    const double tol = detail::kSurplusRelTol * loss;
    auto feasible = [&](double x) { return surplus(ps, x) >= -tol; };

    // scan the closed right end too: the slack vanishes there but the
    // coverage fraction stays well defined as long as the surplus does
    const double dx = regime.hi / grid_n;
    double best_x = -1.0;
    double best_v = -INFINITY;
    int best_i = -1;
    for (int i = 1; i <= grid_n; ++i) {
        const double x = (i == grid_n) ? regime.hi : dx * i;
        if (!feasible(x)) continue;
        const double v = insurer_objective(ps, x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
            best_i = i;
        }
    }
    if (best_i < 0) {
        // distinguish "no admissible reduction anywhere" from "admissible
        // reductions exist but none inside the coverage regime"
        bool any = false;
        const int probe_n = 1000;
        for (int i = 1; i <= probe_n && !any; ++i) {
            any = feasible(p * i / (probe_n + 1));
        }
        if (any) {
            throw DegenerateError(
                "admissible reductions exist but none inside the partial-coverage regime");
        }
        throw EmptyAdmissibleError("no reduction level has cost within the agent's WTP");
    }

    // refine within the bracket around the best grid point, clipped to the
    // feasible region where a neighbour fails the surplus test
    auto clip_toward = [&](double from_ok, double to_bad) {
        for (int iter = 0; iter < 200 && std::abs(to_bad - from_ok) > 1e-12; ++iter) {
            const double mid = 0.5 * (from_ok + to_bad);
            if (feasible(mid)) {
                from_ok = mid;
            } else {
                to_bad = mid;
            }
        }
        return from_ok;
    };
    double lo = (best_i <= 1) ? dx * 1e-6 : dx * (best_i - 1);
    double hi = (best_i >= grid_n) ? regime.hi : dx * (best_i + 1);
    if (!feasible(lo)) lo = clip_toward(best_x, lo);
    if (!feasible(hi)) hi = clip_toward(best_x, hi);

    auto objective_of = [&](double x) { return insurer_objective(ps, x); };
    double x_star = detail::golden_section_maximize(objective_of, lo, hi, 1e-10);
    double obj_star = objective_of(x_star);
    if (best_v > obj_star || (best_v == obj_star && best_x < x_star)) {
        x_star = best_x;
        obj_star = best_v;
    }

    PolicySolution sol;
    sol.x_star = x_star;
    sol.alpha_star = alpha_coverage(ps, x_star);
    sol.objective = obj_star;
    sol.surplus_at_x = surplus(ps, x_star);
    sol.net_expected_profit = net_expected_profit(ps, x_star, sol.alpha_star);
    sol.pc_residual = agent_dt_with_contract(ps, x_star, sol.alpha_star) -
                      dt_initial_wealth(ps.distortion, ps.scenario);

    // report the connected feasible component containing the optimum
    double flo = 0.0;
    double fhi = regime.hi;
    if (!feasible(std::min(dx, x_star) * 0.5)) {
        // surplus opens negative: walk the grid left of the optimum
        double bad = dx * 1e-6;
        for (int i = best_i - 1; i >= 1; --i) {
            if (!feasible(dx * i)) {
                bad = dx * i;
                break;
            }
        }
        flo = clip_toward(x_star, bad);
    }
    if (!feasible(regime.hi)) {
        double bad = regime.hi;
        for (int i = best_i + 1; i <= grid_n; ++i) {
            if (!feasible(dx * i)) {
                bad = dx * i;
                break;
            }
        }
        fhi = clip_toward(x_star, bad);
    }
    sol.admissible_interval = {flo, fhi};
    return sol;
}

}  // namespace dualrisk
