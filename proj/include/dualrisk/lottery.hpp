#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dualrisk/distortion.hpp"
#include "dualrisk/errors.hpp"

namespace dualrisk {

struct Atom {
    double outcome;      // currency
    double probability;  // in (0, 1]
};

/// Finite lottery in canonical form: outcomes strictly ascending, equal
/// outcomes merged, probabilities summing to one. Inputs whose probabilities
/// sum to 1 within 1e-12 are renormalized; anything further off is rejected.
class Lottery {
public:
    static constexpr double kProbTol = 1e-12;

    explicit Lottery(std::vector<Atom> atoms) : atoms_(std::move(atoms)) { canonicalize(); }

    static Lottery degenerate(double outcome) { return Lottery({{outcome, 1.0}}); }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double expectation() const {
        double e = 0.0;
        for (const auto& a : atoms_) e += a.outcome * a.probability;
        return e;
    }

    Lottery shifted(double c) const {
        std::vector<Atom> out = atoms_;
        for (auto& a : out) a.outcome += c;
        return Lottery(std::move(out));
    }

    Lottery scaled(double factor) const {
        if (!(factor > 0.0)) throw DomainError("lottery scale factor must be positive");
        std::vector<Atom> out = atoms_;
        for (auto& a : out) a.outcome *= factor;
        return Lottery(std::move(out));
    }

private:
    void canonicalize() {
        if (atoms_.empty()) throw DomainError("lottery needs at least one atom");
        double sum = 0.0;
        for (const auto& a : atoms_) {
            if (!std::isfinite(a.outcome) || !std::isfinite(a.probability)) {
                throw DomainError("lottery atoms must be finite");
            }
            if (!(a.probability > 0.0)) {
                throw DomainError("atom probability must be positive, got " +
                                  std::to_string(a.probability));
            }
            sum += a.probability;
        }
        if (std::abs(sum - 1.0) > kProbTol) {
            throw DomainError("lottery probabilities sum to " + std::to_string(sum) +
                              ", expected 1");
        }
        for (auto& a : atoms_) a.probability /= sum;

        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.outcome < b.outcome; });
        std::vector<Atom> merged;
        merged.reserve(atoms_.size());
        for (const auto& a : atoms_) {
            if (!merged.empty() && merged.back().outcome == a.outcome) {
                merged.back().probability += a.probability;
            } else {
                merged.push_back(a);
            }
        }
        atoms_ = std::move(merged);
    }

    std::vector<Atom> atoms_;
};

/// Wealth position exposed to a single binary loss: wealth + (0, p; loss, 1-p).
/// The asset pays `loss` with probability 1-p and nothing with probability p.
struct BinaryLossLottery {
    double wealth = 0.0;  // W0
    double loss = 0.0;    // L > 0
    double p = 0.0;       // loss probability in [0,1]

    void validate() const {
        if (!(loss > 0.0) || !std::isfinite(loss)) {
            throw DomainError("loss must be positive, got " + std::to_string(loss));
        }
        if (!(p >= 0.0 && p <= 1.0)) {
            throw DomainError("loss probability must lie in [0,1], got " + std::to_string(p));
        }
        if (!std::isfinite(wealth)) throw DomainError("wealth must be finite");
    }

    /// Final-wealth lottery (wealth, p; wealth+loss, 1-p), degenerate at p=0 or 1.
    Lottery wealth_lottery() const {
        validate();
        if (p <= 0.0) return Lottery::degenerate(wealth + loss);
        if (p >= 1.0) return Lottery::degenerate(wealth);
        return Lottery({{wealth, p}, {wealth + loss, 1.0 - p}});
    }
};

/// Dual-theory value of a lottery: outcomes weighted by f-differences of
/// decumulative probabilities. For ascending outcomes w_1 < ... < w_n the
/// weight of w_k is f(P[W >= w_k]) - f(P[W >= w_{k+1}]).
inline double dt_value(const Distortion& f, const Lottery& lot) {
    const auto& atoms = lot.atoms();
    if (atoms.size() == 1) return atoms.front().outcome;
    // suffix[k] = probability of an outcome at least as large as atom k's
    const std::size_t n = atoms.size();
    double value = 0.0;
    double suffix = 0.0;
    double f_suffix = 0.0;  // f(0)
    for (std::size_t k = n; k-- > 0;) {
        suffix += atoms[k].probability;
        const double f_next = (k == 0) ? 1.0 : f.value(std::min(suffix, 1.0));
        value += (f_next - f_suffix) * atoms[k].outcome;
        f_suffix = f_next;
    }
    return value;
}

/// Dual-theory value of the initial binary position: W0 + f(1-p) * L.
inline double dt_initial_wealth(const Distortion& f, const BinaryLossLottery& s) {
    s.validate();
    return s.wealth + f.value(1.0 - s.p) * s.loss;
}

/// The sure amount the agent values exactly like the lottery. Dual theory is
/// certainty-linear, so this is the dual value itself.
inline double certainty_equivalent(const Distortion& f, const Lottery& lot) {
    return dt_value(f, lot);
}

/// Expected wealth minus certainty equivalent: [(1-p) - f(1-p)] * L.
/// Independent of initial wealth; nonnegative for convex f.
inline double risk_premium(const Distortion& f, const BinaryLossLottery& s) {
    s.validate();
    const double q = 1.0 - s.p;
    return (q - f.value(q)) * s.loss;
}

}  // namespace dualrisk
