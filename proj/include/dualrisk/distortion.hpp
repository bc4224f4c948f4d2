#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "dualrisk/errors.hpp"

namespace dualrisk {

// Probability distortion families. Each maps [0,1] onto [0,1], is strictly
// increasing, and fixes the endpoints: f(0)=0, f(1)=1.
struct Identity {};

// f(t) = t^gamma, gamma > 0. Convex for gamma > 1.
struct Power {
    double gamma;
};

// f(t) = exp(-beta * (-ln t)^alpha), alpha > 0, beta > 0.
// Reduces to t^beta when alpha = 1; inverse-S shaped for alpha < 1.
struct Prelec {
    double alpha;
    double beta;
};

// f(t) = w*t + (1-w)*t^gamma, w in [0,1], gamma > 0.
struct ConvexMix {
    double weight;
    double gamma;
};

enum class RiskAttitude { Neutral, StronglyAverse, NonConvex };

inline const char* to_string(RiskAttitude a) {
    switch (a) {
        case RiskAttitude::Neutral: return "neutral";
        case RiskAttitude::StronglyAverse: return "strongly_averse";
        default: return "non_convex";
    }
}

/// A parametric probability distortion with analytic first derivative.
///
/// Values are immutable after construction and all member functions are
/// pure, so a Distortion can be shared freely across threads.
class Distortion {
public:
    using Family = std::variant<Identity, Power, Prelec, ConvexMix>;

    explicit Distortion(Family family) : family_(family) { validate(); }

    static Distortion identity() { return Distortion(Identity{}); }
    static Distortion power(double gamma) { return Distortion(Power{gamma}); }
    static Distortion prelec(double alpha, double beta) { return Distortion(Prelec{alpha, beta}); }
    static Distortion convex_mix(double weight, double gamma) {
        return Distortion(ConvexMix{weight, gamma});
    }

    const Family& family() const { return family_; }

    /// f(t) for t in [0,1]; endpoints are exact. Inputs within 1e-12 of the
    /// domain are clamped, anything further out is a DomainError.
    double value(double t) const {
        t = clamp_unit(t, "distortion argument");
        return std::visit(
            [t](const auto& fam) { return eval(fam, t); }, family_);
    }

    double operator()(double t) const { return value(t); }

    /// Analytic f'(t). Accepts t in [0,1] but raises DomainError where the
    /// one-sided limit diverges (e.g. Prelec with alpha < 1 at either end,
    /// Power with gamma < 1 at t = 0).
    double derivative(double t) const {
        t = clamp_unit(t, "derivative argument");
        const double d = std::visit(
            [t](const auto& fam) { return deriv(fam, t); }, family_);
        if (!std::isfinite(d)) {
            throw DomainError("distortion derivative diverges at t=" + std::to_string(t));
        }
        return d;
    }

    /// Analytic f''(t), exposed only for the Identity and Power families.
    std::optional<double> second_derivative(double t) const {
        t = clamp_unit(t, "second derivative argument");
        if (std::holds_alternative<Identity>(family_)) return 0.0;
        if (const auto* p = std::get_if<Power>(&family_)) {
            const double g = p->gamma;
            if (g == 1.0) return 0.0;
            const double d2 = g * (g - 1.0) * std::pow(t, g - 2.0);
            if (!std::isfinite(d2)) {
                throw DomainError("distortion second derivative diverges at t=" +
                                  std::to_string(t));
            }
            return d2;
        }
        return std::nullopt;
    }

    /// Neutral iff f is the identity map; StronglyAverse iff f is convex and
    /// not the identity; NonConvex otherwise (including regimes where
    /// convexity cannot be established analytically, such as Prelec with
    /// alpha != 1).
    RiskAttitude classify() const {
        struct Visitor {
            RiskAttitude operator()(const Identity&) const { return RiskAttitude::Neutral; }
            RiskAttitude operator()(const Power& p) const { return from_power_exponent(p.gamma); }
            RiskAttitude operator()(const Prelec& p) const {
                if (p.alpha == 1.0) return from_power_exponent(p.beta);
                return RiskAttitude::NonConvex;
            }
            RiskAttitude operator()(const ConvexMix& m) const {
                if (m.weight == 1.0 || m.gamma == 1.0) return RiskAttitude::Neutral;
                return from_power_exponent(m.gamma);
            }
            static RiskAttitude from_power_exponent(double g) {
                if (g == 1.0) return RiskAttitude::Neutral;
                return g > 1.0 ? RiskAttitude::StronglyAverse : RiskAttitude::NonConvex;
            }
        };
        return std::visit(Visitor{}, family_);
    }

    /// True when f' is the same at every interior point (identity-like
    /// parameterizations). Used by the mean-value search.
    bool has_constant_derivative() const {
        if (std::holds_alternative<Identity>(family_)) return true;
        if (const auto* p = std::get_if<Power>(&family_)) return p->gamma == 1.0;
        if (const auto* p = std::get_if<Prelec>(&family_)) return p->alpha == 1.0 && p->beta == 1.0;
        if (const auto* m = std::get_if<ConvexMix>(&family_)) return m->weight == 1.0 || m->gamma == 1.0;
        return false;
    }

    /// True when f' is strictly monotone on every subinterval of (0,1).
    /// Prelec with alpha != 1 has a non-monotone derivative and returns false.
    bool has_monotone_derivative() const {
        if (has_constant_derivative()) return false;
        if (const auto* p = std::get_if<Prelec>(&family_)) return p->alpha == 1.0;
        return true;
    }

    std::string describe() const {
        std::ostringstream os;
        if (std::holds_alternative<Identity>(family_)) {
            os << "identity";
        } else if (const auto* pw = std::get_if<Power>(&family_)) {
            os << "power(gamma=" << pw->gamma << ")";
        } else if (const auto* pr = std::get_if<Prelec>(&family_)) {
            os << "prelec(alpha=" << pr->alpha << ", beta=" << pr->beta << ")";
        } else if (const auto* mix = std::get_if<ConvexMix>(&family_)) {
            os << "convex_mix(weight=" << mix->weight << ", gamma=" << mix->gamma << ")";
        }
        return os.str();
    }

private:
    static constexpr double kDomainTol = 1e-12;

    static double clamp_unit(double t, const char* what) {
        if (!(t >= -kDomainTol && t <= 1.0 + kDomainTol)) {
            throw DomainError(std::string(what) + " outside [0,1]: " + std::to_string(t));
        }
        if (t < 0.0) return 0.0;
        if (t > 1.0) return 1.0;
        return t;
    }

    static double eval(const Identity&, double t) { return t; }
    static double eval(const Power& p, double t) { return std::pow(t, p.gamma); }
    static double eval(const Prelec& p, double t) {
        if (t == 0.0) return 0.0;
        if (t == 1.0) return 1.0;
        return std::exp(-p.beta * std::pow(-std::log(t), p.alpha));
    }
    static double eval(const ConvexMix& m, double t) {
        return m.weight * t + (1.0 - m.weight) * std::pow(t, m.gamma);
    }

    static double deriv(const Identity&, double) { return 1.0; }
    static double deriv(const Power& p, double t) {
        if (p.gamma == 1.0) return 1.0;
        return p.gamma * std::pow(t, p.gamma - 1.0);
    }
    static double deriv(const Prelec& p, double t) {
        if (t <= 0.0) {
            // limit of f' at 0 is 0 for alpha > 1, +inf for alpha <= 1 (beta<1 case included)
            if (p.alpha > 1.0) return 0.0;
            if (p.alpha == 1.0) return p.beta > 1.0 ? 0.0 : (p.beta == 1.0 ? 1.0 : INFINITY);
            return INFINITY;
        }
        if (t >= 1.0) {
            if (p.alpha > 1.0) return 0.0;
            if (p.alpha == 1.0) return p.beta;
            return INFINITY;
        }
        const double u = -std::log(t);
        return eval(p, t) * p.beta * p.alpha * std::pow(u, p.alpha - 1.0) / t;
    }
    static double deriv(const ConvexMix& m, double t) {
        return m.weight + (1.0 - m.weight) * deriv(Power{m.gamma}, t);
    }

    void validate() const {
        struct Visitor {
            void operator()(const Identity&) const {}
            void operator()(const Power& p) const {
                require(p.gamma > 0.0 && std::isfinite(p.gamma), "power gamma must be positive");
            }
            void operator()(const Prelec& p) const {
                require(p.alpha > 0.0 && std::isfinite(p.alpha), "prelec alpha must be positive");
                require(p.beta > 0.0 && std::isfinite(p.beta), "prelec beta must be positive");
            }
            void operator()(const ConvexMix& m) const {
                require(m.weight >= 0.0 && m.weight <= 1.0, "convex_mix weight must lie in [0,1]");
                require(m.gamma > 0.0 && std::isfinite(m.gamma), "convex_mix gamma must be positive");
            }
            static void require(bool ok, const char* msg) {
                if (!ok) throw DomainError(msg);
            }
        };
        std::visit(Visitor{}, family_);
    }

    Family family_;
};

}  // namespace dualrisk
