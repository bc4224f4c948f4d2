#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "dualrisk/distortion.hpp"
#include "dualrisk/errors.hpp"
#include "dualrisk/lottery.hpp"
#include "dualrisk/policy.hpp"

namespace dualrisk {

using json = nlohmann::json;

/// Parameter-sweep request attached to a scenario file.
struct SweepSpec {
    std::string parameter;  // one of: p0, loading, gamma, k, x
    double lo = 0.0;
    double hi = 0.0;
    int steps = 1;
};

/// On-disk problem instance. Parsing rejects unknown fields (ParseError);
/// value-range violations surface as DomainError so the CLI can distinguish
/// malformed files from out-of-domain ones.
struct ScenarioFile {
    double wealth = 0.0;
    double loss = 0.0;
    double p0 = 0.0;
    double loading = 0.0;
    Distortion distortion = Distortion::identity();
    std::optional<CostSchedule> cost;
    std::optional<SweepSpec> sweep;

    BinaryLossLottery binary() const { return {wealth, loss, p0}; }

    PolicyScenario policy() const {
        if (!cost) throw DomainError("scenario has no cost schedule");
        return PolicyScenario{binary(), loading, *cost, distortion};
    }
};

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) throw ParseError("unknown field '" + item.key() + "' in " + where);
    }
}

inline double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError("missing field '" + std::string(key) + "' in " + where);
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError("field '" + std::string(key) + "' in " + where +
                                         " must be a number");
    return v.get<double>();
}

inline std::string require_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError("missing field '" + std::string(key) + "' in " + where);
    const json& v = obj.at(key);
    if (!v.is_string()) throw ParseError("field '" + std::string(key) + "' in " + where +
                                         " must be a string");
    return v.get<std::string>();
}

}  // namespace detail

inline Distortion distortion_from_json(const json& obj) {
    if (!obj.is_object()) throw ParseError("distortion must be an object");
    const std::string family = detail::require_string(obj, "family", "distortion");
    if (family == "identity") {
        detail::reject_unknown_keys(obj, {"family"}, "distortion");
        return Distortion::identity();
    }
    if (family == "power") {
        detail::reject_unknown_keys(obj, {"family", "gamma"}, "distortion");
        return Distortion::power(detail::require_number(obj, "gamma", "distortion"));
    }
    if (family == "prelec") {
        detail::reject_unknown_keys(obj, {"family", "alpha", "beta"}, "distortion");
        return Distortion::prelec(detail::require_number(obj, "alpha", "distortion"),
                                  detail::require_number(obj, "beta", "distortion"));
    }
    if (family == "convex_mix") {
        detail::reject_unknown_keys(obj, {"family", "weight", "gamma"}, "distortion");
        return Distortion::convex_mix(detail::require_number(obj, "weight", "distortion"),
                                      detail::require_number(obj, "gamma", "distortion"));
    }
    throw ParseError("unknown distortion family '" + family + "'");
}

inline json distortion_to_json(const Distortion& d) {
    json obj;
    if (std::holds_alternative<Identity>(d.family())) {
        obj["family"] = "identity";
    } else if (const auto* pw = std::get_if<Power>(&d.family())) {
        obj["family"] = "power";
        obj["gamma"] = pw->gamma;
    } else if (const auto* pr = std::get_if<Prelec>(&d.family())) {
        obj["family"] = "prelec";
        obj["alpha"] = pr->alpha;
        obj["beta"] = pr->beta;
    } else if (const auto* mix = std::get_if<ConvexMix>(&d.family())) {
        obj["family"] = "convex_mix";
        obj["weight"] = mix->weight;
        obj["gamma"] = mix->gamma;
    }
    return obj;
}

inline CostSchedule cost_from_json(const json& obj) {
    if (!obj.is_object()) throw ParseError("cost must be an object");
    const std::string family = detail::require_string(obj, "family", "cost");
    if (family == "linear") {
        detail::reject_unknown_keys(obj, {"family", "k"}, "cost");
        return CostSchedule::linear(detail::require_number(obj, "k", "cost"));
    }
    if (family == "power") {
        detail::reject_unknown_keys(obj, {"family", "k", "m"}, "cost");
        return CostSchedule::power_law(detail::require_number(obj, "k", "cost"),
                                       detail::require_number(obj, "m", "cost"));
    }
    throw ParseError("unknown cost family '" + family + "'");
}

inline json cost_to_json(const CostSchedule& c) {
    json obj;
    if (const auto* lin = std::get_if<LinearCost>(&c.family())) {
        obj["family"] = "linear";
        obj["k"] = lin->k;
    } else {
        const auto& p = std::get<PowerLawCost>(c.family());
        obj["family"] = "power";
        obj["k"] = p.k;
        obj["m"] = p.m;
    }
    return obj;
}

inline SweepSpec sweep_from_json(const json& obj) {
    if (!obj.is_object()) throw ParseError("sweep must be an object");
    detail::reject_unknown_keys(obj, {"parameter", "lo", "hi", "steps"}, "sweep");
    SweepSpec s;
    s.parameter = detail::require_string(obj, "parameter", "sweep");
    if (s.parameter != "p0" && s.parameter != "loading" && s.parameter != "gamma" &&
        s.parameter != "k" && s.parameter != "x") {
        throw ParseError("sweep parameter must be one of p0, loading, gamma, k, x; got '" +
                         s.parameter + "'");
    }
    s.lo = detail::require_number(obj, "lo", "sweep");
    s.hi = detail::require_number(obj, "hi", "sweep");
    if (!obj.contains("steps") || !obj.at("steps").is_number_integer()) {
        throw ParseError("sweep needs an integer 'steps' field");
    }
    s.steps = obj.at("steps").get<int>();
    if (s.steps < 1) throw DomainError("sweep steps must be >= 1");
    if (s.steps > 1 && !(s.lo < s.hi)) throw DomainError("sweep needs lo < hi");
    return s;
}

inline ScenarioFile scenario_from_json(const json& obj) {
    if (!obj.is_object()) throw ParseError("scenario must be a JSON object");
    detail::reject_unknown_keys(
        obj, {"wealth", "loss", "p0", "loading", "distortion", "cost", "sweep"}, "scenario");
    if (!obj.contains("distortion")) throw ParseError("missing field 'distortion' in scenario");

    ScenarioFile s;
    s.wealth = detail::require_number(obj, "wealth", "scenario");
    s.loss = detail::require_number(obj, "loss", "scenario");
    s.p0 = detail::require_number(obj, "p0", "scenario");
    s.loading = detail::require_number(obj, "loading", "scenario");
    s.distortion = distortion_from_json(obj.at("distortion"));
    if (obj.contains("cost")) s.cost = cost_from_json(obj.at("cost"));
    if (obj.contains("sweep")) s.sweep = sweep_from_json(obj.at("sweep"));

    s.binary().validate();  // numeric invariants enforced at load
    if (!(s.loading >= -1.0)) throw DomainError("loading must be >= -1");
    return s;
}

inline json scenario_to_json(const ScenarioFile& s) {
    json obj;
    obj["wealth"] = s.wealth;
    obj["loss"] = s.loss;
    obj["p0"] = s.p0;
    obj["loading"] = s.loading;
    obj["distortion"] = distortion_to_json(s.distortion);
    if (s.cost) obj["cost"] = cost_to_json(*s.cost);
    if (s.sweep) {
        obj["sweep"] = {{"parameter", s.sweep->parameter},
                        {"lo", s.sweep->lo},
                        {"hi", s.sweep->hi},
                        {"steps", s.sweep->steps}};
    }
    return obj;
}

inline json lottery_to_json(const Lottery& lot) {
    json arr = json::array();
    for (const Atom& a : lot.atoms()) {
        arr.push_back({{"outcome", a.outcome}, {"probability", a.probability}});
    }
    return arr;
}

inline Lottery lottery_from_json(const json& arr) {
    if (!arr.is_array()) throw ParseError("lottery must be a JSON array");
    std::vector<Atom> atoms;
    atoms.reserve(arr.size());
    for (const json& rec : arr) {
        if (!rec.is_object()) throw ParseError("lottery atoms must be objects");
        detail::reject_unknown_keys(rec, {"outcome", "probability"}, "lottery atom");
        atoms.push_back({detail::require_number(rec, "outcome", "lottery atom"),
                         detail::require_number(rec, "probability", "lottery atom")});
    }
    return Lottery(std::move(atoms));
}

inline ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
    return scenario_from_json(obj);
}

}  // namespace dualrisk
