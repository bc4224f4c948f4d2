// Command-line front end: loads a scenario file and prints willingness-to-pay,
// insurance, and risk-reduction policy results as JSON records or CSV rows.
//
// Exit codes: 0 on success, 2 when the scenario file cannot be parsed,
// 3 on a domain or regime violation, 4 when the problem is infeasible.

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dualrisk/dualrisk.hpp"
#include "dualrisk/scenario.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using namespace dualrisk;

constexpr const char* kSweepColumns =
    "index,parameter,value,p0,p_to,lambda_star,risk_premium,neutral_wtp,"
    "wtp_total,wtp_partial,surplus,alpha,objective,net_expected_profit";

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string csv_cell(const ojson& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    return v.get<std::string>();
}

void emit_records(const std::vector<ojson>& rows, const std::string& format,
                  bool table = false) {
    if (rows.empty()) return;
    if (format == "csv") {
        bool first = true;
        for (const auto& item : rows.front().items()) {
            std::cout << (first ? "" : ",") << item.key();
            first = false;
        }
        std::cout << "\n";
        for (const auto& row : rows) {
            first = true;
            for (const auto& item : row.items()) {
                std::cout << (first ? "" : ",") << csv_cell(item.value());
                first = false;
            }
            std::cout << "\n";
        }
    } else if (!table && rows.size() == 1) {
        std::cout << rows.front().dump(2) << "\n";
    } else {
        std::cout << ojson(rows).dump(2) << "\n";
    }
}

int default_grid() {
    if (const char* env = std::getenv("DUALRISK_GRID_DEFAULT")) {
        int value = 0;
        const std::string text(env);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc{} && ptr == text.data() + text.size() && value >= 3) {
            return value;
        }
        std::cerr << "warning: ignoring invalid DUALRISK_GRID_DEFAULT='" << text << "'\n";
    }
    return detail::kDefaultGrid;
}

struct CommonOpts {
    std::string scenario_path;
    std::string format = "json";
    bool verify = false;
    int grid = 0;  // 0 = use default

    int grid_or_default() const { return grid > 0 ? grid : default_grid(); }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--scenario", opts.scenario_path, "Path to a scenario JSON file")
        ->required();
    cmd->add_option("--format", opts.format, "Output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_flag("--verify", opts.verify,
                  "Append independent oracle values and absolute deviations");
    cmd->add_option("--grid", opts.grid,
                    "Grid size for scans and oracles (default 100000, or "
                    "DUALRISK_GRID_DEFAULT)");
}

ojson wtp_record(const ScenarioFile& s, double p_to, bool verify, int grid) {
    (void)grid;
    const BinaryLossLottery bin = s.binary();
    const WtpQuery query{bin, s.p0, p_to};
    const WtpDecomposition decomp = wtp_decompose(s.distortion, query);

    ojson rec;
    rec["wealth"] = s.wealth;
    rec["loss"] = s.loss;
    rec["p0"] = s.p0;
    rec["p_to"] = p_to;
    rec["wtp_total_from"] = decomp.total_from;
    rec["wtp_total_to"] = decomp.total_to;
    rec["wtp_partial"] = decomp.partial;
    rec["neutral_partial"] = (s.p0 - p_to) * s.loss;
    rec["risk_premium"] = risk_premium(s.distortion, bin);
    if (s.p0 > p_to) {
        try {
            const MeanValuePoint mv = mean_value_point(s.distortion, query);
            rec["mean_value_point"] = mv.point;
            rec["mean_value_unique"] = mv.unique;
        } catch (const DomainError&) {
            rec["mean_value_point"] = nullptr;
            rec["mean_value_unique"] = nullptr;
        }
    } else {
        rec["mean_value_point"] = nullptr;
        rec["mean_value_unique"] = nullptr;
    }
    if (verify) {
        const double o_from = oracle::indifference_wtp(s.distortion, bin, 0.0);
        BinaryLossLottery at_to = bin;
        at_to.p = p_to;
        const double o_to = oracle::indifference_wtp(s.distortion, at_to, 0.0);
        const double o_partial = oracle::indifference_wtp(s.distortion, bin, p_to);
        rec["oracle_total_from"] = o_from;
        rec["oracle_total_to"] = o_to;
        rec["oracle_partial"] = o_partial;
        rec["oracle_total_from_dev"] = std::abs(o_from - decomp.total_from);
        rec["oracle_total_to_dev"] = std::abs(o_to - decomp.total_to);
        rec["oracle_partial_dev"] = std::abs(o_partial - decomp.partial);
    }
    return rec;
}

ojson premium_record(const ScenarioFile& s, double indemnity) {
    const InsuranceQuote quote{s.binary(), s.loading, indemnity};
    ojson rec;
    rec["p0"] = s.p0;
    rec["loading"] = s.loading;
    rec["indemnity"] = indemnity;
    rec["premium"] = premium(quote);
    return rec;
}

double bisect_acceptance_boundary(const Distortion& f, const BinaryLossLottery& bin) {
    // verdict-flip search in the loading, blind to the closed form
    double lo = -1.0;
    double hi = 1.0;
    auto accepts = [&](double lam) { return optimal_coverage(f, bin, lam).accept; };
    while (!accepts(lo)) lo = lo * 2.0 - 1.0;
    while (accepts(hi)) hi = hi * 2.0 + 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (accepts(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ojson lambda_star_record(const ScenarioFile& s, bool verify) {
    const BinaryLossLottery bin = s.binary();
    const double threshold = lambda_star(s.distortion, bin);
    ojson rec;
    rec["p0"] = s.p0;
    rec["loading"] = s.loading;
    rec["lambda_star"] = threshold;
    rec["accepts_at_loading"] = optimal_coverage(s.distortion, bin, s.loading).accept;
    if (verify) {
        const double o = bisect_acceptance_boundary(s.distortion, bin);
        rec["oracle_lambda_star"] = o;
        rec["oracle_lambda_star_dev"] = std::abs(o - threshold);
    }
    return rec;
}

ojson coverage_record(const ScenarioFile& s, bool verify, int grid) {
    const BinaryLossLottery bin = s.binary();
    const CoverageDecision d = optimal_coverage(s.distortion, bin, s.loading);
    ojson rec;
    rec["p0"] = s.p0;
    rec["loading"] = s.loading;
    rec["accept"] = d.accept;
    rec["indifferent"] = d.indifferent;
    rec["q_star"] = d.q_star;
    rec["lambda_star"] = d.lambda_star;
    rec["utility_gain"] = d.utility_gain;
    if (verify) {
        const double base = dt_value(s.distortion, bin.wealth_lottery());
        auto dt_at = [&](double q) {
            const double prem = bin.p * q * (1.0 + s.loading);
            const Lottery insured =
                (q >= bin.loss)
                    ? Lottery::degenerate(bin.wealth - prem + bin.loss)
                    : Lottery({{bin.wealth - prem + q, bin.p},
                               {bin.wealth - prem + bin.loss, 1.0 - bin.p}});
            return dt_value(s.distortion, insured);
        };
        const auto best = oracle::grid_maximize(dt_at, 0.0, bin.loss, grid + 1);
        rec["oracle_q_star"] = best.x;
        rec["oracle_best_gain"] = best.value - base;
        rec["oracle_gain_dev"] = std::abs(std::max(d.utility_gain, 0.0) - (best.value - base));
    }
    return rec;
}

ojson policy_record(const ScenarioFile& s, bool verify, int grid) {
    const PolicyScenario ps = s.policy();
    const PolicySolution sol = optimize_policy(ps, grid);
    const Interval regime = coverage_regime_interval(ps);

    ojson rec;
    rec["p0"] = s.p0;
    rec["loading"] = s.loading;
    rec["lambda_star"] = lambda_star(s.distortion, s.binary());
    rec["x_bar"] = regime.hi;
    rec["admissible_lo"] = sol.admissible_interval.lo;
    rec["admissible_hi"] = sol.admissible_interval.hi;
    rec["x_star"] = sol.x_star;
    rec["alpha_star"] = sol.alpha_star;
    rec["objective"] = sol.objective;
    rec["surplus_at_x"] = sol.surplus_at_x;
    rec["net_expected_profit"] = sol.net_expected_profit;
    rec["pc_residual"] = sol.pc_residual;
    if (verify) {
        const double lo = std::max(sol.admissible_interval.lo, regime.hi * 1e-9);
        auto objective_of = [&](double x) { return insurer_objective(ps, x); };
        const auto best =
            oracle::grid_maximize(objective_of, lo, sol.admissible_interval.hi, grid + 1);
        rec["oracle_objective"] = best.value;
        rec["oracle_objective_dev"] = std::abs(best.value - sol.objective);

        // saturate the participation constraint by bisection in alpha
        const double reservation = dt_initial_wealth(ps.distortion, ps.scenario);
        double alo = 0.0;
        double ahi = 1.0;
        for (int iter = 0; iter < 200 && ahi - alo > 1e-14; ++iter) {
            const double mid = 0.5 * (alo + ahi);
            if (agent_dt_with_contract(ps, sol.x_star, mid) >= reservation) {
                alo = mid;
            } else {
                ahi = mid;
            }
        }
        const double oracle_alpha = 0.5 * (alo + ahi);
        rec["oracle_alpha"] = oracle_alpha;
        rec["oracle_alpha_dev"] = std::abs(oracle_alpha - sol.alpha_star);
    }
    return rec;
}

std::vector<ojson> sweep_rows(const ScenarioFile& s, std::optional<double> p_to_flag,
                              std::optional<double> alpha_flag) {
    if (!s.sweep) throw DomainError("scenario has no sweep block");
    const SweepSpec& sw = *s.sweep;

    std::vector<ojson> rows;
    for (int i = 0; i < sw.steps; ++i) {
        const double value =
            (sw.steps == 1) ? sw.lo : sw.lo + (sw.hi - sw.lo) * i / (sw.steps - 1);

        ScenarioFile inst = s;
        std::optional<double> x_reduction;
        if (sw.parameter == "p0") {
            inst.p0 = value;
        } else if (sw.parameter == "loading") {
            if (!(value >= -1.0)) {
                throw DomainError("swept loading " + std::to_string(value) + " is below -1");
            }
            inst.loading = value;
        } else if (sw.parameter == "gamma") {
            if (const auto* pw = std::get_if<Power>(&s.distortion.family())) {
                (void)pw;
                inst.distortion = Distortion::power(value);
            } else if (const auto* mix = std::get_if<ConvexMix>(&s.distortion.family())) {
                inst.distortion = Distortion::convex_mix(mix->weight, value);
            } else {
                throw DomainError("gamma sweep needs a power or convex_mix distortion");
            }
        } else if (sw.parameter == "k") {
            if (!s.cost) throw DomainError("k sweep needs a cost schedule");
            if (std::holds_alternative<LinearCost>(s.cost->family())) {
                inst.cost = CostSchedule::linear(value);
            } else {
                const auto& pc = std::get<PowerLawCost>(s.cost->family());
                inst.cost = CostSchedule::power_law(value, pc.m);
            }
        } else {  // x
            if (!s.cost) throw DomainError("x sweep needs a cost schedule");
            x_reduction = value;
        }
        inst.binary().validate();

        double p_to = 0.0;
        if (x_reduction) {
            if (!(*x_reduction > 0.0 && *x_reduction < inst.p0)) {
                throw DomainError("swept reduction x=" + std::to_string(*x_reduction) +
                                  " leaves (0, p0)");
            }
            p_to = inst.p0 - *x_reduction;
        } else if (p_to_flag) {
            p_to = *p_to_flag;
        } else if (alpha_flag) {
            p_to = (1.0 - *alpha_flag) * inst.p0;
        }

        const BinaryLossLottery bin = inst.binary();
        const WtpQuery query{bin, inst.p0, p_to};
        ojson row;
        row["index"] = i;
        row["parameter"] = sw.parameter;
        row["value"] = value;
        row["p0"] = inst.p0;
        row["p_to"] = p_to;
        row["lambda_star"] = (inst.p0 > 0.0) ? ojson(lambda_star(inst.distortion, bin)) : ojson();
        row["risk_premium"] = risk_premium(inst.distortion, bin);
        row["neutral_wtp"] = (inst.p0 - p_to) * inst.loss;
        row["wtp_total"] = wtp_total(inst.distortion, bin);
        row["wtp_partial"] = wtp_partial(inst.distortion, query);
        if (x_reduction) {
            const PolicyScenario ps = inst.policy();
            const double alpha = alpha_coverage(ps, *x_reduction);
            row["surplus"] = surplus(ps, *x_reduction);
            row["alpha"] = alpha;
            row["objective"] = insurer_objective(ps, *x_reduction);
            row["net_expected_profit"] = net_expected_profit(ps, *x_reduction, alpha);
        } else {
            row["surplus"] = nullptr;
            row["alpha"] = nullptr;
            row["objective"] = nullptr;
            row["net_expected_profit"] = nullptr;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "dualrisk: willingness to pay, insurance demand, and insurer "
        "risk-reduction policy under dual (rank-dependent) choice"};
    app.require_subcommand(1);
    app.footer(std::string("Sweep output columns, in order:\n  ") + kSweepColumns +
               "\nColumns surplus, alpha, objective and net_expected_profit are filled only "
               "when sweeping x;\nfor other sweeps they are empty (CSV) or null (JSON). "
               "--verify has no effect on sweep.\n\nExit codes: 0 ok, 2 scenario parse error, "
               "3 domain or regime error, 4 infeasible problem.");

    CommonOpts wtp_opts;
    double p_to_value = 0.0;
    double alpha_value = 0.0;
    auto* wtp_cmd = app.add_subcommand("wtp", "Willingness to pay for risk reduction");
    add_common(wtp_cmd, wtp_opts);
    auto* p_to_opt = wtp_cmd->add_option("--p-to", p_to_value, "Target loss probability");
    auto* alpha_opt = wtp_cmd->add_option(
        "--alpha", alpha_value, "Reduce the loss probability by this proportion instead");
    p_to_opt->excludes(alpha_opt);

    CommonOpts premium_opts;
    double indemnity = -1.0;
    auto* premium_cmd = app.add_subcommand("premium", "Premium for a coverage quote");
    add_common(premium_cmd, premium_opts);
    premium_cmd->add_option("--indemnity", indemnity, "Indemnity Q (default: the full loss)");

    CommonOpts lambda_opts;
    auto* lambda_cmd =
        app.add_subcommand("lambda-star", "Loading threshold for insurance acceptance");
    add_common(lambda_cmd, lambda_opts);

    CommonOpts coverage_opts;
    auto* coverage_cmd = app.add_subcommand("coverage", "Optimal indemnity decision");
    add_common(coverage_cmd, coverage_opts);

    CommonOpts policy_opts;
    auto* policy_cmd = app.add_subcommand(
        "policy-optimize", "Insurer's joint risk-reduction and coverage policy");
    add_common(policy_cmd, policy_opts);

    CommonOpts sweep_opts;
    double sweep_p_to = 0.0;
    double sweep_alpha = 0.0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate quantities over a parameter grid");
    add_common(sweep_cmd, sweep_opts);
    auto* sweep_p_to_opt =
        sweep_cmd->add_option("--p-to", sweep_p_to, "Target loss probability for WTP columns");
    auto* sweep_alpha_opt = sweep_cmd->add_option(
        "--alpha", sweep_alpha, "Proportional reduction for WTP columns (p_to = (1-alpha)*p0)");
    sweep_p_to_opt->excludes(sweep_alpha_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*wtp_cmd) {
            const ScenarioFile s = load_scenario(wtp_opts.scenario_path);
            double p_to;
            if (*alpha_opt) {
                if (!(alpha_value >= 0.0 && alpha_value <= 1.0)) {
                    throw DomainError("--alpha must lie in [0,1]");
                }
                p_to = (1.0 - alpha_value) * s.p0;
            } else if (*p_to_opt) {
                p_to = p_to_value;
            } else {
                p_to = 0.0;
            }
            emit_records({wtp_record(s, p_to, wtp_opts.verify, wtp_opts.grid_or_default())},
                         wtp_opts.format);
        } else if (*premium_cmd) {
            const ScenarioFile s = load_scenario(premium_opts.scenario_path);
            emit_records({premium_record(s, indemnity < 0.0 ? s.loss : indemnity)},
                         premium_opts.format);
        } else if (*lambda_cmd) {
            const ScenarioFile s = load_scenario(lambda_opts.scenario_path);
            emit_records({lambda_star_record(s, lambda_opts.verify)}, lambda_opts.format);
        } else if (*coverage_cmd) {
            const ScenarioFile s = load_scenario(coverage_opts.scenario_path);
            emit_records(
                {coverage_record(s, coverage_opts.verify, coverage_opts.grid_or_default())},
                coverage_opts.format);
        } else if (*policy_cmd) {
            const ScenarioFile s = load_scenario(policy_opts.scenario_path);
            emit_records({policy_record(s, policy_opts.verify, policy_opts.grid_or_default())},
                         policy_opts.format);
        } else if (*sweep_cmd) {
            const ScenarioFile s = load_scenario(sweep_opts.scenario_path);
            std::optional<double> p_to_flag;
            std::optional<double> alpha_flag;
            if (*sweep_p_to_opt) p_to_flag = sweep_p_to;
            if (*sweep_alpha_opt) {
                if (!(sweep_alpha >= 0.0 && sweep_alpha <= 1.0)) {
                    throw DomainError("--alpha must lie in [0,1]");
                }
                alpha_flag = sweep_alpha;
            }
            emit_records(sweep_rows(s, p_to_flag, alpha_flag), sweep_opts.format,
                         /*table=*/true);
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const EmptyAdmissibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const DegenerateError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
