#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "co2proxy/config.hpp"
#include "co2proxy/crisis.hpp"
#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"
#include "co2proxy/market.hpp"
#include "co2proxy/panel.hpp"
#include "co2proxy/policy.hpp"
#include "co2proxy/quant.hpp"
#include "co2proxy/scenario.hpp"
#include "co2proxy/settlement.hpp"

namespace co2proxy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fill) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write '" + path.string() + "'");
    fill(os);
    if (!os) throw DataError("write failed for '" + path.string() + "'");
}

inline std::filesystem::path prepare_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

inline double parse_number(const std::string& text, const std::string& what) {
    double v = 0.0;
    if (!parse_double(text, v)) throw ParameterError("bad number '" + text + "' for " + what);
    return v;
}

// Accepts plain decimals and simple fractions such as "4/3".
inline double parse_ratio(const std::string& text, const std::string& what) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_number(text, what);
    const double num = parse_number(text.substr(0, slash), what);
    const double den = parse_number(text.substr(slash + 1), what);
    if (den == 0.0) throw ParameterError("zero denominator in " + what);
    return num / den;
}

inline std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_number(std::string(trim(part)), what));
    return out;
}

inline EligibilitySet parse_eligibility(const std::string& text, bool allow_fossil) {
    std::vector<Technology> techs;
    for (const auto& part : split(text, ',')) {
        const auto name = trim(part);
        const auto tech = technology_from_string(name);
        if (!tech) throw ParameterError("unknown technology '" + std::string(name) + "'");
        techs.push_back(*tech);
    }
    return EligibilitySet::of(techs, allow_fossil);
}

inline int parse_int(const std::string& text, const std::string& what) {
    const double v = parse_number(text, what);
    if (v != static_cast<double>(static_cast<int>(v))) throw ParameterError(what + " must be an integer");
    return static_cast<int>(v);
}

inline unsigned thread_count(int requested) {
    if (requested < 0) throw ParameterError("--threads must be >= 0");
    return requested == 0 ? default_thread_count() : static_cast<unsigned>(requested);
}

}  // namespace detail

struct SettleArgs {
    double price = 0.0;
    double load = 0.0;
    double eligible_gen = 0.0;
    std::string policy = "none";
    bool levy = false;
    std::optional<double> max_eligible_mc;
};

inline int cmd_settle(const SettleArgs& a, std::ostream& out) {
    const auto policy = parse_policy(a.policy);
    SettlementResult r;
    std::optional<LevySettlement> levy;
    if (a.levy) {
        levy = levy_settlement_detail(a.price, a.load, a.eligible_gen, policy);
        r = levy->result;
    } else {
        r = settle_hour(a.price, a.load, a.eligible_gen, policy);
    }
    out << "Policy: " << policy_id(policy) << (a.levy ? " (levy route)" : "") << "\n"
        << "Price: " << format_exact(a.price) << " EUR/MWh, load " << format_exact(a.load)
        << " MWh, eligible generation " << format_exact(a.eligible_gen) << " MWh\n"
        << "Deduction: " << format_exact(r.deduction) << " EUR/MWh\n"
        << "Eligible remuneration: " << format_exact(r.remuneration) << " EUR/MWh\n"
        << "Baseline expenditure: " << format_exact(r.exp_base) << " EUR\n"
        << "Transfer: " << format_exact(r.transfer) << " EUR\n"
        << "Counterfactual expenditure: " << format_exact(r.exp_new) << " EUR\n";
    if (r.export_hour) out << "Note: eligible generation exceeds load (export hour)\n";
    if (levy) {
        out << "Levy collected: " << format_exact(levy->levy_collected) << " EUR, rebate "
            << format_exact(levy->rebate) << " EUR\n";
    }
    if (a.max_eligible_mc) {
        for (const auto& f : validate_policy(policy, *a.max_eligible_mc).findings)
            out << "Check " << f.check << ": " << (f.passed ? "ok" : "FAIL") << " (" << f.message << ")\n";
    }
    out << "RESULT policy=" << policy_id(policy) << " exp_base=" << format_exact(r.exp_base)
        << " transfer=" << format_exact(r.transfer) << " exp_new=" << format_exact(r.exp_new)
        << " remuneration=" << format_exact(r.remuneration) << " deduction=" << format_exact(r.deduction) << "\n";
    return kExitOk;
}

struct QuantifyArgs {
    std::string panel;
    std::string zone;
    std::string policy = "hard:100:28";
    std::string ramp;
    std::string eligible;
    bool pumped_storage = false;
    std::vector<std::string> sensitivity;
    bool sensitivity_requested = false;
    std::string config;
    std::string out_dir = "co2proxy_out";
    int threads = 0;
    int block_hours = 4;
};

inline int cmd_quantify(const QuantifyArgs& a, std::ostream& out) {
    KeyValueConfig cfg;
    if (!a.config.empty()) cfg = KeyValueConfig::load(a.config);
    const auto schema = SchemaConfig::from_config(cfg);
    const auto policy = parse_policy(a.policy);

    std::string elig_text = a.eligible.empty() ? cfg.get("eligible") : a.eligible;
    auto elig = elig_text.empty() ? EligibilitySet::default_set() : detail::parse_eligibility(elig_text, false);
    if (a.pumped_storage && !elig.contains(Technology::PumpedStorage)) elig = elig.with(Technology::PumpedStorage);

    DisplayOptions display;
    display.price_decimals = detail::parse_int(cfg.get("price_decimals", "1"), "price_decimals");
    display.pct_decimals = detail::parse_int(cfg.get("pct_decimals", "2"), "pct_decimals");
    const unsigned threads = detail::thread_count(a.threads);

    std::optional<LinearRamp> ramp;
    if (!a.ramp.empty()) {
        const auto parsed = parse_policy("ramp:" + a.ramp);
        ramp = std::get<LinearRamp>(parsed);
        if (!std::holds_alternative<HardThreshold>(policy))
            throw ParameterError("--ramp compares against a hard threshold policy; got '" + a.policy + "'");
    }

    const auto panel = ingest_panel_file(a.panel, a.zone, schema);
    auto hours = settle_panel(panel, policy, elig, threads);
    auto report = summarize(panel, hours, elig, policy_id(policy));
    report.blocks = block_decomposition(panel, hours, a.block_hours);

    std::vector<QuantReport> reports{report};
    std::optional<QuantReport> ramp_report;
    if (ramp) {
        ramp_report = quantify(panel, *ramp, elig, threads);
        ramp_report->blocks = block_decomposition(panel, *ramp, elig, a.block_hours, threads);
        reports.push_back(*ramp_report);
    }

    const auto dir = detail::prepare_out_dir(a.out_dir);
    detail::write_file(dir / "quant_report.csv", [&](std::ostream& os) { write_quant_csv(os, reports); });
    detail::write_file(dir / "technology.csv", [&](std::ostream& os) { write_technology_csv(os, report); });
    detail::write_file(dir / "blocks.csv", [&](std::ostream& os) { write_blocks_csv(os, report); });

    std::ostringstream summary;
    for (const auto& w : panel.coverage.warnings) summary << "Warning: " << w << "\n";
    print_summary(summary, report, display);
    if (ramp_report) {
        const auto rows = compare_ramp_vs_threshold(panel, std::get<HardThreshold>(policy), *ramp, elig, threads);
        detail::write_file(dir / "ramp_comparison.csv",
                           [&](std::ostream& os) { write_comparison_csv(os, panel.zone, rows); });
        summary << "Ramp comparison:\n";
        for (const auto& r : rows) {
            summary << "  " << r.label << " " << r.policy << ": reduction " << format_sig3(r.reduction_abs / 1e6)
                    << " M EUR (" << format_fixed(r.reduction_pct, display.pct_decimals) << "%), average price "
                    << format_fixed(r.avg_price_new, display.price_decimals) << " EUR/MWh\n";
        }
    }
    if (a.sensitivity_requested) {
        std::vector<double> thresholds{80, 90, 100, 110};
        std::vector<double> deductions{23, 28, 33};
        for (const auto& token : a.sensitivity) {
            const auto eq = token.find('=');
            const auto key = token.substr(0, eq);
            if (eq == std::string::npos) throw ParameterError("--sensitivity expects key=list, got '" + token + "'");
            if (key == "thresholds") thresholds = detail::parse_number_list(token.substr(eq + 1), "thresholds");
            else if (key == "deductions") deductions = detail::parse_number_list(token.substr(eq + 1), "deductions");
            else throw ParameterError("unknown sensitivity key '" + key + "'");
        }
        const auto rows = sensitivity_grid(panel, thresholds, deductions, elig, threads);
        detail::write_file(dir / "sensitivity.csv",
                           [&](std::ostream& os) { write_sensitivity_csv(os, panel.zone, rows); });
        summary << "Sensitivity (threshold, deduction -> average price, reduction):\n";
        for (const auto& r : rows) {
            summary << "  " << format_exact(r.threshold) << ", " << format_exact(r.deduction) << " -> "
                    << format_fixed(r.new_price, display.price_decimals) << " EUR/MWh, "
                    << format_fixed(r.reduction_pct, display.pct_decimals) << "%\n";
        }
    }
    detail::write_file(dir / "summary.txt", [&](std::ostream& os) { os << summary.str(); });
    out << summary.str();
    return kExitOk;
}

struct SimulateArgs {
    std::string scenario;
    std::string best_response;
    std::size_t bunching_scan = 0;
    std::optional<std::uint64_t> seed;
    std::string policy;
    std::string out_dir = "co2proxy_out";
    int threads = 0;
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    auto file = load_scenario(a.scenario);
    if (!a.policy.empty()) file.policy = parse_policy(a.policy);
    const auto& policy = file.policy;
    out << "Policy: " << policy_id(policy) << "\n";

    const auto outcome = clear(file.scenario.supply, file.scenario.demand);
    out << "Clearing: price=" << format_exact(outcome.price) << " quantity=" << format_exact(outcome.quantity);
    if (outcome.marginal_offer) {
        const auto& m = file.scenario.supply.offers[*outcome.marginal_offer];
        out << " marginal=" << (m.owner.empty() ? "-" : m.owner) << "/" << to_string(m.technology);
    } else {
        out << " marginal=demand";
    }
    out << "\n";

    if (file.carbon && file.carbon->pass_through_step) {
        const double pt = pass_through(file.scenario.supply, file.scenario.demand, file.carbon->intensities,
                                       file.carbon->price, *file.carbon->pass_through_step);
        out << "Pass-through: " << format_exact(pt) << " (carbon price " << format_exact(file.carbon->price)
            << ", step " << format_exact(*file.carbon->pass_through_step) << ")\n";
    }

    BestResponseOptions br;
    br.grid_step = file.grid_step;
    if (!a.best_response.empty()) {
        const auto rep = best_response_threshold_push(file.scenario.supply, file.scenario.demand, policy,
                                                      a.best_response, br);
        out << "Best response for " << rep.owner << ": baseline price " << format_exact(rep.baseline_price)
            << ", profit " << format_exact(rep.baseline_profit) << "; best price " << format_exact(rep.new_price)
            << ", profit " << format_exact(rep.best_profit) << ", gain " << format_exact(rep.gain) << "\n"
            << "  profitable=" << (rep.profitable ? "yes" : "no")
            << " threshold_push=" << (rep.threshold_push ? "yes" : "no") << " search="
            << (rep.exhaustive ? "exhaustive" : "coordinate") << " evaluations=" << rep.evaluations << "\n";
        for (std::size_t k = 0; k < rep.owned_offers.size(); ++k) {
            const auto& o = file.scenario.supply.offers[rep.owned_offers[k]];
            out << "  offer " << rep.owned_offers[k] << " " << to_string(o.technology) << ": "
                << format_exact(rep.baseline_offer_prices[k]) << " -> " << format_exact(rep.best_offer_prices[k])
                << "\n";
        }
    }

    if (a.bunching_scan > 0) {
        const std::string owner = a.best_response.empty() ? file.strategic_owner : a.best_response;
        if (owner.empty()) throw ParameterError("bunching scan needs a strategic owner (scenario or --best-response)");
        ScenarioFamily family{file.scenario, owner, file.bunching.cost_range, file.bunching.demand_range};
        const std::uint64_t seed = a.seed.value_or(file.seed);
        const auto scenarios = generate_scenarios(family, a.bunching_scan, seed);
        BunchingOptions opts;
        opts.reference_price = file.bunching.reference_price;
        opts.window = file.bunching.window;
        opts.bin_width = file.bunching.bin_width;
        opts.threads = detail::thread_count(a.threads);
        opts.best_response = br;
        const auto res = bunching_scan(scenarios, policy, owner, opts);
        const auto dir = detail::prepare_out_dir(a.out_dir);
        detail::write_file(dir / "histogram.csv", [&](std::ostream& os) { write_histogram_csv(os, res.histogram); });
        out << "Bunching scan: scenarios=" << a.bunching_scan << " seed=" << seed
            << " reference=" << format_exact(res.reference_price) << " window=" << format_exact(opts.window) << "\n"
            << "  share_below=" << format_exact(res.share_below) << " share_above=" << format_exact(res.share_above)
            << " statistic=" << format_exact(res.statistic) << "\n"
            << "  deviations=" << res.deviations << " threshold_pushes=" << res.threshold_pushes << "\n";
        if (file.bunching.statistic_threshold) {
            const bool below = res.statistic < *file.bunching.statistic_threshold;
            out << "  statistic " << (below ? "below" : "at or above") << " threshold "
                << format_exact(*file.bunching.statistic_threshold) << "\n";
        }
    }
    return kExitOk;
}

struct CrisisArgs {
    std::string panel;
    std::string fuel;
    std::string zone = "AT";
    double ref_gas = 40.0;
    double ref_co2 = 53.0;
    double eta = 0.55;
    double e_fuel = 0.2;
    double p_low = 70.0;
    std::string phi = "4/3";
    std::string carbon_mode = "daily";
    bool include_coal = false;
    std::string config;
    std::string out_dir = "co2proxy_out";
    int threads = 0;
    int max_gap_days = 3;
};

inline int cmd_crisis(const CrisisArgs& a, std::ostream& out) {
    KeyValueConfig cfg;
    if (!a.config.empty()) cfg = KeyValueConfig::load(a.config);
    const auto schema = SchemaConfig::from_config(cfg);

    CrisisPolicyParams params;
    params.reference = ReferenceCost{a.eta, a.ref_gas, a.e_fuel, a.ref_co2};
    params.lower = a.p_low;
    params.phi = detail::parse_ratio(a.phi, "--phi");
    params.eligibility = EligibilitySet::crisis_default(a.include_coal);
    if (cfg.has("eligible")) params.eligibility = detail::parse_eligibility(cfg.get("eligible"), true);
    if (a.carbon_mode == "daily") params.carbon_mode = CarbonMode::Daily;
    else if (a.carbon_mode == "reference") params.carbon_mode = CarbonMode::Reference;
    else throw ParameterError("--carbon-mode must be 'daily' or 'reference'");
    if (a.max_gap_days < 0) throw ParameterError("--max-gap-days must be >= 0");
    params.max_gap_days = a.max_gap_days;
    params.validate();

    const auto panel = ingest_panel_file(a.panel, a.zone, schema);
    const auto fuel = FuelPriceSeries::load(a.fuel);
    const auto report = crisis_quantify(panel, fuel, params, detail::thread_count(a.threads));
    const auto weekly = weekly_series(panel, report.hourly);

    const auto dir = detail::prepare_out_dir(a.out_dir);
    detail::write_file(dir / "crisis_report.csv", [&](std::ostream& os) { write_crisis_csv(os, report); });
    detail::write_file(dir / "weekly.csv", [&](std::ostream& os) { write_weekly_csv(os, weekly); });
    std::ostringstream summary;
    for (const auto& w : panel.coverage.warnings) summary << "Warning: " << w << "\n";
    print_crisis_summary(summary, report);
    summary << "Weekly (ISO week: wholesale, eligible remuneration, consumer expenditure):\n";
    for (const auto& w : weekly) {
        summary << "  " << w.week.label() << ": " << format_fixed(w.avg_wholesale, 1) << ", "
                << format_fixed(w.avg_eligible_remuneration, 1) << ", "
                << format_fixed(w.avg_consumer_expenditure, 1) << " EUR/MWh\n";
    }
    detail::write_file(dir / "summary.txt", [&](std::ostream& os) { os << summary.str(); });
    out << summary.str();
    return kExitOk;
}

/// Entry point shared by the executable and the tests. Returns 0 on
/// success, 2 on usage errors and 1 on data errors.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Carbon-proxy deduction settlement, panel quantification and market simulation", "co2proxy"};
    app.require_subcommand(1);

    SettleArgs settle;
    auto* s = app.add_subcommand("settle", "Settle a single hour");
    s->add_option("--price", settle.price, "Wholesale price, EUR/MWh")->required();
    s->add_option("--load", settle.load, "Load, MWh")->required();
    s->add_option("--eligible-gen", settle.eligible_gen, "Eligible generation, MWh")->required();
    s->add_option("--policy", settle.policy, "none | hard:<threshold>:<deduction> | ramp:<lower>:<upper>:<deduction>");
    s->add_flag("--levy", settle.levy, "Settle through the levy-and-rebate route");
    auto* mc_opt = s->add_option("--max-eligible-mc", "Run the policy checks against this eligible marginal cost");

    QuantifyArgs quant;
    auto* q = app.add_subcommand("quantify", "Static accounting over an hourly panel");
    q->add_option("--panel", quant.panel, "Hourly panel CSV")->required();
    q->add_option("--zone", quant.zone, "Bidding zone code")->required();
    q->add_option("--policy", quant.policy, "Policy (default hard:100:28)");
    q->add_option("--ramp", quant.ramp, "Also compare a linear ramp <lower>:<upper>:<deduction>");
    q->add_option("--eligible", quant.eligible, "Comma-separated eligible technologies");
    q->add_flag("--pumped-storage,!--no-pumped-storage", quant.pumped_storage,
                "Count pumped storage output as eligible (default: no)");
    auto* sens = q->add_option("--sensitivity", quant.sensitivity, "thresholds=<list> deductions=<list>")
                     ->expected(0, 2)
                     ->allow_extra_args(false);
    q->add_option("--config", quant.config, "key = value configuration file");
    q->add_option("--out", quant.out_dir, "Output directory");
    q->add_option("--threads", quant.threads, "Worker threads (0: hardware)");
    q->add_option("--block-hours", quant.block_hours, "Block size for the time-of-day table");

    SimulateArgs sim;
    auto* m = app.add_subcommand("simulate", "Merit-order clearing and incentive checks");
    m->add_option("--scenario", sim.scenario, "Scenario JSON")->required();
    m->add_option("--best-response", sim.best_response, "Owner whose offer deviation is searched");
    m->add_option("--bunching-scan", sim.bunching_scan, "Number of scenario draws");
    auto* seed_opt = m->add_option("--seed", "Random seed for the scan");
    m->add_option("--policy", sim.policy, "Override the scenario policy");
    m->add_option("--out", sim.out_dir, "Output directory");
    m->add_option("--threads", sim.threads, "Worker threads (0: hardware)");

    CrisisArgs crisis;
    auto* c = app.add_subcommand("crisis", "Gas-shock variant with a daily excess-cost deduction");
    c->add_option("--panel", crisis.panel, "Hourly panel CSV")->required();
    c->add_option("--fuel", crisis.fuel, "Daily fuel price CSV")->required();
    c->add_option("--zone", crisis.zone, "Bidding zone code");
    c->add_option("--ref-gas", crisis.ref_gas, "Reference gas price, EUR/MWh_th");
    c->add_option("--ref-co2", crisis.ref_co2, "Reference carbon price, EUR/t");
    c->add_option("--eta", crisis.eta, "Reference plant efficiency");
    c->add_option("--e-fuel", crisis.e_fuel, "Fuel emission intensity, t/MWh_th");
    c->add_option("--p-low", crisis.p_low, "Ramp lower bound, EUR/MWh");
    c->add_option("--phi", crisis.phi, "Ramp-width factor (decimal or fraction)");
    c->add_option("--carbon-mode", crisis.carbon_mode, "daily | reference");
    c->add_flag("--include-coal", crisis.include_coal, "Make hard coal and lignite eligible");
    c->add_option("--config", crisis.config, "key = value configuration file");
    c->add_option("--out", crisis.out_dir, "Output directory");
    c->add_option("--threads", crisis.threads, "Worker threads (0: hardware)");
    c->add_option("--max-gap-days", crisis.max_gap_days, "Longest fuel-price gap bridged by carry-forward");

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        for (const auto* sub : app.get_subcommands()) err << sub->help();
        if (app.get_subcommands().empty()) err << app.help();
        return kExitUsage;
    }

    try {
        if (s->parsed()) {
            if (*mc_opt) settle.max_eligible_mc = detail::parse_number(mc_opt->as<std::string>(), "--max-eligible-mc");
            return cmd_settle(settle, out);
        }
        if (q->parsed()) {
            quant.sensitivity_requested = sens->count() > 0;
            return cmd_quantify(quant, out);
        }
        if (m->parsed()) {
            if (*seed_opt) sim.seed = seed_opt->as<std::uint64_t>();
            return cmd_simulate(sim, out);
        }
        if (c->parsed()) return cmd_crisis(crisis, out);
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitUsage;
}

}  // namespace co2proxy::cli
