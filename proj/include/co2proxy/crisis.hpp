#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"
#include "co2proxy/panel.hpp"
#include "co2proxy/policy.hpp"
#include "co2proxy/quant.hpp"
#include "co2proxy/timeutil.hpp"

namespace co2proxy {

struct FuelPrices {
    double gas = 0.0;     // €/MWh_th
    double carbon = 0.0;  // €/t
};

/// Daily gas and carbon prices keyed by date.
class FuelPriceSeries {
public:
    void set(sys_days day, FuelPrices prices) {
        if (prices.gas < 0.0 || prices.carbon < 0.0) throw DataError("fuel prices must be >= 0 (" + format_date(day) + ")");
        by_date_[day] = prices;
    }

    bool empty() const { return by_date_.empty(); }
    std::size_t size() const { return by_date_.size(); }

    /// Prices for `day`, carrying the last quote forward over at most
    /// `max_gap_days` missing days.
    std::optional<FuelPrices> lookup(sys_days day, int max_gap_days = 3) const {
        auto it = by_date_.upper_bound(day);
        if (it == by_date_.begin()) return std::nullopt;
        --it;
        if ((day - it->first).count() > max_gap_days) return std::nullopt;
        return it->second;
    }

    /// Columns: date, gas_price_eur_mwh_th, carbon_price_eur_t.
    static FuelPriceSeries parse(std::istream& in, const std::string& origin = "fuel") {
        std::string line;
        if (!std::getline(in, line)) throw DataError(origin + ": no records");
        if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        const char delim = detail::detect_delimiter(line);
        const auto headers = split(line, delim);
        std::optional<std::size_t> date_col, gas_col, co2_col;
        for (std::size_t i = 0; i < headers.size(); ++i) {
            const auto h = trim(headers[i]);
            if (h == "date") date_col = i;
            else if (h == "gas_price_eur_mwh_th") gas_col = i;
            else if (h == "carbon_price_eur_t") co2_col = i;
        }
        if (!date_col || !gas_col || !co2_col)
            throw DataError(origin + ": expected columns date, gas_price_eur_mwh_th, carbon_price_eur_t");
        FuelPriceSeries series;
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            const auto fields = split(line, delim);
            const auto where = origin + ":" + std::to_string(lineno);
            if (fields.size() != headers.size()) throw DataError(where + ": wrong field count");
            const auto day = parse_date(fields[*date_col]);
            FuelPrices p;
            if (!day) throw DataError(where + ": bad date");
            if (!parse_double(fields[*gas_col], p.gas) || !parse_double(fields[*co2_col], p.carbon))
                throw DataError(where + ": bad price");
            if (series.by_date_.contains(*day)) throw DataError(where + ": duplicate date " + format_date(*day));
            series.set(*day, p);
        }
        if (series.empty()) throw DataError(origin + ": no records");
        return series;
    }

    static FuelPriceSeries load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open fuel series '" + path + "'");
        return parse(in, path);
    }

private:
    std::map<sys_days, FuelPrices> by_date_;
};

// Daily: MC_t uses that day's carbon price. Reference: carbon held at the
// reference price so only the fuel price moves.
enum class CarbonMode { Daily, Reference };

struct CrisisPolicyParams {
    ReferenceCost reference{0.55, 40.0, 0.2, 53.0};
    double lower = 70.0;
    double phi = 4.0 / 3.0;
    EligibilitySet eligibility = EligibilitySet::crisis_default(false);
    CarbonMode carbon_mode = CarbonMode::Daily;
    int max_gap_days = 3;

    void validate() const {
        reference.validate();
        if (!(phi >= 1.0)) throw ParameterError("ramp-width factor phi must be >= 1");
        if (!(lower >= 0.0)) throw ParameterError("ramp lower bound must be >= 0");
    }

    double reference_cost() const { return fossil_marginal_cost(reference).total; }

    CrisisRamp policy_for(double excess) const { return CrisisRamp{lower, phi, reference, excess}; }
};

/// max(0, MC_t - MC_ref) with the reference plant's efficiency and
/// emission intensity.
inline double excess_cost_delta(const CrisisPolicyParams& params, const FuelPrices& fuel) {
    params.validate();
    const auto& ref = params.reference;
    const double carbon = params.carbon_mode == CarbonMode::Daily ? fuel.carbon : ref.carbon_price;
    const double mc = fossil_marginal_cost(ref.efficiency, fuel.gas, ref.emission_intensity, carbon).total;
    return std::max(0.0, mc - params.reference_cost());
}

inline double crisis_deduction(const CrisisPolicyParams& params, double excess, double price) {
    if (!(params.phi >= 1.0)) throw ParameterError("ramp-width factor phi must be >= 1");
    return crisis_deduction(params.lower, params.phi, excess, price);
}

struct CrisisReport {
    std::string zone;
    std::string policy;
    std::size_t hours = 0;
    std::size_t activated_days = 0;
    double mc_reference = 0.0;
    double total_load = 0.0;
    double eligible_generation = 0.0;
    double exp_base = 0.0;
    double transfer = 0.0;
    double exp_new = 0.0;
    double avg_wholesale = 0.0;              // time average of p
    double avg_consumer_base = 0.0;          // exp_base / load
    double avg_consumer_new = 0.0;           // exp_new / load
    double reduction_pct = 0.0;
    double avg_eligible_remuneration = 0.0;  // generation-weighted p̃
    std::vector<HourSettlement> hourly;
};

/// Runs the settlement with a per-local-date excess deduction. Throws
/// DataError listing dates without a delta.
inline CrisisReport crisis_quantify_with_deltas(const Panel& panel, const std::map<sys_days, double>& deltas,
                                                const CrisisPolicyParams& params, unsigned threads = 1) {
    params.validate();
    if (panel.empty()) throw DataError("cannot quantify an empty panel");
    std::vector<std::string> missing;
    for (const auto& rec : panel.records) {
        const auto day = panel.time_zone.local_date(rec.timestamp);
        if (!deltas.contains(day)) {
            const auto label = format_date(day);
            if (missing.empty() || missing.back() != label) missing.push_back(label);
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
        throw DataError("no fuel prices for dates: " + list);
    }

    CrisisReport rep;
    rep.zone = panel.zone;
    rep.policy = policy_id(params.policy_for(0.0));
    rep.mc_reference = params.reference_cost();
    rep.hours = panel.size();
    rep.hourly = settle_panel_with(
        panel,
        [&](const HourlyRecord& rec) -> DeductionPolicy {
            return params.policy_for(deltas.at(panel.time_zone.local_date(rec.timestamp)));
        },
        params.eligibility, threads);

    for (const auto& [_, d] : deltas)
        if (d > 0.0) ++rep.activated_days;
    double price_sum = 0.0;
    double remuneration_weighted = 0.0;
    for (std::size_t i = 0; i < rep.hourly.size(); ++i) {
        const auto& h = rep.hourly[i];
        price_sum += panel.records[i].price;
        rep.total_load += panel.records[i].load;
        rep.eligible_generation += h.eligible_gen;
        remuneration_weighted += h.result.remuneration * h.eligible_gen;
        rep.exp_base += h.result.exp_base;
        rep.transfer += h.result.transfer;
    }
    rep.exp_new = rep.exp_base - rep.transfer;
    rep.avg_wholesale = price_sum / static_cast<double>(rep.hours);
    if (rep.total_load != 0.0) {
        rep.avg_consumer_base = rep.exp_base / rep.total_load;
        rep.avg_consumer_new = rep.exp_new / rep.total_load;
    }
    rep.reduction_pct = rep.exp_base != 0.0 ? 100.0 * rep.transfer / rep.exp_base : 0.0;
    rep.avg_eligible_remuneration =
        rep.eligible_generation != 0.0 ? remuneration_weighted / rep.eligible_generation : rep.avg_wholesale;
    return rep;
}

/// Excess deduction for every local date in the panel.
inline std::map<sys_days, double> daily_excess(const Panel& panel, const FuelPriceSeries& fuel,
                                               const CrisisPolicyParams& params) {
    std::map<sys_days, double> deltas;
    std::vector<std::string> missing;
    for (const auto& rec : panel.records) {
        const auto day = panel.time_zone.local_date(rec.timestamp);
        if (deltas.contains(day)) continue;
        const auto prices = fuel.lookup(day, params.max_gap_days);
        if (!prices) {
            const auto label = format_date(day);
            if (missing.empty() || missing.back() != label) missing.push_back(label);
            continue;
        }
        deltas[day] = excess_cost_delta(params, *prices);
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
        throw DataError("fuel series does not cover dates (after " + std::to_string(params.max_gap_days) +
                        "-day carry-forward): " + list);
    }
    return deltas;
}

inline CrisisReport crisis_quantify(const Panel& panel, const FuelPriceSeries& fuel, const CrisisPolicyParams& params,
                                    unsigned threads = 1) {
    params.validate();
    return crisis_quantify_with_deltas(panel, daily_excess(panel, fuel, params), params, threads);
}

struct WeeklyRow {
    IsoWeek week;
    std::size_t hours = 0;
    double avg_wholesale = 0.0;
    double avg_eligible_remuneration = 0.0;
    double avg_consumer_expenditure = 0.0;
};

/// ISO-week (local calendar) averages: wholesale as a time mean,
/// remuneration weighted by eligible output, consumer expenditure per MWh
/// of load.
inline std::vector<WeeklyRow> weekly_series(const Panel& panel, const std::vector<HourSettlement>& hourly) {
    if (hourly.size() != panel.size()) throw ParameterError("hourly results do not match panel");
    struct Acc {
        std::size_t hours = 0;
        double price = 0.0, load = 0.0, exp_new = 0.0, rem_weighted = 0.0, rem_plain = 0.0, eligible = 0.0;
    };
    std::map<IsoWeek, Acc> acc;
    for (std::size_t i = 0; i < hourly.size(); ++i) {
        auto& a = acc[iso_week(panel.time_zone.local_date(panel.records[i].timestamp))];
        const auto& h = hourly[i];
        ++a.hours;
        a.price += panel.records[i].price;
        a.load += panel.records[i].load;
        a.exp_new += h.result.exp_new;
        a.rem_weighted += h.result.remuneration * h.eligible_gen;
        a.rem_plain += h.result.remuneration;
        a.eligible += h.eligible_gen;
    }
    std::vector<WeeklyRow> rows;
    for (const auto& [week, a] : acc) {
        WeeklyRow r;
        r.week = week;
        r.hours = a.hours;
        r.avg_wholesale = a.price / static_cast<double>(a.hours);
        r.avg_eligible_remuneration =
            a.eligible != 0.0 ? a.rem_weighted / a.eligible : a.rem_plain / static_cast<double>(a.hours);
        r.avg_consumer_expenditure = a.load != 0.0 ? a.exp_new / a.load : 0.0;
        rows.push_back(r);
    }
    return rows;
}

inline void write_crisis_csv(std::ostream& os, const CrisisReport& r) {
    CsvWriter csv(os);
    csv.row({"zone", "policy_id", "exp_base_eur", "transfer_eur", "exp_new_eur", "avg_price_base", "avg_price_new",
             "reduction_pct", "avg_wholesale", "avg_eligible_remuneration", "mc_reference"});
    csv.row({r.zone, r.policy, format_exact(r.exp_base), format_exact(r.transfer), format_exact(r.exp_new),
             format_exact(r.avg_consumer_base), format_exact(r.avg_consumer_new), format_exact(r.reduction_pct),
             format_exact(r.avg_wholesale), format_exact(r.avg_eligible_remuneration), format_exact(r.mc_reference)});
}

inline void write_weekly_csv(std::ostream& os, const std::vector<WeeklyRow>& rows) {
    CsvWriter csv(os);
    csv.row({"iso_week", "avg_wholesale", "avg_eligible_remuneration", "avg_consumer_expenditure"});
    for (const auto& r : rows) {
        csv.row({r.week.label(), format_exact(r.avg_wholesale), format_exact(r.avg_eligible_remuneration),
                 format_exact(r.avg_consumer_expenditure)});
    }
}

inline void print_crisis_summary(std::ostream& os, const CrisisReport& r) {
    os << "Zone: " << r.zone << "\n"
       << "Policy: " << r.policy << " (reference cost " << format_fixed(r.mc_reference, 1) << " EUR/MWh)\n"
       << "Hours: " << r.hours << " (days with excess cost " << r.activated_days << ")\n"
       << "Average wholesale price: " << format_fixed(r.avg_wholesale, 1) << " EUR/MWh\n"
       << "Net consumer expenditure: " << format_fixed(r.avg_consumer_base, 1) << " -> "
       << format_fixed(r.avg_consumer_new, 1) << " EUR/MWh (-" << format_fixed(r.reduction_pct, 2) << "%)\n"
       << "Eligible remuneration: " << format_fixed(r.avg_eligible_remuneration, 1) << " EUR/MWh\n"
       << "Transfer: " << format_sig3(r.transfer / 1e6) << " M EUR\n";
}

}  // namespace co2proxy
