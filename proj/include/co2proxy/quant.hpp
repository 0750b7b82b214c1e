#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"
#include "co2proxy/panel.hpp"
#include "co2proxy/parallel.hpp"
#include "co2proxy/policy.hpp"
#include "co2proxy/settlement.hpp"
#include "co2proxy/technology.hpp"

namespace co2proxy {

struct TechnologyTransfer {
    Technology technology{};
    double generation = 0.0;  // MWh
    double transfer = 0.0;    // €
    double revenue = 0.0;     // baseline revenue, €
    double share_pct = 0.0;   // of total transfer
    std::optional<double> loss_pct;  // transfer / revenue; absent when revenue is zero
};

struct BlockResult {
    int first_hour = 0;  // local clock
    int last_hour = 0;
    std::size_t hours = 0;
    double load = 0.0;
    double exp_base = 0.0;
    double transfer = 0.0;
    double exp_new = 0.0;
    double avg_price_base = 0.0;
    double avg_price_new = 0.0;
    double reduction_pct = 0.0;

    std::string label() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02d-%02d", first_hour, last_hour);
        return buf;
    }
};

/// Static accounting over a panel with prices and quantities held fixed.
struct QuantReport {
    std::string zone;
    std::string policy;
    std::size_t hours = 0;
    double coverage_pct = 0.0;
    double total_load = 0.0;  // MWh
    double exp_base = 0.0;
    double transfer = 0.0;
    double exp_new = 0.0;
    double avg_price_base = 0.0;
    double avg_price_new = 0.0;
    double reduction_eur_mwh = 0.0;
    double reduction_pct = 0.0;
    std::size_t activated_hours = 0;
    std::size_t export_hours = 0;
    std::vector<TechnologyTransfer> technologies;
    std::vector<BlockResult> blocks;
};

/// Per-hour settlement of a panel, in timestamp order.
struct HourSettlement {
    SettlementResult result;
    double eligible_gen = 0.0;
};

template <class PolicyForHour>
std::vector<HourSettlement> settle_panel_with(const Panel& panel, PolicyForHour&& policy_for_hour,
                                              const EligibilitySet& eligibility, unsigned threads = 1) {
    std::vector<HourSettlement> out(panel.records.size());
    parallel_for(panel.records.size(), threads, [&](std::size_t i) {
        const auto& rec = panel.records[i];
        const double r = eligible_generation(rec.generation, eligibility);
        out[i].eligible_gen = r;
        out[i].result = settle_hour(rec.price, rec.load, r, policy_for_hour(rec));
    });
    return out;
}

inline std::vector<HourSettlement> settle_panel(const Panel& panel, const DeductionPolicy& policy,
                                                const EligibilitySet& eligibility, unsigned threads = 1) {
    validate(policy);
    return settle_panel_with(panel, [&](const HourlyRecord&) -> const DeductionPolicy& { return policy; },
                             eligibility, threads);
}

inline std::vector<TechnologyTransfer> technology_decomposition(const Panel& panel,
                                                                const std::vector<HourSettlement>& hours,
                                                                const EligibilitySet& eligibility) {
    std::vector<TechnologyTransfer> out;
    double total = 0.0;
    for (const auto& h : hours) total += h.result.transfer;
    for (Technology t : eligibility.members()) {
        TechnologyTransfer tt;
        tt.technology = t;
        for (std::size_t i = 0; i < hours.size(); ++i) {
            const double g = panel.records[i].generation[index(t)];
            tt.generation += g;
            tt.transfer += hours[i].result.deduction * g;
            tt.revenue += panel.records[i].price * g;
        }
        tt.share_pct = total != 0.0 ? 100.0 * tt.transfer / total : 0.0;
        if (tt.revenue != 0.0) tt.loss_pct = 100.0 * tt.transfer / tt.revenue;
        out.push_back(tt);
    }
    return out;
}

/// Per-technology transfer totals, shares and revenue-loss percentages.
inline std::vector<TechnologyTransfer> technology_decomposition(const Panel& panel, const DeductionPolicy& policy,
                                                                const EligibilitySet& eligibility,
                                                                unsigned threads = 1) {
    return technology_decomposition(panel, settle_panel(panel, policy, eligibility, threads), eligibility);
}

inline std::vector<BlockResult> block_decomposition(const Panel& panel, const std::vector<HourSettlement>& hours,
                                                    int block_hours = 4) {
    if (block_hours < 1 || block_hours > 24 || 24 % block_hours != 0)
        throw ParameterError("block size must divide 24 (got " + std::to_string(block_hours) + ")");
    std::vector<BlockResult> blocks(static_cast<std::size_t>(24 / block_hours));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        blocks[b].first_hour = static_cast<int>(b) * block_hours;
        blocks[b].last_hour = blocks[b].first_hour + block_hours - 1;
    }
    for (std::size_t i = 0; i < hours.size(); ++i) {
        const int local = panel.time_zone.local_hour(panel.records[i].timestamp);
        auto& blk = blocks[static_cast<std::size_t>(local / block_hours)];
        ++blk.hours;
        blk.load += panel.records[i].load;
        blk.exp_base += hours[i].result.exp_base;
        blk.transfer += hours[i].result.transfer;
    }
    for (auto& blk : blocks) {
        blk.exp_new = blk.exp_base - blk.transfer;
        if (blk.load != 0.0) {
            blk.avg_price_base = blk.exp_base / blk.load;
            blk.avg_price_new = blk.exp_new / blk.load;
        }
        blk.reduction_pct = blk.exp_base != 0.0 ? 100.0 * blk.transfer / blk.exp_base : 0.0;
    }
    return blocks;
}

/// Expenditure and reduction by local-clock blocks of `block_hours`.
inline std::vector<BlockResult> block_decomposition(const Panel& panel, const DeductionPolicy& policy,
                                                    const EligibilitySet& eligibility, int block_hours = 4,
                                                    unsigned threads = 1) {
    return block_decomposition(panel, settle_panel(panel, policy, eligibility, threads), block_hours);
}

inline QuantReport summarize(const Panel& panel, const std::vector<HourSettlement>& hours,
                             const EligibilitySet& eligibility, std::string policy_label) {
    if (panel.empty()) throw DataError("cannot quantify an empty panel");
    QuantReport rep;
    rep.zone = panel.zone;
    rep.policy = std::move(policy_label);
    rep.hours = hours.size();
    rep.coverage_pct = panel.coverage.percent();
    for (std::size_t i = 0; i < hours.size(); ++i) {
        const auto& r = hours[i].result;
        rep.total_load += panel.records[i].load;
        rep.exp_base += r.exp_base;
        rep.transfer += r.transfer;
        if (r.deduction > 0.0 && hours[i].eligible_gen > 0.0) ++rep.activated_hours;
        if (r.export_hour) ++rep.export_hours;
    }
    rep.exp_new = rep.exp_base - rep.transfer;
    if (rep.total_load != 0.0) {
        rep.avg_price_base = rep.exp_base / rep.total_load;
        rep.avg_price_new = rep.exp_new / rep.total_load;
    }
    rep.reduction_eur_mwh = rep.avg_price_base - rep.avg_price_new;
    rep.reduction_pct = rep.exp_base != 0.0 ? 100.0 * rep.transfer / rep.exp_base : 0.0;
    rep.technologies = technology_decomposition(panel, hours, eligibility);
    rep.blocks = block_decomposition(panel, hours, 4);
    return rep;
}

/// Applies the settlement hour by hour (load as q, eligible generation as
/// q^r) and aggregates in timestamp order. Averages are total expenditure
/// over total load.
inline QuantReport quantify(const Panel& panel, const DeductionPolicy& policy, const EligibilitySet& eligibility,
                            unsigned threads = 1) {
    if (panel.empty()) throw DataError("cannot quantify an empty panel");
    return summarize(panel, settle_panel(panel, policy, eligibility, threads), eligibility, policy_id(policy));
}

/// delta * (sum of R over hours at or above the threshold) / (sum of load).
inline double average_reduction_identity(const Panel& panel, const DeductionPolicy& policy,
                                         const EligibilitySet& eligibility) {
    const auto* hard = std::get_if<HardThreshold>(&policy);
    if (!hard) throw UnsupportedPolicyError("average reduction identity requires a hard threshold policy");
    validate(policy);
    double active_r = 0.0;
    double load = 0.0;
    for (const auto& rec : panel.records) {
        load += rec.load;
        if (rec.price >= hard->threshold) active_r += eligible_generation(rec.generation, eligibility);
    }
    if (load == 0.0) throw DataError("panel has zero total load");
    return hard->deduction * active_r / load;
}

struct SensitivityRow {
    double threshold = 0.0;
    double deduction = 0.0;
    double base_price = 0.0;
    double new_price = 0.0;
    double reduction_pct = 0.0;
};

/// Hard-threshold outcomes for every (threshold, deduction) pair,
/// threshold-major.
inline std::vector<SensitivityRow> sensitivity_grid(const Panel& panel, const std::vector<double>& thresholds,
                                                    const std::vector<double>& deductions,
                                                    const EligibilitySet& eligibility, unsigned threads = 1) {
    if (thresholds.empty() || deductions.empty()) throw ParameterError("sensitivity grids must be non-empty");
    std::vector<SensitivityRow> rows;
    for (double th : thresholds) {
        for (double d : deductions) {
            const auto rep = quantify(panel, HardThreshold{th, d}, eligibility, threads);
            rows.push_back({th, d, rep.avg_price_base, rep.avg_price_new, rep.reduction_pct});
        }
    }
    return rows;
}

struct ComparisonRow {
    std::string label;  // HT or LR
    std::string policy;
    double exp_base = 0.0;
    double reduction_abs = 0.0;
    double exp_new = 0.0;
    double reduction_pct = 0.0;
    double avg_price_base = 0.0;
    double avg_price_new = 0.0;
};

inline ComparisonRow to_comparison_row(const std::string& label, const QuantReport& rep) {
    return {label, rep.policy, rep.exp_base, rep.transfer, rep.exp_new, rep.reduction_pct, rep.avg_price_base,
            rep.avg_price_new};
}

inline std::vector<ComparisonRow> compare_ramp_vs_threshold(const Panel& panel, const HardThreshold& hard,
                                                            const LinearRamp& ramp,
                                                            const EligibilitySet& eligibility, unsigned threads = 1) {
    return {to_comparison_row("HT", quantify(panel, hard, eligibility, threads)),
            to_comparison_row("LR", quantify(panel, ramp, eligibility, threads))};
}

// ---- report output ----

inline void write_quant_csv(std::ostream& os, const std::vector<QuantReport>& reports) {
    CsvWriter csv(os);
    csv.row({"zone", "policy_id", "exp_base_eur", "transfer_eur", "exp_new_eur", "avg_price_base", "avg_price_new",
             "reduction_pct"});
    for (const auto& r : reports) {
        csv.row({r.zone, r.policy, format_exact(r.exp_base), format_exact(r.transfer), format_exact(r.exp_new),
                 format_exact(r.avg_price_base), format_exact(r.avg_price_new), format_exact(r.reduction_pct)});
    }
}

inline void write_technology_csv(std::ostream& os, const QuantReport& r) {
    CsvWriter csv(os);
    csv.row({"zone", "policy_id", "technology", "generation_mwh", "transfer_eur", "revenue_eur", "share_pct",
             "loss_pct"});
    for (const auto& t : r.technologies) {
        csv.row({r.zone, r.policy, std::string(to_string(t.technology)), format_exact(t.generation),
                 format_exact(t.transfer), format_exact(t.revenue), format_exact(t.share_pct),
                 t.loss_pct ? format_exact(*t.loss_pct) : "NA"});
    }
}

inline void write_blocks_csv(std::ostream& os, const QuantReport& r) {
    CsvWriter csv(os);
    csv.row({"zone", "policy_id", "block", "hours", "load_mwh", "exp_base_eur", "transfer_eur", "exp_new_eur",
             "avg_price_base", "avg_price_new", "reduction_pct"});
    for (const auto& b : r.blocks) {
        csv.row({r.zone, r.policy, b.label(), std::to_string(b.hours), format_exact(b.load), format_exact(b.exp_base),
                 format_exact(b.transfer), format_exact(b.exp_new), format_exact(b.avg_price_base),
                 format_exact(b.avg_price_new), format_exact(b.reduction_pct)});
    }
}

inline void write_sensitivity_csv(std::ostream& os, const std::string& zone, const std::vector<SensitivityRow>& rows) {
    CsvWriter csv(os);
    csv.row({"zone", "threshold", "deduction", "base_price", "new_price", "reduction_pct"});
    for (const auto& s : rows) {
        csv.row({zone, format_exact(s.threshold), format_exact(s.deduction), format_exact(s.base_price),
                 format_exact(s.new_price), format_exact(s.reduction_pct)});
    }
}

inline void write_comparison_csv(std::ostream& os, const std::string& zone, const std::vector<ComparisonRow>& rows) {
    CsvWriter csv(os);
    csv.row({"zone", "policy", "policy_id", "total_exp_base", "reduction_abs", "total_exp_new", "reduction_pct",
             "avg_price_base", "avg_price_new"});
    for (const auto& c : rows) {
        csv.row({zone, c.label, c.policy, format_exact(c.exp_base), format_exact(c.reduction_abs),
                 format_exact(c.exp_new), format_exact(c.reduction_pct), format_exact(c.avg_price_base),
                 format_exact(c.avg_price_new)});
    }
}

struct DisplayOptions {
    int price_decimals = 1;
    int pct_decimals = 2;
};

/// Display table: prices to 0.1 €/MWh, percentages to 0.01, money to three
/// significant figures in M€ (decimals adjustable via `display`).
inline void print_summary(std::ostream& os, const QuantReport& r, const DisplayOptions& display = {}) {
    const int pd = display.price_decimals;
    const int cd = display.pct_decimals;
    os << "Zone: " << r.zone << "\n"
       << "Policy: " << r.policy << "\n"
       << "Hours: " << r.hours << " (coverage " << format_fixed(r.coverage_pct, cd) << "%, activated "
       << r.activated_hours << ", export " << r.export_hours << ")\n"
       << "Total load: " << format_sig3(r.total_load / 1e6) << " TWh\n"
       << "Baseline expenditure: " << format_sig3(r.exp_base / 1e6) << " M EUR\n"
       << "Transfer: " << format_sig3(r.transfer / 1e6) << " M EUR\n"
       << "Counterfactual expenditure: " << format_sig3(r.exp_new / 1e6) << " M EUR\n"
       << "Average price: " << format_fixed(r.avg_price_base, pd) << " -> " << format_fixed(r.avg_price_new, pd)
       << " EUR/MWh\n"
       << "Reduction: " << format_fixed(r.reduction_eur_mwh, pd) << " EUR/MWh (" << format_fixed(r.reduction_pct, cd)
       << "%)\n";
    os << "Technology decomposition:\n";
    for (const auto& t : r.technologies) {
        if (t.generation == 0.0) continue;
        os << "  " << to_string(t.technology) << ": transfer " << format_sig3(t.transfer / 1e6) << " M EUR, share "
           << format_fixed(t.share_pct, cd) << "%, loss " << (t.loss_pct ? format_fixed(*t.loss_pct, cd) + "%" : "NA")
           << "\n";
    }
    os << "Blocks (local time):\n";
    for (const auto& b : r.blocks) {
        os << "  " << b.label() << ": avg " << format_fixed(b.avg_price_base, pd) << " -> "
           << format_fixed(b.avg_price_new, pd) << " EUR/MWh, reduction " << format_fixed(b.reduction_pct, cd) << "%\n";
    }
}

}  // namespace co2proxy
