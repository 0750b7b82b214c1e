#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"
#include "co2proxy/parallel.hpp"
#include "co2proxy/policy.hpp"
#include "co2proxy/technology.hpp"

namespace co2proxy {

/// One step of the offer stack. `cost` is the true marginal cost used for
/// profit accounting; it defaults to the offer price (truthful bidding).
struct Offer {
    std::string owner;
    Technology technology = Technology::Other;
    double quantity = 0.0;  // MWh
    double price = 0.0;     // €/MWh
    std::optional<double> cost;

    double marginal_cost() const { return cost.value_or(price); }
};

struct SupplyCurve {
    std::vector<Offer> offers;

    void validate() const {
        if (offers.empty()) throw ParameterError("supply curve has no offers");
        for (const auto& o : offers) {
            if (!(o.quantity > 0.0)) throw ParameterError("offer quantities must be > 0");
            if (!std::isfinite(o.price)) throw ParameterError("offer prices must be finite");
        }
    }

    // Offer indices in merit order; ties keep input order.
    std::vector<std::size_t> merit_order() const {
        std::vector<std::size_t> idx(offers.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return offers[a].price < offers[b].price; });
        return idx;
    }

    double total_quantity() const {
        double q = 0.0;
        for (const auto& o : offers) q += o.quantity;
        return q;
    }
};

struct InelasticDemand {
    double quantity = 0.0;
};

/// Inverse demand p = intercept - slope * q.
struct LinearDemand {
    double intercept = 0.0;
    double slope = 0.0;

    // Quantity demanded at price p. With zero slope demand is unbounded below
    // the intercept and zero at or above it.
    double quantity_at(double price) const {
        if (slope == 0.0) return price < intercept ? HUGE_VAL : 0.0;
        return std::max(0.0, (intercept - price) / slope);
    }
};

using DemandCurve = std::variant<InelasticDemand, LinearDemand>;

inline void validate(const DemandCurve& demand) {
    if (const auto* d = std::get_if<InelasticDemand>(&demand)) {
        if (!(d->quantity > 0.0)) throw ParameterError("inelastic demand must be > 0");
    } else {
        const auto& l = std::get<LinearDemand>(demand);
        if (!(l.intercept > 0.0)) throw ParameterError("demand intercept must be > 0");
        if (!(l.slope >= 0.0)) throw ParameterError("demand slope must be >= 0");
    }
}

struct ClearingOutcome {
    double price = 0.0;
    double quantity = 0.0;
    std::vector<double> accepted;  // per offer, input order
    std::optional<std::size_t> marginal_offer;  // empty when demand sets the price

    bool demand_sets_price() const { return !marginal_offer.has_value(); }
};

/// Uniform-price clearing of a step supply curve. The price is the offer
/// price of the marginal step, or the demand curve's price where it crosses
/// a vertical segment of the stack. Equal-price steps are filled in input
/// order.
inline ClearingOutcome clear(const SupplyCurve& supply, const DemandCurve& demand) {
    supply.validate();
    validate(demand);
    const auto order = supply.merit_order();
    ClearingOutcome out;
    out.accepted.assign(supply.offers.size(), 0.0);

    if (const auto* inelastic = std::get_if<InelasticDemand>(&demand)) {
        const double q = inelastic->quantity;
        double cum = 0.0;
        for (std::size_t idx : order) {
            const auto& o = supply.offers[idx];
            if (cum + o.quantity >= q) {
                out.accepted[idx] = q - cum;
                out.price = o.price;
                out.quantity = q;
                out.marginal_offer = idx;
                return out;
            }
            out.accepted[idx] = o.quantity;
            cum += o.quantity;
        }
        throw InfeasibleError("demand " + format_exact(q) + " MWh exceeds total supply " + format_exact(cum) + " MWh");
    }

    const auto& line = std::get<LinearDemand>(demand);
    double cum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& o = supply.offers[order[k]];
        const double wanted = line.quantity_at(o.price);
        if (wanted <= cum) {
            if (k == 0) throw InfeasibleError("demand intercept is below the cheapest offer; no trade");
            out.price = line.intercept - line.slope * cum;
            out.quantity = cum;
            return out;
        }
        if (wanted <= cum + o.quantity) {
            out.accepted[order[k]] = wanted - cum;
            out.price = o.price;
            out.quantity = wanted;
            out.marginal_offer = order[k];
            return out;
        }
        out.accepted[order[k]] = o.quantity;
        cum += o.quantity;
    }
    // Demand still exceeds the whole stack: scarcity price on the demand curve.
    out.price = line.intercept - line.slope * cum;
    out.quantity = cum;
    return out;
}

using IntensityMap = std::map<Technology, double>;  // tCO2/MWh_el

/// Adds intensity * carbon price to every offer (and its cost) and returns
/// the curve in the new merit order.
inline SupplyCurve apply_carbon_cost(const SupplyCurve& supply, double carbon_price, const IntensityMap& intensities) {
    if (carbon_price < 0.0) throw ParameterError("carbon price must be >= 0");
    SupplyCurve out;
    for (const auto& o : supply.offers) {
        const auto it = intensities.find(o.technology);
        if (it == intensities.end())
            throw ParameterError("no emission intensity for technology " + std::string(to_string(o.technology)));
        if (it->second < 0.0) throw ParameterError("emission intensities must be >= 0");
        if (!is_fossil(o.technology) && it->second != 0.0)
            throw ParameterError("non-fossil technology " + std::string(to_string(o.technology)) +
                                 " must have zero intensity");
        Offer shifted = o;
        const double adder = it->second * carbon_price;
        shifted.price = o.price + adder;
        shifted.cost = o.marginal_cost() + adder;
        out.offers.push_back(shifted);
    }
    std::vector<Offer> sorted;
    for (std::size_t idx : out.merit_order()) sorted.push_back(out.offers[idx]);
    out.offers = std::move(sorted);
    return out;
}

/// Finite-difference pass-through (p*(m + dm) - p*(m)) / dm where every
/// emitting offer's carbon cost component shifts by dm.
inline double pass_through(const SupplyCurve& supply, const DemandCurve& demand, const IntensityMap& intensities,
                           double carbon_price, double dm) {
    if (!(dm > 0.0)) throw ParameterError("cost shift must be > 0");
    const auto base = apply_carbon_cost(supply, carbon_price, intensities);
    auto shifted = base;
    for (auto& o : shifted.offers) {
        if (intensities.at(o.technology) > 0.0) {
            o.price += dm;
            o.cost = o.marginal_cost() + dm;
        }
    }
    const double p0 = clear(base, demand).price;
    const double p1 = clear(shifted, demand).price;
    return (p1 - p0) / dm;
}

/// (p̃ - c) * q^r for eligible output at clearing price p.
inline double eligible_profit(double price, const DeductionPolicy& policy, double eligible_output,
                              double marginal_cost = 0.0) {
    if (!(eligible_output >= 0.0)) throw ParameterError("eligible output must be >= 0");
    return (remuneration(policy, price) - marginal_cost) * eligible_output;
}

struct Portfolio {
    std::string owner;
    double eligible = 0.0;  // R, MWh
    double fossil = 0.0;    // F, MWh
};

struct ManipulationGain {
    double gain = 0.0;
    bool profitable = false;
};

/// Profit change (delta - dp) * R - dp * F of pushing the price from above
/// the threshold to just below it by dp.
inline ManipulationGain manipulation_gain(double dp, double delta, const Portfolio& portfolio) {
    if (!(dp > 0.0)) throw ParameterError("price reduction must be > 0");
    if (portfolio.eligible < 0.0 || portfolio.fossil < 0.0) throw ParameterError("portfolio volumes must be >= 0");
    if (portfolio.eligible + portfolio.fossil == 0.0) throw ParameterError("portfolio has no output (R + F = 0)");
    ManipulationGain g;
    g.gain = (delta - dp) * portfolio.eligible - dp * portfolio.fossil;
    g.profitable = g.gain > 0.0;
    return g;
}

// Largest price reduction that still pays: delta * R / (R + F).
inline double manipulation_threshold(double delta, const Portfolio& portfolio) {
    const double total = portfolio.eligible + portfolio.fossil;
    if (total == 0.0) throw ParameterError("portfolio has no output (R + F = 0)");
    return delta * portfolio.eligible / total;
}

inline Portfolio portfolio_of(const SupplyCurve& supply, const ClearingOutcome& outcome, const std::string& owner,
                              const EligibilitySet& eligibility) {
    Portfolio p{owner, 0.0, 0.0};
    for (std::size_t i = 0; i < supply.offers.size(); ++i) {
        const auto& o = supply.offers[i];
        if (o.owner != owner) continue;
        if (eligibility.contains(o.technology)) p.eligible += outcome.accepted[i];
        else p.fossil += outcome.accepted[i];
    }
    return p;
}

/// Owner profit when eligible output is paid the adjusted remuneration and
/// all other output the clearing price.
inline double owner_profit(const SupplyCurve& supply, const ClearingOutcome& outcome, const std::string& owner,
                           const DeductionPolicy& policy, const EligibilitySet& eligibility) {
    const double adjusted = remuneration(policy, outcome.price);
    double profit = 0.0;
    for (std::size_t i = 0; i < supply.offers.size(); ++i) {
        const auto& o = supply.offers[i];
        if (o.owner != owner || outcome.accepted[i] == 0.0) continue;
        const double paid = eligibility.contains(o.technology) ? adjusted : outcome.price;
        profit += (paid - o.marginal_cost()) * outcome.accepted[i];
    }
    return profit;
}

struct BestResponseOptions {
    double grid_step = 0.5;
    std::size_t max_evaluations = 4'000'000;  // beyond this, coordinate search
    double tolerance = 1e-6;                  // gains at or below are noise
    EligibilitySet eligibility = EligibilitySet::default_set();
};

struct DeviationReport {
    std::string owner;
    double baseline_price = 0.0;
    double baseline_profit = 0.0;
    double best_profit = 0.0;
    double gain = 0.0;
    double new_price = 0.0;
    std::vector<std::size_t> owned_offers;
    std::vector<double> baseline_offer_prices;
    std::vector<double> best_offer_prices;
    bool profitable = false;
    bool threshold_push = false;  // profitable and moves the price from >= p̄ to < p̄
    bool exhaustive = true;
    std::size_t evaluations = 0;
};

// Candidate offer prices: baseline, baseline - step, ..., down to 0.
inline std::vector<double> reduction_grid(double baseline, double step) {
    if (!(step > 0.0)) throw ParameterError("grid step must be > 0");
    std::vector<double> grid{baseline};
    if (baseline <= 0.0) return grid;
    for (std::size_t j = 1;; ++j) {
        const double v = baseline - static_cast<double>(j) * step;
        if (v <= 0.0) break;
        grid.push_back(v);
    }
    grid.push_back(0.0);
    return grid;
}

/// Searches the owner's offer-price reductions for the profit-maximising
/// deviation under the policy's settlement. Enumerates the full grid when
/// it has at most `max_evaluations` points, otherwise runs a coordinate
/// search.
inline DeviationReport best_response_threshold_push(const SupplyCurve& supply, const DemandCurve& demand,
                                                    const DeductionPolicy& policy, const std::string& owner,
                                                    const BestResponseOptions& opts = {}) {
    validate(policy);
    DeviationReport rep;
    rep.owner = owner;
    for (std::size_t i = 0; i < supply.offers.size(); ++i)
        if (supply.offers[i].owner == owner) rep.owned_offers.push_back(i);
    if (rep.owned_offers.empty()) throw ParameterError("owner '" + owner + "' has no offers");

    const auto baseline = clear(supply, demand);
    rep.baseline_price = baseline.price;
    rep.baseline_profit = owner_profit(supply, baseline, owner, policy, opts.eligibility);

    std::vector<std::vector<double>> grids;
    for (std::size_t idx : rep.owned_offers) {
        rep.baseline_offer_prices.push_back(supply.offers[idx].price);
        grids.push_back(reduction_grid(supply.offers[idx].price, opts.grid_step));
    }

    // Costs stay at the truthful level while the offer prices move.
    SupplyCurve trial = supply;
    for (std::size_t idx : rep.owned_offers) trial.offers[idx].cost = supply.offers[idx].marginal_cost();
    std::vector<std::size_t> pos(grids.size(), 0);
    auto evaluate = [&](const std::vector<std::size_t>& at, double& price) {
        for (std::size_t k = 0; k < at.size(); ++k) trial.offers[rep.owned_offers[k]].price = grids[k][at[k]];
        const auto outcome = clear(trial, demand);
        ++rep.evaluations;
        price = outcome.price;
        return owner_profit(trial, outcome, owner, policy, opts.eligibility);
    };

    double best_price = baseline.price;
    double best_profit = evaluate(pos, best_price);
    std::vector<std::size_t> best_pos = pos;

    double combos = 1.0;
    for (const auto& g : grids) combos *= static_cast<double>(g.size());
    rep.exhaustive = combos <= static_cast<double>(opts.max_evaluations);

    if (rep.exhaustive) {
        // Odometer over all grid combinations, first owned offer fastest.
        while (true) {
            std::size_t k = 0;
            while (k < pos.size() && ++pos[k] == grids[k].size()) pos[k++] = 0;
            if (k == pos.size()) break;
            double price = 0.0;
            const double profit = evaluate(pos, price);
            if (profit > best_profit) {
                best_profit = profit;
                best_price = price;
                best_pos = pos;
            }
        }
    } else {
        pos = best_pos;
        for (int pass = 0; pass < 50; ++pass) {
            bool improved = false;
            for (std::size_t k = 0; k < pos.size(); ++k) {
                auto cand = best_pos;
                for (std::size_t j = 0; j < grids[k].size(); ++j) {
                    cand[k] = j;
                    double price = 0.0;
                    const double profit = evaluate(cand, price);
                    if (profit > best_profit) {
                        best_profit = profit;
                        best_price = price;
                        best_pos = cand;
                        improved = true;
                    }
                }
            }
            if (!improved) break;
        }
    }

    rep.best_profit = best_profit;
    rep.gain = best_profit - rep.baseline_profit;
    rep.profitable = rep.gain > opts.tolerance;
    for (std::size_t k = 0; k < best_pos.size(); ++k) rep.best_offer_prices.push_back(grids[k][best_pos[k]]);
    if (rep.profitable) {
        rep.new_price = best_price;
    } else {
        rep.new_price = baseline.price;
        rep.best_profit = rep.baseline_profit;
        rep.best_offer_prices = rep.baseline_offer_prices;
    }
    const double activation = activation_price(policy);
    rep.threshold_push = rep.profitable && rep.baseline_price >= activation && rep.new_price < activation;
    return rep;
}

struct Scenario {
    SupplyCurve supply;
    DemandCurve demand;
};

/// Scripted family of market draws around a base scenario: the strategic
/// owner's emitting offers get a common truthful cost drawn from
/// `cost_range`, and inelastic demand is drawn from `demand_range`.
struct ScenarioFamily {
    Scenario base;
    std::string owner;
    std::optional<std::pair<double, double>> cost_range;
    std::optional<std::pair<double, double>> demand_range;
};

namespace detail {
// Portable uniform in [0, 1): 53 high bits of a 64-bit Mersenne Twister.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::vector<std::size_t> stratum_permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    return perm;
}
}  // namespace detail

/// Latin-hypercube draws: each varied dimension places exactly one draw in
/// each of n equal strata, jittered uniformly within the stratum.
inline std::vector<Scenario> generate_scenarios(const ScenarioFamily& family, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto cost_perm = detail::stratum_permutation(n, rng);
    const auto demand_perm = detail::stratum_permutation(n, rng);
    std::vector<Scenario> out;
    out.reserve(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        Scenario s = family.base;
        const double u_cost = (static_cast<double>(cost_perm[i]) + detail::unit_draw(rng)) / dn;
        const double u_demand = (static_cast<double>(demand_perm[i]) + detail::unit_draw(rng)) / dn;
        if (family.cost_range) {
            const auto [lo, hi] = *family.cost_range;
            const double cost = lo + (hi - lo) * u_cost;
            for (auto& o : s.supply.offers) {
                if (o.owner == family.owner && is_fossil(o.technology)) {
                    o.price = cost;
                    o.cost = cost;
                }
            }
        }
        if (family.demand_range) {
            const auto [lo, hi] = *family.demand_range;
            s.demand = InelasticDemand{lo + (hi - lo) * u_demand};
        }
        out.push_back(std::move(s));
    }
    return out;
}

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

struct BunchingOptions {
    double reference_price = HUGE_VAL;  // threshold the statistic is measured at; defaults to policy activation
    double window = 2.0;
    double bin_width = 1.0;
    unsigned threads = 1;
    BestResponseOptions best_response;
};

struct BunchingResult {
    std::vector<double> baseline_prices;
    std::vector<double> prices;  // after the owner's best response
    std::size_t deviations = 0;
    std::size_t threshold_pushes = 0;
    double reference_price = 0.0;
    double share_below = 0.0;  // in [ref - window, ref)
    double share_above = 0.0;  // in [ref, ref + window)
    double statistic = 0.0;    // share_below - share_above
    std::vector<HistogramBin> histogram;
};

inline std::vector<HistogramBin> histogram(const std::vector<double>& values, double bin_width) {
    if (!(bin_width > 0.0)) throw ParameterError("bin width must be > 0");
    if (values.empty()) return {};
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const auto first = static_cast<long long>(std::floor(*mn / bin_width));
    const auto last = static_cast<long long>(std::floor(*mx / bin_width));
    std::vector<HistogramBin> bins;
    for (long long b = first; b <= last; ++b)
        bins.push_back({static_cast<double>(b) * bin_width, static_cast<double>(b + 1) * bin_width, 0});
    for (double v : values) ++bins[static_cast<std::size_t>(static_cast<long long>(std::floor(v / bin_width)) - first)].count;
    return bins;
}

/// Runs the owner's best response in every scenario and measures clustering
/// of outcomes just below the reference price.
inline BunchingResult bunching_scan(const std::vector<Scenario>& scenarios, const DeductionPolicy& policy,
                                    const std::string& owner, const BunchingOptions& opts = {}) {
    if (scenarios.empty()) throw ParameterError("bunching scan needs at least one scenario");
    BunchingResult res;
    res.reference_price = std::isfinite(opts.reference_price) ? opts.reference_price : activation_price(policy);
    if (!std::isfinite(res.reference_price))
        throw ParameterError("bunching scan needs a reference price when the policy has no threshold");

    std::vector<DeviationReport> reports(scenarios.size());
    parallel_for(scenarios.size(), opts.threads, [&](std::size_t i) {
        reports[i] = best_response_threshold_push(scenarios[i].supply, scenarios[i].demand, policy, owner,
                                                  opts.best_response);
    });

    std::size_t below = 0, above = 0;
    for (const auto& r : reports) {
        res.baseline_prices.push_back(r.baseline_price);
        res.prices.push_back(r.new_price);
        if (r.profitable) ++res.deviations;
        if (r.threshold_push) ++res.threshold_pushes;
        if (r.new_price >= res.reference_price - opts.window && r.new_price < res.reference_price) ++below;
        if (r.new_price >= res.reference_price && r.new_price < res.reference_price + opts.window) ++above;
    }
    const double n = static_cast<double>(reports.size());
    res.share_below = static_cast<double>(below) / n;
    res.share_above = static_cast<double>(above) / n;
    res.statistic = res.share_below - res.share_above;
    res.histogram = histogram(res.prices, opts.bin_width);
    return res;
}

inline void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins) {
    CsvWriter csv(os);
    csv.row({"bin_left", "bin_right", "count"});
    for (const auto& b : bins) csv.row({format_exact(b.left), format_exact(b.right), std::to_string(b.count)});
}

}  // namespace co2proxy
