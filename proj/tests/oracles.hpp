#pragma once

// Independent reference implementations used by the tests. They are written
// from the formulas directly and deliberately share no code with the
// library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "co2proxy/market.hpp"

namespace oracle {

// Deduction schedules evaluated straight from their definitions.
inline double hard_deduction(double threshold, double delta, double p) { return p >= threshold ? delta : 0.0; }

inline double ramp_deduction(double lo, double hi, double delta, double p) {
    if (p <= lo) return 0.0;
    if (p >= hi) return delta;
    return delta * (p - lo) / (hi - lo);
}

// Crisis ramp: upper = lo + phi * delta, deduction slope 1/phi inside.
inline double crisis_deduction(double lo, double phi, double delta, double p) {
    if (delta == 0.0 || p <= lo) return 0.0;
    if (p >= lo + phi * delta) return delta;
    return (p - lo) / phi;
}

struct Step {
    double quantity;
    double price;
};

struct Cleared {
    bool feasible = true;
    double price = 0.0;
    double quantity = 0.0;
};

// Inelastic demand: the lowest step price whose cumulative supply (all
// steps at or below it) covers demand.
inline Cleared brute_clear_inelastic(const std::vector<Step>& steps, double demand) {
    Cleared best;
    best.feasible = false;
    for (const auto& candidate : steps) {
        double covered = 0.0;
        for (const auto& s : steps)
            if (s.price <= candidate.price) covered += s.quantity;
        if (covered >= demand && (!best.feasible || candidate.price < best.price)) {
            best.feasible = true;
            best.price = candidate.price;
            best.quantity = demand;
        }
    }
    return best;
}

// Linear demand p = a - b q. The clearing price is the smallest candidate
// price (a step price or a demand price at a cumulative supply level) at
// which demand no longer exceeds supply.
inline Cleared brute_clear_linear(const std::vector<Step>& steps, double a, double b) {
    auto supply_at_or_below = [&](double p) {
        double s = 0.0;
        for (const auto& st : steps)
            if (st.price <= p) s += st.quantity;
        return s;
    };
    auto supply_below = [&](double p) {
        double s = 0.0;
        for (const auto& st : steps)
            if (st.price < p) s += st.quantity;
        return s;
    };
    const double inf = std::numeric_limits<double>::infinity();
    auto demand_at = [&](double p) -> double {
        if (b == 0.0) return p < a ? inf : 0.0;
        return p >= a ? 0.0 : (a - p) / b;
    };

    std::vector<double> candidates;
    for (const auto& s : steps) candidates.push_back(s.price);
    // cumulative levels over every subset that is a price-prefix of the stack
    std::vector<double> levels{0.0};
    for (const auto& s : steps) levels.push_back(supply_at_or_below(s.price));
    for (double c : levels) candidates.push_back(a - b * c);
    std::sort(candidates.begin(), candidates.end());

    for (double p : candidates) {
        if (demand_at(p) <= supply_at_or_below(p)) {
            Cleared out;
            out.price = p;
            const double lo = supply_below(p), hi = supply_at_or_below(p);
            const double d = demand_at(p);
            if (b == 0.0) out.quantity = lo;  // horizontal demand: only strictly cheaper steps clear
            else out.quantity = std::clamp(d, lo, hi);
            out.feasible = out.quantity > 0.0;
            return out;
        }
    }
    return {false, 0.0, 0.0};
}

struct OwnedOffer {
    bool eligible;
    double quantity;
    double offer;
    double cost;
};

// Accepted quantities per offer for inelastic demand in price order, ties
// in input order.
inline std::vector<double> allocate(const std::vector<double>& prices, const std::vector<double>& qty, double demand) {
    std::vector<std::size_t> idx(prices.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return prices[x] < prices[y]; });
    std::vector<double> acc(prices.size(), 0.0);
    double left = demand;
    for (std::size_t i : idx) {
        const double take = std::min(left, qty[i]);
        acc[i] = take;
        left -= take;
        if (left <= 0.0) break;
    }
    return acc;
}

struct BruteBestResponse {
    double baseline_profit = 0.0;
    double best_profit = 0.0;
    std::vector<double> argmax_prices;  // clearing prices attaining best_profit
};

// Exhaustive search of the owner's offer-price reductions on a grid of
// `step` below each baseline offer. `deduct` maps a clearing price to the
// deduction applied to eligible output. Inelastic demand only.
template <class Deduct>
BruteBestResponse brute_best_response(const std::vector<co2proxy::Offer>& offers, const std::string& owner,
                                      double demand, double step, const co2proxy::EligibilitySet& elig,
                                      Deduct deduct) {
    std::vector<std::size_t> owned;
    for (std::size_t i = 0; i < offers.size(); ++i)
        if (offers[i].owner == owner) owned.push_back(i);
    std::vector<std::vector<double>> grids;
    for (std::size_t i : owned) {
        std::vector<double> g;
        for (int k = 0;; ++k) {
            const double v = offers[i].price - k * step;
            if (v < 0.0) break;
            g.push_back(v);
        }
        if (g.empty() || g.back() != 0.0) g.push_back(0.0);
        grids.push_back(g);
    }
    std::vector<double> qty;
    for (const auto& o : offers) qty.push_back(o.quantity);

    auto evaluate = [&](const std::vector<double>& prices, double& clearing) {
        const auto acc = allocate(prices, qty, demand);
        clearing = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < prices.size(); ++i)
            if (acc[i] > 0.0) clearing = std::max(clearing, prices[i]);
        double profit = 0.0;
        for (std::size_t i : owned) {
            if (acc[i] == 0.0) continue;
            const double cost = offers[i].cost.value_or(offers[i].price);
            const double paid = elig.contains(offers[i].technology) ? clearing - deduct(clearing) : clearing;
            profit += (paid - cost) * acc[i];
        }
        return profit;
    };

    std::vector<double> prices;
    for (const auto& o : offers) prices.push_back(o.price);
    BruteBestResponse out;
    double base_price = 0.0;
    out.baseline_profit = evaluate(prices, base_price);

    // enumerate the cartesian product
    std::vector<std::size_t> pos(owned.size(), 0);
    std::vector<std::pair<double, double>> results;  // (profit, price)
    while (true) {
        for (std::size_t k = 0; k < owned.size(); ++k) prices[owned[k]] = grids[k][pos[k]];
        double p = 0.0;
        const double profit = evaluate(prices, p);
        results.emplace_back(profit, p);
        std::size_t k = 0;
        while (k < pos.size() && ++pos[k] == grids[k].size()) pos[k++] = 0;
        if (k == pos.size()) break;
    }
    out.best_profit = out.baseline_profit;
    for (const auto& r : results) out.best_profit = std::max(out.best_profit, r.first);
    for (const auto& r : results)
        if (r.first == out.best_profit) out.argmax_prices.push_back(r.second);
    if (out.best_profit == out.baseline_profit) out.argmax_prices.push_back(base_price);
    return out;
}

// Dyadic uniform draw: multiples of 1/4 in [lo, hi], exactly representable.
inline double quarter(std::mt19937_64& rng, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo * 4, hi * 4);
    return d(rng) / 4.0;
}

}  // namespace oracle
