#pragma once

#include "co2proxy/error.hpp"
#include "co2proxy/policy.hpp"

namespace co2proxy {

/// Settlement of one market period. Money in €, prices in €/MWh.
struct SettlementResult {
    double exp_base = 0.0;      // p * q
    double transfer = 0.0;      // d(p) * q^r
    double exp_new = 0.0;       // exp_base - transfer
    double remuneration = 0.0;  // p - d(p), paid to eligible output
    double deduction = 0.0;     // d(p)
    bool export_hour = false;   // eligible output exceeds load
};

namespace detail {
inline void check_volumes(double load, double eligible_gen) {
    if (!(load >= 0.0)) throw DataError("load must be >= 0");
    if (!(eligible_gen >= 0.0)) throw DataError("eligible generation must be >= 0");
}
}  // namespace detail

/// Two-price settlement: eligible output is paid p - d(p), everything else p.
/// Consumers pay the load at p less the deducted amount.
inline SettlementResult settle_hour(double price, double load, double eligible_gen,
                                    const DeductionPolicy& policy) {
    detail::check_volumes(load, eligible_gen);
    SettlementResult r;
    r.deduction = deduction(policy, price);
    r.remuneration = price - r.deduction;
    r.exp_base = price * load;
    r.transfer = r.deduction * eligible_gen;
    r.exp_new = r.exp_base - r.transfer;
    r.export_hour = eligible_gen > load;
    return r;
}

/// Levy route: the auction settles every unit at p; eligible units then pay
/// d(p) per MWh outside the market and the proceeds are rebated to consumers.
struct LevySettlement {
    SettlementResult result;
    double market_payments = 0.0;  // uniform-price payments to all generators
    double levy_collected = 0.0;
    double rebate = 0.0;
};

inline LevySettlement levy_settlement_detail(double price, double load, double eligible_gen,
                                            const DeductionPolicy& policy) {
    detail::check_volumes(load, eligible_gen);
    LevySettlement out;
    const double levy_rate = deduction(policy, price);
    out.market_payments = price * load;
    out.levy_collected = levy_rate * eligible_gen;
    out.rebate = out.levy_collected;

    auto& r = out.result;
    r.deduction = levy_rate;
    r.remuneration = price - levy_rate;  // net of levy
    r.exp_base = out.market_payments;
    r.transfer = out.rebate;
    r.exp_new = out.market_payments - out.rebate;
    r.export_hour = eligible_gen > load;
    return out;
}

inline SettlementResult levy_settlement(double price, double load, double eligible_gen,
                                        const DeductionPolicy& policy) {
    return levy_settlement_detail(price, load, eligible_gen, policy).result;
}

// Exp = q^r * p̃ + (q - q^r) * p, the per-unit view of consumer expenditure.
inline double two_price_expenditure(double price, double load, double eligible_gen,
                                    const DeductionPolicy& policy) {
    detail::check_volumes(load, eligible_gen);
    return eligible_gen * remuneration(policy, price) + (load - eligible_gen) * price;
}

/// Marginal revenue under an hourly stylisation of a revenue windfall tax
/// with benchmark `benchmark` and rate `rate`: p below the benchmark,
/// benchmark + (1 - rate)(p - benchmark) above.
inline double windfall_tax_marginal_revenue(double price, double benchmark, double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ParameterError("tax rate must lie in [0, 1]");
    if (price < benchmark) return price;
    return benchmark + (1.0 - rate) * (price - benchmark);
}

}  // namespace co2proxy
