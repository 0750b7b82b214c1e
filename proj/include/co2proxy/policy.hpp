#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"

namespace co2proxy {

// Prices in €/MWh, fuel in €/MWh_th, emission intensities in tCO2/MWh_th,
// carbon in €/t.

/// Reference fossil technology used to price the excess-cost component.
struct ReferenceCost {
    double efficiency = 0.55;
    double fuel_price = 0.0;
    double emission_intensity = 0.0;
    double carbon_price = 0.0;

    void validate() const {
        if (!(efficiency > 0.0) || efficiency > 1.0)
            throw ParameterError("reference efficiency must lie in (0, 1]");
        if (emission_intensity < 0.0) throw ParameterError("emission intensity must be >= 0");
        if (fuel_price < 0.0 || carbon_price < 0.0)
            throw ParameterError("reference prices must be >= 0");
    }
};

struct MarginalCost {
    double total = 0.0;     // €/MWh_el
    double carbon = 0.0;    // carbon component, €/MWh_el
    double carbon_share = 0.0;
};

/// MC = (p_fuel + e_fuel * p_CO2) / eta.
inline MarginalCost fossil_marginal_cost(double efficiency, double fuel_price, double emission_intensity,
                                         double carbon_price) {
    if (!(efficiency > 0.0)) throw ParameterError("efficiency must be > 0");
    const double carbon_th = emission_intensity * carbon_price;
    const double input = fuel_price + carbon_th;
    MarginalCost mc;
    mc.total = input / efficiency;
    mc.carbon = carbon_th / efficiency;
    mc.carbon_share = input != 0.0 ? carbon_th / input : 0.0;
    return mc;
}

inline MarginalCost fossil_marginal_cost(const ReferenceCost& ref) {
    return fossil_marginal_cost(ref.efficiency, ref.fuel_price, ref.emission_intensity, ref.carbon_price);
}

/// delta = alpha * e_gas_el * p_CO2, the carbon cost of an efficient gas unit
/// scaled by the redistribution share alpha.
inline double carbon_proxy_delta(double alpha, double gas_intensity_el, double carbon_price) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
    if (gas_intensity_el < 0.0) throw ParameterError("emission intensity must be >= 0");
    if (carbon_price < 0.0) throw ParameterError("carbon price must be >= 0");
    return alpha * gas_intensity_el * carbon_price;
}

struct NoPolicy {};

struct HardThreshold {
    double threshold = 100.0;
    double deduction = 28.0;
};

struct LinearRamp {
    double lower = 72.0;
    double upper = 100.0;
    double deduction = 28.0;
};

/// Gas-shock variant for one settlement period. `excess` is the period's
/// maximum deduction (the excess fossil cost); the ramp runs from `lower`
/// to lower + phi * excess.
struct CrisisRamp {
    double lower = 70.0;
    double phi = 4.0 / 3.0;
    ReferenceCost reference;
    double excess = 0.0;
};

using DeductionPolicy = std::variant<NoPolicy, HardThreshold, LinearRamp, CrisisRamp>;

inline void validate(const DeductionPolicy& policy) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, HardThreshold>) {
                if (!(p.deduction >= 0.0)) throw ParameterError("deduction must be >= 0");
            } else if constexpr (std::is_same_v<T, LinearRamp>) {
                if (!(p.deduction >= 0.0)) throw ParameterError("deduction must be >= 0");
                if (!(p.lower < p.upper)) throw ParameterError("ramp requires lower < upper");
            } else if constexpr (std::is_same_v<T, CrisisRamp>) {
                if (!(p.phi >= 1.0)) throw ParameterError("ramp-width factor phi must be >= 1");
                if (!(p.excess >= 0.0)) throw ParameterError("excess deduction must be >= 0");
            }
        },
        policy);
}

// Linear phase-in from 0 at `lower` to `delta` at `upper`.
inline double ramp_deduction(double lower, double upper, double delta, double price) {
    if (price <= lower) return 0.0;
    if (price >= upper) return delta;
    return delta * (price - lower) / (upper - lower);
}

/// Gas-shock ramp with upper bound lower + phi * delta. Inside the ramp the
/// deduction slope is exactly 1/phi.
inline double crisis_deduction(double lower, double phi, double delta, double price) {
    if (!(phi >= 1.0)) throw ParameterError("ramp-width factor phi must be >= 1");
    if (!(delta >= 0.0)) throw ParameterError("excess deduction must be >= 0");
    if (delta == 0.0 || price <= lower) return 0.0;
    const double upper = lower + phi * delta;
    if (price >= upper) return delta;
    return (price - lower) / phi;
}

/// Amount subtracted from an eligible generator's remuneration at clearing
/// price `price`. Defined for every real price; zero below activation.
inline double deduction(const DeductionPolicy& policy, double price) {
    validate(policy);
    return std::visit(
        [price](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoPolicy>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, HardThreshold>) {
                return price >= p.threshold ? p.deduction : 0.0;
            } else if constexpr (std::is_same_v<T, LinearRamp>) {
                return ramp_deduction(p.lower, p.upper, p.deduction, price);
            } else {
                return crisis_deduction(p.lower, p.phi, p.excess, price);
            }
        },
        policy);
}

inline double remuneration(const DeductionPolicy& policy, double price) {
    return price - deduction(policy, price);
}

// Largest deduction the policy can apply.
inline double max_deduction(const DeductionPolicy& policy) {
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoPolicy>) return 0.0;
            else if constexpr (std::is_same_v<T, CrisisRamp>) return p.excess;
            else return p.deduction;
        },
        policy);
}

// Price at which the full deduction is reached (+inf without a policy).
inline double activation_price(const DeductionPolicy& policy) {
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoPolicy>) return HUGE_VAL;
            else if constexpr (std::is_same_v<T, HardThreshold>) return p.threshold;
            else if constexpr (std::is_same_v<T, LinearRamp>) return p.upper;
            else return p.lower + p.phi * p.excess;
        },
        policy);
}

struct PolicyFinding {
    std::string check;
    bool passed = true;
    std::string message;
};

struct ValidationReport {
    std::vector<PolicyFinding> findings;

    bool ok() const {
        for (const auto& f : findings)
            if (!f.passed) return false;
        return true;
    }

    const PolicyFinding* find(const std::string& check) const {
        for (const auto& f : findings)
            if (f.check == check) return &f;
        return nullptr;
    }
};

/// Checks threshold - delta > max eligible marginal cost, the non-negative
/// ramp slope (delta <= upper - lower) and phi >= 1. Never throws; findings
/// carry the outcome.
inline ValidationReport validate_policy(const DeductionPolicy& policy, double max_eligible_mc) {
    ValidationReport report;
    auto margin_check = [&](double upper, double delta) {
        const double floor = upper - delta;
        const bool pass = floor > max_eligible_mc;
        report.findings.push_back({"threshold_margin", pass,
                                   "threshold - deduction = " + format_exact(floor) +
                                       (pass ? " > " : " <= ") + "max eligible cost " +
                                       format_exact(max_eligible_mc)});
    };
    auto nonneg = [&](double delta) {
        if (!(delta >= 0.0))
            report.findings.push_back({"deduction_nonnegative", false, "deduction must be >= 0"});
    };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, HardThreshold>) {
                nonneg(p.deduction);
                margin_check(p.threshold, p.deduction);
            } else if constexpr (std::is_same_v<T, LinearRamp>) {
                nonneg(p.deduction);
                if (!(p.lower < p.upper))
                    report.findings.push_back({"ramp_order", false, "ramp requires lower < upper"});
                margin_check(p.upper, p.deduction);
                const double width = p.upper - p.lower;
                const bool slope_ok = p.deduction <= width;
                report.findings.push_back(
                    {"ramp_slope", slope_ok,
                     slope_ok ? "marginal remuneration in ramp is non-negative"
                              : "deduction " + format_exact(p.deduction) + " exceeds ramp width " +
                                    format_exact(width) + ": marginal remuneration is negative"});
            } else if constexpr (std::is_same_v<T, CrisisRamp>) {
                const bool ok = p.phi >= 1.0;
                report.findings.push_back(
                    {"phi", ok, ok ? "phi >= 1" : "phi = " + format_exact(p.phi) + " < 1"});
            }
        },
        policy);
    return report;
}

// Text form used by the CLI and report files: none, hard:<p̄>:<δ>,
// ramp:<p̲>:<p̄>:<δ>, crisis:<p̲>:<φ>.
inline std::string policy_id(const DeductionPolicy& policy) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NoPolicy>) return "none";
            else if constexpr (std::is_same_v<T, HardThreshold>)
                return "hard:" + format_exact(p.threshold) + ":" + format_exact(p.deduction);
            else if constexpr (std::is_same_v<T, LinearRamp>)
                return "ramp:" + format_exact(p.lower) + ":" + format_exact(p.upper) + ":" +
                       format_exact(p.deduction);
            else return "crisis:" + format_exact(p.lower) + ":" + format_exact(p.phi);
        },
        policy);
}

/// Parses the `none | hard:<p̄>:<δ> | ramp:<p̲>:<p̄>:<δ>` grammar. Throws
/// ParameterError on malformed text or invalid parameters.
inline DeductionPolicy parse_policy(const std::string& text) {
    const auto parts = split(text, ':');
    std::vector<double> nums;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        double v = 0.0;
        if (!parse_double(parts[i], v)) throw ParameterError("bad number '" + parts[i] + "' in policy '" + text + "'");
        nums.push_back(v);
    }
    DeductionPolicy policy;
    if (parts[0] == "none" && nums.empty()) {
        policy = NoPolicy{};
    } else if (parts[0] == "hard" && nums.size() == 2) {
        policy = HardThreshold{nums[0], nums[1]};
    } else if (parts[0] == "ramp" && nums.size() == 3) {
        policy = LinearRamp{nums[0], nums[1], nums[2]};
    } else {
        throw ParameterError("unrecognised policy '" + text +
                             "' (expected none, hard:<threshold>:<deduction> or ramp:<lower>:<upper>:<deduction>)");
    }
    validate(policy);
    return policy;
}

}  // namespace co2proxy
