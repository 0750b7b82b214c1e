#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "co2proxy/error.hpp"
#include "co2proxy/market.hpp"
#include "co2proxy/policy.hpp"

namespace co2proxy {

struct BunchingConfig {
    std::optional<std::pair<double, double>> cost_range;
    std::optional<std::pair<double, double>> demand_range;
    double window = 2.0;
    double bin_width = 1.0;
    double reference_price = HUGE_VAL;
    std::optional<double> statistic_threshold;
};

struct CarbonConfig {
    double price = 0.0;
    IntensityMap intensities;
    std::optional<double> pass_through_step;
};

/// Contents of a simulator scenario file.
struct ScenarioFile {
    Scenario scenario;
    DeductionPolicy policy = NoPolicy{};
    std::string strategic_owner;
    double grid_step = 0.5;
    std::uint64_t seed = 7;
    std::optional<CarbonConfig> carbon;
    BunchingConfig bunching;
};

namespace detail {

inline Technology technology_field(const nlohmann::json& j, const std::string& where) {
    const auto name = j.get<std::string>();
    const auto tech = technology_from_string(name);
    if (!tech) throw DataError(where + ": unknown technology '" + name + "'");
    return *tech;
}

inline std::pair<double, double> range_field(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw DataError(where + ": expected [low, high]");
    const double lo = j[0].get<double>(), hi = j[1].get<double>();
    if (!(lo <= hi)) throw DataError(where + ": low must not exceed high");
    return {lo, hi};
}

}  // namespace detail

/// Parses the JSON scenario format:
///   offers: [{owner, technology, quantity, price, cost?}]
///   demand: {type: "inelastic", quantity} | {type: "linear", intercept, slope}
///   policy, strategic_owner, grid_step, seed, carbon?, bunching?
inline ScenarioFile parse_scenario(const nlohmann::json& j) {
    ScenarioFile s;
    try {
        for (const auto& o : j.at("offers")) {
            Offer offer;
            offer.owner = o.value("owner", std::string{});
            offer.technology = detail::technology_field(o.at("technology"), "offer");
            offer.quantity = o.at("quantity").get<double>();
            offer.price = o.at("price").get<double>();
            if (o.contains("cost")) offer.cost = o.at("cost").get<double>();
            s.scenario.supply.offers.push_back(offer);
        }
        const auto& d = j.at("demand");
        const auto type = d.at("type").get<std::string>();
        if (type == "inelastic") s.scenario.demand = InelasticDemand{d.at("quantity").get<double>()};
        else if (type == "linear")
            s.scenario.demand = LinearDemand{d.at("intercept").get<double>(), d.at("slope").get<double>()};
        else throw DataError("demand type must be 'inelastic' or 'linear'");

        if (j.contains("policy")) s.policy = parse_policy(j.at("policy").get<std::string>());
        s.strategic_owner = j.value("strategic_owner", std::string{});
        s.grid_step = j.value("grid_step", s.grid_step);
        s.seed = j.value("seed", s.seed);
        if (j.contains("carbon")) {
            const auto& c = j.at("carbon");
            CarbonConfig cc;
            cc.price = c.at("price").get<double>();
            for (const auto& [name, value] : c.at("intensities").items()) {
                const auto tech = technology_from_string(name);
                if (!tech) throw DataError("carbon: unknown technology '" + name + "'");
                cc.intensities[*tech] = value.get<double>();
            }
            if (c.contains("pass_through_step")) cc.pass_through_step = c.at("pass_through_step").get<double>();
            s.carbon = cc;
        }
        if (j.contains("bunching")) {
            const auto& b = j.at("bunching");
            if (b.contains("cost_range")) s.bunching.cost_range = detail::range_field(b.at("cost_range"), "cost_range");
            if (b.contains("demand_range"))
                s.bunching.demand_range = detail::range_field(b.at("demand_range"), "demand_range");
            s.bunching.window = b.value("window", s.bunching.window);
            s.bunching.bin_width = b.value("bin_width", s.bunching.bin_width);
            if (b.contains("reference_price")) s.bunching.reference_price = b.at("reference_price").get<double>();
            if (b.contains("statistic_threshold"))
                s.bunching.statistic_threshold = b.at("statistic_threshold").get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("scenario: ") + e.what());
    }
    s.scenario.supply.validate();
    validate(s.scenario.demand);
    return s;
}

inline ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return parse_scenario(j);
}

}  // namespace co2proxy
