#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "co2proxy/error.hpp"

namespace co2proxy {

enum class Technology : std::size_t {
    WindOnshore,
    WindOffshore,
    Solar,
    HydroRunOfRiver,
    HydroReservoir,
    Nuclear,
    Geothermal,
    Biomass,
    OtherRenewable,
    PumpedStorage,
    GasCCGT,
    GasPeaker,
    HardCoal,
    Lignite,
    Oil,
    Other,
};

inline constexpr std::size_t kTechnologyCount = 16;

inline constexpr std::array<Technology, kTechnologyCount> kAllTechnologies = {
    Technology::WindOnshore,   Technology::WindOffshore,   Technology::Solar,
    Technology::HydroRunOfRiver, Technology::HydroReservoir, Technology::Nuclear,
    Technology::Geothermal,    Technology::Biomass,        Technology::OtherRenewable,
    Technology::PumpedStorage, Technology::GasCCGT,        Technology::GasPeaker,
    Technology::HardCoal,      Technology::Lignite,        Technology::Oil,
    Technology::Other,
};

inline constexpr std::array<std::string_view, kTechnologyCount> kTechnologyNames = {
    "WindOnshore",   "WindOffshore", "Solar",     "HydroRunOfRiver",
    "HydroReservoir", "Nuclear",     "Geothermal", "Biomass",
    "OtherRenewable", "PumpedStorage", "GasCCGT", "GasPeaker",
    "HardCoal",      "Lignite",      "Oil",       "Other",
};

constexpr std::size_t index(Technology t) { return static_cast<std::size_t>(t); }

constexpr std::string_view to_string(Technology t) { return kTechnologyNames[index(t)]; }

inline std::optional<Technology> technology_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kTechnologyCount; ++i) {
        if (kTechnologyNames[i] == name) return kAllTechnologies[i];
    }
    return std::nullopt;
}

// Emitting technologies. "Other" is treated as fossil since the ENTSO-E
// category mixes waste and unspecified thermal units.
constexpr bool is_fossil(Technology t) {
    switch (t) {
        case Technology::GasCCGT:
        case Technology::GasPeaker:
        case Technology::HardCoal:
        case Technology::Lignite:
        case Technology::Oil:
        case Technology::Other:
            return true;
        default:
            return false;
    }
}

constexpr bool is_gas(Technology t) {
    return t == Technology::GasCCGT || t == Technology::GasPeaker;
}

// Per-technology energy volumes (MWh). Absent technologies are zero.
using Generation = std::array<double, kTechnologyCount>;

/// The set of technologies whose output is settled at the adjusted
/// remuneration. CfD-backed units are modelled by leaving them out.
class EligibilitySet {
public:
    EligibilitySet() = default;

    // Non-empty and free of fossil technologies unless `allow_fossil` is set
    // (the crisis variant may include coal and lignite).
    static EligibilitySet of(std::initializer_list<Technology> techs, bool allow_fossil = false) {
        return of(std::vector<Technology>(techs), allow_fossil);
    }

    static EligibilitySet of(const std::vector<Technology>& techs, bool allow_fossil = false) {
        EligibilitySet set;
        for (Technology t : techs) {
            if (!allow_fossil && is_fossil(t)) {
                throw ParameterError("eligibility set must be disjoint from fossil technologies (got " +
                                     std::string(to_string(t)) + ")");
            }
            if (is_gas(t)) {
                throw ParameterError("gas technologies can never be eligible");
            }
            set.bits_.set(index(t));
        }
        if (set.bits_.none()) throw ParameterError("eligibility set must be non-empty");
        return set;
    }

    // Wind, solar, hydro, nuclear, geothermal, biomass and other renewables.
    // Pumped storage is excluded.
    static EligibilitySet default_set() {
        return of({Technology::WindOnshore, Technology::WindOffshore, Technology::Solar,
                   Technology::HydroRunOfRiver, Technology::HydroReservoir, Technology::Nuclear,
                   Technology::Geothermal, Technology::Biomass, Technology::OtherRenewable});
    }

    // Non-gas set for the gas-shock variant.
    static EligibilitySet crisis_default(bool include_coal) {
        auto techs = default_set().members();
        if (include_coal) {
            techs.push_back(Technology::HardCoal);
            techs.push_back(Technology::Lignite);
        }
        return of(techs, true);
    }

    bool contains(Technology t) const { return bits_.test(index(t)); }

    EligibilitySet with(Technology t, bool allow_fossil = false) const {
        auto techs = members();
        techs.push_back(t);
        return of(techs, allow_fossil);
    }

    EligibilitySet without(Technology t) const {
        auto techs = members();
        std::erase(techs, t);
        return of(techs, true);
    }

    std::vector<Technology> members() const {
        std::vector<Technology> out;
        for (Technology t : kAllTechnologies) {
            if (contains(t)) out.push_back(t);
        }
        return out;
    }

    bool operator==(const EligibilitySet&) const = default;

private:
    std::bitset<kTechnologyCount> bits_;
};

// Sum of eligible generation (R_t) in fixed technology order.
inline double eligible_generation(const Generation& gen, const EligibilitySet& eligibility) {
    double total = 0.0;
    for (Technology t : kAllTechnologies) {
        if (eligibility.contains(t)) total += gen[index(t)];
    }
    return total;
}

}  // namespace co2proxy
