#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"

namespace co2proxy {

using std::chrono::sys_seconds;
using std::chrono::sys_days;

namespace detail {

inline bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

}  // namespace detail

inline std::optional<sys_days> parse_date(std::string_view s) {
    s = trim(s);
    int y = 0, m = 0, d = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!detail::read_int(s, 0, 4, y) || !detail::read_int(s, 5, 2, m) || !detail::read_int(s, 8, 2, d))
        return std::nullopt;
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

/// Parses "YYYY-MM-DD[T| ]HH:MM[:SS][Z|±HH:MM]" into UTC. A missing offset
/// means UTC.
inline std::optional<sys_seconds> parse_timestamp(std::string_view s) {
    s = trim(s);
    const auto day = parse_date(s);
    if (!day) return std::nullopt;
    if (s.size() == 10) return sys_seconds{*day};
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!detail::read_int(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !detail::read_int(s, 14, 2, mm))
        return std::nullopt;
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        if (!detail::read_int(s, pos + 1, 2, ss)) return std::nullopt;
        pos += 3;
        if (pos < s.size() && s[pos] == '.') {  // fractional seconds are ignored
            ++pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        }
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    int offset_min = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
        } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
            int oh = 0, om = 0;
            if (!detail::read_int(s, pos + 1, 2, oh) || !detail::read_int(s, pos + 4, 2, om)) return std::nullopt;
            offset_min = (s[pos] == '-' ? -1 : 1) * (oh * 60 + om);
        } else {
            return std::nullopt;
        }
    }
    using namespace std::chrono;
    return sys_seconds{*day} + hours{hh} + minutes{mm} + seconds{ss} - minutes{offset_min};
}

inline std::string format_date(sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::string format_timestamp(sys_seconds t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(day).c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

/// UTC -> zone-local clock rule: a fixed standard offset plus optional EU
/// summer time (last Sunday of March 01:00 UTC to last Sunday of October
/// 01:00 UTC).
struct TimeZoneRule {
    int standard_offset_minutes = 0;
    bool eu_dst = false;

    static TimeZoneRule utc() { return {}; }
    static TimeZoneRule central_european() { return {60, true}; }

    // Default rule for a bidding-zone code.
    static TimeZoneRule for_zone(std::string_view zone) {
        if (zone == "AT" || zone == "DE" || zone == "DE_LU" || zone == "DE-LU") return central_european();
        return utc();
    }

    std::chrono::minutes offset_at(sys_seconds t) const {
        using namespace std::chrono;
        int total = standard_offset_minutes;
        if (eu_dst) {
            const year y = year_month_day{floor<days>(t)}.year();
            const sys_seconds start = sys_days{y / March / Sunday[last]} + hours{1};
            const sys_seconds end = sys_days{y / October / Sunday[last]} + hours{1};
            if (t >= start && t < end) total += 60;
        }
        return minutes{total};
    }

    // Local wall-clock time expressed on the sys_seconds axis.
    sys_seconds to_local(sys_seconds t) const { return t + offset_at(t); }

    int local_hour(sys_seconds t) const {
        using namespace std::chrono;
        const auto local = to_local(t);
        return static_cast<int>(duration_cast<hours>(local - floor<days>(local)).count());
    }

    sys_days local_date(sys_seconds t) const { return std::chrono::floor<std::chrono::days>(to_local(t)); }

    std::string describe() const {
        if (standard_offset_minutes == 0 && !eu_dst) return "UTC";
        return "UTC" + std::string(standard_offset_minutes < 0 ? "-" : "+") +
               format_exact(std::abs(standard_offset_minutes) / 60.0) + (eu_dst ? "/EU-DST" : "");
    }
};

/// Parses "UTC", "CET" or "UTC+H[/EU]" (H may be fractional hours).
inline TimeZoneRule parse_time_zone_rule(std::string_view text) {
    text = trim(text);
    if (text == "UTC" || text == "utc") return TimeZoneRule::utc();
    if (text == "CET" || text == "Europe/Vienna" || text == "Europe/Berlin") return TimeZoneRule::central_european();
    if (text.starts_with("UTC") && text.size() > 4 && (text[3] == '+' || text[3] == '-')) {
        std::string_view rest = text.substr(4);
        bool dst = false;
        if (const auto slash = rest.find('/'); slash != std::string_view::npos) {
            const auto suffix = rest.substr(slash + 1);
            if (suffix != "EU" && suffix != "EU-DST") throw ParameterError("unknown DST rule in '" + std::string(text) + "'");
            dst = true;
            rest = rest.substr(0, slash);
        }
        double hours = 0.0;
        if (!parse_double(rest, hours)) throw ParameterError("bad UTC offset in '" + std::string(text) + "'");
        const int minutes = static_cast<int>(std::lround(hours * 60.0)) * (text[3] == '-' ? -1 : 1);
        return {minutes, dst};
    }
    throw ParameterError("unrecognised time zone rule '" + std::string(text) + "'");
}

struct IsoWeek {
    int year = 0;
    unsigned week = 0;

    auto operator<=>(const IsoWeek&) const = default;

    std::string label() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-W%02u", year, week);
        return buf;
    }
};

inline IsoWeek iso_week(sys_days day) {
    using namespace std::chrono;
    // The ISO year is the year of the Thursday in the same Monday-based week.
    const weekday wd{day};
    const int iso_wd = static_cast<int>(wd.iso_encoding());  // Mon=1..Sun=7
    const sys_days thursday = day + days{4 - iso_wd};
    const year y = year_month_day{thursday}.year();
    const sys_days jan1{y / January / 1};
    const auto ordinal = (thursday - jan1).count();
    return {static_cast<int>(y), static_cast<unsigned>(ordinal / 7 + 1)};
}

}  // namespace co2proxy
