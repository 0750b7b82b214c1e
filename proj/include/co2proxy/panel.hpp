#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "co2proxy/config.hpp"
#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"
#include "co2proxy/technology.hpp"
#include "co2proxy/timeutil.hpp"

namespace co2proxy {

/// One market hour. Volumes in MWh, price in €/MWh.
struct HourlyRecord {
    sys_seconds timestamp{};  // UTC hour start
    double price = 0.0;
    double load = 0.0;
    Generation generation{};
};

struct Coverage {
    std::size_t rows_read = 0;
    std::size_t rows_used = 0;
    std::size_t hours_present = 0;
    std::size_t hours_spanned = 0;  // first..last hour inclusive
    std::map<std::string, std::size_t> dropped;  // reason -> rows
    std::vector<std::string> warnings;

    std::size_t rows_dropped() const {
        std::size_t n = 0;
        for (const auto& [_, c] : dropped) n += c;
        return n;
    }

    double percent() const {
        return hours_spanned == 0 ? 0.0 : 100.0 * static_cast<double>(hours_present) / static_cast<double>(hours_spanned);
    }
};

/// Hourly panel for one bidding zone, strictly increasing in time.
struct Panel {
    std::string zone;
    TimeZoneRule time_zone;
    std::vector<HourlyRecord> records;
    Coverage coverage;

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }

    /// Sorts by timestamp and enforces the record invariants.
    static Panel from_records(std::string zone, std::vector<HourlyRecord> records,
                              TimeZoneRule tz = TimeZoneRule::utc()) {
        std::stable_sort(records.begin(), records.end(),
                         [](const HourlyRecord& a, const HourlyRecord& b) { return a.timestamp < b.timestamp; });
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (i > 0 && records[i - 1].timestamp == r.timestamp)
                throw DataError("duplicate hour " + format_timestamp(r.timestamp) + " in zone " + zone);
            if (!(r.load >= 0.0)) throw DataError("negative load at " + format_timestamp(r.timestamp));
            for (double g : r.generation)
                if (!(g >= 0.0)) throw DataError("negative generation at " + format_timestamp(r.timestamp));
        }
        Panel p;
        p.zone = std::move(zone);
        p.time_zone = tz;
        p.records = std::move(records);
        p.coverage.rows_read = p.coverage.rows_used = p.coverage.hours_present = p.records.size();
        if (!p.records.empty()) {
            using namespace std::chrono;
            p.coverage.hours_spanned =
                static_cast<std::size_t>(duration_cast<hours>(p.records.back().timestamp - p.records.front().timestamp).count()) + 1;
        }
        return p;
    }
};

/// Column mapping for panel files.
struct SchemaConfig {
    char delimiter = 0;  // 0: detect from the header (';', ',' or tab)
    std::string timestamp_column = "timestamp";
    std::string price_column = "price";
    std::string load_column = "load";
    // Column name (or ENTSO-E production type prefix) -> technology. Several
    // columns may map to one technology; they are summed.
    std::vector<std::pair<std::string, Technology>> technology_columns = default_technology_columns();
    double max_bad_fraction = 0.01;
    std::optional<TimeZoneRule> time_zone;

    static std::vector<std::pair<std::string, Technology>> default_technology_columns() {
        using T = Technology;
        return {
            {"Biomass", T::Biomass},
            {"Fossil Brown coal/Lignite", T::Lignite},
            {"Fossil Coal-derived gas", T::Other},
            {"Fossil Gas", T::GasCCGT},
            {"Fossil Hard coal", T::HardCoal},
            {"Fossil Oil", T::Oil},
            {"Fossil Oil shale", T::Oil},
            {"Fossil Peat", T::Other},
            {"Geothermal", T::Geothermal},
            {"Hydro Pumped Storage", T::PumpedStorage},
            {"Hydro Run-of-river and poundage", T::HydroRunOfRiver},
            {"Hydro Water Reservoir", T::HydroReservoir},
            {"Marine", T::OtherRenewable},
            {"Nuclear", T::Nuclear},
            {"Other renewable", T::OtherRenewable},
            {"Other", T::Other},
            {"Solar", T::Solar},
            {"Waste", T::Other},
            {"Wind Offshore", T::WindOffshore},
            {"Wind Onshore", T::WindOnshore},
        };
    }

    /// Reads delimiter, column.*, tech.*, timezone and max_bad_fraction.
    static SchemaConfig from_config(const KeyValueConfig& cfg) {
        SchemaConfig s;
        if (cfg.has("delimiter")) {
            const auto d = cfg.get("delimiter");
            if (d == "tab" || d == "\\t") s.delimiter = '\t';
            else if (d == "semicolon") s.delimiter = ';';
            else if (d == "comma") s.delimiter = ',';
            else if (d.size() == 1) s.delimiter = d[0];
            else throw ParameterError("bad delimiter '" + d + "'");
        }
        s.timestamp_column = cfg.get("column.timestamp", s.timestamp_column);
        s.price_column = cfg.get("column.price", s.price_column);
        s.load_column = cfg.get("column.load", s.load_column);
        for (const auto& [column, tag] : cfg.with_prefix("tech.")) {
            const auto tech = technology_from_string(tag);
            if (!tech) throw ParameterError("unknown technology '" + tag + "' for column '" + column + "'");
            std::erase_if(s.technology_columns, [&](const auto& e) { return e.first == column; });
            s.technology_columns.emplace_back(column, *tech);
        }
        s.max_bad_fraction = cfg.get_double("max_bad_fraction", s.max_bad_fraction);
        if (cfg.has("timezone")) s.time_zone = parse_time_zone_rule(cfg.get("timezone"));
        return s;
    }
};

namespace detail {

inline std::string normalise_header(std::string_view s) {
    std::string out;
    for (char c : s)
        if (c != '_' && c != ' ' && c != '-') out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

// Production-type columns in ENTSO-E exports carry suffixes such as
// " - Actual Aggregated [MW]".
inline bool header_matches(std::string_view header, std::string_view key) {
    if (header == key) return true;
    if (header.size() > key.size() && header.starts_with(key)) {
        const auto rest = header.substr(key.size());
        return rest.starts_with(" - ") || rest.starts_with(" [") || rest.starts_with(" (");
    }
    return false;
}

inline std::optional<Technology> technology_for_header(std::string_view header, const SchemaConfig& schema) {
    if (header.find("Consumption") != std::string_view::npos) return std::nullopt;
    for (const auto& [key, tech] : schema.technology_columns)
        if (header == key) return tech;
    // Longest prefix wins so "Other renewable" beats "Other".
    std::optional<Technology> best;
    std::size_t best_len = 0;
    for (const auto& [key, tech] : schema.technology_columns) {
        if (header_matches(header, key) && key.size() > best_len) {
            best = tech;
            best_len = key.size();
        }
    }
    if (best) return best;
    const auto norm = normalise_header(header);
    for (Technology t : kAllTechnologies)
        if (normalise_header(to_string(t)) == norm) return t;
    return std::nullopt;
}

inline bool is_missing(std::string_view field) {
    const auto f = trim(field);
    return f.empty() || f == "n/e" || f == "N/A" || f == "NA" || f == "-" || f == "nan" || f == "NaN";
}

inline char detect_delimiter(std::string_view header) {
    if (header.find('\t') != std::string_view::npos) return '\t';
    if (header.find(';') != std::string_view::npos && header.find(',') == std::string_view::npos) return ';';
    return ',';
}

}  // namespace detail

/// Reads a delimiter-separated hourly or sub-hourly file. Rows are grouped by
/// UTC hour: prices are averaged, energy columns summed. Rows missing price
/// or load are dropped and counted. Throws DataError for empty input,
/// duplicate timestamps, or unparsable rows above `max_bad_fraction`.
inline Panel ingest_panel(std::istream& in, const std::string& zone, const SchemaConfig& schema = {},
                          const std::string& origin = "panel") {
    std::string header_line;
    while (std::getline(in, header_line)) {
        if (!trim(header_line).empty()) break;
    }
    if (trim(header_line).empty()) throw DataError(origin + ": no records");
    if (header_line.starts_with("\xEF\xBB\xBF")) header_line.erase(0, 3);

    const char delim = schema.delimiter ? schema.delimiter : detail::detect_delimiter(header_line);
    const auto headers = split(header_line, delim);

    std::optional<std::size_t> ts_col, price_col, load_col;
    std::vector<std::pair<std::size_t, Technology>> tech_cols;
    std::vector<bool> tech_seen(kTechnologyCount, false);
    for (std::size_t i = 0; i < headers.size(); ++i) {
        const std::string h(trim(headers[i]));
        if (h == schema.timestamp_column) ts_col = i;
        else if (h == schema.price_column) price_col = i;
        else if (h == schema.load_column) load_col = i;
        else if (const auto tech = detail::technology_for_header(h, schema)) {
            tech_cols.emplace_back(i, *tech);
            tech_seen[index(*tech)] = true;
        }
    }
    if (!ts_col) throw DataError(origin + ": missing timestamp column '" + schema.timestamp_column + "'");
    if (!price_col) throw DataError(origin + ": missing price column '" + schema.price_column + "'");
    if (!load_col) throw DataError(origin + ": missing load column '" + schema.load_column + "'");

    struct Row {
        sys_seconds ts;
        std::size_t line;
        double price;
        double load;
        Generation gen;
    };
    std::vector<Row> rows;
    Coverage cov;
    std::vector<std::size_t> bad_lines;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        ++cov.rows_read;
        const auto fields = split(line, delim);
        auto bad = [&](const std::string& reason) {
            ++cov.dropped["unparsable: " + reason];
            bad_lines.push_back(lineno);
        };
        if (fields.size() != headers.size()) {
            bad("field count");
            continue;
        }
        const auto ts = parse_timestamp(fields[*ts_col]);
        if (!ts) {
            bad("timestamp");
            continue;
        }
        if (detail::is_missing(fields[*price_col])) {
            ++cov.dropped["missing price"];
            continue;
        }
        if (detail::is_missing(fields[*load_col])) {
            ++cov.dropped["missing load"];
            continue;
        }
        Row row{*ts, lineno, 0.0, 0.0, {}};
        if (!parse_double(fields[*price_col], row.price)) {
            bad("price");
            continue;
        }
        if (!parse_double(fields[*load_col], row.load)) {
            bad("load");
            continue;
        }
        bool ok = true;
        for (const auto& [col, tech] : tech_cols) {
            if (detail::is_missing(fields[col])) continue;
            double v = 0.0;
            if (!parse_double(fields[col], v)) {
                ok = false;
                break;
            }
            row.gen[index(tech)] += v;
        }
        if (!ok) {
            bad("generation");
            continue;
        }
        if (row.load < 0.0) throw DataError(origin + ":" + std::to_string(lineno) + ": negative load");
        for (double g : row.gen)
            if (g < 0.0) throw DataError(origin + ":" + std::to_string(lineno) + ": negative generation");
        rows.push_back(row);
    }
    if (cov.rows_read == 0) throw DataError(origin + ": no records");
    if (static_cast<double>(bad_lines.size()) > schema.max_bad_fraction * static_cast<double>(cov.rows_read)) {
        std::string lines;
        for (std::size_t i = 0; i < bad_lines.size() && i < 10; ++i) lines += (i ? ", " : "") + std::to_string(bad_lines[i]);
        throw DataError(origin + ": " + std::to_string(bad_lines.size()) + " of " + std::to_string(cov.rows_read) +
                        " rows unparsable (lines " + lines + (bad_lines.size() > 10 ? ", ..." : "") + ")");
    }
    if (rows.empty()) throw DataError(origin + ": no usable records");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.ts < b.ts; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].ts == rows[i - 1].ts)
            throw DataError(origin + ": duplicate timestamp " + format_timestamp(rows[i].ts) + " (lines " +
                            std::to_string(rows[i - 1].line) + " and " + std::to_string(rows[i].line) + ")");
    }

    std::vector<HourlyRecord> hours;
    for (std::size_t i = 0; i < rows.size();) {
        const auto hour = std::chrono::floor<std::chrono::hours>(rows[i].ts);
        HourlyRecord rec;
        rec.timestamp = sys_seconds{hour};
        double price_sum = 0.0;
        std::size_t n = 0;
        for (; i < rows.size() && std::chrono::floor<std::chrono::hours>(rows[i].ts) == hour; ++i, ++n) {
            price_sum += rows[i].price;
            rec.load += rows[i].load;
            for (std::size_t k = 0; k < kTechnologyCount; ++k) rec.generation[k] += rows[i].gen[k];
        }
        rec.price = price_sum / static_cast<double>(n);
        hours.push_back(rec);
    }

    const auto tz = schema.time_zone.value_or(TimeZoneRule::for_zone(zone));
    Panel panel = Panel::from_records(zone, std::move(hours), tz);
    cov.rows_used = rows.size();
    cov.hours_present = panel.coverage.hours_present;
    cov.hours_spanned = panel.coverage.hours_spanned;
    for (Technology t : EligibilitySet::default_set().members()) {
        if (!tech_seen[index(t)])
            cov.warnings.push_back("no column for " + std::string(to_string(t)) + "; treated as zero");
    }
    panel.coverage = std::move(cov);
    return panel;
}

inline Panel ingest_panel_file(const std::string& path, const std::string& zone, const SchemaConfig& schema = {}) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open panel file '" + path + "'");
    return ingest_panel(in, zone, schema, path);
}

}  // namespace co2proxy
