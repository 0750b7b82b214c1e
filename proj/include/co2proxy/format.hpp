#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace co2proxy {

// Shortest round-trip decimal in fixed notation ("14120", "115.6").
inline std::string format_exact(double value) {
    if (value == 0.0) return "0";  // also folds -0
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double value, int decimals) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s(buf);
    if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

// Three significant figures, never in exponent notation.
inline std::string format_sig3(double value) {
    if (value == 0.0 || !std::isfinite(value)) return format_fixed(value, 0);
    const double mag = std::fabs(value);
    if (mag >= 1e-4 && mag < 1000.0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%#.3g", value);
        std::string out = buf;
        if (out.find('e') == std::string::npos) {  // 999.6 rounds up into exponent form
            if (out.back() == '.') out.pop_back();
            return out;
        }
    }
    const int exponent = static_cast<int>(std::floor(std::log10(mag)));
    const double scale = std::pow(10.0, exponent - 2);
    const double rounded = std::round(value / scale) * scale;
    return format_fixed(rounded, exponent >= 2 ? 0 : 2 - exponent);
}

inline std::vector<std::string> split(std::string_view text, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(delim, start);
        out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return s.substr(first, last - first + 1);
}

// Strict decimal parse; the whole field must be consumed.
inline bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size() && std::isfinite(out);
}

/// Minimal CSV writer: comma-separated, '\n' line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    CsvWriter& row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            os_ << fields[i];
        }
        os_ << '\n';
        return *this;
    }

private:
    std::ostream& os_;
};

}  // namespace co2proxy
