#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "co2proxy/error.hpp"
#include "co2proxy/format.hpp"

namespace co2proxy {

/// Flat `key = value` configuration. Lines starting with '#' are comments;
/// later keys override earlier ones. Key order is kept for prefix scans.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "config") {
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto body = trim(line);
            if (body.empty() || body.front() == '#') continue;
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw DataError(origin + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key(trim(body.substr(0, eq)));
            const std::string value(trim(body.substr(eq + 1)));
            if (key.empty()) throw DataError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.set(key, value);
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open config file '" + path + "'");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) {
        if (!values_.contains(key)) order_.push_back(key);
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    std::string get(const std::string& key, const std::string& fallback = {}) const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        double v = 0.0;
        if (!parse_double(it->second, v)) throw ParameterError("config key '" + key + "' is not a number");
        return v;
    }

    // (suffix, value) for every key starting with `prefix`, in file order.
    std::vector<std::pair<std::string, std::string>> with_prefix(const std::string& prefix) const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& key : order_) {
            if (key.starts_with(prefix)) out.emplace_back(key.substr(prefix.size()), values_.at(key));
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

}  // namespace co2proxy
