#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "jumprl/cli.hpp"
#include "jumprl/error.hpp"

namespace jumprl::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* kind) {
    throw ConfigError("setting '" + key + "' = '" + value + "' is not a valid " + kind);
}

}  // namespace

void ExperimentConfig::merge(const ExperimentConfig& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) bad_value(key, s, "number");
    return v;
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    std::int64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) bad_value(key, s, "integer");
    return v;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        bad_value(key, s, "unsigned integer");
    }
    return v;
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& s = it->second;
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, s, "boolean");
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key,
                                                    const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> out;
    std::string_view rest = it->second;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item = trim(rest.substr(0, comma));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string row = trim(line);
        if (row.empty()) continue;
        const auto eq = row.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value', got '" + row + "'");
        }
        const std::string key = trim(row.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.set(key, trim(row.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<std::string> preset_names() {
    return {"paper-sim", "paper-linear", "paper-quadratic", "paper-exponential",
            "paper-backtest"};
}

ExperimentConfig preset(std::string_view name) {
    ExperimentConfig cfg;
    // The simulation study: dX = dW + X_{t-} dN on [0, 1], X_0 = 0.1,
    // dt = 0.001, alpha = 0.0005, theta0 = 0.5, 100000 episodes x 32 paths.
    auto simulation_study = [&cfg](const char* family) {
        cfg.set("sde", "paper-sim");
        cfg.set("horizon", "1");
        cfg.set("dt", "0.001");
        cfg.set("alpha", "0.0005");
        cfg.set("theta0", "0.5");
        cfg.set("episodes", "100000");
        cfg.set("paths", "32");
        if (family != nullptr) cfg.set("family", family);
    };
    if (name == "paper-sim") {
        simulation_study(nullptr);
    } else if (name == "paper-linear") {
        simulation_study("linear");
    } else if (name == "paper-quadratic") {
        simulation_study("quadratic");
    } else if (name == "paper-exponential") {
        simulation_study("exponential");
    } else if (name == "paper-backtest") {
        cfg.set("train-days", "126");
        cfg.set("steps-per-day", "79");
        cfg.set("horizon", "1");
    } else {
        std::string known;
        for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
        throw ConfigError("unknown preset '" + std::string(name) + "'; known presets: " + known);
    }
    cfg.set("preset", std::string(name));
    return cfg;
}

}  // namespace jumprl::cli
