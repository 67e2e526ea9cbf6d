#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jumprl::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;

/// Layered key-value settings: preset < config file < command-line flags.
///
/// Config files hold one `key = value` per line; `#` starts a comment and
/// blank lines are ignored. Keys match the long flag names without the
/// leading dashes (`family = quadratic`, `episodes = 5000`).
class ExperimentConfig {
public:
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    bool has(const std::string& key) const { return values_.contains(key); }
    /// Entries of `other` replace ours.
    void merge(const ExperimentConfig& other);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; an empty value yields an empty list.
    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

/// Throws ConfigError on a line that is not `key = value`.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config_file(const std::string& path);

/// Named settings bundles. Throws ConfigError listing the known presets.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

int cmd_simulate(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_backtest(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (`jumprl <command> [flags]`) and dispatches. Never throws;
/// failures map to the exit codes above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jumprl::cli
