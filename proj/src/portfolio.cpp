#include "jumprl/portfolio.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "jumprl/error.hpp"
#include "jumprl/value_model.hpp"

namespace jumprl {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string date_of(std::int64_t epoch) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_seconds{seconds{epoch}})};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin() + (s.front() == '-' ? 1 : 0), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
}

struct ParsedTime {
    std::int64_t epoch;
    std::string date;
};

// YYYY-MM-DD[T ]HH:MM[:SS[.frac]](Z|+HH:MM|-HH:MM|+HHMM), or epoch seconds.
ParsedTime parse_timestamp(std::string_view text, std::size_t line) {
    const auto fail = [&]() -> IngestError {
        return IngestError("line " + std::to_string(line) + ": unparseable timestamp '" +
                           std::string(text) + "'");
    };
    if (all_digits(text)) {
        std::int64_t v = 0;
        const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
        if (r.ec != std::errc{}) throw fail();
        return {v, date_of(v)};
    }
    int y, mo, d, h, mi;
    double sec = 0.0;
    int consumed = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%*1[T ]%2d:%2d%n", &y, &mo, &d, &h, &mi, &consumed) < 5) {
        throw fail();
    }
    std::size_t pos = static_cast<std::size_t>(consumed);
    if (pos < s.size() && s[pos] == ':') {
        int used = 0;
        if (std::sscanf(s.c_str() + pos + 1, "%lf%n", &sec, &used) < 1) throw fail();
        pos += 1 + static_cast<std::size_t>(used);
    }
    int offset_min = 0;
    if (pos < s.size()) {
        const char sign = s[pos];
        if (sign == 'Z' && pos + 1 == s.size()) {
            offset_min = 0;
        } else if (sign == '+' || sign == '-') {
            int oh = 0, om = 0;
            const std::string rest = s.substr(pos + 1);
            if (std::sscanf(rest.c_str(), "%2d:%2d", &oh, &om) != 2 &&
                std::sscanf(rest.c_str(), "%2d%2d", &oh, &om) != 2) {
                throw fail();
            }
            offset_min = (sign == '-' ? -1 : 1) * (oh * 60 + om);
        } else {
            throw fail();
        }
    } else {
        throw IngestError("line " + std::to_string(line) + ": timestamp '" + s +
                          "' lacks a timezone offset");
    }
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec < 0.0 || sec >= 61.0) throw fail();
    const auto local = sys_days{ymd}.time_since_epoch().count() * 86400LL + h * 3600LL +
                       mi * 60LL + static_cast<std::int64_t>(std::floor(sec));
    return {local - offset_min * 60LL, s.substr(0, 10)};
}

}  // namespace

PriceSeries read_price_csv(std::istream& in, std::size_t bars_per_day) {
    if (bars_per_day < 2) throw ConfigError("bars per day must be at least 2");
    PriceSeries series;
    series.bars_per_day = bars_per_day;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty() || row.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (row != "timestamp,price") {
                throw IngestError("expected header 'timestamp,price', got '" + row + "'");
            }
            continue;
        }
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw IngestError("line " + std::to_string(line_no) + ": expected two fields");
        }
        const auto ts = parse_timestamp(trim(row.substr(0, comma)), line_no);
        const std::string price_text = trim(row.substr(comma + 1));
        double price = 0.0;
        const auto r =
            std::from_chars(price_text.data(), price_text.data() + price_text.size(), price);
        if (r.ec != std::errc{} || r.ptr != price_text.data() + price_text.size()) {
            throw IngestError("line " + std::to_string(line_no) + ": bad price '" + price_text +
                              "'");
        }
        if (!(price > 0.0) || !std::isfinite(price)) {
            throw IngestError("line " + std::to_string(line_no) + ": price must be positive");
        }
        if (!series.timestamps.empty() && ts.epoch <= series.timestamps.back()) {
            throw IngestError("line " + std::to_string(line_no) +
                              (ts.epoch == series.timestamps.back() ? ": duplicate timestamp"
                                                                    : ": timestamps not ascending"));
        }
        series.timestamps.push_back(ts.epoch);
        series.prices.push_back(price);
        series.dates.push_back(ts.date);
    }
    if (!header_seen) throw IngestError("price file is empty");
    partition_days(series);
    return series;
}

PriceSeries read_price_csv_file(const std::string& path, std::size_t bars_per_day) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open price file '" + path + "'");
    return read_price_csv(in, bars_per_day);
}

void partition_days(PriceSeries& series) {
    series.days.clear();
    const std::size_t n = series.prices.size();
    const std::size_t need = series.bars_per_day;
    std::size_t begin = 0;
    while (begin < n) {
        std::size_t end = begin;
        while (end < n && series.dates[end] == series.dates[begin]) ++end;
        const std::size_t rows = end - begin;
        TradingDay day{series.dates[begin], {}};
        if (rows >= need + 1) {
            day.prices.assign(series.prices.begin() + static_cast<std::ptrdiff_t>(begin),
                              series.prices.begin() + static_cast<std::ptrdiff_t>(begin + need + 1));
        } else if (rows == need && begin > 0) {
            day.prices.push_back(series.prices[begin - 1]);
            day.prices.insert(day.prices.end(),
                              series.prices.begin() + static_cast<std::ptrdiff_t>(begin),
                              series.prices.begin() + static_cast<std::ptrdiff_t>(end));
        } else {
            series.warnings.push_back("dropped " + day.date + ": " + std::to_string(rows) +
                                      " observations, need " + std::to_string(need) +
                                      " increments");
        }
        if (!day.prices.empty()) series.days.push_back(std::move(day));
        begin = end;
    }
}

double bipower_sigma2(std::span<const double> increments) {
    if (increments.size() < 2) {
        throw InsufficientDataError("bipower variation", increments.size(), 2);
    }
    double acc = 0.0;
    for (std::size_t i = 1; i < increments.size(); ++i) {
        acc += std::abs(increments[i]) * std::abs(increments[i - 1]);
    }
    return 0.5 * std::numbers::pi * acc;
}

double realized_variance(std::span<const double> increments) {
    return std::inner_product(increments.begin(), increments.end(), increments.begin(), 0.0);
}

double jump_threshold(double sigma_hat, double dt) {
    return 4.0 * sigma_hat * std::pow(dt, 0.47);
}

std::vector<double> differences(std::span<const double> levels) {
    std::vector<double> out;
    if (levels.size() < 2) return out;
    out.reserve(levels.size() - 1);
    for (std::size_t i = 1; i < levels.size(); ++i) out.push_back(levels[i] - levels[i - 1]);
    return out;
}

std::vector<double> log_differences(std::span<const double> levels) {
    std::vector<double> out;
    if (levels.size() < 2) return out;
    out.reserve(levels.size() - 1);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        out.push_back(std::log(levels[i] / levels[i - 1]));
    }
    return out;
}

std::vector<double> threshold_levels(std::span<const double> levels, double tau) {
    std::vector<double> out(levels.begin(), levels.end());
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double d = levels[i] - levels[i - 1];
        out[i] = out[i - 1] + (std::abs(d) < tau ? d : 0.0);
    }
    return out;
}

PriceSeries threshold_series(const PriceSeries& series, double tau) {
    PriceSeries out = series;
    out.prices = threshold_levels(series.prices, tau);
    for (auto& day : out.days) day.prices = threshold_levels(day.prices, tau);
    return out;
}

WealthTrajectory wealth_trajectory(const WealthParams& p, std::span<const double> day_prices,
                                   bool with_tangent) {
    if (!(p.sigma_hat > 0.0)) throw ConfigError("policy needs sigma_hat > 0");
    if (day_prices.size() < 2) throw InsufficientDataError("wealth simulation", day_prices.size(), 2);
    const double w = w_of(p.theta, p.target, p.initial_wealth, p.horizon);
    const double dw = with_tangent ? dw_dtheta(p.theta, p.target, p.initial_wealth, p.horizon) : 0.0;
    const double gain = p.theta / p.sigma_hat;
    const double rf_step = p.risk_free * p.horizon / static_cast<double>(day_prices.size() - 1);
    WealthTrajectory out;
    out.wealth.resize(day_prices.size());
    if (with_tangent) out.dwealth_dtheta.assign(day_prices.size(), 0.0);
    auto& x = out.wealth;
    x[0] = p.initial_wealth;
    for (std::size_t i = 0; i + 1 < day_prices.size(); ++i) {
        const double excess = (day_prices[i + 1] - day_prices[i]) / day_prices[i] - rf_step;
        const double a = -gain * (x[i] - w);
        x[i + 1] = x[i] + a * excess;
        if (with_tangent) {
            auto& dx = out.dwealth_dtheta;
            const double da = -(x[i] - w) / p.sigma_hat - gain * (dx[i] - dw);
            dx[i + 1] = dx[i] + da * excess;
        }
        if (!std::isfinite(x[i + 1])) {
            throw NumericalError("wealth diverged at bar " + std::to_string(i + 1));
        }
    }
    return out;
}

std::vector<double> wealth_path(const WealthParams& params, std::span<const double> day_prices) {
    return wealth_trajectory(params, day_prices, false).wealth;
}

double simulate_wealth(const WealthParams& params, std::span<const double> day_prices) {
    return wealth_path(params, day_prices).back();
}

double sharpe(std::span<const double> returns, double periods_per_year) {
    if (returns.size() < 2) throw InsufficientDataError("sharpe ratio", returns.size(), 2);
    const double n = static_cast<double>(returns.size());
    const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / n;
    double ss = 0.0;
    for (const double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 1e-15 * std::max(1.0, std::abs(mean)))) {
        throw DegenerateSeriesError("sharpe ratio undefined: returns have zero spread");
    }
    return mean / sd * std::sqrt(periods_per_year);
}

ThresholdMode parse_threshold_mode(std::string_view name) {
    if (name == "raw") return ThresholdMode::Raw;
    if (name == "thresholded") return ThresholdMode::Thresholded;
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected raw | thresholded)");
}

std::string_view threshold_mode_name(ThresholdMode mode) {
    return mode == ThresholdMode::Raw ? "raw" : "thresholded";
}

void BacktestConfig::validate() const {
    if (train_days < 2) throw ConfigError("train_days must be at least 2");
    if (steps_per_day < 2) throw ConfigError("steps_per_day must be at least 2");
    if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (target == initial_wealth) throw ConfigError("target wealth z must differ from x0");
    if (!(theta_floor > 0.0)) throw ConfigError("theta floor must be positive");
    learning.validate();
}

double window_sigma_hat(std::span<const TradingDay> window) {
    double acc = 0.0;
    for (const auto& day : window) acc += bipower_sigma2(log_differences(day.prices));
    return std::sqrt(acc / static_cast<double>(window.size()));
}

double window_price_sigma_hat(std::span<const TradingDay> window) {
    double acc = 0.0;
    for (const auto& day : window) acc += bipower_sigma2(differences(day.prices));
    return std::sqrt(acc / static_cast<double>(window.size()));
}

LossGrad window_loss_grad(LossKind kind, double theta, double sigma_hat,
                          std::span<const TradingDay> window, const BacktestConfig& config) {
    const ValueModel model = ValueModel::mean_variance(
        {config.target, config.initial_wealth, config.horizon});
    const TimeGrid grid = build_grid(config.horizon, config.steps_per_day);
    const WealthParams wp{theta, sigma_hat, config.target, config.initial_wealth,
                          config.risk_free, config.horizon};
    LossGrad total{0.0, 0.0};
    std::vector<double> values(grid.n_steps() + 1);
    std::vector<double> dvalues(values.size());
    for (const auto& day : window) {
        const WealthTrajectory traj = wealth_trajectory(wp, day.prices, config.path_gradient);
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double t = grid[i];
            const double x = traj.wealth[i];
            values[i] = model.value(theta, t, x);
            dvalues[i] = model.dvalue_dtheta(theta, t, x);
            if (config.path_gradient) {
                dvalues[i] += model.dvalue_dx(theta, t, x) * traj.dwealth_dtheta[i];
            }
        }
        const LossGrad lg = loss_and_grad(kind, values, dvalues);
        total.loss += lg.loss;
        total.grad += lg.grad;
    }
    const double n = static_cast<double>(window.size());
    return {total.loss / n, total.grad / n};
}

namespace {

double keep_off_singularity(double theta, double floor) {
    if (std::abs(theta) >= floor) return theta;
    return theta < 0.0 ? -floor : floor;
}

}  // namespace

BacktestResult rolling_backtest(const PriceSeries& series, const BacktestConfig& config,
                                LossKind loss_kind) {
    config.validate();
    if (series.bars_per_day != config.steps_per_day) {
        throw ConfigError("series has " + std::to_string(series.bars_per_day) +
                          " bars per day but the backtest expects " +
                          std::to_string(config.steps_per_day));
    }
    const auto& days = series.days;
    if (days.size() < config.train_days + 1) {
        throw InsufficientDataError("rolling backtest (complete trading days)", days.size(),
                                    config.train_days + 1);
    }

    BacktestResult result;
    result.loss_kind = loss_kind;
    result.threshold_mode = config.threshold_mode;
    const double dt = config.horizon / static_cast<double>(config.steps_per_day);
    double theta = keep_off_singularity(config.learning.theta0, config.theta_floor);

    for (std::size_t d = config.train_days; d < days.size(); ++d) {
        std::vector<TradingDay> window(days.begin() + static_cast<std::ptrdiff_t>(d - config.train_days),
                                       days.begin() + static_cast<std::ptrdiff_t>(d));
        TradingDay test_day = days[d];
        if (config.threshold_mode == ThresholdMode::Thresholded) {
            const double tau = jump_threshold(window_price_sigma_hat(window), dt);
            for (auto& day : window) day.prices = threshold_levels(day.prices, tau);
            test_day.prices = threshold_levels(test_day.prices, tau);
        }
        const double sigma_hat = window_sigma_hat(window);
        if (!(sigma_hat > 0.0)) {
            throw DegenerateSeriesError("window ending " + test_day.date +
                                        " has zero estimated volatility");
        }

        if (!config.warm_start) {
            theta = keep_off_singularity(config.learning.theta0, config.theta_floor);
        }
        for (std::size_t step = 0; step < config.learning.episodes; ++step) {
            const LossGrad lg = window_loss_grad(loss_kind, theta, sigma_hat, window, config);
            double direction = lg.grad;
            if (config.normalized_step) {
                if (!(lg.loss > 0.0)) break;
                direction /= lg.loss;
            }
            const double next = theta - config.learning.learning_rate * direction;
            if (!std::isfinite(next)) {
                throw NumericalError("theta update diverged on " + test_day.date);
            }
            theta = keep_off_singularity(next, config.theta_floor);
        }

        const WealthParams wp{theta, sigma_hat, config.target, config.initial_wealth,
                              config.risk_free, config.horizon};
        const double xt = simulate_wealth(wp, test_day.prices);
        result.test_days.push_back(test_day.date);
        result.terminal_wealth.push_back(xt);
        result.daily_return.push_back((xt - config.initial_wealth) / config.initial_wealth -
                                      config.risk_free);
        result.theta_per_day.push_back(theta);
        result.sigma_hat_per_day.push_back(sigma_hat);
    }
    try {
        result.sharpe_annualized = sharpe(result.daily_return, config.periods_per_year);
    } catch (const DegenerateSeriesError&) {
        result.sharpe_annualized.reset();
    } catch (const InsufficientDataError&) {
        result.sharpe_annualized.reset();
    }
    return result;
}

PriceSeries synthetic_series(const SyntheticMarket& m) {
    // Time unit is one trading day; the log-price is a jump-diffusion.
    const double sigma_day = m.sigma_annual / std::sqrt(252.0);
    const double mu_day = m.mu_annual / 252.0;
    const std::size_t bars = m.bars_per_day;
    const double bar_sd = sigma_day / std::sqrt(static_cast<double>(bars));
    const TimeGrid grid = build_grid(1.0, bars);
    JumpDiffusionSpec spec = constant_spec(mu_day - 0.5 * sigma_day * sigma_day, sigma_day, 0.0,
                                           PoissonRate{m.jumps_per_day}, m.jump_sigmas * bar_sd);

    PriceSeries series;
    series.bars_per_day = bars;
    using namespace std::chrono;
    // Bars 09:30..16:00 New York time (UTC-5); each day's first increment
    // runs from the previous close. A lone seed row on the eve of the first
    // day supplies that close and is dropped by the partition.
    constexpr std::int64_t kOpenUtc = (14 * 60 + 30) * 60;
    sys_days date = sys_days{year{2013} / January / 2};
    auto push = [&](std::int64_t ts, double price) {
        series.timestamps.push_back(ts);
        series.prices.push_back(price);
        series.dates.push_back(date_of(ts));
    };
    push((date - days{1}).time_since_epoch().count() * 86400LL + kOpenUtc + 390 * 60, m.s0);
    double log_level = std::log(m.s0);
    for (std::size_t d = 0; d < m.days; ++d) {
        while (weekday{date} == Saturday || weekday{date} == Sunday) date += days{1};
        const PathSample path = simulate_path(spec, grid, CounterRng(m.seed, d, 0));
        const std::int64_t open = date.time_since_epoch().count() * 86400LL + kOpenUtc;
        for (std::size_t i = 1; i <= bars; ++i) {
            push(open + static_cast<std::int64_t>(i - 1) * 300, std::exp(log_level + path.observed[i]));
        }
        log_level += path.observed[bars];
        date += days{1};
    }
    partition_days(series);
    return series;
}

void write_price_csv(std::ostream& out, const PriceSeries& series) {
    out << "timestamp,price\n";
    for (std::size_t i = 0; i < series.prices.size(); ++i) {
        out << series.timestamps[i] << ',' << format_double(series.prices[i]) << '\n';
    }
}

}  // namespace jumprl
