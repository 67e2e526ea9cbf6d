#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jumprl/estimators.hpp"

namespace jumprl {

/// One trading day inside a PriceSeries. `prices` holds steps_per_day + 1
/// levels; the first is the previous close when the day itself only has
/// steps_per_day observations.
struct TradingDay {
    std::string date;  // YYYY-MM-DD
    std::vector<double> prices;
};

/// Intraday price observations partitioned into complete trading days.
struct PriceSeries {
    std::vector<std::int64_t> timestamps;  // epoch seconds, strictly ascending
    std::vector<double> prices;
    std::vector<std::string> dates;        // calendar date of each row
    std::size_t bars_per_day = 79;         // increments per complete day
    std::vector<TradingDay> days;
    std::vector<std::string> warnings;     // dropped days and similar
};

/// Parses `timestamp,price` CSV. Timestamps are ISO-8601 with an offset (or
/// `Z`), or integer epoch seconds. Throws IngestError on malformed rows,
/// non-positive prices and unsorted or duplicate timestamps.
PriceSeries read_price_csv(std::istream& in, std::size_t bars_per_day = 79);
PriceSeries read_price_csv_file(const std::string& path, std::size_t bars_per_day = 79);

/// Rebuilds `days` from the row data. A calendar date with more than
/// bars_per_day rows contributes its first bars_per_day + 1 levels; one with
/// exactly bars_per_day rows is prefixed with the previous row's price;
/// anything shorter is dropped with a warning.
void partition_days(PriceSeries& series);

/// (pi / 2) * sum_i |d_i| |d_{i-1}|; needs >= 2 increments.
double bipower_sigma2(std::span<const double> increments);

/// Sum of squared increments.
double realized_variance(std::span<const double> increments);

/// 4 sigma_hat dt^0.47.
double jump_threshold(double sigma_hat, double dt);

/// Zeroes every increment with |dS| >= tau and re-accumulates from the
/// first level.
std::vector<double> threshold_levels(std::span<const double> levels, double tau);
PriceSeries threshold_series(const PriceSeries& series, double tau);

std::vector<double> differences(std::span<const double> levels);
std::vector<double> log_differences(std::span<const double> levels);

struct WealthParams {
    double theta;
    double sigma_hat;
    double target;          // z
    double initial_wealth;  // x0
    double risk_free = 0.0; // per day
    double horizon = 1.0;   // T, in days
};

/// Wealth path X_0..X_n under a_i = -(theta / sigma_hat)(X_i - w(theta)),
/// X_{i+1} = X_i + a_i ((S_{i+1} - S_i) / S_i - r_f dt).
std::vector<double> wealth_path(const WealthParams& params, std::span<const double> day_prices);

struct WealthTrajectory {
    std::vector<double> wealth;
    /// dX_i/dtheta through the policy; empty unless requested.
    std::vector<double> dwealth_dtheta;
};
WealthTrajectory wealth_trajectory(const WealthParams& params, std::span<const double> day_prices,
                                   bool with_tangent);

/// Terminal value of wealth_path.
double simulate_wealth(const WealthParams& params, std::span<const double> day_prices);

/// mean / std * sqrt(periods_per_year) with the sample (n - 1) standard
/// deviation. Throws DegenerateSeriesError for zero spread and
/// InsufficientDataError for fewer than two returns.
double sharpe(std::span<const double> returns, double periods_per_year = 252.0);

enum class ThresholdMode { Raw, Thresholded };
ThresholdMode parse_threshold_mode(std::string_view name);
std::string_view threshold_mode_name(ThresholdMode mode);

struct BacktestConfig {
    std::size_t train_days = 126;
    std::size_t steps_per_day = 79;
    double horizon = 1.0;
    double target = 1.0005;       // z
    double initial_wealth = 1.0;  // x0
    double risk_free = 0.0;       // per day
    double periods_per_year = 252.0;
    /// Per-day theta update: `episodes` full-batch gradient steps over the
    /// replayed window with step `learning_rate`, starting from theta0 on the
    /// first day. `loss_kind` is ignored; rolling_backtest takes it directly.
    TrainConfig learning{.loss_kind = LossKind::MSBVE,
                         .learning_rate = 1e-4,
                         .episodes = 5,
                         .paths_per_episode = 126,
                         .theta0 = 0.1};
    ThresholdMode threshold_mode = ThresholdMode::Raw;
    bool warm_start = true;
    /// Differentiate J_i through the wealth path's dependence on theta as
    /// well as through the value function itself.
    bool path_gradient = false;
    /// Step along grad / loss (the gradient of log loss) so one learning rate
    /// works across the many decades the window loss spans.
    bool normalized_step = true;
    /// |theta| is kept at or above this value (the mean-variance family is
    /// singular at 0).
    double theta_floor = 1e-3;

    void validate() const;
};

struct BacktestResult {
    std::vector<std::string> test_days;
    std::vector<double> terminal_wealth;
    std::vector<double> daily_return;
    std::vector<double> theta_per_day;
    std::vector<double> sigma_hat_per_day;
    /// Empty when the return series has zero spread.
    std::optional<double> sharpe_annualized;
    LossKind loss_kind = LossKind::MSBVE;
    ThresholdMode threshold_mode = ThresholdMode::Raw;
};

/// sigma_hat for a window of days: square root of the mean per-day bipower
/// variance of log price increments.
double window_sigma_hat(std::span<const TradingDay> window);

/// Price-unit sigma_hat for the jump threshold: mean per-day bipower
/// variance of raw price increments.
double window_price_sigma_hat(std::span<const TradingDay> window);

/// One full-batch gradient of the configured loss on the window's replayed
/// wealth paths at theta.
LossGrad window_loss_grad(LossKind kind, double theta, double sigma_hat,
                          std::span<const TradingDay> window, const BacktestConfig& config);

/// Rolling train-then-test backtest advancing one day at a time.
BacktestResult rolling_backtest(const PriceSeries& series, const BacktestConfig& config,
                                LossKind loss_kind);

/// Synthetic 5-minute series: GBM in log-price plus positive jumps of
/// `jump_sigmas` per-bar standard deviations, arriving `jumps_per_day` per
/// day on average. Generated with the jump-diffusion simulator.
struct SyntheticMarket {
    std::size_t days = 160;
    std::size_t bars_per_day = 79;
    double mu_annual = 0.1;
    double sigma_annual = 0.2;
    double jumps_per_day = 0.1;
    double jump_sigmas = 5.0;
    double s0 = 100.0;
    std::uint64_t seed = 1;
};
PriceSeries synthetic_series(const SyntheticMarket& market);

void write_price_csv(std::ostream& out, const PriceSeries& series);

}  // namespace jumprl
