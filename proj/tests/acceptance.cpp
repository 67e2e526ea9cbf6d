// Acceptance harness: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Pass criterion ids (e.g. `AC4 AC6`) to run a
// subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "jumprl/estimators.hpp"
#include "jumprl/oracles.hpp"
#include "jumprl/portfolio.hpp"
#include "jumprl/sde.hpp"

using namespace jumprl;

namespace {

// Tolerances and run sizes fixed by the acceptance criteria.
constexpr double kConvergenceTol = 0.1;
constexpr double kScanTol = 0.03;
constexpr std::size_t kScanPaths = 20000;
constexpr std::size_t kScanSteps = 1000;
constexpr double kBipowerTol = 0.05;
constexpr double kBipowerJumpShift = 0.02;
constexpr double kRatioCeiling = 0.05;
constexpr double kGradTol = 1e-6;
constexpr int kPropertyCases = 1000;
constexpr int kReplications = 20;
constexpr double kWinShare = 0.7;
constexpr double kRunBudgetSeconds = 120.0;
constexpr double kScanBudgetSeconds = 600.0;

// Seed used for every stochastic acceptance run.
constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Fit {
    double theta;
    double seconds;
};

Fit desk_fit(const ValueModel& model, LossKind kind) {
    TrainConfig cfg;
    cfg.loss_kind = kind;
    cfg.learning_rate = 0.0005;
    cfg.episodes = 20000;
    cfg.paths_per_episode = 32;
    cfg.theta0 = 0.5;
    cfg.master_seed = kSeed;
    cfg.record_every = 1000;
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult r = train(model, paper_sim_spec(), build_grid(1.0, 100), cfg);
    return {r.theta_final, seconds_since(t0)};
}

Outcome ac1() {
    const Fit bv = desk_fit(ValueModel::linear(), LossKind::MSBVE);
    const Fit td = desk_fit(ValueModel::linear(), LossKind::MSTDE);
    const double t_bv = -1.5, t_td = -403.0 / 252.0;
    const bool ok = std::abs(bv.theta - t_bv) <= kConvergenceTol &&
                    std::abs(td.theta - t_td) <= kConvergenceTol &&
                    std::max(bv.seconds, td.seconds) < kRunBudgetSeconds;
    return {ok, fmt("msbve %.4f (target %.4f), mstde %.4f (target %.4f), slowest run %.1fs",
                    bv.theta, t_bv, td.theta, t_td, std::max(bv.seconds, td.seconds))};
}

Outcome ac2() {
    const Fit bv = desk_fit(ValueModel::quadratic(), LossKind::MSBVE);
    const Fit td = desk_fit(ValueModel::quadratic(), LossKind::MSTDE);
    const double t_bv = -40.0 / 167.0, t_td = -8545.0 / 45059.0, oracle = -15.0 / 52.0;
    const double gap_bv = std::abs(bv.theta - oracle), gap_td = std::abs(td.theta - oracle);
    const bool ok = std::abs(bv.theta - t_bv) <= kConvergenceTol &&
                    std::abs(td.theta - t_td) <= kConvergenceTol && gap_bv < gap_td;
    return {ok, fmt("msbve %.4f (target %.4f), mstde %.4f (target %.4f), "
                    "oracle gaps %.4f < %.4f",
                    bv.theta, t_bv, td.theta, t_td, gap_bv, gap_td)};
}

Outcome ac3() {
    const Fit bv = desk_fit(ValueModel::exponential(), LossKind::MSBVE);
    const Fit td = desk_fit(ValueModel::exponential(), LossKind::MSTDE);
    const double t_bv = -0.260, t_td = -0.195;
    const bool conv = std::abs(bv.theta - t_bv) <= kConvergenceTol &&
                      std::abs(td.theta - t_td) <= kConvergenceTol;
    // Printed coefficients, compared at their printed precision (half a unit
    // in the last printed digit).
    const LimitObjectives e = exponential_objectives();
    const double printed[4] = {3.190, 1.657, 7.607, 2.965};
    const double computed[4] = {e.msbve.a, e.msbve.b, e.mstde.a, e.mstde.b};
    bool coeffs = true;
    for (int i = 0; i < 4; ++i) coeffs = coeffs && std::abs(computed[i] - printed[i]) <= 5e-4;
    return {conv && coeffs,
            fmt("msbve %.4f (target %.3f), mstde %.4f (target %.3f) [%s]; coefficients "
                "%.6f/%.6f/%.6f/%.6f vs printed 3.190/1.657/7.607/2.965 [%s]",
                bv.theta, t_bv, td.theta, t_td, conv ? "ok" : "off", computed[0], computed[1],
                computed[2], computed[3], coeffs ? "ok" : "mismatch")};
}

Outcome ac4() {
    const TimeGrid grid = build_grid(1.0, kScanSteps);
    const MinimizerTable refs = reference_minimizers();
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& [family, model] :
         {std::pair{ValueFamily::Linear, ValueModel::linear()},
          std::pair{ValueFamily::Quadratic, ValueModel::quadratic()}}) {
        for (Method m : {Method::MSBVE, Method::MSTDE, Method::Oracle}) {
            const double ref = refs.at(family, m);
            const ScanResult s = scan_mc_minimizer(model, m, paper_sim_spec(), grid, kScanPaths,
                                                   kSeed, ref - 1.0, ref + 1.0, 0.05, 1e-3);
            const bool cell = std::abs(s.argmin - ref) <= kScanTol;
            ok = ok && cell;
            detail += fmt("%s/%s %.4f vs %.4f%s; ", std::string(family_name(family)).c_str(),
                          std::string(method_name(m)).c_str(), s.argmin, ref, cell ? "" : " (off)");
        }
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < kScanBudgetSeconds;
    return {ok, detail + fmt("%.0fs total", secs)};
}

Outcome ac5() {
    const TimeGrid grid = build_grid(1.0, 10000);
    const JumpDiffusionSpec bm = constant_spec(0.0, 1.0, 0.0);
    double bv = 0.0, bv_shift = 0.0, qv_shift = 0.0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        const PathSample p = simulate_path(bm, grid, CounterRng(kSeed, 5, static_cast<std::uint64_t>(s)));
        std::vector<double> inc = differences(p.observed);
        const double bv0 = bipower_sigma2(inc);
        const double qv0 = realized_variance(inc);
        inc[inc.size() / 2] += 1.0;
        bv += bv0;
        bv_shift += std::abs(bipower_sigma2(inc) - bv0);
        qv_shift += realized_variance(inc) - qv0;
    }
    bv /= seeds;
    bv_shift /= seeds;
    qv_shift /= seeds;
    const bool consistent = std::abs(bv - 1.0) <= kBipowerTol;
    const bool robust = bv_shift < kBipowerJumpShift * bv;
    const bool qv_moves = std::abs(qv_shift - 1.0) <= 0.1;
    return {consistent && robust && qv_moves,
            fmt("mean sigma2 %.4f (1 +/- 5%%) [%s]; jump shift %.4f = %.2f%% (< 2%%) [%s]; "
                "QV shift %.4f (~1) [%s]",
                bv, consistent ? "ok" : "off", bv_shift, 100.0 * bv_shift / bv,
                robust ? "ok" : "off", qv_shift, qv_moves ? "ok" : "off")};
}

double jump_ratio(std::size_t n, int seeds) {
    const ValueModel model = ValueModel::linear();
    const TimeGrid grid = build_grid(1.0, n);
    const JumpDiffusionSpec bm = constant_spec(0.0, 1.0, 0.0);
    double acc = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const PathSample cont =
            simulate_path(bm, grid, CounterRng(kSeed, 6, static_cast<std::uint64_t>(s)));
        PathSample jump = cont;
        for (std::size_t i = n / 2; i <= n; ++i) jump.observed[i] += 1.0;
        const auto vc = path_values(model, 0.5, cont);
        const auto vj = path_values(model, 0.5, jump);
        acc += (msbve_loss(vj) - msbve_loss(vc)) / (mstde_loss(vj) - mstde_loss(vc));
    }
    return acc / seeds;
}

Outcome ac6() {
    const double r2 = jump_ratio(100, 200), r3 = jump_ratio(1000, 200), r4 = jump_ratio(10000, 200);
    const bool ok = r2 > r3 && r3 > r4 && r4 < kRatioCeiling;
    return {ok, fmt("R(1e-2) %.4f > R(1e-3) %.4f > R(1e-4) %.4f, R(1e-4) < 0.05", r2, r3, r4)};
}

Outcome ac7() {
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> th(-1.5, 1.0), ts(0.0, 1.0), xs(-2.0, 2.0);
    const double h = 1e-6;
    const TimeGrid grid = build_grid(1.0, 50);
    double worst_td = 0.0, worst_bv = 0.0, worst_model = 0.0;
    int smooth_paths = 0;
    const std::vector<ValueModel> families{ValueModel::linear(), ValueModel::quadratic(),
                                           ValueModel::exponential()};
    for (int k = 0; k < 200; ++k) {
        const ValueModel& model = families[static_cast<std::size_t>(k) % families.size()];
        const PathSample path = simulate_path(constant_spec(0.0, 1.0, 0.1), grid,
                                              CounterRng(kSeed, 7, static_cast<std::uint64_t>(k)));
        const double theta = th(gen);
        auto L = [&](LossKind kind, double t) { return loss(kind, path_values(model, t, path)); };
        const double fd_td = (L(LossKind::MSTDE, theta + h) - L(LossKind::MSTDE, theta - h)) / (2 * h);
        worst_td = std::max(worst_td, std::abs(mstde_grad(model, theta, path) - fd_td) /
                                          (1.0 + std::abs(fd_td)));
        const auto values = path_values(model, theta, path);
        double min_diff = INFINITY;
        for (std::size_t i = 1; i < values.size(); ++i) {
            min_diff = std::min(min_diff, std::abs(values[i] - values[i - 1]));
        }
        if (min_diff > 1e-8) {
            ++smooth_paths;
            const double fd_bv =
                (L(LossKind::MSBVE, theta + h) - L(LossKind::MSBVE, theta - h)) / (2 * h);
            worst_bv = std::max(worst_bv, std::abs(msbve_grad(model, theta, path) - fd_bv) /
                                              (1.0 + std::abs(fd_bv)));
        }
    }
    const ValueModel mv = ValueModel::mean_variance({.target = 1.2, .initial_wealth = 1.0});
    std::vector<ValueModel> all = families;
    all.push_back(mv);
    for (const auto& m : all) {
        for (int k = 0; k < 100; ++k) {
            double theta = th(gen);
            if (m.family() == ValueFamily::MeanVariance && std::abs(theta) < 0.3) theta += 0.6;
            const double t = ts(gen), x = xs(gen);
            const double fd = (m.value(theta + h, t, x) - m.value(theta - h, t, x)) / (2 * h);
            worst_model = std::max(worst_model,
                                   std::abs(m.dvalue_dtheta(theta, t, x) - fd) / (1.0 + std::abs(fd)));
        }
    }
    const bool ok = worst_td < kGradTol && worst_bv < kGradTol && worst_model < kGradTol &&
                    smooth_paths >= 150;
    return {ok, fmt("max rel error: mstde %.2e, msbve %.2e (%d smooth paths), models %.2e",
                    worst_td, worst_bv, smooth_paths, worst_model)};
}

Outcome ac8() {
    std::mt19937_64 gen(kSeed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(-5.0, 5.0), taus(0.0, 3.0), th(0.05, 3.0);
    std::uniform_int_distribution<int> len(3, 60);
    int failures = 0;
    std::string which;
    auto note = [&](bool ok, const char* name) {
        if (!ok) {
            ++failures;
            if (which.find(name) == std::string::npos) which += std::string(name) + " ";
        }
    };

    for (int c = 0; c < kPropertyCases; ++c) {
        std::vector<double> v(static_cast<std::size_t>(len(gen)));
        for (auto& x : v) x = z(gen);
        const double k = u(gen), scale = u(gen);
        std::vector<double> shifted(v), scaled(v);
        for (auto& x : shifted) x += k;
        for (auto& x : scaled) x *= scale;
        for (LossKind kind : {LossKind::MSTDE, LossKind::MSBVE}) {
            const double base = loss(kind, v);
            note(base >= 0.0, "non-negativity");
            note(std::abs(loss(kind, shifted) - base) <= 1e-9 * (1.0 + base), "shift");
            note(std::abs(loss(kind, scaled) - scale * scale * base) <=
                     1e-12 * (1.0 + scale * scale * base),
                 "scaling");
        }
    }
    for (int c = 0; c < kPropertyCases; ++c) {
        std::vector<double> levels{100.0};
        for (int i = 0; i < 80; ++i) levels.push_back(levels.back() + z(gen) + (c % 7 == 0 ? 6.0 : 0.0));
        const double tau = taus(gen);
        const auto once = threshold_levels(levels, tau);
        note(threshold_levels(once, tau) == once, "idempotence");
    }
    for (int c = 0; c < kPropertyCases; ++c) {
        const double theta = th(gen), x0 = 1.0 + 0.5 * std::abs(z(gen));
        std::vector<double> prices{100.0};
        for (int i = 0; i < 20; ++i) prices.push_back(prices.back() * (1.0 + 0.01 * z(gen)));
        const WealthParams p{.theta = theta, .sigma_hat = 0.2, .target = x0, .initial_wealth = x0};
        const double w = w_of(theta, x0, x0, 1.0);
        for (double x : wealth_path(p, prices)) note(x == w, "fixed-point");
    }
    const JumpDiffusionSpec spec = paper_sim_spec();
    const TimeGrid small = build_grid(1.0, 20);
    for (int c = 0; c < kPropertyCases; ++c) {
        const auto key = static_cast<std::uint64_t>(c);
        const PathSample a = simulate_path(spec, small, CounterRng(key, 1, 2));
        const PathSample b = simulate_path(spec, small, CounterRng(key, 1, 2));
        note(a.observed == b.observed && a.continuous_part == b.continuous_part, "simulate");

        TrainConfig cfg;
        cfg.episodes = 3;
        cfg.paths_per_episode = 4;
        cfg.master_seed = key;
        cfg.loss_kind = c % 2 ? LossKind::MSTDE : LossKind::MSBVE;
        const TrainResult ta = train(ValueModel::quadratic(), spec, small, cfg);
        const TrainResult tb = train(ValueModel::quadratic(), spec, small, cfg);
        bool same = ta.trace.size() == tb.trace.size();
        for (std::size_t i = 0; same && i < ta.trace.size(); ++i) {
            same = ta.trace[i].theta == tb.trace[i].theta && ta.trace[i].loss == tb.trace[i].loss;
        }
        note(same, "train");
    }
    BacktestConfig bc;
    bc.train_days = 3;
    bc.steps_per_day = 10;
    bc.learning.episodes = 2;
    for (int c = 0; c < kPropertyCases; ++c) {
        const PriceSeries s = synthetic_series(
            {.days = 5, .bars_per_day = 10, .jumps_per_day = 0.5, .seed = static_cast<std::uint64_t>(c)});
        bc.threshold_mode = c % 2 ? ThresholdMode::Thresholded : ThresholdMode::Raw;
        const BacktestResult a = rolling_backtest(s, bc, LossKind::MSBVE);
        const BacktestResult b = rolling_backtest(s, bc, LossKind::MSBVE);
        note(a.terminal_wealth == b.terminal_wealth && a.theta_per_day == b.theta_per_day &&
                 a.sharpe_annualized == b.sharpe_annualized,
             "backtest");
    }
    return {failures == 0,
            fmt("%d cases per property, %d violations%s%s", kPropertyCases, failures,
                which.empty() ? "" : ": ", which.c_str())};
}

Outcome ac9() {
    int wins = 0;
    double raw_gap = 0.0, thr_gap = 0.0;
    int usable = 0;
    for (int r = 0; r < kReplications; ++r) {
        SyntheticMarket market;
        market.seed = kSeed + static_cast<std::uint64_t>(r);
        const PriceSeries s = synthetic_series(market);
        BacktestConfig c;
        double sh[2][2];
        bool ok = true;
        for (int mode = 0; mode < 2; ++mode) {
            c.threshold_mode = mode ? ThresholdMode::Thresholded : ThresholdMode::Raw;
            for (int k = 0; k < 2; ++k) {
                const BacktestResult res =
                    rolling_backtest(s, c, k ? LossKind::MSBVE : LossKind::MSTDE);
                ok = ok && res.sharpe_annualized.has_value();
                sh[mode][k] = res.sharpe_annualized.value_or(NAN);
            }
        }
        if (!ok) continue;
        ++usable;
        wins += sh[0][1] >= sh[0][0];
        raw_gap += std::abs(sh[0][1] - sh[0][0]);
        thr_gap += std::abs(sh[1][1] - sh[1][0]);
    }
    raw_gap /= std::max(usable, 1);
    thr_gap /= std::max(usable, 1);
    const bool direction = usable == kReplications && wins >= kWinShare * kReplications;
    const bool comparable = thr_gap < 0.5 * raw_gap;
    return {direction && comparable,
            fmt("raw msbve >= mstde in %d/%d (need >= %d) [%s]; mean |gap| thresholded %.5f vs "
                "raw %.5f (need < half) [%s]",
                wins, kReplications, static_cast<int>(std::ceil(kWinShare * kReplications)),
                direction ? "ok" : "off", thr_gap, raw_gap, comparable ? "ok" : "off")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::pair<const char*, std::function<Outcome()>>>> all{
        {"AC1", {"linear-family convergence", ac1}},
        {"AC2", {"quadratic-family convergence and oracle ordering", ac2}},
        {"AC3", {"exponential-family convergence and printed coefficients", ac3}},
        {"AC4", {"limit-objective scans reproduce closed-form minimizers", ac4}},
        {"AC5", {"bipower consistency and jump robustness", ac5}},
        {"AC6", {"jump-robustness ratio", ac6}},
        {"AC7", {"gradient oracles", ac7}},
        {"AC8", {"property suites", ac8}},
        {"AC9", {"synthetic Sharpe direction", ac9}},
    };
    std::set<std::string> only(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& [id, entry] : all) {
        if (!only.empty() && !only.contains(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %s %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id.c_str(), entry.first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed;
}
