#include "jumprl/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "jumprl/parallel.hpp"

namespace jumprl {

namespace {

inline double sgn(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

void require_length(std::size_t got, std::size_t need, const char* what) {
    if (got < need) throw InsufficientDataError(what, got, need);
}

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "mstde") return LossKind::MSTDE;
    if (lower == "msbve") return LossKind::MSBVE;
    throw ConfigError("unknown loss '" + std::string(name) + "' (expected mstde | msbve)");
}

std::string_view loss_name(LossKind kind) {
    return kind == LossKind::MSTDE ? "mstde" : "msbve";
}

double mstde_loss(std::span<const double> values) {
    require_length(values.size(), 2, "mstde loss");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double d = values[i + 1] - values[i];
        acc += d * d;
    }
    return acc;
}

double msbve_loss(std::span<const double> values) {
    require_length(values.size(), 3, "msbve loss");
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        acc += std::abs(values[i + 1] - values[i]) * std::abs(values[i] - values[i - 1]);
    }
    return acc;
}

double loss(LossKind kind, std::span<const double> values) {
    return kind == LossKind::MSTDE ? mstde_loss(values) : msbve_loss(values);
}

LossGrad loss_and_grad(LossKind kind, std::span<const double> values,
                       std::span<const double> dvalues) {
    if (values.size() != dvalues.size()) {
        throw ConfigError("values and their theta-derivatives differ in length");
    }
    LossGrad out{0.0, 0.0};
    if (kind == LossKind::MSTDE) {
        require_length(values.size(), 2, "mstde loss");
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double d = values[i + 1] - values[i];
            out.loss += d * d;
            out.grad += 2.0 * d * (dvalues[i + 1] - dvalues[i]);
        }
        return out;
    }
    require_length(values.size(), 3, "msbve loss");
    double prev = values[1] - values[0];
    double dprev = dvalues[1] - dvalues[0];
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double cur = values[i + 1] - values[i];
        const double dcur = dvalues[i + 1] - dvalues[i];
        out.loss += std::abs(cur) * std::abs(prev);
        out.grad += dcur * std::abs(prev) * sgn(cur) + dprev * std::abs(cur) * sgn(prev);
        prev = cur;
        dprev = dcur;
    }
    return out;
}

LossGrad path_loss_and_grad(LossKind kind, const ValueModel& model, double theta,
                            const PathSample& path) {
    const std::size_t n = path.size();
    std::vector<double> values(n);
    std::vector<double> dvalues(n);
    for (std::size_t i = 0; i < n; ++i) {
        values[i] = model.value(theta, path.grid[i], path.observed[i]);
        dvalues[i] = model.dvalue_dtheta(theta, path.grid[i], path.observed[i]);
    }
    return loss_and_grad(kind, values, dvalues);
}

double mstde_grad(const ValueModel& model, double theta, const PathSample& path) {
    return path_loss_and_grad(LossKind::MSTDE, model, theta, path).grad;
}

double msbve_grad(const ValueModel& model, double theta, const PathSample& path) {
    return path_loss_and_grad(LossKind::MSBVE, model, theta, path).grad;
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be finite and non-negative");
    }
    if (episodes < 1) throw ConfigError("episodes must be at least 1");
    if (paths_per_episode < 1) throw ConfigError("paths per episode must be at least 1");
    if (record_every < 1) throw ConfigError("record_every must be at least 1");
    if (!std::isfinite(theta0)) throw ConfigError("theta0 must be finite");
    if (grad_clip < 0.0) throw ConfigError("gradient clip must be non-negative");
}

DivergenceError::DivergenceError(std::size_t episode, double last_finite_theta,
                                 TrainResult partial)
    : NumericalError("training diverged at episode " + std::to_string(episode) +
                     " (last finite theta " + format_double(last_finite_theta) + ")"),
      episode_(episode), last_theta_(last_finite_theta), partial_(std::move(partial)) {}

BatchStep batch_step(const ValueModel& model, const JumpDiffusionSpec& spec, const TimeGrid& grid,
                     const TrainConfig& config, double theta, std::size_t episode) {
    const std::size_t paths = config.paths_per_episode;
    std::vector<LossGrad> per_path(paths);
    std::vector<char> clipped(paths, 0);
    // Threads only pay off once a worker gets a few hundred thousand steps.
    const std::size_t min_paths = std::max<std::size_t>(1, 200000 / (grid.n_steps() + 1));
    parallel_for(
        paths,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t p = begin; p < end; ++p) {
                const CounterRng rng(config.master_seed, episode, p);
                const PathSample path = simulate_path(spec, grid, rng);
                LossGrad lg = path_loss_and_grad(config.loss_kind, model, theta, path);
                if (config.grad_clip > 0.0 && std::abs(lg.grad) > config.grad_clip) {
                    lg.grad = std::copysign(config.grad_clip, lg.grad);
                    clipped[p] = 1;
                }
                per_path[p] = lg;
            }
        },
        min_paths);

    BatchStep out{0.0, 0.0, 0};
    for (std::size_t p = 0; p < paths; ++p) {
        out.mean_loss += per_path[p].loss;
        out.mean_grad += per_path[p].grad;
        out.clipped += static_cast<std::size_t>(clipped[p]);
    }
    out.mean_loss /= static_cast<double>(paths);
    out.mean_grad /= static_cast<double>(paths);
    return out;
}

TrainResult train(const ValueModel& model, const JumpDiffusionSpec& spec, const TimeGrid& grid,
                  const TrainConfig& config) {
    config.validate();
    spec.validate(grid);

    TrainResult result;
    result.config = config;
    double theta = config.theta0;
    std::vector<double> history;  // theta at the start of each episode, for the plateau check
    if (config.plateau_tol > 0.0) history.reserve(config.episodes);

    for (std::size_t e = 0; e < config.episodes; ++e) {
        BatchStep step{};
        try {
            step = batch_step(model, spec, grid, config, theta, e);
        } catch (const OverflowError&) {
            result.theta_final = theta;
            throw DivergenceError(e, theta, std::move(result));
        }
        if (e % config.record_every == 0) {
            result.trace.push_back({e, theta, step.mean_loss});
        }
        result.clip_events += step.clipped;
        const double next = theta - config.learning_rate * step.mean_grad;
        if (!std::isfinite(step.mean_grad) || !std::isfinite(next)) {
            result.theta_final = theta;
            result.episodes_run = e;
            throw DivergenceError(e, theta, std::move(result));
        }
        if (config.plateau_tol > 0.0) {
            history.push_back(theta);
            if (history.size() > config.plateau_window &&
                std::abs(next - history[history.size() - 1 - config.plateau_window]) <
                    config.plateau_tol) {
                theta = next;
                result.episodes_run = e + 1;
                result.stopped_on_plateau = true;
                result.theta_final = theta;
                return result;
            }
        }
        theta = next;
        result.episodes_run = e + 1;
    }
    result.theta_final = theta;
    return result;
}

}  // namespace jumprl
