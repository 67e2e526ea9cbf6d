#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jumprl/error.hpp"
#include "jumprl/sde.hpp"
#include "jumprl/value_model.hpp"

namespace jumprl {

enum class LossKind { MSTDE, MSBVE };

/// Parses `mstde | msbve` (case-insensitive).
LossKind parse_loss_kind(std::string_view name);
std::string_view loss_name(LossKind kind);

/// Sum of squared consecutive differences; needs >= 2 values.
double mstde_loss(std::span<const double> values);

/// Sum of products of adjacent absolute differences; needs >= 3 values.
double msbve_loss(std::span<const double> values);

double loss(LossKind kind, std::span<const double> values);

struct LossGrad {
    double loss;
    double grad;
};

/// Loss and its theta-derivative given J_i and dJ_i/dtheta along one path.
/// MSBVE uses sgn(0) = 0.
LossGrad loss_and_grad(LossKind kind, std::span<const double> values,
                       std::span<const double> dvalues);

/// Gradient of mstde_loss(path_values(model, theta, path)) in theta.
double mstde_grad(const ValueModel& model, double theta, const PathSample& path);

/// Subgradient of msbve_loss(path_values(model, theta, path)) in theta.
double msbve_grad(const ValueModel& model, double theta, const PathSample& path);

/// Loss and gradient for one path in a single sweep.
LossGrad path_loss_and_grad(LossKind kind, const ValueModel& model, double theta,
                            const PathSample& path);

struct TrainConfig {
    LossKind loss_kind = LossKind::MSBVE;
    double learning_rate = 0.0005;
    std::size_t episodes = 20000;
    std::size_t paths_per_episode = 32;
    double theta0 = 0.5;
    std::uint64_t master_seed = 0;
    std::size_t record_every = 1;
    /// Per-path gradient magnitude cap; 0 disables clipping.
    double grad_clip = 0.0;
    /// Stop once |theta_e - theta_{e - plateau_window}| < plateau_tol; 0 disables.
    double plateau_tol = 0.0;
    std::size_t plateau_window = 1000;

    /// Throws ConfigError on a non-positive rate or empty run.
    void validate() const;
};

struct TracePoint {
    std::size_t episode;
    double theta;  // parameter used during this episode
    double loss;   // batch-mean loss at that parameter
};

struct TrainResult {
    double theta_final = 0.0;
    std::vector<TracePoint> trace;
    TrainConfig config;
    std::size_t episodes_run = 0;
    std::size_t clip_events = 0;
    bool stopped_on_plateau = false;
};

/// Non-finite parameter or gradient during training. Carries the partial run.
class DivergenceError : public NumericalError {
public:
    DivergenceError(std::size_t episode, double last_finite_theta, TrainResult partial);

    std::size_t episode() const noexcept { return episode_; }
    double last_finite_theta() const noexcept { return last_theta_; }
    const TrainResult& partial() const noexcept { return partial_; }

private:
    std::size_t episode_;
    double last_theta_;
    TrainResult partial_;
};

/// Batch-mean gradient for one episode of fresh paths, reduced in path order.
struct BatchStep {
    double mean_loss;
    double mean_grad;
    std::size_t clipped;
};
BatchStep batch_step(const ValueModel& model, const JumpDiffusionSpec& spec, const TimeGrid& grid,
                     const TrainConfig& config, double theta, std::size_t episode);

/// Constant-step SGD: each episode simulates paths_per_episode fresh paths
/// keyed by (master_seed, episode, path) and takes one step along the batch
/// mean gradient.
TrainResult train(const ValueModel& model, const JumpDiffusionSpec& spec, const TimeGrid& grid,
                  const TrainConfig& config);

}  // namespace jumprl
