#pragma once

#include <cstddef>
#include <vector>

namespace jumprl {

/// Uniform partition of [0, T] into n steps.
class TimeGrid {
public:
    double horizon() const noexcept { return horizon_; }
    std::size_t n_steps() const noexcept { return times_.size() - 1; }
    double dt() const noexcept { return dt_; }
    const std::vector<double>& times() const noexcept { return times_; }
    double operator[](std::size_t i) const noexcept { return times_[i]; }

    /// Index of the first grid point t_k >= t (clamped to [1, n]).
    std::size_t first_index_at_or_after(double t) const noexcept;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    friend TimeGrid build_grid(double horizon, std::size_t n_steps);
    TimeGrid(double horizon, double dt, std::vector<double> times)
        : horizon_(horizon), dt_(dt), times_(std::move(times)) {}

    double horizon_;
    double dt_;
    std::vector<double> times_;
};

/// Throws ConfigError unless horizon > 0 and n_steps >= 2.
TimeGrid build_grid(double horizon, std::size_t n_steps);

}  // namespace jumprl
