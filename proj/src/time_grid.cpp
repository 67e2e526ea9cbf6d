#include "jumprl/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jumprl/error.hpp"

namespace jumprl {

TimeGrid build_grid(double horizon, std::size_t n_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("time grid horizon must be positive and finite, got " +
                          std::to_string(horizon));
    }
    if (n_steps < 2) {
        throw ConfigError("time grid needs at least 2 steps, got " + std::to_string(n_steps));
    }
    const double dt = horizon / static_cast<double>(n_steps);
    std::vector<double> times(n_steps + 1);
    for (std::size_t i = 0; i < n_steps; ++i) {
        times[i] = static_cast<double>(i) * dt;
    }
    times[n_steps] = horizon;
    return TimeGrid(horizon, dt, std::move(times));
}

std::size_t TimeGrid::first_index_at_or_after(double t) const noexcept {
    const auto it = std::lower_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(it - times_.begin());
    return std::clamp<std::size_t>(k, 1, n_steps());
}

}  // namespace jumprl
