#pragma once

#include <vector>

#include "jumprl/sde.hpp"
#include "jumprl/time_grid.hpp"

namespace jumprl::test {

// Jump-free path with the given observations on [0, T].
inline PathSample make_path(const std::vector<double>& observed, double horizon = 1.0) {
    return PathSample{.grid = build_grid(horizon, observed.size() - 1),
                      .observed = observed,
                      .continuous_part = observed,
                      .jumps = {},
                      .seed_tag = 0};
}

}  // namespace jumprl::test
