#include "jumprl/sde.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "jumprl/error.hpp"

namespace jumprl {

void JumpDiffusionSpec::validate(const TimeGrid& grid) const {
    if (!drift || !diffusion || !jump_size) {
        throw ConfigError("jump-diffusion spec is missing a coefficient function");
    }
    if (!std::isfinite(x0)) {
        throw ConfigError("jump-diffusion spec has a non-finite initial state");
    }
    if (const auto* p = std::get_if<PoissonRate>(&jump_law)) {
        if (!(p->rate >= 0.0) || !(p->rate * grid.dt() < 0.1)) {
            throw ConfigError("Poisson jump rate must satisfy 0 <= rate*dt < 0.1, got rate*dt = " +
                              std::to_string(p->rate * grid.dt()));
        }
    }
}

JumpDiffusionSpec paper_sim_spec() {
    return JumpDiffusionSpec{
        .drift = [](double, double) { return 0.0; },
        .diffusion = [](double, double) { return 1.0; },
        .jump_size = [](double, double x) { return x; },
        .jump_law = SingleUniformJump{},
        .x0 = 0.1,
    };
}

JumpDiffusionSpec constant_spec(double drift, double sigma, double x0, JumpLaw law,
                                double jump_size) {
    return JumpDiffusionSpec{
        .drift = [drift](double, double) { return drift; },
        .diffusion = [sigma](double, double) { return sigma; },
        .jump_size = [jump_size](double, double) { return jump_size; },
        .jump_law = law,
        .x0 = x0,
    };
}

double sample_single_jump_time(const CounterRng& rng) {
    return rng.uniform(0, Lane::JumpTime);
}

PathSample simulate_path(const JumpDiffusionSpec& spec, const TimeGrid& grid,
                         const CounterRng& rng) {
    spec.validate(grid);
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);

    PathSample path{.grid = grid, .observed = {}, .continuous_part = {}, .jumps = {},
                    .seed_tag = rng.key64()};
    path.observed.resize(n + 1);
    path.continuous_part.resize(n + 1);
    path.observed[0] = spec.x0;
    path.continuous_part[0] = spec.x0;

    std::size_t single_jump_index = 0;  // 0 means none
    double single_jump_time = 0.0;
    if (std::holds_alternative<SingleUniformJump>(spec.jump_law)) {
        single_jump_time = sample_single_jump_time(rng) * grid.horizon();
        single_jump_index = grid.first_index_at_or_after(single_jump_time);
    }
    const auto* poisson = std::get_if<PoissonRate>(&spec.jump_law);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = grid[i];
        const double x = path.observed[i];
        const double incr =
            spec.drift(t, x) * dt + spec.diffusion(t, x) * sqrt_dt * rng.normal(i, Lane::Diffusion);
        double next = x + incr;
        path.continuous_part[i + 1] = path.continuous_part[i] + incr;

        const std::size_t k = i + 1;
        bool jump = false;
        double jump_time = grid[k];
        if (k == single_jump_index) {
            jump = true;
            jump_time = single_jump_time;
        } else if (poisson != nullptr && poisson->rate > 0.0) {
            jump = rng.uniform(i, Lane::JumpCount) < poisson->rate * dt;
            if (jump) {
                jump_time = t + rng.uniform(i, Lane::JumpTime) * dt;
            }
        }
        if (jump) {
            const double size = spec.jump_size(grid[k], next);
            path.jumps.push_back({jump_time, k, next, size});
            next += size;
        }
        if (!std::isfinite(next) || !std::isfinite(path.continuous_part[k])) {
            throw OverflowError(k);
        }
        path.observed[k] = next;
    }
    return path;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_path_csv(std::ostream& out, const PathSample& path) {
    std::vector<char> flag(path.size(), 0);
    for (const auto& j : path.jumps) {
        flag[j.grid_index] = 1;
    }
    out << "t,observed,continuous,jump_flag\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << format_double(path.grid[i]) << ',' << format_double(path.observed[i]) << ','
            << format_double(path.continuous_part[i]) << ',' << int{flag[i]} << '\n';
    }
}

}  // namespace jumprl
