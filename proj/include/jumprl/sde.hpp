#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "jumprl/rng.hpp"
#include "jumprl/time_grid.hpp"

namespace jumprl {

/// Coefficient function of (t, x).
using Coefficient = std::function<double(double, double)>;

struct NoJumps {};
/// Exactly one jump per path at a Uniform(0, T) time.
struct SingleUniformJump {};
/// At most one jump per step, with probability rate * dt.
struct PoissonRate {
    double rate;
};
using JumpLaw = std::variant<NoJumps, SingleUniformJump, PoissonRate>;

/// Scalar jump-diffusion dX = b(t,X)dt + sigma(t,X)dW + L(t,X-)dN.
struct JumpDiffusionSpec {
    Coefficient drift;
    Coefficient diffusion;
    Coefficient jump_size;
    JumpLaw jump_law = NoJumps{};
    double x0 = 0.0;

    /// Throws ConfigError on a missing coefficient, non-finite x0 or a
    /// Poisson rate with rate * dt >= 0.1 on the given grid.
    void validate(const TimeGrid& grid) const;
};

/// dX = dW + X_{t-} dN with one uniform jump per path and X_0 = 0.1.
JumpDiffusionSpec paper_sim_spec();

/// Constant-coefficient diffusion with the given jump law.
JumpDiffusionSpec constant_spec(double drift, double sigma, double x0,
                                JumpLaw law = NoJumps{}, double jump_size = 0.0);

struct JumpEvent {
    double time;             // jump time before snapping to the grid
    std::size_t grid_index;  // first grid point at or after `time`
    double pre_state;        // X_{t-}
    double size;
};

/// One simulated trajectory on a grid.
///
/// `continuous_part` accumulates the drift and diffusion increments only;
/// `observed` additionally carries every jump. Coefficients are evaluated at
/// the observed pre-jump state, so for state-dependent coefficients the
/// continuous part is an approximation of the latent diffusion.
struct PathSample {
    TimeGrid grid;
    std::vector<double> observed;
    std::vector<double> continuous_part;
    std::vector<JumpEvent> jumps;
    std::uint64_t seed_tag = 0;

    std::size_t size() const noexcept { return observed.size(); }
};

/// Jump time u in (0, 1) for the single-jump law.
double sample_single_jump_time(const CounterRng& rng);

/// Euler-Maruyama with jumps applied after the diffusion increment of the
/// step that ends at the first grid point >= the jump time.
PathSample simulate_path(const JumpDiffusionSpec& spec, const TimeGrid& grid,
                         const CounterRng& rng);

/// CSV with header `t,observed,continuous,jump_flag`, 17 significant digits.
void write_path_csv(std::ostream& out, const PathSample& path);

/// Fixed-format decimal used by every CSV/report writer.
std::string format_double(double v);

}  // namespace jumprl
