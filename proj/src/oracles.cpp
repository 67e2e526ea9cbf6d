#include "jumprl/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jumprl/error.hpp"
#include "jumprl/parallel.hpp"

namespace jumprl {

double argmin_quadratic(const QuadraticObjective& obj) {
    if (!(obj.a > 0.0)) {
        throw ConfigError("quadratic objective is not strictly convex (a = " +
                          std::to_string(obj.a) + ")");
    }
    return -obj.b / (2.0 * obj.a);
}

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    int max_depth;
};

double simpson_step(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
                    double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Below this the difference is rounding noise, not truncation error.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(left) + std::abs(right));
    if (!std::isfinite(delta)) {
        throw QuadratureError("integrand is not finite on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    if (std::abs(delta) <= 15.0 * std::max(eps, noise)) {
        return left + right + delta / 15.0;
    }
    if (depth >= st.max_depth) {
        throw QuadratureError("adaptive Simpson did not converge on [" + std::to_string(a) +
                              ", " + std::to_string(b) + "] within depth " +
                              std::to_string(st.max_depth));
    }
    return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           simpson_step(st, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw ConfigError("integration bounds must satisfy lo < hi");
    if (!(tol > 0.0)) throw ConfigError("integration tolerance must be positive");
    const SimpsonState st{f, kQuadratureMaxDepth};
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(st, lo, hi, fa, fm, fb, whole, tol, 0);
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::MSTDE: return "mstde";
        case Method::MSBVE: return "msbve";
        case Method::Oracle: return "oracle";
    }
    return "oracle";
}

const QuadraticObjective& LimitObjectives::operator[](Method m) const noexcept {
    switch (m) {
        case Method::MSTDE: return mstde;
        case Method::MSBVE: return msbve;
        case Method::Oracle: return oracle;
    }
    return oracle;
}

LimitObjectives linear_objectives() {
    const QuadraticObjective continuous{1.0 / 3.0, 1.0, 1.0};
    return {
        .msbve = continuous,
        .mstde = {21.0 / 50.0, 403.0 / 300.0, 151.0 / 100.0},
        .oracle = continuous,
    };
}

LimitObjectives quadratic_objectives() {
    return {
        .msbve = {167.0 / 300.0, 4.0 / 15.0, 1.0},
        .mstde = {45059.0 / 30000.0, 1709.0 / 3000.0, 151.0 / 100.0},
        .oracle = {26.0 / 75.0, 1.0 / 5.0, 1.0},
    };
}

LimitObjectives exponential_objectives(double tol) {
    using std::exp;
    const double inner_tol = tol * 1e-3;
    // E over the jump time u ~ U(0,1) of the diffusion integral split at u:
    // before the jump X_t = W_t + 0.1, after it X_t = W_t + W_u + 0.2.
    auto split_integral = [&](auto before, auto after) {
        return integrate(
            [&](double u) {
                const double pre = u > 0.0 ? integrate([&](double t) { return before(t); }, 0.0,
                                                       u, inner_tol)
                                           : 0.0;
                const double post = u < 1.0 ? integrate([&](double t) { return after(t, u); }, u,
                                                        1.0, inner_tol)
                                            : 0.0;
                return pre + post;
            },
            0.0, 1.0, tol);
    };

    // E[e^{2 X}] and E[e^{X}] for the Gaussian X above.
    const double a_bv = split_integral(
        [](double t) { return (1 - t) * (1 - t) * exp(2 * t + 0.2); },
        [](double t, double u) { return (1 - t) * (1 - t) * exp(6 * u + 2 * t + 0.4); });
    const double b_bv = split_integral(
        [](double t) { return 2 * (1 - t) * exp(0.5 * t + 0.1); },
        [](double t, double u) { return 2 * (1 - t) * exp(0.5 * (3 * u + t) + 0.2); });

    // Jump term: with Y = X_{u-} ~ N(0.1, u) the jump changes J by
    // theta (1-u)(e^{2Y} - e^Y) + Y.
    const double a_jump = integrate(
        [](double u) {
            return (1 - u) * (1 - u) *
                   (exp(8 * u + 0.4) - 2 * exp(4.5 * u + 0.3) + exp(2 * u + 0.2));
        },
        0.0, 1.0, tol);
    const double b_jump = integrate(
        [](double u) {
            return 2 * (1 - u) *
                   ((2 * u + 0.1) * exp(2 * u + 0.2) - (u + 0.1) * exp(0.5 * u + 0.1));
        },
        0.0, 1.0, tol);
    const double c_jump = integrate([](double u) { return u + 0.01; }, 0.0, 1.0, tol);

    const double a_or = integrate([](double t) { return (1 - t) * (1 - t) * exp(2 * t + 0.2); },
                                  0.0, 1.0, tol);
    const double b_or =
        integrate([](double t) { return 2 * (1 - t) * exp(0.5 * t + 0.1); }, 0.0, 1.0, tol);

    return {
        .msbve = {a_bv, b_bv, 1.0},
        .mstde = {a_bv + a_jump, b_bv + b_jump, 1.0 + c_jump},
        .oracle = {a_or, b_or, 1.0},
    };
}

double MinimizerTable::at(ValueFamily family, Method method) const {
    const auto it = table_.find({family, method});
    if (it == table_.end()) {
        throw ConfigError("no reference minimizer for (" + std::string(family_name(family)) +
                          ", " + std::string(method_name(method)) + ")");
    }
    return it->second;
}

bool MinimizerTable::contains(ValueFamily family, Method method) const {
    return table_.contains({family, method});
}

MinimizerTable reference_minimizers() {
    MinimizerTable table;
    const std::pair<ValueFamily, LimitObjectives> rows[] = {
        {ValueFamily::Linear, linear_objectives()},
        {ValueFamily::Quadratic, quadratic_objectives()},
        {ValueFamily::Exponential, exponential_objectives()},
    };
    for (const auto& [family, obj] : rows) {
        for (const Method m : {Method::MSTDE, Method::MSBVE, Method::Oracle}) {
            table.set(family, m, argmin_quadratic(obj[m]));
        }
    }
    return table;
}

std::vector<McEstimate> mc_objective_batch(const ValueModel& model,
                                           std::span<const double> thetas,
                                           const JumpDiffusionSpec& spec, const TimeGrid& grid,
                                           std::size_t n_paths, std::uint64_t seed,
                                           bool include_jump_term, GradientState state) {
    if (n_paths < 1) throw ConfigError("Monte-Carlo estimate needs at least one path");
    spec.validate(grid);
    const std::size_t k = thetas.size();
    const std::size_t n = grid.n_steps();
    const double dt = grid.dt();
    std::vector<double> per_path(n_paths * k, 0.0);

    parallel_for(
        n_paths,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> sigma2(n);
            for (std::size_t p = begin; p < end; ++p) {
                const PathSample path = simulate_path(spec, grid, CounterRng(seed, 0, p));
                const auto& xs =
                    state == GradientState::Observed ? path.observed : path.continuous_part;
                for (std::size_t i = 0; i < n; ++i) {
                    const double s = spec.diffusion(grid[i], path.observed[i]);
                    sigma2[i] = s * s;
                }
                double* row = per_path.data() + p * k;
                for (std::size_t j = 0; j < k; ++j) {
                    const double theta = thetas[j];
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double gx = model.dvalue_dx(theta, grid[i], xs[i]);
                        acc += gx * gx * sigma2[i];
                    }
                    acc *= dt;
                    if (include_jump_term) {
                        for (const auto& jump : path.jumps) {
                            const double t = grid[jump.grid_index];
                            const double d = model.value(theta, t, jump.pre_state + jump.size) -
                                             model.value(theta, t, jump.pre_state);
                            acc += d * d;
                        }
                    }
                    row[j] = acc;
                }
            }
        },
        std::max<std::size_t>(1, 100000 / (n + 1)));

    std::vector<McEstimate> out(k);
    const double count = static_cast<double>(n_paths);
    for (std::size_t j = 0; j < k; ++j) {
        double sum = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) sum += per_path[p * k + j];
        const double mean = sum / count;
        double ss = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double d = per_path[p * k + j] - mean;
            ss += d * d;
        }
        const double se = n_paths > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0;
        out[j] = {mean, se};
    }
    return out;
}

double mc_limit_objective(const ValueModel& model, double theta, const JumpDiffusionSpec& spec,
                          const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                          bool include_jump_term) {
    const double thetas[] = {theta};
    return mc_objective_batch(model, thetas, spec, grid, n_paths, seed, include_jump_term,
                              GradientState::Observed)
        .front()
        .mean;
}

double mc_oracle_objective(const ValueModel& model, double theta, const JumpDiffusionSpec& spec,
                           const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed) {
    const double thetas[] = {theta};
    return mc_objective_batch(model, thetas, spec, grid, n_paths, seed, false,
                              GradientState::Continuous)
        .front()
        .mean;
}

ScanResult scan_argmin(const BatchObjective& objective, double lo, double hi, double coarse_step,
                       double tol) {
    if (!(lo < hi) || !(coarse_step > 0.0) || !(tol > 0.0)) {
        throw ConfigError("scan needs lo < hi and positive step and tolerance");
    }
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / coarse_step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * coarse_step);
    const std::vector<double> values = objective(grid);
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());

    ScanResult out{grid[best], values[best], grid.size()};
    auto eval = [&](double x) {
        const double xs[] = {x};
        ++out.evaluations;
        return objective(xs).front();
    };

    // Golden-section on the bracket around the best grid point.
    constexpr double inv_phi = 0.6180339887498949;
    double a = best > 0 ? grid[best - 1] : grid[best];
    double b = best + 1 < grid.size() ? grid[best + 1] : grid[best];
    if (b - a <= tol) return out;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    const double x = 0.5 * (a + b);
    const double fx = eval(x);
    if (fx < out.value) {
        out.argmin = x;
        out.value = fx;
    }
    return out;
}

ScanResult scan_mc_minimizer(const ValueModel& model, Method method,
                             const JumpDiffusionSpec& spec, const TimeGrid& grid,
                             std::size_t n_paths, std::uint64_t seed, double lo, double hi,
                             double coarse_step, double tol) {
    const bool jump_term = method == Method::MSTDE;
    const GradientState state =
        method == Method::Oracle ? GradientState::Continuous : GradientState::Observed;
    return scan_argmin(
        [&](std::span<const double> thetas) {
            const auto est =
                mc_objective_batch(model, thetas, spec, grid, n_paths, seed, jump_term, state);
            std::vector<double> means(est.size());
            std::transform(est.begin(), est.end(), means.begin(),
                           [](const McEstimate& e) { return e.mean; });
            return means;
        },
        lo, hi, coarse_step, tol);
}

}  // namespace jumprl
