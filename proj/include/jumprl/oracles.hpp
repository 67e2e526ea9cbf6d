#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "jumprl/sde.hpp"
#include "jumprl/value_model.hpp"

namespace jumprl {

/// a theta^2 + b theta + c.
struct QuadraticObjective {
    double a;
    double b;
    double c;

    double operator()(double theta) const noexcept { return (a * theta + b) * theta + c; }
};

/// -b / (2a); throws ConfigError when a <= 0.
double argmin_quadratic(const QuadraticObjective& obj);

inline constexpr double kDefaultQuadratureTol = 1e-9;
inline constexpr int kQuadratureMaxDepth = 50;

/// Adaptive Simpson on [lo, hi] with absolute tolerance `tol`.
/// Throws QuadratureError if the depth cap is reached before convergence.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double tol = kDefaultQuadratureTol);

enum class Method { MSTDE, MSBVE, Oracle };
std::string_view method_name(Method m);

/// Limiting objectives of the three simulation-study families under
/// dX = dW + X_{t-} dN, X_0 = 0.1, one uniform jump on [0, 1].
struct LimitObjectives {
    QuadraticObjective msbve;
    QuadraticObjective mstde;
    QuadraticObjective oracle;

    const QuadraticObjective& operator[](Method m) const noexcept;
};

/// Closed forms.
LimitObjectives linear_objectives();
LimitObjectives quadratic_objectives();
/// Coefficients recomputed by nested adaptive quadrature of the expectation
/// integrands.
LimitObjectives exponential_objectives(double tol = kDefaultQuadratureTol);

/// Reference theta* keyed by (family, method).
class MinimizerTable {
public:
    double at(ValueFamily family, Method method) const;
    bool contains(ValueFamily family, Method method) const;
    void set(ValueFamily family, Method method, double theta) { table_[{family, method}] = theta; }
    std::size_t size() const noexcept { return table_.size(); }
    const auto& entries() const noexcept { return table_; }

private:
    std::map<std::pair<ValueFamily, Method>, double> table_;
};

/// All nine minimizers. Quadrature failure surfaces as QuadratureError.
MinimizerTable reference_minimizers();

/// Monte-Carlo mean with its standard error.
struct McEstimate {
    double mean;
    double std_error;
};

/// Where the spatial gradient dJ/dx is evaluated along each path.
enum class GradientState { Observed, Continuous };

/// Monte-Carlo estimate, for every theta in `thetas`, of
///   E[ sum_i |dJ/dx(t_i, X_i) sigma(t_i, X_i)|^2 dt ]
/// plus, when `include_jump_term`, E[ sum_jumps (J(t_k, X_k) - J(t_k, X_{k-}))^2 ].
/// Paths are keyed by (seed, 0, path index), so every theta sees the same
/// paths.
std::vector<McEstimate> mc_objective_batch(const ValueModel& model,
                                           std::span<const double> thetas,
                                           const JumpDiffusionSpec& spec, const TimeGrid& grid,
                                           std::size_t n_paths, std::uint64_t seed,
                                           bool include_jump_term, GradientState state);

/// Limit functional of the MSBVE (no jump term) or MSTDE (jump term) loss.
double mc_limit_objective(const ValueModel& model, double theta, const JumpDiffusionSpec& spec,
                          const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                          bool include_jump_term);

/// As mc_limit_objective without the jump term, with dJ/dx evaluated on the
/// latent continuous component.
double mc_oracle_objective(const ValueModel& model, double theta, const JumpDiffusionSpec& spec,
                           const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed);

struct ScanResult {
    double argmin;
    double value;
    std::size_t evaluations;
};

using BatchObjective = std::function<std::vector<double>(std::span<const double>)>;

/// Coarse grid scan of [lo, hi] at `coarse_step`, then golden-section
/// refinement around the best grid point down to `tol`.
ScanResult scan_argmin(const BatchObjective& objective, double lo, double hi, double coarse_step,
                       double tol = 1e-4);

/// Scan of the Monte-Carlo limit objective for one (family, method) cell.
ScanResult scan_mc_minimizer(const ValueModel& model, Method method,
                             const JumpDiffusionSpec& spec, const TimeGrid& grid,
                             std::size_t n_paths, std::uint64_t seed, double lo, double hi,
                             double coarse_step, double tol = 1e-4);

}  // namespace jumprl
