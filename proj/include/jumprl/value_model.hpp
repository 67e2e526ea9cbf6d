#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumprl/sde.hpp"

namespace jumprl {

enum class ValueFamily { Linear, Quadratic, Exponential, MeanVariance, Custom };

/// Parses `linear | quadratic | exponential | mean_variance`.
ValueFamily parse_family(std::string_view name);
std::string_view family_name(ValueFamily family);

/// Constants of the mean-variance family.
struct MeanVarianceParams {
    double target = 1.0;          // z
    double initial_wealth = 0.0;  // x0
    double horizon = 1.0;         // T
};

/// Callable of (theta, t, x).
using ModelFn = std::function<double(double, double, double)>;

/// User-supplied family. `dvalue_dx` may be left empty; oracles then fall
/// back to central differences.
struct CustomFamily {
    ModelFn value;
    ModelFn dvalue_dtheta;
    ModelFn dvalue_dx;
};

/// Default |theta| below which the mean-variance family is rejected.
inline constexpr double kDefaultSingularityFloor = 1e-6;

/// Scalar-parameter value-function family J(theta; t, x).
///
///   Linear        (theta (1 - t) + 1) x
///   Quadratic     theta (1 - t) x^2 + x
///   Exponential   theta (1 - t) e^x + x
///   MeanVariance  (x - w)^2 e^{theta^2 (t - T)} - (w - z)^2,
///                 w = (z e^{theta^2 T} - x0) / (e^{theta^2 T} - 1)
class ValueModel {
public:
    static ValueModel linear() { return ValueModel(ValueFamily::Linear); }
    static ValueModel quadratic() { return ValueModel(ValueFamily::Quadratic); }
    static ValueModel exponential() { return ValueModel(ValueFamily::Exponential); }
    static ValueModel mean_variance(MeanVarianceParams params,
                                    double singularity_floor = kDefaultSingularityFloor);
    static ValueModel custom(CustomFamily fns);
    /// One of the three state-process families, by name.
    static ValueModel from_name(std::string_view name);

    ValueFamily family() const noexcept { return family_; }
    const MeanVarianceParams& mean_variance_params() const noexcept { return mv_; }

    double value(double theta, double t, double x) const;
    double dvalue_dtheta(double theta, double t, double x) const;
    /// Spatial derivative dJ/dx, analytic for built-ins.
    double dvalue_dx(double theta, double t, double x) const;

private:
    explicit ValueModel(ValueFamily f) : family_(f) {}
    void check_theta(double theta) const;

    ValueFamily family_;
    MeanVarianceParams mv_{};
    double floor_ = kDefaultSingularityFloor;
    std::optional<CustomFamily> custom_;
};

/// w(theta) = (z e^{theta^2 T} - x0) / (e^{theta^2 T} - 1).
/// Throws SingularParameterError when |theta| < floor or theta^2 T underflows.
double w_of(double theta, double z, double x0, double horizon,
            double singularity_floor = kDefaultSingularityFloor);

/// dw/dtheta.
double dw_dtheta(double theta, double z, double x0, double horizon,
                 double singularity_floor = kDefaultSingularityFloor);

/// J_i = J(theta; t_i, X_{t_i}) along the observed path.
std::vector<double> path_values(const ValueModel& model, double theta, const PathSample& path);

}  // namespace jumprl
