#include "jumprl/value_model.hpp"

#include <cmath>
#include <string>

#include "jumprl/error.hpp"

namespace jumprl {

ValueFamily parse_family(std::string_view name) {
    if (name == "linear") return ValueFamily::Linear;
    if (name == "quadratic") return ValueFamily::Quadratic;
    if (name == "exponential") return ValueFamily::Exponential;
    if (name == "mean_variance") return ValueFamily::MeanVariance;
    throw ConfigError("unknown value family '" + std::string(name) +
                      "' (expected linear | quadratic | exponential | mean_variance)");
}

std::string_view family_name(ValueFamily family) {
    switch (family) {
        case ValueFamily::Linear: return "linear";
        case ValueFamily::Quadratic: return "quadratic";
        case ValueFamily::Exponential: return "exponential";
        case ValueFamily::MeanVariance: return "mean_variance";
        case ValueFamily::Custom: return "custom";
    }
    return "custom";
}

ValueModel ValueModel::mean_variance(MeanVarianceParams params, double singularity_floor) {
    if (!(params.horizon > 0.0)) {
        throw ConfigError("mean-variance horizon must be positive");
    }
    ValueModel m(ValueFamily::MeanVariance);
    m.mv_ = params;
    m.floor_ = singularity_floor;
    return m;
}

ValueModel ValueModel::custom(CustomFamily fns) {
    if (!fns.value || !fns.dvalue_dtheta) {
        throw ConfigError("custom value family needs value and dvalue_dtheta callables");
    }
    ValueModel m(ValueFamily::Custom);
    m.custom_ = std::move(fns);
    return m;
}

ValueModel ValueModel::from_name(std::string_view name) {
    switch (parse_family(name)) {
        case ValueFamily::Linear: return linear();
        case ValueFamily::Quadratic: return quadratic();
        case ValueFamily::Exponential: return exponential();
        default:
            throw ConfigError("family '" + std::string(name) +
                              "' needs explicit parameters; use ValueModel::mean_variance");
    }
}

void ValueModel::check_theta(double theta) const {
    if (family_ == ValueFamily::MeanVariance && !(std::abs(theta) >= floor_)) {
        throw SingularParameterError("mean-variance family is singular at theta = " +
                                     std::to_string(theta));
    }
}

namespace {

// Returns e^{theta^2 T} - 1, rejecting the singular neighbourhood of 0.
double singular_guard(double theta, double horizon, double floor) {
    if (!(std::abs(theta) >= floor)) {
        throw SingularParameterError("w(theta) is singular at theta = " + std::to_string(theta));
    }
    const double em1 = std::expm1(theta * theta * horizon);
    if (!(em1 > 0.0)) {
        throw SingularParameterError("w(theta) underflows at theta = " + std::to_string(theta));
    }
    return em1;
}

}  // namespace

double w_of(double theta, double z, double x0, double horizon, double singularity_floor) {
    const double em1 = singular_guard(theta, horizon, singularity_floor);
    // (z e^s - x0) / (e^s - 1) = z + (z - x0) / (e^s - 1)
    return z + (z - x0) / em1;
}

double dw_dtheta(double theta, double z, double x0, double horizon, double singularity_floor) {
    const double em1 = singular_guard(theta, horizon, singularity_floor);
    const double s = theta * theta * horizon;
    // (x0 - z) 2 theta T e^s / (e^s - 1)^2, written to survive large s
    return (x0 - z) * 2.0 * theta * horizon / (em1 * -std::expm1(-s));
}

double ValueModel::value(double theta, double t, double x) const {
    switch (family_) {
        case ValueFamily::Linear: return (theta * (1.0 - t) + 1.0) * x;
        case ValueFamily::Quadratic: return theta * (1.0 - t) * x * x + x;
        case ValueFamily::Exponential: return theta * (1.0 - t) * std::exp(x) + x;
        case ValueFamily::MeanVariance: {
            check_theta(theta);
            const auto& p = mv_;
            const double w = w_of(theta, p.target, p.initial_wealth, p.horizon, floor_);
            const double d = x - w;
            const double g = w - p.target;
            return d * d * std::exp(theta * theta * (t - p.horizon)) - g * g;
        }
        case ValueFamily::Custom: return custom_->value(theta, t, x);
    }
    return 0.0;
}

double ValueModel::dvalue_dtheta(double theta, double t, double x) const {
    switch (family_) {
        case ValueFamily::Linear: return (1.0 - t) * x;
        case ValueFamily::Quadratic: return (1.0 - t) * x * x;
        case ValueFamily::Exponential: return (1.0 - t) * std::exp(x);
        case ValueFamily::MeanVariance: {
            check_theta(theta);
            const auto& p = mv_;
            const double w = w_of(theta, p.target, p.initial_wealth, p.horizon, floor_);
            const double dw = dw_dtheta(theta, p.target, p.initial_wealth, p.horizon, floor_);
            const double e = std::exp(theta * theta * (t - p.horizon));
            const double d = x - w;
            return -2.0 * d * dw * e + d * d * e * 2.0 * theta * (t - p.horizon) -
                   2.0 * (w - p.target) * dw;
        }
        case ValueFamily::Custom: return custom_->dvalue_dtheta(theta, t, x);
    }
    return 0.0;
}

double ValueModel::dvalue_dx(double theta, double t, double x) const {
    switch (family_) {
        case ValueFamily::Linear: return theta * (1.0 - t) + 1.0;
        case ValueFamily::Quadratic: return 2.0 * theta * (1.0 - t) * x + 1.0;
        case ValueFamily::Exponential: return theta * (1.0 - t) * std::exp(x) + 1.0;
        case ValueFamily::MeanVariance: {
            check_theta(theta);
            const auto& p = mv_;
            const double w = w_of(theta, p.target, p.initial_wealth, p.horizon, floor_);
            return 2.0 * (x - w) * std::exp(theta * theta * (t - p.horizon));
        }
        case ValueFamily::Custom: {
            if (custom_->dvalue_dx) return custom_->dvalue_dx(theta, t, x);
            constexpr double h = 1e-6;
            return (custom_->value(theta, t, x + h) - custom_->value(theta, t, x - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

std::vector<double> path_values(const ValueModel& model, double theta, const PathSample& path) {
    std::vector<double> out(path.size());
    std::size_t i = 0;
    try {
        for (; i < out.size(); ++i) {
            out[i] = model.value(theta, path.grid[i], path.observed[i]);
        }
    } catch (const SingularParameterError& e) {
        throw SingularParameterError(std::string(e.what()) + " (path index " +
                                     std::to_string(i) + ")");
    }
    return out;
}

}  // namespace jumprl
