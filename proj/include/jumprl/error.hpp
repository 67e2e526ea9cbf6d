#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jumprl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (grid, spec, model or run settings).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A sequence is too short for the requested statistic.
class InsufficientDataError : public Error {
public:
    InsufficientDataError(const std::string& what, std::size_t got, std::size_t need)
        : Error(what + ": need at least " + std::to_string(need) + " values, got " +
                std::to_string(got)),
          got_(got), need_(need) {}

    std::size_t got() const noexcept { return got_; }
    std::size_t need() const noexcept { return need_; }

private:
    std::size_t got_;
    std::size_t need_;
};

/// A state or parameter left the finite range.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Simulation hit a non-finite state.
class OverflowError : public NumericalError {
public:
    explicit OverflowError(std::size_t step)
        : NumericalError("non-finite state at simulation step " + std::to_string(step)),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Parameter sits on a singularity of the model (MeanVariance at theta = 0).
class SingularParameterError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Statistic undefined because the input has zero spread.
class DegenerateSeriesError : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data file.
class IngestError : public Error {
public:
    using Error::Error;
};

}  // namespace jumprl
