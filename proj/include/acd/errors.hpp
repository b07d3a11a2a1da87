#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace acd {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    Success = 0,
    Usage = 1,
    Data = 2,
    Numerical = 3,
    GateFailure = 4,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual ExitCode exit_code() const noexcept = 0;
};

/// Invalid parameters, options or configurations.
class InvalidArgument : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::Usage; }
};

/// alpha + beta >= 1: the duration process has no finite mean.
class InfiniteMeanError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Malformed, non-positive, too short or otherwise unusable data.
class DataError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::Data; }
};

/// A horizon simulation produced no complete duration inside [0, T].
class EmptySeriesError : public DataError {
public:
    using DataError::DataError;
};

class NumericalError : public Error {
public:
    using Error::Error;
    [[nodiscard]] ExitCode exit_code() const noexcept override { return ExitCode::Numerical; }
};

/// Simulated conditional mean left the configured magnitude cap.
class ExplosionError : public NumericalError {
public:
    ExplosionError(std::size_t index, double psi)
        : NumericalError("conditional mean exploded at index " + std::to_string(index) +
                         " (psi=" + std::to_string(psi) + ")"),
          index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Non-finite intermediate value in the likelihood recursion.
class FilterDivergenceError : public NumericalError {
public:
    explicit FilterDivergenceError(std::size_t index)
        : NumericalError("likelihood filter diverged at index " + std::to_string(index)),
          index_(index) {}
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class SingularMatrixError : public NumericalError {
public:
    explicit SingularMatrixError(double condition_number)
        : NumericalError("information matrix is singular (condition number " +
                         std::to_string(condition_number) + ")"),
          condition_number_(condition_number) {}
    [[nodiscard]] double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

}  // namespace acd
