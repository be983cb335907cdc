#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace architope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad config field, invalid partition, bad argument.
/// `path` names the offending field when one is known (e.g. "learner.degree").
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what, std::string path = {})
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// A precondition of an operation does not hold for otherwise valid inputs.
class PreconditionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Base for failures that happen during numerical work.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A function or density produced a non-finite (or negative density) value at a node.
class EvaluationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Region n has measure at or below the mass tolerance, i.e. 0 < mu(K_n) fails.
class AssumptionViolation : public NumericalError {
public:
    AssumptionViolation(std::size_t region, double mass)
        : NumericalError("region " + std::to_string(region) + " has non-positive mass " +
                         std::to_string(mass)),
          region_(region), mass_(mass) {}
    std::size_t region() const noexcept { return region_; }
    double mass() const noexcept { return mass_; }

private:
    std::size_t region_;
    double mass_;
};

/// Gradient descent diverged (loss above 1e6 or non-finite).
class TrainingError : public NumericalError {
public:
    TrainingError(std::size_t epoch, double loss)
        : NumericalError("training diverged at epoch " + std::to_string(epoch) +
                         " (loss " + std::to_string(loss) + ")"),
          epoch_(epoch) {}
    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

/// Wraps a fit failure with the region it happened on.
class RegionFitError : public NumericalError {
public:
    RegionFitError(std::size_t region, const std::string& cause)
        : NumericalError("fit on region " + std::to_string(region) + " failed: " + cause),
          region_(region) {}
    std::size_t region() const noexcept { return region_; }

private:
    std::size_t region_;
};

} // namespace architope
