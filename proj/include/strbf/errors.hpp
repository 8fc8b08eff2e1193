#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace strbf {

/// Base for every error raised by the library. `kind()` is a stable short
/// token used by the CLI for machine-parsable error lines.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// Caller broke a precondition (dimension mismatch, bad parameter, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "contract"; }
};

/// Mathematical domain error, e.g. dB of a non-positive MSE.
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain"; }
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "empty-dataset"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

/// The delay-equation integrator produced a non-finite state.
class IntegrationDivergence : public Error {
public:
    IntegrationDivergence(double time, const std::string& what)
        : Error(what), time_(time) {}
    const char* kind() const noexcept override { return "integration-divergence"; }
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Online training blew up. Carries the iteration (and, once it bubbles
/// through the Monte-Carlo driver, the run index).
class TrainingDivergence : public Error {
public:
    TrainingDivergence(std::size_t iteration, const std::string& what,
                       std::optional<std::size_t> run = std::nullopt)
        : Error(what), iteration_(iteration), run_(run) {}
    const char* kind() const noexcept override { return "divergence"; }
    std::size_t iteration() const noexcept { return iteration_; }
    std::optional<std::size_t> run() const noexcept { return run_; }

private:
    std::size_t iteration_;
    std::optional<std::size_t> run_;
};

}  // namespace strbf
