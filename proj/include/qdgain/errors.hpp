#pragma once

#include <stdexcept>
#include <string>

namespace qdgain {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// omega*I - H - Sigma^r could not be inverted (all broadenings zero and
/// omega on an eigenvalue).
class SingularMatrix : public Error {
public:
    SingularMatrix(const std::string& what, double eigenvalue)
        : Error(what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const { return eigenvalue_; }

private:
    double eigenvalue_;
};

class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double error_estimate, double omega = 0.0)
        : Error(what), error_estimate_(error_estimate), omega_(omega) {}
    double error_estimate() const { return error_estimate_; }
    double omega() const { return omega_; }

private:
    double error_estimate_;
    double omega_;
};

/// kappa <= N * F''(omega): the linear-response description breaks down at
/// and above the lasing threshold.
class ThresholdViolation : public Error {
public:
    ThresholdViolation(const std::string& what, int replicas, double omega)
        : Error(what), replicas_(replicas), omega_(omega) {}
    int replicas() const { return replicas_; }
    double omega() const { return omega_; }

private:
    int replicas_;
    double omega_;
};

/// Frequency grid does not cover the emission line well enough.
class InsufficientGrid : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, std::string field = {})
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line), field_(std::move(field)) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace qdgain
