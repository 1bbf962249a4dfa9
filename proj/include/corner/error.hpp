#pragma once

#include <stdexcept>
#include <string>

namespace corner {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGenerator : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NonInvertibleError : public Error {
public:
    using Error::Error;
};

class CapacityViolation : public Error {
public:
    using Error::Error;
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

// Geometry, rhs or config data that fails validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigurationError : public Error {
public:
    using Error::Error;
};

class IterationLimit : public Error {
public:
    IterationLimit(const std::string &what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class ContractionFailure : public Error {
public:
    ContractionFailure(const std::string &what, double ratio) : Error(what), ratio_(ratio) {}
    double ratio() const { return ratio_; }

private:
    double ratio_;
};

}  // namespace corner
