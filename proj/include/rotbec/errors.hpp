#pragma once

#include <stdexcept>
#include <string>

namespace rotbec {

// Error taxonomy mirrored by the CLI exit codes:
//   ConfigError -> 2, NumericalError (and subtypes) -> 3, IoError -> 4.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested evaluation window leaves the available data (profile tail, lab box).
class RangeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Grid too coarse to resolve the requested structure; carries advice, not data.
class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Fredholm solvability violated: right-hand side has a component along the kernel.
class OrthogonalityError : public NumericalError {
public:
    OrthogonalityError(const std::string& what, double inner_product)
        : NumericalError(what), inner_product_(inner_product) {}
    double inner_product() const { return inner_product_; }

private:
    double inner_product_;
};

} // namespace rotbec
