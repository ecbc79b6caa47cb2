#pragma once

#include <stdexcept>
#include <string>

namespace prodgeo {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or operation received parameters outside its contract.
class invalid_argument_error : public error {
public:
    using error::error;
};

/// Input arity does not match the model arity.
class dimension_error : public invalid_argument_error {
public:
    using invalid_argument_error::invalid_argument_error;
};

/// Evaluation left the smooth domain: non-positive coordinate, log of a
/// non-positive argument, overflow to a non-finite value.
class domain_error : public error {
public:
    using error::error;
};

/// A quotient whose denominator vanishes (f = 0, f_{x_i} = 0).
class degenerate_error : public domain_error {
public:
    degenerate_error(const std::string& what, std::size_t factor)
        : domain_error(what), factor_(factor) {}

    std::size_t factor() const noexcept { return factor_; }

private:
    std::size_t factor_;
};

/// Model spec document failed to parse or validate.
class spec_error : public invalid_argument_error {
public:
    using invalid_argument_error::invalid_argument_error;
};

}  // namespace prodgeo
