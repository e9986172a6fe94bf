#pragma once

#include <stdexcept>
#include <string>

namespace swing {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Volume constraints that no admissible purchase schedule can satisfy.
class InfeasibleContract : public Error {
public:
    using Error::Error;
};

/// Interpolation hit an integer vertex with no stored premium.
class SurfaceIncomplete : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration refused because the instance exceeds its size guard.
class InstanceTooLarge : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

#define SWING_REQUIRE(cond, msg)                                     \
    do {                                                             \
        if (!(cond)) throw ::swing::ContractViolation(std::string(msg)); \
    } while (false)

}  // namespace swing
