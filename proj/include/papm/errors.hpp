#pragma once

#include <stdexcept>
#include <string>

namespace papm {

/// Invalid scenario or parameter set, detected before the simulation starts.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller handed an operation an out-of-domain value (NaN error, h <= 0, ...).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ideal speed above 1: the task set cannot be scheduled on this CPU.
class SchedulabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Plant state became non-finite.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken kernel invariant (event order, negative time step).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace papm
