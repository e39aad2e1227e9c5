#pragma once

#include <stdexcept>
#include <string>

namespace railq {

/// Malformed or inconsistent railway data (unknown ids, bad routes, cyclic turnovers).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation requested outside its domain (e.g. a headway past the last station).
class DomainError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The delay bounds leave no admissible value for some decision.
class InfeasibleModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problem too large for the requested exact method.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid solver or builder parameter.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace railq
