#pragma once

#include <stdexcept>
#include <string>

namespace co2proxy {

// Invalid policy or model parameters (violated type invariant).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad input data: negative volumes, malformed files, coverage gaps.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The auction has no feasible intersection of supply and demand.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A policy variant reached an operation that has no meaning for it.
class UnsupportedPolicyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace co2proxy
