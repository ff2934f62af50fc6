#pragma once

#include <stdexcept>
#include <string>

namespace qucrl {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// The Markov chain induced by (policy, model) has more than one recurrent class.
struct NonErgodicChain : Error {
    using Error::Error;
};

// A linear solve failed for numerical reasons unrelated to chain structure.
struct SingularSystem : Error {
    using Error::Error;
};

// Deterministic-policy enumeration guard (A^S) exceeded.
struct TooLargeToEnumerate : Error {
    using Error::Error;
};

struct InvalidParams : Error {
    using Error::Error;
};

// Horizon too short for the experiment-budget logarithm.
struct InvalidHorizon : Error {
    using Error::Error;
};

// A quantum sample was measured twice.
struct DoubleConsumption : Error {
    using Error::Error;
};

// A batch of quantum samples spans more than one (state, action) pair.
struct MixedKeys : Error {
    using Error::Error;
};

// Sample buffer holds samples from an epoch other than the one being closed.
struct StaleBuffer : Error {
    using Error::Error;
};

struct InvalidRadius : Error {
    using Error::Error;
};

struct LpInfeasible : Error {
    using Error::Error;
};

struct LpNumericalFailure : Error {
    using Error::Error;
};

struct MismatchedHorizon : Error {
    using Error::Error;
};

struct DegenerateWindow : Error {
    using Error::Error;
};

struct IoFailure : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace qucrl
