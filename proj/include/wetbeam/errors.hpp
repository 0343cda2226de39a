// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wetbeam {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A model parameter outside its admissible range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Dimension disagreement between operands.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Coincident points or other geometry that leaves an angle or distance undefined.
class DegenerateGeometryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An amplifier asked to deliver more than its maximum output power.
class SaturationError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Efficiency requested at zero output power.
class UndefinedEfficiencyError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An SCA anchor that violates the per-chain power limit.
class InfeasibleAnchorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No feasible starting point could be constructed.
class InitializationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration outside what the algorithms support (e.g. fewer chains than devices).
class UnsupportedConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Assignment enumeration would exceed the configured cap.
class CombinatorialBlowupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A convex subproblem failed inside the SCA loop.
class SubproblemError : public std::runtime_error {
public:
    SubproblemError(const std::string& what, int iteration)
        : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration)
    {
    }

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

} // namespace wetbeam
