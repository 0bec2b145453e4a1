#pragma once

#include <stdexcept>
#include <string>

namespace optosync {

/// Base class for all failures raised by the simulation library.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter or configuration value violates a model invariant.
struct InvalidParams final : SimulationError {
    using SimulationError::SimulationError;
};

/// The adaptive step controller drove the step below representable size.
struct StepSizeUnderflow final : SimulationError {
    using SimulationError::SimulationError;
};

/// A state entry left the finite range during integration.
struct NonFinite final : SimulationError {
    using SimulationError::SimulationError;
};

/// Instantaneous phase requested below the action floor n_min.
struct PhaseUndefined final : SimulationError {
    using SimulationError::SimulationError;
};

/// Raw phase-difference jump too close to pi for an unambiguous unwrap.
struct UndersampledPhase final : SimulationError {
    using SimulationError::SimulationError;
};

/// Covariance matrix violated V + (i/2) Omega >= 0 beyond tolerance.
struct PhysicalityLost final : SimulationError {
    using SimulationError::SimulationError;
};

/// A correlation measure was asked of a CM that is not a physical state.
struct UnphysicalState final : SimulationError {
    using SimulationError::SimulationError;
};

/// Argument outside the mathematical domain of a special function.
struct DomainError final : SimulationError {
    using SimulationError::SimulationError;
};

/// Time-average window holds too few samples to be meaningful.
struct WindowTooShort final : SimulationError {
    using SimulationError::SimulationError;
};

/// Bisection bracket endpoints evaluate to the same predicate value.
struct NoSignChange final : SimulationError {
    using SimulationError::SimulationError;
};

/// Iteration cap reached before the bracket shrank below tolerance.
struct MaxIterations final : SimulationError {
    using SimulationError::SimulationError;
};

/// Run-configuration file could not be parsed or contains unknown keys.
struct ConfigError final : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace optosync
