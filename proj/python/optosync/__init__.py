"""Two optomechanical membranes in a driven cavity: mean-field limit cycles,
phase locking, and Gaussian quantum correlations.

The heavy lifting lives in the compiled extension ``optosync._core``; this
package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    AnalysisConfig,
    ClassicalState,
    IntegratorConfig,
    OutputSet,
    RunResult,
    SystemParams,
    __version__,
    drift_matrix,
    f_function,
    find_threshold_eta,
    gaussian_discord,
    initial_cm,
    log_negativity,
    run,
    symplectic_eigenvalues,
    thermal_occupation,
)

__all__ = [
    "AnalysisConfig",
    "ClassicalState",
    "IntegratorConfig",
    "OutputSet",
    "RunResult",
    "SystemParams",
    "__version__",
    "drift_matrix",
    "f_function",
    "find_threshold_eta",
    "gaussian_discord",
    "initial_cm",
    "log_negativity",
    "run",
    "symplectic_eigenvalues",
    "thermal_occupation",
]
