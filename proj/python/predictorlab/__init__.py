"""Delay-compensating predictor toolkit.

Thin Python surface over the C++ core: linear-algebra kernels, closed-loop
simulation of the reset-corrected predictor, and reset-period stability
analysis.  All heavy lifting happens in the compiled `_core` module.
"""

from ._core import (
    IoError,
    ScenarioError,
    SingularMatrixError,
    analyze,
    expm,
    find_min_stable_T,
    hurwitz_certificate,
    operator_norm,
    simulate,
    solve_linear,
    spectral_abscissa,
    spectral_radius,
)

__all__ = [
    "IoError",
    "ScenarioError",
    "SingularMatrixError",
    "analyze",
    "expm",
    "find_min_stable_T",
    "hurwitz_certificate",
    "operator_norm",
    "simulate",
    "solve_linear",
    "spectral_abscissa",
    "spectral_radius",
]
