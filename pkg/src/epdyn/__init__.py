"""Propagation and representation toolkit for driven dissipative level systems.

Numerically exact differencing schemes, closed-form biorthonormal frames
of a two-level loop around an eigenvalue degeneracy, the reduced
wave-operator correction to adiabatic following, and observables with
deterministic serialization.
"""

from __future__ import annotations

from . import analysis, models, numerics, propagators, representations, waveop

__all__ = [
    "analysis",
    "models",
    "numerics",
    "propagators",
    "representations",
    "waveop",
]

__version__ = "0.1.0"
