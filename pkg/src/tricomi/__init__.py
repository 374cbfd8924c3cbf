"""Fundamental solutions of the Tricomi operator y Δ_x + ∂²/∂y² and their checks.

Modules
-------
specfun   Gamma-type functions and the Gauss hypergeometric function with branches.
chi       The distributions χ_q and the cone and layer pairings built on them.
geometry  Characteristic coordinates, forms and regions.
fundsol   Closed-form kernels, constants and their identities.
verify    Weak-form certification against test bumps.
cli       Command-line front end.
"""
from ._accel import BACKEND
from .errors import (ConvergenceError, CutError, DegeneracyError, DomainError, QuadratureError,
                     SingularLocusError, TricomiError)
from .specfun import Branch, BranchedValue, HypTriple, hyp2f1

__all__ = [
    "BACKEND", "Branch", "BranchedValue", "HypTriple", "hyp2f1",
    "TricomiError", "DomainError", "CutError", "ConvergenceError", "QuadratureError",
    "SingularLocusError", "DegeneracyError",
]
__version__ = "0.1.0"
