"""Executable counterexamples for value functions of conic linear programs.

The package bundles an exact rational simplex solver, finite models of
three value-function pathologies (a rotated second-order cone LP, a
Hilbert-space LP with no dual feasible points, and Kretschmer's L^2 gap
family), and checkers for sublinearity and semicontinuity.
"""

from valuegap.extended import ExtendedReal, NEG_INF, POS_INF, UndefinedOperation

__all__ = ["ExtendedReal", "NEG_INF", "POS_INF", "UndefinedOperation"]
__version__ = "0.1.0"
