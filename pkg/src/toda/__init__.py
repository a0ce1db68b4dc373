"""Toda chain / Schrodinger correspondence: moments, orthogonal polynomials,
Bargmann potentials, rational Painleve-II solutions and Jacobi spectra."""

from .exact import FormalSeries, Poly, RationalFunction
from .jets import Jet, PotentialSpec, jet_lift, parse_potential
from .core import MomentTable, RecurrenceCoefficients, moments_from_initial, recurrence_from_moments

__all__ = [
    "FormalSeries",
    "Jet",
    "MomentTable",
    "Poly",
    "PotentialSpec",
    "RationalFunction",
    "RecurrenceCoefficients",
    "jet_lift",
    "moments_from_initial",
    "parse_potential",
    "recurrence_from_moments",
]
