"""Rational Painleve-II solutions from the linear-potential moment chain.

All arithmetic is exact: moments and Hankel determinants are polynomials in t
with rational coefficients, V_N and the PII residual are reduced rational
functions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .core import MomentTable, hankel, moments_from_initial, toda_forward
from .exact import FormalSeries, Poly, RationalFunction, rational_logderiv

N_CAP = 8

T = Poly([Fraction(0), Fraction(1)], "t")


@dataclass(frozen=True)
class PiiSolution:
    N: int
    H_N: Poly
    H_N1: Poly
    V: RationalFunction
    alpha: Fraction

    def to_json(self, residual_zero: bool | None = None) -> dict:
        out = {"N": self.N, "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
               "H_N": self.H_N.to_json(), "H_N1": self.H_N1.to_json(), "V": self.V.to_json()}
        if residual_zero is not None:
            out["residual_zero"] = residual_zero
        return out


def yv_moments(N: int) -> MomentTable:
    """a_0..a_N with a_0 = t, a_1 = 1, a_{n+1} = a_n' + sum a_s a_{n-1-s}."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return moments_from_initial(T, T, N)


def yv_hankel(n: int, moments: MomentTable | None = None) -> Poly:
    m = moments if moments is not None and moments.N >= 2 * n - 2 else yv_moments(max(2 * n - 2, 0))
    H = hankel(m, n)
    if not isinstance(H, Poly):
        H = Poly([Fraction(H)], "t")
    if n <= N_CAP + 1 and any(Fraction(c).denominator != 1 for c in H.coeffs):
        warnings.warn(f"H_{n} has non-integer coefficients", RuntimeWarning)
    return H


def pii_solution(N: int, allow_large: bool = False) -> PiiSolution:
    """V_N = d/dt log(H_{N+1}/H_N), a rational solution of PII with alpha = N + 1/2."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if N > N_CAP and not allow_large:
        raise ValueError(f"N={N} exceeds the default cap {N_CAP}")
    m = yv_moments(2 * N)
    H_N, H_N1 = yv_hankel(N, m), yv_hankel(N + 1, m)
    if H_N.is_zero() or H_N1.is_zero():
        raise ArithmeticError(f"vanishing Hankel determinant at N={N}")
    V = rational_logderiv(H_N1, H_N)
    return PiiSolution(N, H_N, H_N1, V, Fraction(2 * N + 1, 2))


def pii_residual_of(V: RationalFunction, alpha: Fraction) -> RationalFunction:
    """V'' - 2V^3 + 4tV - 4(alpha + 1/2).

    With V = A/B the residual is computed as one numerator over B^3, so the only
    gcd taken is the final reduction.
    """
    A, B = V.num, V.den
    dA, dB = A.deriv(), B.deriv()
    num = (A.deriv().deriv() * B - A * dB.deriv()) * B - (dA * B - A * dB) * dB * 2
    num = num - A * A * A * 2 + T * A * B * B * 4 - B * B * B * (4 * (Fraction(alpha) + Fraction(1, 2)))
    if num.is_zero():
        return RationalFunction(Poly([], "t"))
    return RationalFunction(num, B * B * B)


def pii_residual(sol: PiiSolution) -> RationalFunction:
    return pii_residual_of(sol.V, sol.alpha)


def b_from_toda(N: int) -> RationalFunction:
    """b_N from the Toda equations with c_0 = u_0 = t, independent of the Hankel route."""
    rc = toda_forward(RationalFunction(T), RationalFunction(T), N)
    b = rc.b[N]
    return b if isinstance(b, RationalFunction) else RationalFunction(b)


def laguerre_hahn_residual(K: int) -> FormalSeries:
    """2 dF/dz - z F^2 + z^2 F - t z - 1 through z^{-K}, with F built from the YV moments."""
    if K < 2:
        raise ValueError("K must be at least 2")
    m = yv_moments(K + 1)
    F = FormalSeries.stieltjes(m.c)
    res = F.d_dz() * 2 - (F * F).shift(1) + F.shift(2)
    res = res - FormalSeries([T, Fraction(1)], top=1, order=None)
    return res.truncate(K)
