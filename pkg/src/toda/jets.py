"""Truncated Taylor series ("jets") at a base point and the named potentials.

A jet of order K at t0 holds j_0..j_K with f(t) = sum_k j_k (t - t0)^k + O((t-t0)^{K+1}).
Arithmetic truncates to the smaller order; differentiation drops one order.
Elementary functions are generated from their own ODEs so every coefficient
comes out of an exact recurrence.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

_NUMBER = (int, float, Fraction)


class JetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Jet:
    t0: float
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise JetError("a jet needs at least one coefficient")

    @classmethod
    def constant(cls, c, t0, K: int) -> "Jet":
        return cls(t0, (c,) + (c * 0,) * K)

    @classmethod
    def variable(cls, t0, K: int) -> "Jet":
        """The identity function t as a jet."""
        one = Fraction(1) if isinstance(t0, (int, Fraction)) else 1.0
        cs = [t0, one] + [one * 0] * (K - 1)
        return cls(t0, tuple(cs[: K + 1]))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self):
        return self.coeffs[0]

    def deriv_value(self, m: int):
        """m-th derivative at t0."""
        if m > self.order:
            raise JetError(f"derivative {m} exceeds jet order {self.order}")
        return math.factorial(m) * self.coeffs[m]

    def __call__(self, t):
        s = t - self.t0
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def truncate(self, K: int) -> "Jet":
        if K > self.order:
            raise JetError(f"cannot extend a jet of order {self.order} to {K}")
        return Jet(self.t0, self.coeffs[: K + 1])

    def max_abs(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def _check(self, other: "Jet"):
        if other.t0 != self.t0:
            raise JetError(f"mismatched base points {self.t0} and {other.t0}")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            n = min(len(self.coeffs), len(other.coeffs))
            return Jet(self.t0, tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))
        if isinstance(other, _NUMBER):
            return Jet(self.t0, (self.coeffs[0] + other,) + self.coeffs[1:])
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.t0, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, (Jet,) + _NUMBER):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            n = min(len(self.coeffs), len(other.coeffs))
            a, b = self.coeffs, other.coeffs
            return Jet(self.t0, tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)))
        if isinstance(other, _NUMBER):
            return Jet(self.t0, tuple(c * other for c in self.coeffs))
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("jet with zero constant term has no reciprocal")
        b = [1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])]
        for k in range(1, len(a)):
            b.append(-sum(a[i] * b[k - i] for i in range(1, k + 1)) / a[0])
        return Jet(self.t0, tuple(b))

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        if isinstance(other, _NUMBER):
            return Jet(self.t0, tuple(c / other for c in self.coeffs))
        return NotImplemented

    def __rtruediv__(self, other):
        return other * self.reciprocal()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return jet_pow(self, n)
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Jet.constant(self.coeffs[0] ** 0, self.t0, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def derivative(self) -> "Jet":
        if self.order < 1:
            raise JetError("cannot differentiate a jet of order 0")
        return Jet(self.t0, tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.t0 == other.t0 and self.coeffs == other.coeffs
        if isinstance(other, _NUMBER):
            return self.coeffs[0] == other and all(c == 0 for c in self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        return hash((self.t0, self.coeffs))

    def __repr__(self):
        return f"Jet(t0={self.t0}, {list(self.coeffs)})"


def jet_product(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_reciprocal(a: Jet) -> Jet:
    return a.reciprocal()


def jet_derivative(a: Jet) -> Jet:
    return a.derivative()


def _ode_jet(t0, y0, K: int, rhs) -> Jet:
    """Jet of the solution of y' = rhs(y) with y(t0) = y0.

    rhs maps the partial coefficient list of y to the k-th coefficient of rhs(y),
    using only y_0..y_k.
    """
    ys = [y0]
    for k in range(K):
        ys.append(rhs(ys, k) / (k + 1))
    return Jet(t0, tuple(ys))


def _square_coeff(ys, k):
    return sum(ys[i] * ys[k - i] for i in range(k + 1))


def jet_tanh(t0: float, K: int) -> Jet:
    """tanh via y' = 1 - y^2."""
    return _ode_jet(t0, math.tanh(t0), K, lambda ys, k: (1.0 if k == 0 else 0.0) - _square_coeff(ys, k))


def jet_tan(t0: float, K: int) -> Jet:
    """tan via y' = 1 + y^2."""
    return _ode_jet(t0, math.tan(t0), K, lambda ys, k: (1.0 if k == 0 else 0.0) + _square_coeff(ys, k))


def jet_exp(a: Jet) -> Jet:
    """exp of a jet via b' = a' b."""
    da = a.derivative().coeffs
    bs = [math.exp(a.coeffs[0])]
    for k in range(a.order):
        bs.append(sum(da[i] * bs[k - i] for i in range(k + 1)) / (k + 1))
    return Jet(a.t0, tuple(bs))


def jet_log(a: Jet) -> Jet:
    if a.order == 0:
        return Jet(a.t0, (math.log(a.coeffs[0]),))
    d = a.derivative() / a.truncate(a.order - 1)
    return Jet(a.t0, (math.log(a.coeffs[0]),) + tuple(c / (k + 1) for k, c in enumerate(d.coeffs)))


def jet_pow(a: Jet, p: float) -> Jet:
    """a**p for real p via b a' p = a b'."""
    a0 = a.coeffs[0]
    if a0 == 0:
        raise ZeroDivisionError("real power of a jet with zero constant term")
    cs = a.coeffs
    bs = [a0**p]
    for k in range(1, len(cs)):
        s = sum((p * (k - j) - j) * cs[k - j] * bs[j] for j in range(k))
        bs.append(s / (k * a0))
    return Jet(a.t0, tuple(bs))


def jet_cosh(t0: float, K: int) -> Jet:
    e = jet_exp(Jet.variable(float(t0), K))
    return (e + e.reciprocal()) * 0.5


@dataclass(frozen=True)
class PotentialSpec:
    """A named potential u_0(t).

    kind is one of ``centrifugal`` (alpha/t^2), ``sec2`` (alpha/cos^2 t),
    ``sech2`` (N(N+1)/cosh^2 t), ``linear`` (t) or ``series`` (raw Taylor
    coefficients at the base point).
    """

    kind: str
    alpha: float | Fraction = 1
    N: int = 1
    series: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("centrifugal", "sec2", "sech2", "linear", "series"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "sech2" and (not isinstance(self.N, int) or self.N < 1):
            raise ValueError("sech2 requires an integer N >= 1")

    def __call__(self, t: float) -> float:
        """Pointwise value (used for finite-difference cross-checks)."""
        if self.kind == "centrifugal":
            return float(self.alpha) / t**2
        if self.kind == "sec2":
            return float(self.alpha) / math.cos(t) ** 2
        if self.kind == "sech2":
            return self.N * (self.N + 1) / math.cosh(t) ** 2
        if self.kind == "linear":
            return t
        raise ValueError("series potentials have no pointwise form")

    def __str__(self):
        if self.kind in ("centrifugal", "sec2"):
            return f"{self.kind}:alpha={self.alpha}"
        if self.kind == "sech2":
            return f"sech2:N={self.N}"
        if self.kind == "series":
            return "series:" + ",".join(str(c) for c in self.series)
        return "linear"


_SPEC_RE = re.compile(r"^(centrifugal|sec2):alpha=(.+)$|^sech2:N=(\d+)$|^linear$|^series:(.+)$")


def parse_potential(text: str) -> PotentialSpec:
    """Parse ``centrifugal:alpha=<r>``, ``sec2:alpha=<r>``, ``sech2:N=<int>``, ``linear``, ``series:<c0,c1,...>``."""
    text = text.strip()
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"malformed potential spec {text!r}")
    if m.group(1):
        return PotentialSpec(m.group(1), alpha=_parse_number(m.group(2)))
    if m.group(3):
        return PotentialSpec("sech2", N=int(m.group(3)))
    if text == "linear":
        return PotentialSpec("linear")
    return PotentialSpec("series", series=tuple(_parse_number(c) for c in m.group(4).split(",")))


def _parse_number(s: str):
    s = s.strip()
    try:
        return Fraction(s)
    except ValueError:
        return float(s)


def jet_lift(spec: PotentialSpec, t0, K: int) -> Jet:
    """Taylor coefficients of the named potential at t0 through order K.

    Rational base points give exact coefficients for the rational potentials
    (centrifugal, linear, series); trigonometric ones are always binary64.
    """
    if K < 0:
        raise JetError("order must be non-negative")
    kind = spec.kind
    if kind == "centrifugal":
        if t0 == 0:
            raise JetError("centrifugal potential has a pole at t0 = 0")
        exact = isinstance(t0, (int, Fraction)) and isinstance(spec.alpha, (int, Fraction))
        base = Fraction(t0) if exact else float(t0)
        alpha = Fraction(spec.alpha) if exact else float(spec.alpha)
        r = Jet.variable(base, K).reciprocal()
        return r * r * alpha
    if kind == "sec2":
        if abs(math.cos(t0)) < 1e-14:
            raise JetError("sec^2 potential has a pole where cos t0 = 0")
        y = jet_tan(float(t0), K)
        return (y * y + 1.0) * float(spec.alpha)
    if kind == "sech2":
        y = jet_tanh(float(t0), K)
        return (1.0 - y * y) * float(spec.N * (spec.N + 1))
    if kind == "linear":
        base = Fraction(t0) if isinstance(t0, (int, Fraction)) else float(t0)
        return Jet.variable(base, K)
    cs = list(spec.series[: K + 1])
    if len(cs) < K + 1:
        cs += [cs[0] * 0 if cs else 0.0] * (K + 1 - len(cs))
    return Jet(t0, tuple(cs))
