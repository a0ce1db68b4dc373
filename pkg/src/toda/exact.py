"""Exact arithmetic substrate: dense polynomials, rational functions, Laurent series in 1/z.

Scalars are :class:`fractions.Fraction`. Polynomial coefficients may be any ring
element that supports ``+ - *`` (Fractions, floats, jets, or other polynomials),
which is how two-variable polynomials are built: a polynomial in ``z`` whose
coefficients are polynomials in ``y``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Sequence

Scalar = (int, Fraction)


def _is_zero(c) -> bool:
    return c == 0


def _nested_vars(obj) -> set[str]:
    out: set[str] = set()
    while isinstance(obj, Poly):
        out.add(obj.var)
        obj = obj.coeffs[0] if obj.coeffs else None
    return out


def frac_str(c: Fraction | int) -> str:
    """Serialize an exact rational as ``"num/den"``."""
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def parse_frac(s: str | int | float) -> Fraction:
    if isinstance(s, str):
        return Fraction(s.strip())
    return Fraction(s)


class Poly:
    """Dense univariate polynomial, coefficients in ascending degree.

    The zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        cs = list(coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    # constructors
    @classmethod
    def const(cls, c, var: str = "x") -> "Poly":
        return cls([c], var)

    @classmethod
    def monomial(cls, n: int, var: str = "x", c=1) -> "Poly":
        return cls([0] * n + [c], var)

    @classmethod
    def from_roots(cls, roots: Sequence, var: str = "x") -> "Poly":
        p = cls([1], var)
        for r in roots:
            p = p * cls([-r, 1], var)
        return p

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def _lift(self, other) -> "Poly | None":
        if isinstance(other, Poly) and other.var == self.var:
            return other
        return None

    def _outer(self, other) -> bool:
        # True when `other` should absorb `self`: a polynomial over self's
        # variable, or a rational function in the same variable.
        if isinstance(other, RationalFunction):
            return other.var == self.var or self.var in _nested_vars(other.num)
        return isinstance(other, Poly) and other.var != self.var and self.var in _nested_vars(other)

    # arithmetic
    def __add__(self, other):
        if self._outer(other):
            return NotImplemented
        o = self._lift(other)
        if o is None:
            cs = list(self.coeffs) or [0]
            cs[0] = cs[0] + other
            return Poly(cs, self.var)
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly([self.coeff(i) + o.coeff(i) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        if self._outer(other):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._outer(other):
            return NotImplemented
        o = self._lift(other)
        if o is None:
            return Poly([c * other for c in self.coeffs], self.var)
        if not self.coeffs or not o.coeffs:
            return Poly([], self.var)
        out = [0] * (len(self.coeffs) + len(o.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(o.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.var)

    def __rmul__(self, other):
        if self._outer(other):
            return NotImplemented
        return Poly([other * c for c in self.coeffs], self.var)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly([1], self.var)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return Poly([c / other for c in self.coeffs], self.var)
        return self.exact_div(o)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        """Euclidean division; the coefficient ring must be a field."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return Poly([], self.var), Poly(r, self.var)
        q = [0] * (dq + 1)
        lead = other.lc
        for k in range(dq, -1, -1):
            c = r[k + len(other.coeffs) - 1]
            if isinstance(c, int) and isinstance(lead, int):
                c = Fraction(c)
            c = c / lead
            q[k] = c
            if _is_zero(c):
                continue
            for j, b in enumerate(other.coeffs):
                r[k + j] = r[k + j] - c * b
        rem = Poly(r[: len(other.coeffs) - 1], self.var)
        return Poly(q, self.var), rem

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    # calculus and evaluation
    def deriv(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def map(self, f: Callable[[Any], Any]) -> "Poly":
        return Poly([f(c) for c in self.coeffs], self.var)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = Fraction(self.lc) if isinstance(self.lc, int) else self.lc
        return Poly([c / lead for c in self.coeffs], self.var)

    # comparison
    def __eq__(self, other):
        o = self._lift(other)
        if o is not None:
            return self.coeffs == o.coeffs
        if isinstance(other, Poly):
            return False
        try:
            if not self.coeffs:
                return other == 0
            return len(self.coeffs) == 1 and self.coeffs[0] == other
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            cs = f"({c})" if isinstance(c, Poly) else str(c)
            if mono and c == 1:
                terms.append(mono)
            elif mono:
                terms.append(f"{cs}*{mono}")
            else:
                terms.append(cs)
        return " + ".join(reversed(terms))

    # serialization
    def to_json(self):
        """Ascending coefficient list; exact rationals become ``"num/den"`` strings."""
        out = []
        for c in self.coeffs:
            if isinstance(c, Poly):
                out.append(c.to_json())
            elif isinstance(c, Scalar):
                out.append(frac_str(c))
            else:
                out.append(float(c))
        return out

    @classmethod
    def from_json(cls, data: Sequence, var: str = "x") -> "Poly":
        return cls([parse_frac(c) for c in data], var)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the rationals (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def content(p: Poly) -> Fraction:
    """Positive rational content: primitive part has coprime integer coefficients."""
    from math import gcd, lcm

    if p.is_zero():
        return Fraction(0)
    cs = [Fraction(c) for c in p.coeffs]
    den = 1
    for c in cs:
        den = lcm(den, c.denominator)
    num = 0
    for c in cs:
        num = gcd(num, (c * den).numerator)
    return Fraction(num, den)


class RationalFunction:
    """Reduced quotient of two rational-coefficient polynomials in one variable.

    Normal form: gcd(num, den) = 1 and den monic.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if not isinstance(num, Poly):
            num = Poly([Fraction(num)], den.var if den is not None else "t")
        if den is None:
            den = Poly([Fraction(1)], num.var)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.var != den.var:
            raise ValueError("numerator and denominator use different variables")
        if num.is_zero():
            self.num, self.den = Poly([], num.var), Poly([Fraction(1)], num.var)
            return
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num.exact_div(g), den.exact_div(g)
        lead = Fraction(den.lc)
        self.num = Poly([Fraction(c) / lead for c in num.coeffs], num.var)
        self.den = Poly([Fraction(c) / lead for c in den.coeffs], num.var)

    @property
    def var(self) -> str:
        return self.num.var

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        return RationalFunction(Poly([Fraction(other)], self.var))

    def __add__(self, other):
        o = self._coerce(other)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.den ** (-n), self.num ** (-n))
        return RationalFunction(self.num**n, self.den**n)

    def deriv(self) -> "RationalFunction":
        return RationalFunction(
            self.num.deriv() * self.den - self.num * self.den.deriv(), self.den * self.den
        )

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree == 0:
            return repr(self.num)
        return f"({self.num}) / ({self.den})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def rational_logderiv(p: Poly, q: Poly) -> RationalFunction:
    """d/dt log(p/q) = p'/p - q'/q as a reduced rational function."""
    if q.is_zero():
        raise ZeroDivisionError("q is identically zero")
    if p.is_zero():
        raise ZeroDivisionError("p is identically zero")
    return RationalFunction(p.deriv() * q - p * q.deriv(), p * q)


class SeriesOrderError(ValueError):
    pass


class FormalSeries:
    """Truncated Laurent series in 1/z.

    ``coeffs[i]`` is the coefficient of ``z**(top - i)``. ``order`` is the
    highest power of ``1/z`` whose coefficient is known; ``None`` marks an
    exact (finite) series. A Stieltjes series ``sum c_n z^{-n-1}`` built from
    ``c_0..c_K`` has ``top = -1`` and ``order = K + 1``.
    """

    __slots__ = ("coeffs", "top", "order")

    def __init__(self, coeffs: Iterable, top: int = -1, order: int | None = None):
        cs = list(coeffs)
        if order is not None:
            keep = top + order + 1
            cs = cs[: max(keep, 0)]
        self.coeffs = tuple(cs)
        self.top = top
        self.order = order

    @classmethod
    def stieltjes(cls, moments: Sequence) -> "FormalSeries":
        return cls(moments, top=-1, order=len(moments))

    @classmethod
    def from_poly(cls, p: Poly) -> "FormalSeries":
        if p.is_zero():
            return cls([], top=0, order=None)
        return cls(list(reversed(p.coeffs)), top=p.degree, order=None)

    @classmethod
    def monomial(cls, power: int, c=1) -> "FormalSeries":
        return cls([c], top=power, order=None)

    def coeff(self, power: int):
        if self.order is not None and power < -self.order:
            raise SeriesOrderError(f"coefficient of z^{power} is beyond order {self.order}")
        i = self.top - power
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    @property
    def powers(self) -> range:
        """Powers of z with known coefficients, descending."""
        low = -self.order if self.order is not None else self.top - len(self.coeffs) + 1
        return range(self.top, low - 1, -1)

    def terms(self) -> list[tuple[int, Any]]:
        return [(p, self.coeff(p)) for p in self.powers]

    def _bottom(self) -> int:
        return self.powers.stop + 1

    def __add__(self, other):
        if not isinstance(other, FormalSeries):
            other = FormalSeries([other], top=0, order=None)
        top = max(self.top, other.top)
        order = _min_order(self.order, other.order)
        low = -order if order is not None else min(self._bottom(), other._bottom())
        cs = [_safe_coeff(self, p) + _safe_coeff(other, p) for p in range(top, low - 1, -1)]
        return FormalSeries(cs, top, order)

    __radd__ = __add__

    def __neg__(self):
        return FormalSeries([-c for c in self.coeffs], self.top, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return series_product(self, other)
        return FormalSeries([c * other for c in self.coeffs], self.top, self.order)

    def __rmul__(self, other):
        return FormalSeries([other * c for c in self.coeffs], self.top, self.order)

    def shift(self, k: int) -> "FormalSeries":
        """Multiply by z**k."""
        order = None if self.order is None else self.order - k
        return FormalSeries(self.coeffs, self.top + k, order)

    def d_dz(self) -> "FormalSeries":
        cs = [(self.top - i) * c for i, c in enumerate(self.coeffs)]
        order = None if self.order is None else self.order + 1
        return FormalSeries(cs, self.top - 1, order)

    def map(self, f: Callable[[Any], Any]) -> "FormalSeries":
        return FormalSeries([f(c) for c in self.coeffs], self.top, self.order)

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries(self.coeffs, self.top, _min_order(self.order, order))

    def is_zero(self, tol: float | None = None) -> bool:
        return all(_near_zero(c, tol) for _, c in self.terms())

    def leading(self, tol: float | None = None) -> tuple[int, Any] | None:
        """First (highest power) coefficient that is not zero, or None."""
        for p, c in self.terms():
            if not _near_zero(c, tol):
                return p, c
        return None

    def __repr__(self):
        return f"FormalSeries(top={self.top}, order={self.order}, coeffs={list(self.coeffs)})"


def _min_order(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _safe_coeff(s: FormalSeries, p: int):
    i = s.top - p
    return s.coeffs[i] if 0 <= i < len(s.coeffs) else 0


def _magnitude(c) -> float:
    if hasattr(c, "max_abs"):
        return c.max_abs()
    if isinstance(c, (Poly, RationalFunction)):
        return 0.0 if c == 0 else float("inf")
    return abs(c)


def _near_zero(c, tol: float | None) -> bool:
    if tol is None:
        return c == 0
    return _magnitude(c) <= tol


def series_product(a: FormalSeries, b: FormalSeries, K: int | None = None) -> FormalSeries:
    """Truncated Cauchy product, valid through z^{-K} (or the inputs' joint order).

    Requesting K beyond what the inputs determine raises SeriesOrderError.
    """
    top = a.top + b.top
    valid = _min_order(
        None if a.order is None else a.order + b.top,
        None if b.order is None else b.order + a.top,
    )
    if K is not None:
        if valid is not None and K > valid:
            raise SeriesOrderError(f"order {K} exceeds available order {valid}")
        valid = K
    if valid is None:
        low = a._bottom() + b._bottom()
    else:
        low = -valid
    n = top - low + 1
    out = [0] * max(n, 0)
    for i, x in enumerate(a.coeffs):
        if _is_zero(x):
            continue
        for j, y in enumerate(b.coeffs):
            k = i + j
            if k >= n:
                break
            out[k] = out[k] + x * y
    return FormalSeries(out, top, valid)


# determinants

def _is_exact_scalar(x) -> bool:
    return isinstance(x, Scalar)


def det_exact(m: Sequence[Sequence]) -> Any:
    """Exact determinant of a square matrix over Q or Q[t].

    Rational entries use fraction-free Bareiss elimination. Polynomial entries
    use memoized cofactor expansion up to dimension 8 and Bareiss with exact
    polynomial division above that. Other rings (jets, floats, rational
    functions) fall back to :func:`det_field`.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    flat = [x for row in m for x in row]
    if all(_is_exact_scalar(x) for x in flat):
        return _bareiss([[Fraction(x) for x in row] for row in m])
    if all(isinstance(x, Poly) or _is_exact_scalar(x) for x in flat):
        var = next(x.var for x in flat if isinstance(x, Poly))
        mm = [[x if isinstance(x, Poly) else Poly([Fraction(x)], var) for x in row] for row in m]
        if n <= 8:
            return _laplace(mm)
        return _bareiss(mm)
    return det_field(m)


def _bareiss(m: list[list]) -> Any:
    a = [list(row) for row in m]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return a[0][0] * 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num / prev if not isinstance(prev, int) else num
            a[i][k] = a[i][k] * 0
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


def _laplace(m: list[list]) -> Any:
    n = len(m)
    zero = m[0][0] * 0

    @lru_cache(maxsize=None)
    def minor(row: int, cols: tuple[int, ...]):
        if row == n:
            return None
        total = zero
        for idx, c in enumerate(cols):
            entry = m[row][c]
            if entry == 0:
                continue
            rest = cols[:idx] + cols[idx + 1 :]
            sub = minor(row + 1, rest)
            term = entry if sub is None else entry * sub
            total = total + term if idx % 2 == 0 else total - term
        return total

    return minor(0, tuple(range(n)))


def det_field(m: Sequence[Sequence]) -> Any:
    """Gaussian elimination over a field-like ring with magnitude pivoting."""
    a = [list(row) for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    det = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda r: _pivot_size(a[r][k]))
        if _pivot_size(a[piv][k]) == 0:
            return a[0][0] * 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        p = a[k][k]
        det = det * p
        inv = 1 / p
        for i in range(k + 1, n):
            f = a[i][k] * inv
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    return det


def _pivot_size(x) -> float:
    if hasattr(x, "coeffs") and hasattr(x, "t0"):
        return abs(x.coeffs[0]) if x.coeffs else 0.0
    if isinstance(x, RationalFunction):
        return 0.0 if x.is_zero() else 1.0
    return abs(x)


def det_permutation(m: Sequence[Sequence]) -> Any:
    """Naive permutation-sum determinant (testing oracle, O(n!))."""
    n = len(m)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = term * m[i][perm[i]]
        total = total - term if inv % 2 else total + term
    return total
