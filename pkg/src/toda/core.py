"""Moments, Hankel determinants and recurrence coefficients of the Toda chain.

Everything here is ring-generic: moments may be exact polynomials in t,
rational functions of t, jets at a base point, or constants. The canonical
index convention is

    b_k' = u_{k+1} - u_k,    u_k' = u_k (b_k - b_{k-1}),

with c_1 = c_0' and c_{n+1} = c_n' + (u_0/c_0) sum_{s<n} c_s c_{n-1-s}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .exact import (
    FormalSeries,
    Poly,
    RationalFunction,
    SeriesOrderError,
    det_exact,
    det_field,
    frac_str,
)
from .jets import Jet, JetError

SINGULAR_RTOL = 1e-12


class SingularHankel(ArithmeticError):
    """A Hankel determinant vanished where a nonzero one was needed."""

    def __init__(self, n: int, msg: str | None = None):
        super().__init__(msg or f"Hankel determinant H_{n} vanishes")
        self.n = n


class WindowError(ValueError):
    pass


# ring helpers

def ddt(x):
    """Time derivative in whichever ring x lives in."""
    if isinstance(x, Jet):
        return x.derivative()
    if isinstance(x, (Poly, RationalFunction)):
        return x.deriv()
    if isinstance(x, (int, float, Fraction)):
        return x * 0
    raise TypeError(f"no time derivative for {type(x).__name__}")


def ring_of(x) -> str:
    if isinstance(x, Jet):
        return "jet"
    if isinstance(x, Poly):
        return "poly"
    if isinstance(x, RationalFunction):
        return "rational"
    if isinstance(x, (int, Fraction)):
        return "exact"
    if isinstance(x, float):
        return "float"
    raise TypeError(f"unsupported ring element {type(x).__name__}")


def is_exact(x) -> bool:
    return ring_of(x) in ("poly", "rational", "exact")


def divide(a, b):
    """a / b, promoting polynomials to rational functions when needed."""
    if isinstance(b, Poly) or isinstance(a, Poly):
        a = RationalFunction(a) if isinstance(a, Poly) else a
        b = RationalFunction(b) if isinstance(b, Poly) else b
        q = a / b if isinstance(a, RationalFunction) else RationalFunction(Poly([Fraction(a)], b.var)) / b
        return q.num if q.den.degree == 0 else q
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def value_at(x, t0=None) -> float:
    """Numeric value of a ring element (jets at their base point)."""
    if isinstance(x, Jet):
        return float(x.value)
    if isinstance(x, (Poly, RationalFunction)):
        return float(x(Fraction(t0)))
    return float(x)


def is_zero_like(x, scale: float = 1.0) -> bool:
    if isinstance(x, Jet):
        return abs(x.value) <= SINGULAR_RTOL * max(scale, 1e-300)
    if isinstance(x, float):
        return abs(x) <= SINGULAR_RTOL * max(scale, 1e-300)
    return x == 0


def _mag(x) -> float:
    if isinstance(x, Jet):
        return abs(float(x.value))
    if isinstance(x, (int, float, Fraction)):
        return abs(float(x))
    return 1.0


# moments

@dataclass(frozen=True)
class MomentTable:
    """Moments c_0..c_N together with the ratio u_0/c_0 that generated them."""

    c: tuple
    u0: Any
    ratio: Any

    @property
    def N(self) -> int:
        return len(self.c) - 1

    @property
    def ring(self) -> str:
        return ring_of(self.c[0])

    def __getitem__(self, n: int):
        return self.c[n]

    def to_json(self) -> dict:
        return {"ring": self.ring, "c": {str(n): _emit(x) for n, x in enumerate(self.c)}}


def _emit(x):
    if isinstance(x, (Poly, RationalFunction)):
        return x.to_json()
    if isinstance(x, (int, Fraction)):
        return frac_str(x)
    if isinstance(x, Jet):
        return [frac_str(c) if isinstance(c, (int, Fraction)) else float(c) for c in x.coeffs]
    return float(x)


def moments_from_initial(c0, u0, N: int) -> MomentTable:
    """Build c_0..c_N from the moment recurrence."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if isinstance(c0, Jet):
        if c0.value == 0:
            raise ZeroDivisionError("c_0 is not invertible at the base point")
        if c0.order < N or (isinstance(u0, Jet) and u0.order < N - 1):
            raise JetError(f"jet order {c0.order} is too small for {N} moments")
    elif c0 == 0:
        raise ZeroDivisionError("c_0 is identically zero")
    ratio = divide(u0, c0)
    cs = [c0]
    if N >= 1:
        cs.append(ddt(c0))
    for n in range(1, N):
        acc = 0
        for s in range(n):
            acc = acc + cs[s] * cs[n - 1 - s]
        cs.append(ddt(cs[n]) + ratio * acc)
    return MomentTable(tuple(cs), u0, ratio)


def hankel_matrix(m: MomentTable, n: int) -> list[list]:
    return [[m.c[i + k] for k in range(n)] for i in range(n)]


def hankel(m: MomentTable, n: int):
    """H_n = det(c_{i+k}), i,k < n; H_0 = 1."""
    if n < 0:
        raise ValueError("negative Hankel index")
    if n == 0:
        return Fraction(1) if is_exact(m.c[0]) else 1.0 * (m.c[0] ** 0)
    if 2 * n - 2 > m.N:
        raise WindowError(f"H_{n} needs moments through c_{2 * n - 2}, table has c_{m.N}")
    mat = hankel_matrix(m, n)
    if is_exact(m.c[0]):
        return det_exact(mat)
    return det_field(mat)


# recurrence coefficients

@dataclass
class RecurrenceCoefficients:
    """Monic recurrence coefficients b_n, u_n keyed by (possibly negative) index.

    ``singular_at`` records the first n with u_n = 0 (H_{n+1} = 0); the window
    is truncated there, so b_n for that n and beyond is absent.
    """

    b: dict = field(default_factory=dict)
    u: dict = field(default_factory=dict)
    singular_at: int | None = None
    ring: str = "exact"

    @property
    def n_lo(self) -> int:
        return min(list(self.b) + list(self.u))

    @property
    def n_hi(self) -> int:
        return max(list(self.b) + list(self.u))

    def copy(self) -> "RecurrenceCoefficients":
        return RecurrenceCoefficients(dict(self.b), dict(self.u), self.singular_at, self.ring)

    def to_json(self) -> dict:
        return {
            "ring": self.ring,
            "b": {str(k): _emit(v) for k, v in sorted(self.b.items())},
            "u": {str(k): _emit(v) for k, v in sorted(self.u.items())},
            "singular_at": self.singular_at,
        }


def recurrence_from_moments(m: MomentTable, n_max: int, strict: bool = False) -> RecurrenceCoefficients:
    """u_n, b_n for 0 <= n <= n_max.

    Exact rings use the Hankel ratios u_n = H_{n-1}H_{n+1}/H_n^2 and
    b_n = d/dt log(H_{n+1}/H_n). Numeric rings (jets, floats) use the
    Chebyshev algorithm, i.e. Gram orthogonalization of monomials against the
    moment functional, which agrees with the Hankel route on exact input.
    """
    if is_exact(m.c[0]):
        return _recurrence_hankel(m, n_max, strict)
    return _recurrence_chebyshev(m, n_max, strict)


def _recurrence_hankel(m, n_max, strict):
    need = 2 * n_max + 1
    if need > m.N:
        raise WindowError(f"n_max={n_max} needs moments through c_{need}, table has c_{m.N}")
    H = [hankel(m, k) for k in range(n_max + 2)]
    rc = RecurrenceCoefficients(ring=m.ring)
    rc.u[0] = m.u0
    for n in range(n_max + 1):
        if H[n + 1] == 0:
            if strict:
                raise SingularHankel(n + 1)
            if n >= 1:
                rc.u[n] = H[n + 1] * 0
            rc.singular_at = n
            break
        if n >= 1:
            rc.u[n] = divide(H[n - 1] * H[n + 1], H[n] * H[n])
        rc.b[n] = _logderiv_ratio(H[n + 1], H[n])
    return rc


def _logderiv_ratio(p, q):
    dp, dq = ddt(p), ddt(q)
    return divide(dp * q - p * dq, p * q)


def _recurrence_chebyshev(m, n_max, strict):
    mu = m.c
    L = 2 * n_max + 2
    if L > len(mu):
        raise WindowError(f"n_max={n_max} needs moments through c_{L - 1}, table has c_{m.N}")
    rc = RecurrenceCoefficients(ring=m.ring)
    rc.u[0] = m.u0
    if is_zero_like(mu[0], 1.0):
        raise SingularHankel(1)
    prev = [mu[0] * 0] * L  # sigma_{-1, l}
    cur = list(mu[:L])  # sigma_{0, l}
    alpha = divide(mu[1], mu[0])
    rc.b[0] = alpha
    beta = mu[0]
    for k in range(1, n_max + 1):
        nxt = [mu[0] * 0] * L
        scale = 0.0
        for l in range(k, L - k):
            t1 = cur[l + 1]
            t2 = alpha * cur[l]
            t3 = beta * prev[l]
            nxt[l] = t1 - t2 - t3
            if l == k:
                scale = max(_mag(t1), _mag(t2), _mag(t3))
        if is_zero_like(nxt[k], scale):
            if strict:
                raise SingularHankel(k + 1)
            rc.u[k] = nxt[k] * 0
            rc.singular_at = k
            return rc
        alpha_k = divide(nxt[k + 1], nxt[k]) - divide(cur[k], cur[k - 1])
        beta_k = divide(nxt[k], cur[k - 1])
        rc.b[k] = alpha_k
        rc.u[k] = beta_k
        prev, cur = cur, nxt
        alpha, beta = alpha_k, beta_k
    return rc


def toda_forward(c0, u0, n_max: int) -> RecurrenceCoefficients:
    """b_n, u_n straight from the Toda equations, starting at b_0 = c_0'/c_0.

    u_{k+1} = u_k + b_k'  and  b_{k+1} = b_k + u_{k+1}'/u_{k+1}.
    Independent of the moment/Hankel route; used to cross-check it.
    """
    rc = RecurrenceCoefficients(ring=ring_of(c0))
    rc.u[0] = u0
    b = divide(ddt(c0), c0)
    rc.b[0] = b
    u = u0
    for k in range(n_max):
        u = u + ddt(b)
        if is_zero_like(u, _mag(u0)):
            rc.u[k + 1] = u * 0
            rc.singular_at = k + 1
            return rc
        b = b + divide(ddt(u), u)
        rc.u[k + 1] = u
        rc.b[k + 1] = b
    return rc


def toda_equation_residuals(rc: RecurrenceCoefficients) -> list:
    """b_k' - (u_{k+1} - u_k) and u_k' - u_k (b_k - b_{k-1}) over the window."""
    out = []
    for k in sorted(rc.b):
        if k + 1 in rc.u and k in rc.u:
            out.append(ddt(rc.b[k]) - (rc.u[k + 1] - rc.u[k]))
    for k in sorted(rc.u):
        if k in rc.b and k - 1 in rc.b:
            out.append(ddt(rc.u[k]) - rc.u[k] * (rc.b[k] - rc.b[k - 1]))
    return out


# polynomials

def _x_poly(rc, var):
    one = _one_like(next(iter(rc.b.values())) if rc.b else 1)
    return Poly([one * 0, one], var)


def _one_like(x):
    if isinstance(x, Jet):
        return Jet.constant(x.coeffs[0] ** 0, x.t0, x.order)
    if isinstance(x, RationalFunction):
        return RationalFunction(Poly([Fraction(1)], x.var))
    if isinstance(x, Poly):
        return Poly([Fraction(1)], x.var)
    if isinstance(x, float):
        return 1.0
    return Fraction(1)


def _three_term(rc, n: int, shift: int, var: str) -> Poly:
    need_b = range(shift, shift + n)
    need_u = range(shift + 1, shift + n)
    missing = [k for k in need_b if k not in rc.b] + [k for k in need_u if k not in rc.u]
    if missing:
        raise WindowError(f"recurrence window lacks indices {missing}")
    x = _x_poly(rc, var)
    one = x.coeffs[1]
    prev, cur = Poly([], var), Poly([one], var)
    for j in range(n):
        k = shift + j
        nxt = x * cur - cur * rc.b[k]
        if j > 0:
            nxt = nxt - prev * rc.u[k]
        prev, cur = cur, nxt
    return cur


def op_polynomial(rc: RecurrenceCoefficients, n: int, var: str = "x") -> Poly:
    """Monic P_n from P_{k+1} = (x - b_k) P_k - u_k P_{k-1}, P_0 = 1."""
    return _three_term(rc, n, 0, var)


def associated_polynomial(rc: RecurrenceCoefficients, n: int, var: str = "x") -> Poly:
    """P^(1)_n: the same recurrence shifted up by one index (P^(1)_1 = x - b_1)."""
    return _three_term(rc, n, 1, var)


def op_polynomial_det(m: MomentTable, n: int, var: str = "x") -> Poly:
    """P_n from the bordered Hankel determinant divided by H_n (exact rings)."""
    rows = [[m.c[i + k] for k in range(n + 1)] for i in range(n)]
    coeffs = []
    for j in range(n + 1):
        # cofactor of x^j in the last row
        minor = [row[:j] + row[j + 1 :] for row in rows]
        sign = -1 if (n + j) % 2 else 1
        coeffs.append(det_exact(minor) * sign if n else Fraction(1))
    Hn = hankel(m, n)
    return Poly([divide(c, Hn) for c in coeffs], var)


# Stieltjes series and its Riccati equation

def stieltjes_series(m: MomentTable) -> FormalSeries:
    """F(z) = sum c_n z^{-n-1} through z^{-(N+1)}."""
    return FormalSeries.stieltjes(m.c)


def riccati_residual(F: FormalSeries, c0, u0) -> FormalSeries:
    """F' + c_0 - zF + (u_0/c_0) F^2; zero exactly when the moment recurrence holds."""
    ratio = divide(u0, c0) if not (u0 == 0 and c0 == 0) else 0
    dF = F.map(ddt)
    res = dF + FormalSeries.monomial(0, c0) - F.shift(1)
    if not (isinstance(ratio, (int, Fraction)) and ratio == 0):
        res = res + (F * F) * ratio
    return res


def second_kind_function(m: MomentTable, rc: RecurrenceCoefficients, n: int, var: str = "z",
                         literal: bool = False) -> FormalSeries:
    """F_n = F P_n - c_0 P^(1)_{n-1} as a Laurent series in 1/z.

    With ``literal=True`` the associated polynomial enters without the c_0
    factor; the two agree for a unit-mass functional (c_0 = 1). Only the
    scaled form starts at h_n z^{-n-1} for general c_0.
    """
    F = stieltjes_series(m)
    P = op_polynomial(rc, n, var)
    Fn = F * FormalSeries.from_poly(P)
    if n >= 1:
        assoc = associated_polynomial(rc, n - 1, var)
        if not literal:
            c0 = m.c[0]
            if isinstance(c0, Poly) and isinstance(assoc.lc, RationalFunction):
                c0 = RationalFunction(c0)
            assoc = assoc.map(lambda c: c * c0)
        Fn = Fn - FormalSeries.from_poly(assoc)
    return Fn


def normalization(m: MomentTable, rc: RecurrenceCoefficients, n: int):
    """h_n = c_0 u_1 ... u_n."""
    h = m.c[0]
    for k in range(1, n + 1):
        h = h * rc.u[k]
    return h


def second_kind_check(m: MomentTable, rc: RecurrenceCoefficients, n: int, tol: float | None = None):
    """Leading coefficient of F_n; asserts F_n = h_n z^{-n-1} + O(z^{-n-2}).

    Raises AssertionError when the expansion does not start at z^{-n-1} or its
    leading coefficient differs from c_0 u_1...u_n.
    """
    if m.N + 1 < 2 * n + 1:
        raise SeriesOrderError(f"F_{n} needs moments through c_{2 * n}, table has c_{m.N}")
    Fn = second_kind_function(m, rc, n)
    h = normalization(m, rc, n)
    for p in Fn.powers:
        if p < -n - 1:
            break
        c = Fn.coeff(p)
        if p > -n - 1:
            if not _close(c, 0, tol):
                raise AssertionError(f"F_{n} has a nonzero z^{p} coefficient {c}")
        else:
            if not _close(c, h, tol):
                raise AssertionError(f"F_{n} leads with {c}, expected h_{n} = {h}")
            return c
    raise SeriesOrderError(f"F_{n} not determined through z^{-n - 1}")


def second_kind_recurrence_residual(m: MomentTable, rc: RecurrenceCoefficients, n: int,
                                    literal: bool = True) -> FormalSeries:
    """F_{n+1} + b_n F_n + u_n F_{n-1} - z F_n.

    At n = 0 the u_n F_{n-1} term is replaced by the constant 1 (literal
    F_n) or c_0 (scaled F_n); either way the residual vanishes identically.
    """
    F_next = second_kind_function(m, rc, n + 1, literal=literal)
    F_n = second_kind_function(m, rc, n, literal=literal)
    res = F_next + F_n * rc.b[n] - F_n.shift(1)
    if n == 0:
        const = _one_like(rc.b[0]) if literal else m.c[0]
        return res + FormalSeries.monomial(0, const)
    return res + second_kind_function(m, rc, n - 1, literal=literal) * rc.u[n]


def _close(a, b, tol):
    if tol is None:
        return a == b
    d = a - b
    if isinstance(d, Jet):
        return d.max_abs() <= tol * max(1.0, _mag(b))
    return abs(d) <= tol * max(1.0, abs(b) if isinstance(b, (int, float, Fraction)) else 1.0)


def dotP_residual(rc: RecurrenceCoefficients, m: MomentTable, n: int) -> Poly:
    """P_n' + u_n P_{n-1} - u_0 P^(1)_{n-1}, coefficient-wise in x.

    At n = 0 both P_{-1} and P^(1)_{-1} are taken as zero, so the residual is 0.
    """
    if n == 0:
        return Poly([], "x")
    Pn = op_polynomial(rc, n)
    res = Pn.map(ddt) + op_polynomial(rc, n - 1) * rc.u[n]
    return res - associated_polynomial(rc, n - 1) * m.u0


# KdV densities

def kdv_densities(U, m_max: int) -> list:
    """sigma_1 = -U, sigma_{m+1} = sigma_m' + sum_{k=1}^{m-1} sigma_k sigma_{m-k}."""
    if m_max < 1:
        return []
    if isinstance(U, Jet) and U.order < m_max - 1:
        raise JetError(f"jet order {U.order} too small for {m_max} densities")
    sig = [None, -U]
    for m in range(1, m_max):
        acc = 0
        for k in range(1, m):
            acc = acc + sig[k] * sig[m - k]
        sig.append(ddt(sig[m]) + acc)
    if m_max >= 2:
        chk = sig[2] + ddt(U)
        if not _close(chk, 0, None if is_exact(U) else 1e-12):
            raise AssertionError("sigma_2 != -U'")
    return sig[1:]


@dataclass
class KdvReport:
    m_max: int
    max_deviation: float
    exact: bool
    passed: bool
    deviations: list
    jet_deviations: list = field(default_factory=list)


def kdv_moment_identification(U, m_max: int, tol: float = 1e-10) -> KdvReport:
    """Compare sigma_m with c_{m-1} built from c_0 = u_0 = -U.

    Exact rings compare whole polynomials. For jets the comparison is at the
    base point, relative to max(1, |c_{m-1}(t0)|); ``jet_deviations`` also
    records the worst coefficient over the whole jet, where the high Taylor
    coefficients carry the rounding amplified by repeated differentiation.
    """
    sig = kdv_densities(U, m_max)
    tab = moments_from_initial(-U, -U, m_max - 1) if m_max >= 1 else None
    devs, jet_devs = [], []
    exact = is_exact(U)
    ok = True
    for m in range(1, m_max + 1):
        c = tab.c[m - 1]
        d = sig[m - 1] - c
        if exact:
            devs.append(0.0 if d == 0 else math.inf)
            ok = ok and d == 0
            continue
        dv = abs(value_at(d))
        scale = max(1.0, abs(value_at(c)))
        devs.append(dv / scale)
        if isinstance(d, Jet):
            jet_devs.append(d.max_abs() / max(1.0, c.max_abs()))
        ok = ok and dv <= tol * scale
    return KdvReport(m_max, max(devs, default=0.0), exact, ok, devs, jet_devs)


# reflection and shifts

def reflect_extend(rc: RecurrenceCoefficients, j: int, tol: float = 1e-12) -> RecurrenceCoefficients:
    """Mirror the chain about site j using b_j = 0.

    u_{j+n} = u_{j-n+1} and b_{j+n-1} = -b_{j-n+1}; seed data on either side
    is copied to the other and existing entries must agree.
    """
    out = rc.copy()
    if j in rc.b and not _close(rc.b[j], 0, None if is_exact(rc.b[j]) else tol):
        raise ValueError(f"b_{j} = {rc.b[j]} is not zero; the mirror condition fails")
    for k, v in list(rc.u.items()):
        _merge(out.u, 2 * j + 1 - k, v, "u", tol)
    for k, v in list(rc.b.items()):
        if k != j:
            _merge(out.b, 2 * j - k, -v, "b", tol)
    zero = next(iter(rc.b.values())) * 0 if rc.b else 0
    out.b[j] = zero
    return out


def _merge(d: dict, k: int, v, name: str, tol: float):
    if k in d:
        if not _close(d[k], v, None if is_exact(v) else tol):
            raise ValueError(f"{name}_{k} disagrees with its mirror image")
        return
    d[k] = v


def beta_shift(rc: RecurrenceCoefficients, beta) -> RecurrenceCoefficients:
    out = rc.copy()
    out.b = {k: v + beta for k, v in rc.b.items()}
    return out


def from_mechanical(b: Sequence, u_st: Sequence) -> tuple[list, list]:
    """Convert u^{st}_k (b_k' = u_k - u_{k-1}) to the canonical u_{k+1} = u^{st}_k."""
    return list(b), [None] + list(u_st)


def to_mechanical(b: Sequence, u: Sequence) -> tuple[list, list]:
    return list(b), list(u[1:])


def bilinear_residual(m: MomentTable, u0, n: int):
    """(log H_n)'' + u_0 - H_{n-1} H_{n+1} / H_n^2."""
    if n < 1:
        raise ValueError("n must be at least 1")
    Hm, H, Hp = hankel(m, n - 1), hankel(m, n), hankel(m, n + 1)
    if H == 0 or (isinstance(H, Jet) and is_zero_like(H, 1.0)):
        raise SingularHankel(n)
    dlog = divide(ddt(H), H)
    return ddt(dlog) + u0 - divide(Hm * Hp, H * H)


# Schrodinger -> Stieltjes

def propagate_schrodinger(u0: Jet, z: float, psi0: float, dpsi0: float) -> Jet:
    """Jet of psi solving psi'' = (z^2/4 - u_0) psi with psi(t0), psi'(t0) given."""
    K = u0.order + 2
    cs = [psi0, dpsi0]
    e = z * z / 4.0
    for k in range(K - 1):
        # coefficient k of (e - u0) psi
        s = e * cs[k] - sum(u0.coeffs[i] * cs[k - i] for i in range(k + 1))
        cs.append(s / ((k + 1) * (k + 2)))
    return Jet(u0.t0, tuple(cs))


def schrodinger_to_stieltjes(psi: Jet, u0: Jet, z: float) -> Jet:
    """Riccati residual F' + u_0 - zF + F^2 for F = psi'/psi + z/2 (c_0 = u_0)."""
    if psi.value == 0:
        raise ZeroDivisionError("psi vanishes at the base point")
    F = psi.derivative() / psi.truncate(psi.order - 1) + z / 2.0
    return F.derivative() + u0.truncate(F.order - 1) - F.truncate(F.order - 1) * z + (F * F).truncate(F.order - 1)


def schrodinger_residual(psi: Jet, u0: Jet, z: float) -> Jet:
    """psi'' + (u_0 - z^2/4) psi."""
    d2 = psi.derivative().derivative()
    return d2 + (u0 - z * z / 4.0) * psi
