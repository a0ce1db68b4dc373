"""Reflectionless (Bargmann) potentials: Darboux polynomials, poles, residues.

The N-soliton wave function is exp(-zt/2) Q_N(z; tanh t), with Q_N built by

    Q_{N+1} = (z + 2(N+1) y) Q_N - 2 (1 - y^2) dQ_N/dy,    y = tanh t.

Its zeros a_k(t) are the poles of the rational Stieltjes function, the
residues are A_k = -a_k', and the moments are c_n = sum_k A_k a_k^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import (
    MomentTable,
    moments_from_initial,
    op_polynomial,
    recurrence_from_moments,
)
from .exact import Poly
from .jets import Jet, PotentialSpec, jet_lift, jet_log

GAP_TOL = 1e-8

_Y = Poly([Fraction(0), Fraction(1)], "y")
_ONE_Y = Poly([Fraction(1)], "y")


class PoleCollision(ArithmeticError):
    pass


@dataclass(frozen=True)
class SolitonPolynomial:
    """Q_N as a polynomial in z whose coefficients are polynomials in y = tanh t."""

    N: int
    Q: Poly

    def at(self, y) -> Poly:
        """Q_N(z; y) with y substituted (exact for rational y)."""
        return Poly([c(y) if isinstance(c, Poly) else c for c in self.Q.coeffs], "z")

    def numeric_coeffs(self, t: float) -> np.ndarray:
        y = math.tanh(t)
        return np.array([float(c(y)) if isinstance(c, Poly) else float(c) for c in self.Q.coeffs])

    def dz(self) -> Poly:
        return self.Q.deriv()

    def dy(self) -> Poly:
        return self.Q.map(lambda c: c.deriv() if isinstance(c, Poly) else 0)

    def to_json(self) -> dict:
        return {"N": self.N, "z_coeffs": [c.to_json() if isinstance(c, Poly) else [str(c)] for c in self.Q.coeffs]}


def darboux_step(q: SolitonPolynomial) -> SolitonPolynomial:
    N = q.N
    z = Poly([_ONE_Y * 0, _ONE_Y], "z")
    factor = z + _Y * (2 * (N + 1))
    nxt = factor * q.Q - q.dy() * ((_ONE_Y - _Y * _Y) * 2)
    return SolitonPolynomial(N + 1, nxt)


def soliton_polynomial(N: int) -> SolitonPolynomial:
    if N < 0:
        raise ValueError("N must be non-negative")
    q = SolitonPolynomial(0, Poly([_ONE_Y], "z"))
    for _ in range(N):
        q = darboux_step(q)
    return q


def darboux_general(u0: Jet, phi: Jet, mu: float, tol: float = 1e-9) -> Jet:
    """u_0 + 2 (log phi)'' after checking phi'' + (u_0 - mu^2/4) phi = 0."""
    if phi.value == 0:
        raise ZeroDivisionError("phi vanishes at the base point")
    res = phi.derivative().derivative() + (u0 - mu * mu / 4.0) * phi
    scale = max(1.0, phi.max_abs())
    if res.max_abs() > tol * scale:
        raise ValueError(f"phi does not solve the Schrodinger equation (residual {res.max_abs():.3e})")
    d2 = jet_log(phi).derivative().derivative()
    return u0.truncate(d2.order) + 2.0 * d2


def darboux_chain(N: int, t0: float, K: int) -> list[Jet]:
    """Potentials u^{(0)} = 0, u^{(1)}, ..., u^{(N)} by successive Darboux steps with phi = cosh^{n+1}."""
    from .jets import jet_cosh, jet_pow

    u = Jet.constant(0.0, float(t0), K + 2 * N)
    out = [u]
    for n in range(N):
        phi = jet_pow(jet_cosh(float(t0), u.order), n + 1)
        u = darboux_general(u, phi, 2.0 * (n + 1))
        out.append(u)
    return out


# poles

def _newton_polish(coeffs_asc: np.ndarray, roots: np.ndarray, iters: int = 8) -> np.ndarray:
    p = np.polynomial.Polynomial(coeffs_asc)
    dp = p.deriv()
    r = roots.astype(float).copy()
    for _ in range(iters):
        step = p(r) / dp(r)
        r -= step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, np.max(np.abs(r))):
            break
    return r


def poles(q: SolitonPolynomial, t: float, seeds: np.ndarray | None = None) -> np.ndarray:
    """Zeros of Q_N(.; tanh t): ascending on a fresh call, matched to seeds otherwise."""
    if q.N == 0:
        return np.zeros(0)
    c = q.numeric_coeffs(t)
    if seeds is None:
        raw = np.roots(c[::-1])
        if np.max(np.abs(raw.imag)) > 1e-6 * max(1.0, np.max(np.abs(raw))):
            raise ArithmeticError(f"non-real poles at t={t}")
        r = _newton_polish(c, np.sort(raw.real))
    else:
        r = _newton_polish(c, np.asarray(seeds, dtype=float))
        if seeds is not None and not np.allclose(np.sort(r), np.sort(np.roots(c[::-1]).real), atol=1e-6):
            raise ArithmeticError(f"root continuation failed to converge at t={t}")
    if r.size > 1:
        gaps = np.abs(np.diff(np.sort(r)))
        if np.min(gaps) < GAP_TOL:
            raise PoleCollision(f"poles collide at t={t}")
    return r


def pole_velocities(q: SolitonPolynomial, t: float, roots: np.ndarray) -> np.ndarray:
    """a_k' by implicit differentiation of Q_N(a; tanh t) = 0."""
    y = math.tanh(t)
    dz = np.array([float(c(y)) if isinstance(c, Poly) else float(c) for c in q.dz().coeffs])
    dy = np.array([float(c(y)) if isinstance(c, Poly) else float(c) for c in q.dy().coeffs] or [0.0])
    sech2 = 1.0 - y * y
    return -np.polynomial.polynomial.polyval(roots, dy) * sech2 / np.polynomial.polynomial.polyval(roots, dz)


def _continue_roots(q: SolitonPolynomial, t0: float, r0: np.ndarray, t1: float, depth: int = 0) -> np.ndarray:
    """Follow the roots from t0 to t1 with a velocity predictor, bisecting the step on failure."""
    guess = r0 + pole_velocities(q, t0, r0) * (t1 - t0)
    try:
        return poles(q, t1, guess)
    except PoleCollision:
        raise
    except ArithmeticError:
        if depth >= 30:
            raise
    tm = 0.5 * (t0 + t1)
    rm = _continue_roots(q, t0, r0, tm, depth + 1)
    return _continue_roots(q, tm, rm, t1, depth + 1)


def track_poles(q: SolitonPolynomial, times) -> np.ndarray:
    """Continuity-ordered root trajectories, shape (len(times), N)."""
    times = np.asarray(times, dtype=float)
    out = np.empty((len(times), q.N))
    prev = None
    for i, t in enumerate(times):
        prev = poles(q, t) if prev is None else _continue_roots(q, float(times[i - 1]), prev, float(t))
        out[i] = prev
    return out


@dataclass
class BargmannSolution:
    N: int
    times: np.ndarray
    roots: np.ndarray
    velocities: np.ndarray
    q: SolitonPolynomial = field(repr=False)
    W: np.ndarray | None = None

    @property
    def residues(self) -> np.ndarray:
        return -self.velocities

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        i = int(np.argmin(np.abs(self.times - t)))
        r = _continue_roots(self.q, float(self.times[i]), self.roots[i], float(t))
        return r, pole_velocities(self.q, t, r)


def bargmann_solution(N: int, times) -> BargmannSolution:
    q = soliton_polynomial(N)
    times = np.asarray(times, dtype=float)
    roots = track_poles(q, times)
    vel = np.array([pole_velocities(q, t, r) for t, r in zip(times, roots)])
    return BargmannSolution(N, times, roots, vel, q)


def eqs_a_residual(a, adot, addot) -> np.ndarray:
    """a_k'' - a_k a_k' - 2 sum_{m != k} a_k' a_m' / (a_k - a_m)."""
    a, adot, addot = (np.asarray(v, dtype=float) for v in (a, adot, addot))
    n = a.size
    out = addot - a * adot
    for k in range(n):
        for m in range(n):
            if m != k:
                gap = a[k] - a[m]
                if abs(gap) < GAP_TOL:
                    raise PoleCollision("colliding poles in the pole-dynamics residual")
                out[k] -= 2.0 * adot[k] * adot[m] / gap
    return out


def pole_dynamics_residual(sol: BargmannSolution, t: float, h: float = 1e-3) -> np.ndarray:
    """eqs_a residual with derivatives from a 4th-order central stencil on tracked roots."""
    base, _ = sol.at(t)
    f = {}
    for k in (-2, -1, 0, 1, 2):
        f[k] = poles(sol.q, t + k * h, base) if k else base
    d1 = (-f[2] + 8 * f[1] - 8 * f[-1] + f[-2]) / (12 * h)
    d2 = (-f[2] + 16 * f[1] - 30 * f[0] + 16 * f[-1] - f[-2]) / (12 * h * h)
    return eqs_a_residual(f[0], d1, d2)


@dataclass
class ConservedFit:
    W: np.ndarray  # ascending coefficients in x = a^2
    residual: float
    leading: float


def fit_conserved(roots: np.ndarray, velocities: np.ndarray, degree: int | None = None) -> ConservedFit:
    """Least-squares W with a_k' Omega'(a_k^2) = W(a_k^2) over every sample and k."""
    roots = np.atleast_2d(roots)
    velocities = np.atleast_2d(velocities)
    N = roots.shape[1]
    deg = N if degree is None else degree
    rows, rhs = [], []
    for a, v in zip(roots, velocities):
        x = a * a
        for k in range(N):
            dOmega = np.prod([x[k] - x[j] for j in range(N) if j != k])
            rows.append([x[k] ** p for p in range(deg + 1)])
            rhs.append(v[k] * dOmega)
    A, y = np.array(rows), np.array(rhs)
    if np.linalg.matrix_rank(A) < min(A.shape):
        if np.allclose(y, 0):
            return ConservedFit(np.zeros(deg + 1), 0.0, 0.0)
        raise np.linalg.LinAlgError("rank-deficient conserved-polynomial fit")
    W, *_ = np.linalg.lstsq(A, y, rcond=None)
    res = float(np.max(np.abs(A @ W - y))) if y.size else 0.0
    return ConservedFit(W, res, float(W[-1]))


def conserved_fit(sol: BargmannSolution, times=None) -> ConservedFit:
    if times is None:
        fit = fit_conserved(sol.roots, sol.velocities)
    else:
        pairs = [sol.at(t) for t in times]
        fit = fit_conserved(np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))
    sol.W = fit.W
    return fit


# rational Stieltjes function properties

@dataclass
class RationalStieltjesReport:
    N: int
    t: float
    nodes: np.ndarray
    masses: np.ndarray
    moments: np.ndarray
    orthogonality: float
    pn_vs_nodes: float
    qn_vs_pn: float
    moments_vs_chain: float
    sum_masses_vs_c0: float
    recurrence_residual: float
    hankel_N1: float
    vandermonde: float
    recurrence: object = field(repr=False, default=None)

    def max_residual(self) -> float:
        return max(self.orthogonality, self.pn_vs_nodes, self.qn_vs_pn, self.moments_vs_chain,
                   self.sum_masses_vs_c0, self.recurrence_residual, self.hankel_N1, self.vandermonde)


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b))) if b.size else 1.0))


def rational_stieltjes_report(N: int, t: float, n_max: int | None = None) -> RationalStieltjesReport:
    """Check the finite-support consequences of a rational Stieltjes function.

    Covers discrete orthogonality on the poles, P_N = prod (x - a_k), the
    explicit moments c_n = sum A_k a_k^n against the moment chain, the
    order-N linear recurrence on c_n, H_{N+1} = 0 and the Vandermonde form of H_N.
    """
    q = soliton_polynomial(N)
    a = poles(q, t)
    A = -pole_velocities(q, t, a)
    n_max = N if n_max is None else max(n_max, N)
    L = 2 * n_max + 2
    c = np.array([np.sum(A * a**n) for n in range(L)])

    table = MomentTable(tuple(float(x) for x in c), float(c[0]), 1.0)
    rc = recurrence_from_moments(table, n_max)
    P = [op_polynomial(rc, n) for n in range(N + 1)]
    h = [c[0]]
    for n in range(1, N):
        h.append(h[-1] * rc.u[n])
    G = np.array([[np.sum(A * np.array([P[n](x) for x in a]) * np.array([P[m](x) for x in a]))
                   for m in range(N)] for n in range(N)])
    ortho = _rel(G, np.diag(h))

    PN = np.array([float(x) for x in P[N].coeffs])
    prod = np.poly1d(a, r=True).coeffs[::-1]
    pn_nodes = _rel(PN, prod)
    qn = q.numeric_coeffs(t)
    qn_pn = _rel(qn, PN)

    u0 = jet_lift(PotentialSpec("sech2", N=N), t, L + 1)
    chain = moments_from_initial(u0, u0, L - 1)
    chain_c = np.array([float(x.value) for x in chain.c])
    # c_n = sum A_k a_k^n can cancel (odd n near t = 0); measure against the absolute moment
    abs_mom = np.array([np.sum(np.abs(A) * np.abs(a) ** n) for n in range(L)])
    mom_chain = float(np.max(np.abs(chain_c - c) / np.maximum(1.0, abs_mom)))
    sum_A = abs(float(np.sum(A)) - N * (N + 1) / math.cosh(t) ** 2)

    rows = max(L - N, N + 1)
    C = np.array([[c[n + k] for k in range(N + 1)] for n in range(min(rows, L - N))])
    _, s, vt = np.linalg.svd(C)
    B = vt[-1]
    rec_res = float(np.max(np.abs(C @ B)) / np.max(np.abs(C)))

    H1 = np.array([[c[i + k] for k in range(N + 1)] for i in range(N + 1)])
    scale = float(np.prod(np.linalg.norm(H1, axis=1)))
    hN1 = abs(float(np.linalg.det(H1))) / scale if scale > 0 else 0.0
    HN = float(np.linalg.det(np.array([[c[i + k] for k in range(N)] for i in range(N)])))
    vand = float(np.prod(A)) * float(np.prod([(a[i] - a[k]) ** 2 for i in range(N) for k in range(i + 1, N)]))
    vd = abs(HN - vand) / max(1.0, abs(vand))

    return RationalStieltjesReport(N, t, a, A, c, ortho, pn_nodes, qn_pn, mom_chain, sum_A, rec_res, hN1, vd, rc)


# Hahn identification at t = 0

def exact_poles_at_zero(N: int) -> list[Fraction]:
    """Exact rational zeros of Q_N(z; 0), found by integer divisor search and deflation."""
    p = soliton_polynomial(N).at(Fraction(0))
    roots: list[Fraction] = []
    while p.degree > 0:
        if p.coeff(0) == 0:
            roots.append(Fraction(0))
            p = Poly(p.coeffs[1:], "z")
            continue
        const = abs(int(p.coeff(0)))
        found = None
        for d in _divisors(const):
            for cand in (d, -d):
                if p(Fraction(cand)) == 0:
                    found = Fraction(cand)
                    break
            if found is not None:
                break
        if found is None:
            raise ArithmeticError(f"Q_{N}(z;0) has a non-integer root")
        roots.append(found)
        p = p.exact_div(Poly([-found, Fraction(1)], "z"))
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def predicted_poles_at_zero(N: int) -> list[Fraction]:
    """+-(2+4k), k < N/2 for even N; +-4k, k <= (N-1)/2 for odd N."""
    if N % 2 == 0:
        vals = [2 + 4 * k for k in range(N // 2)]
    else:
        vals = [4 * k for k in range((N - 1) // 2 + 1)]
    return sorted({Fraction(s * v) for v in vals for s in (1, -1)})


@dataclass
class HahnReport:
    N: int
    u_match: bool
    b_match: bool
    hahn_spectrum: bool
    mapped_spectrum: bool
    mapped_recurrence: bool

    @property
    def passed(self) -> bool:
        return self.u_match and self.b_match and self.hahn_spectrum and self.mapped_spectrum and self.mapped_recurrence


def hahn_identification_check(N: int) -> HahnReport:
    from .spectral import hahn_recurrence

    if N < 1:
        raise ValueError("N must be at least 1")
    M = N - 1
    half = Fraction(1, 2)
    u_rec = {n: Fraction((N - n) * (N + n + 1)) for n in range(1, N)}
    hb, hu = {}, {}
    for n in range(N):
        hb[n], hu[n] = hahn_recurrence(half, half, M, n)
    u_match = all(16 * hu[n] == u_rec[n] for n in range(1, N))
    b_match = all(hb[n] == Fraction(N - 1, 2) for n in range(N))

    x = Poly([Fraction(0), Fraction(1)], "x")
    prev, cur = Poly([], "x"), Poly([Fraction(1)], "x")
    for n in range(N):
        nxt = (x - hb[n]) * cur - (prev * hu[n] if n else Poly([], "x"))
        prev, cur = cur, nxt
    hahn_spec = all(cur(Fraction(s)) == 0 for s in range(N)) and cur.degree == N

    mapped = sorted(Fraction(4 * s - 2 * (N - 1)) for s in range(N))
    mapped_ok = mapped == predicted_poles_at_zero(N) == exact_poles_at_zero(N)

    # x -> 4x - 2(N-1) sends b_n -> 4 b_n - 2(N-1) and u_n -> 16 u_n.
    mapped_rec = all(4 * hb[n] - 2 * (N - 1) == 0 for n in range(N)) and all(
        16 * hu[n] == u_rec[n] for n in range(1, N)
    )
    return HahnReport(N, u_match, b_match, hahn_spec, mapped_ok, mapped_rec)
