"""Finite Jacobi matrices: mirrored construction, per-skew symmetry, spectra, inverse problems.

Matrices are stored in monic normalization: diagonal b_0..b_{N-1},
sub-diagonal u_1..u_{N-1} (row n, column n-1) and unit super-diagonal, so that
x P(x) = J P(x) + P_N(x) e_{N-1} for the vector of monic polynomials P_n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exact import Poly

PERSKEW_TOL = 1e-12
DEGREE_TOL = 1e-10


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class JacobiMatrix:
    """Tridiagonal matrix in monic normalization.

    Parameters
    ----------
    b : sequence
        Diagonal entries b_0..b_{N-1}.
    u : sequence
        Sub-diagonal entries u_1..u_{N-1}; the super-diagonal is all ones.
    tag : str
        Provenance: ``typeB``, ``typeC``, ``persymmetric`` or ``generic``.
    """

    b: tuple
    u: tuple
    tag: str = "generic"

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "u", tuple(self.u))
        if len(self.b) == 0:
            raise SpectralError("empty Jacobi matrix")
        if len(self.u) != len(self.b) - 1:
            raise SpectralError(f"need {len(self.b) - 1} sub-diagonal entries, got {len(self.u)}")

    @property
    def size(self) -> int:
        return len(self.b)

    def dense(self) -> np.ndarray:
        n = self.size
        J = np.diag(np.array(self.b, dtype=float))
        for i in range(1, n):
            J[i, i - 1] = float(self.u[i - 1])
            J[i - 1, i] = 1.0
        return J

    def symmetrized(self) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of the similar symmetric matrix (needs u > 0)."""
        u = np.array(self.u, dtype=float)
        if np.any(u <= 0):
            bad = int(np.argmin(u)) + 1
            raise SpectralError(f"non-positive u_{bad} = {u[bad - 1]}")
        return np.array(self.b, dtype=float), np.sqrt(u)

    def char_poly(self, var: str = "x") -> Poly:
        """P_N by the three-term recurrence (exact for rational entries)."""
        one = Fraction(1) if all(isinstance(v, (int, Fraction)) for v in self.b + self.u) else 1.0
        x = Poly([one * 0, one], var)
        prev, cur = Poly([], var), Poly([one], var)
        for n in range(self.size):
            nxt = (x - self.b[n]) * cur
            if n:
                nxt = nxt - prev * self.u[n - 1]
            prev, cur = cur, nxt
        return cur

    def to_json(self) -> dict:
        def enc(v):
            return f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else float(v)

        return {"b": [enc(v) for v in self.b], "u": [enc(v) for v in self.u], "tag": self.tag}

    @classmethod
    def from_json(cls, d: dict) -> "JacobiMatrix":
        return cls([_num(v) for v in d["b"]], [_num(v) for v in d["u"]], d.get("tag", "generic"))


def _num(v):
    if isinstance(v, str):
        return Fraction(v)
    return v


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues x_0 < ... < x_{N-1} with positive weights summing to c0."""

    x: tuple
    w: tuple
    c0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "w", tuple(self.w))
        if len(self.x) != len(self.w):
            raise SpectralError("x and w differ in length")

    @property
    def size(self) -> int:
        return len(self.x)

    def to_json(self) -> dict:
        return {"x": [float(v) for v in self.x], "w": [float(v) for v in self.w], "c0": float(self.c0)}

    @classmethod
    def from_json(cls, d: dict) -> "SpectralData":
        return cls([float(v) for v in d["x"]], [float(v) for v in d["w"]], float(d.get("c0", 1.0)))


# mirrored construction

def _get(d, k):
    try:
        return d[k]
    except (KeyError, IndexError):
        raise SpectralError(f"recurrence window does not cover index {k}") from None


def build_typeB(rc, N: int) -> JacobiMatrix:
    """Size 2N+1 on sites -N-1..N-1 with b_{-1} = 0, u_{-1-n} = u_n, b_{-2-n} = -b_n.

    rc supplies b_0..b_{N-1} and u_0..u_{N-1} (u_0 couples sites -1 and 0).
    """
    b = [_get(rc.b, n) for n in range(N)]
    u = [_get(rc.u, n) for n in range(N)]
    zero = b[0] * 0 if b else 0
    diag = [-v for v in reversed(b)] + [zero] + b
    sub = list(reversed(u)) + u
    return JacobiMatrix(diag, sub, "typeB")


def build_typeC(rc, N: int) -> JacobiMatrix:
    """Size 2N on sites -N..N-1 with u_{-n} = u_n, b_{-1-n} = -b_n.

    rc supplies b_0..b_{N-1} and u_0..u_{N-1} (u_0 couples sites -1 and 0).
    """
    b = [_get(rc.b, n) for n in range(N)]
    u = [_get(rc.u, n) for n in range(N)]
    diag = [-v for v in reversed(b)] + b
    sub = list(reversed(u[1:])) + u
    return JacobiMatrix(diag, sub, "typeC")


def _sign_matrix(n: int) -> np.ndarray:
    return np.diag([(-1.0) ** i for i in range(n)])


def _reversal(n: int) -> np.ndarray:
    return np.eye(n)[::-1]


def is_per_skew(J: JacobiMatrix, tol: float = PERSKEW_TOL) -> bool:
    """S R J R S = -J^T, equivalently reversed diagonal = -diagonal and palindromic u."""
    if all(isinstance(v, (int, Fraction)) for v in J.b + J.u):
        return list(J.b[::-1]) == [-v for v in J.b] and list(J.u[::-1]) == list(J.u)
    M = J.dense()
    S, R = _sign_matrix(J.size), _reversal(J.size)
    scale = max(1.0, float(np.max(np.abs(M))))
    return bool(np.max(np.abs(S @ R @ M @ R @ S + M.T)) <= tol * scale)


def is_persymmetric(J: JacobiMatrix, tol: float = PERSKEW_TOL) -> bool:
    M = J.dense()
    R = _reversal(J.size)
    return bool(np.max(np.abs(M @ R - R @ M.T)) <= tol * max(1.0, float(np.max(np.abs(M)))))


# spectra

def eigendecompose(J: JacobiMatrix, c0: float = 1.0) -> SpectralData:
    """Eigenvalues (ascending) and weights c0 * (first eigenvector component)^2."""
    if J.size == 1:
        return SpectralData((float(J.b[0]),), (float(c0),), c0)
    d, e = J.symmetrized()
    x, V = eigh_tridiagonal(d, e)
    w = V[0, :] ** 2
    w = c0 * w / w.sum()
    if np.any(np.diff(x) <= 0):
        raise SpectralError("spectrum is not simple")
    return SpectralData(tuple(x), tuple(w), c0)


def orthonormal_values(J: JacobiMatrix, x, n: int, c0: float = 1.0) -> np.ndarray:
    """pi_n(x) = P_n(x)/sqrt(h_n) with h_n = c0 u_1 ... u_n."""
    x = np.asarray(x, dtype=float)
    prev, cur = np.zeros_like(x), np.ones_like(x) / math.sqrt(c0)
    d, a = J.symmetrized() if J.size > 1 else (np.array(J.b, dtype=float), np.zeros(0))
    for k in range(n):
        nxt = ((x - d[k]) * cur - (a[k - 1] * prev if k else 0.0)) / a[k]
        prev, cur = cur, nxt
    return cur


def pi_at_eigenvalues(J: JacobiMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues x_s and pi_{N-1}(x_s) for the unit-mass measure.

    The orthonormal values are ratios of eigenvector components,
    pi_{N-1}(x_s) = v_{N-1}(s) / v_0(s), which stays accurate where the forward
    recurrence in ``orthonormal_values`` loses digits (values far from 1).
    """
    if J.size == 1:
        return np.array([float(J.b[0])]), np.ones(1)
    d, e = J.symmetrized()
    x, V = eigh_tridiagonal(d, e)
    if np.any(np.abs(V[0]) < 1e-300):
        raise SpectralError("eigenvector with vanishing first component")
    return x, V[-1] / V[0]


def omega_prime(x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.array([np.prod([x[s] - x[k] for k in range(len(x)) if k != s]) for s in range(len(x))])


@dataclass
class PerSkewReport:
    symmetry: float
    ww: float
    pph: float
    middle_zero: float | None

    def max_residual(self) -> float:
        vals = [self.symmetry, self.ww, self.pph]
        if self.middle_zero is not None:
            vals.append(self.middle_zero)
        return max(vals)


def pph_sign(N: int) -> int:
    """pi_{N-1}(x_s) pi_{N-1}(x_{N-1-s}) equals this sign for a per-skew matrix."""
    return -1 if (N - 1) % 2 else 1


def perskew_property_checks(J: JacobiMatrix, c0: float = 1.0) -> PerSkewReport:
    """Eigenvalue symmetry, the weight product law and the pi_{N-1} product law.

    Returns relative deviations. The weight law reads
    w_s w_{N-1-s} = h_{N-1}/Omega'(x_s)^2 for unit mass; with weights summing
    to c0 and h_{N-1} = c0 u_1...u_{N-1} the right side picks up one more
    factor c0. The pi law uses the orthonormal family of the unit-mass measure.
    """
    if not is_per_skew(J):
        raise SpectralError("matrix is not per-skew symmetric")
    N = J.size
    sd = eigendecompose(J, c0)
    x, w = np.array(sd.x), np.array(sd.w)
    scale = max(1.0, float(np.max(np.abs(x))))
    sym = float(np.max(np.abs(x + x[::-1]))) / scale
    h = c0 * float(np.prod(np.array(J.u, dtype=float)))
    dO = omega_prime(x)
    target = c0 * h / dO**2
    ww = float(np.max(np.abs(w * w[::-1] - target) / target))
    _, pi = pi_at_eigenvalues(J)
    pph = float(np.max(np.abs(pi * pi[::-1] - pph_sign(N))))
    mid = abs(float(x[N // 2])) / scale if N % 2 else None
    return PerSkewReport(sym, ww, pph, mid)


# inverse problems

def inverse_from_weights(sd: SpectralData, tag: str = "generic") -> JacobiMatrix:
    """Discrete Stieltjes procedure in vector form, with reorthogonalization.

    Orthonormal polynomial values on the nodes are built column by column;
    b_n = <x pi_n, pi_n> and u_{n+1} = ||x pi_n - b_n pi_n - a_n pi_{n-1}||^2.
    """
    x = np.asarray(sd.x, dtype=float)
    w = np.asarray(sd.w, dtype=float)
    N = x.size
    if N == 0:
        raise SpectralError("empty spectral data")
    if np.any(w <= 0):
        raise SpectralError("weights must be positive")
    if np.unique(x).size != N:
        raise SpectralError("duplicate nodes")
    Q = np.zeros((N, N))
    Q[:, 0] = np.sqrt(w / w.sum())
    b, u = [], []
    beta_prev = 0.0
    for n in range(N):
        q = Q[:, n]
        v = x * q - (beta_prev * Q[:, n - 1] if n else 0.0)
        alpha = float(q @ v)
        v = v - alpha * q
        for _ in range(2):
            v = v - Q[:, : n + 1] @ (Q[:, : n + 1].T @ v)
        b.append(alpha)
        if n == N - 1:
            break
        beta = float(np.linalg.norm(v))
        if beta <= 1e-14 * max(1.0, float(np.max(np.abs(x)))):
            raise SpectralError(f"loss of positivity at u_{n + 1}")
        u.append(beta * beta)
        Q[:, n + 1] = v / beta
        beta_prev = beta
    return JacobiMatrix(b, u, tag)


def _symmetric_spectrum(x_half: Sequence, parity: str) -> list:
    xs = list(x_half)
    if any(v <= 0 for v in xs) or any(b <= a for a, b in zip(xs, xs[1:])):
        raise SpectralError("x_half must be strictly positive and ascending")
    if parity == "even":
        return [-v for v in reversed(xs)] + xs
    if parity == "odd":
        zero = xs[0] * 0 if xs else 0
        return [-v for v in reversed(xs)] + [zero] + xs
    raise SpectralError(f"parity must be 'even' or 'odd', got {parity!r}")


def tau_pattern(tau: Sequence, N: int) -> list:
    """pi_{N-1}(x_s) for all s from the free parameters.

    The lower half is (-1)^{s+1} tau_s (even N) or (-1)^s tau_s (odd N); an odd
    size has middle value (-1)^{N(N-1)/2}; the upper half follows from
    pi(x_s) pi(x_{N-1-s}) = (-1)^{N-1}.
    """
    m = N // 2
    if len(tau) != m:
        raise SpectralError(f"need {m} tau parameters for size {N}")
    if any(t <= 0 for t in tau):
        raise SpectralError("tau parameters must be positive")
    one = Fraction(1) if all(isinstance(t, (int, Fraction)) for t in tau) else 1.0
    sgn = pph_sign(N)
    if N % 2 == 0:
        low = [(-1) ** (s + 1) * tau[s] * one for s in range(m)]
        mid = []
    else:
        low = [(-1) ** s * tau[s] * one for s in range(m)]
        mid = [one * (-1) ** ((N * (N - 1) // 2) % 2)]
    high = [sgn / v for v in reversed(low)]
    return low + mid + high


def perskew_from_tau(x_half: Sequence, tau: Sequence, parity: str, method: str = "auto") -> JacobiMatrix:
    """Per-skew Jacobi matrix with spectrum +-x_half (and 0 for odd parity) and pi_{N-1} pattern tau.

    ``method="descent"`` interpolates P_{N-1} through the prescribed values
    and divides P_N = Omega by it repeatedly (exact for rational input).
    ``method="weights"`` turns the same data into Christoffel weights
    w_s proportional to 1/(pi_{N-1}(x_s) Omega'(x_s)) and runs the Stieltjes
    procedure, which is the stable choice in floating point. ``auto`` picks
    the descent for rational input and the weights route otherwise.
    """
    x = _symmetric_spectrum(x_half, parity)
    N = len(x)
    vals = tau_pattern(tau, N)
    exact = all(isinstance(v, (int, Fraction)) for v in list(x) + list(tau))
    if method == "auto":
        method = "descent" if exact else "weights"
    if method == "weights":
        xf = np.array(x, dtype=float)
        w = 1.0 / (np.array(vals, dtype=float) * omega_prime(xf))
        if np.any(w <= 0):
            raise SpectralError("prescribed pi values give non-positive weights")
        J = inverse_from_weights(SpectralData(tuple(xf), tuple(w / w.sum())), "typeB" if N % 2 else "typeC")
        return J
    if method != "descent":
        raise SpectralError(f"unknown method {method!r}")
    one = Fraction(1) if exact else 1.0
    x = [v * one for v in x]
    omega = Poly.from_roots(x, "x")
    lag = _lagrange(x, vals, one)
    if lag.degree != N - 1:
        raise SpectralError(f"interpolant has degree {lag.degree}, expected {N - 1}")
    return _descent(omega, lag.monic(), exact, "typeB" if N % 2 else "typeC")


def _lagrange(x: list, y: list, one) -> Poly:
    acc = Poly([], "x")
    for s, xs in enumerate(x):
        term = Poly([one], "x")
        denom = one
        for k, xk in enumerate(x):
            if k != s:
                term = term * Poly([-xk, one], "x")
                denom = denom * (xs - xk)
        acc = acc + term * (y[s] / denom)
    return acc


def _descent(PN: Poly, PN1: Poly, exact: bool, tag: str) -> JacobiMatrix:
    """Recover b_n, u_n from monic P_N and P_{N-1} by Euclidean division."""
    N = PN.degree
    b = [None] * N
    u = [None] * (N - 1)
    hi, lo = PN, PN1
    for n in range(N - 1, -1, -1):
        q, r = hi.divmod(lo)
        # hi = (x - b_n) lo - u_n P_{n-1}
        b[n] = -q.coeff(0)
        if n == 0:
            if not _is_small(r, exact, 1.0):
                raise SpectralError("descent left a non-zero remainder")
            break
        if r.degree != n - 1 or (not exact and abs(r.lc) < DEGREE_TOL):
            raise SpectralError(f"degree drop in the descent at n={n}")
        un = -r.lc
        if un <= 0:
            raise SpectralError(f"non-positive u_{n} = {un}")
        u[n - 1] = un
        hi, lo = lo, r / (-un)
    return JacobiMatrix(b, u, tag)


def _is_small(p: Poly, exact: bool, scale: float) -> bool:
    if exact:
        return p.degree < 0 or all(c == 0 for c in p.coeffs)
    return all(abs(c) <= DEGREE_TOL * scale for c in p.coeffs)


def persymmetric_from_spectrum(x: Sequence[float]) -> JacobiMatrix:
    """The persymmetric Jacobi matrix with the given symmetric spectrum (weights 1/|Omega'|)."""
    xs = np.asarray(x, dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise SpectralError("spectrum must be strictly ascending")
    if np.max(np.abs(xs + xs[::-1])) > 1e-12 * max(1.0, float(np.max(np.abs(xs)))):
        raise SpectralError("spectrum is not symmetric about zero")
    w = 1.0 / np.abs(omega_prime(xs))
    J = inverse_from_weights(SpectralData(tuple(xs), tuple(w / w.sum())), "persymmetric")
    return J


def weights_from_rho(x: Sequence[float], rho_half: Sequence[float], with_omega: bool = True) -> SpectralData:
    """Weights from free positive rho_0..rho_{m-1} with rho_{N-1-i} = 1/rho_i (odd middle 1).

    With ``with_omega`` the weights are mu rho_i / |Omega'(x_i)|, which makes the
    reconstructed matrix per-skew; without it they are mu rho_i literally.
    """
    xs = np.asarray(x, dtype=float)
    N = xs.size
    m = N // 2
    if len(rho_half) != m or any(r <= 0 for r in rho_half):
        raise SpectralError(f"need {m} positive rho parameters")
    rho = list(rho_half) + ([1.0] if N % 2 else []) + [1.0 / r for r in reversed(rho_half)]
    w = np.array(rho, dtype=float)
    if with_omega:
        w = w / np.abs(omega_prime(xs))
    return SpectralData(tuple(xs), tuple(w / w.sum()))


# Hahn polynomials

def hahn_recurrence(alpha, beta, M: int, n: int) -> tuple:
    """(b_n, u_n) of the monic Hahn polynomials Q_n(x; alpha, beta, M) on {0..M}.

    b_n = A_n + C_n and u_n = A_{n-1} C_n with
    A_n = (n+a+b+1)(n+a+1)(M-n) / ((2n+a+b+1)(2n+a+b+2)),
    C_n = n(n+a+b+M+1)(n+b) / ((2n+a+b)(2n+a+b+1)).
    """
    if not 0 <= n <= M:
        raise ValueError(f"need 0 <= n <= M, got n={n}, M={M}")
    a, b = Fraction(alpha), Fraction(beta)

    def A(k):
        den = (2 * k + a + b + 1) * (2 * k + a + b + 2)
        if den == 0:
            raise ZeroDivisionError(f"degenerate Hahn denominator at n={k}")
        return (k + a + b + 1) * (k + a + 1) * (M - k) / den

    def C(k):
        if k == 0:
            return Fraction(0)
        den = (2 * k + a + b) * (2 * k + a + b + 1)
        if den == 0:
            raise ZeroDivisionError(f"degenerate Hahn denominator at n={k}")
        return k * (k + a + b + M + 1) * (k + b) / den

    bn = A(n) + C(n)
    un = A(n - 1) * C(n) if n else Fraction(0)
    return bn, un


def hahn_matrix(alpha, beta, M: int) -> JacobiMatrix:
    coeffs = [hahn_recurrence(alpha, beta, M, n) for n in range(M + 1)]
    return JacobiMatrix([c[0] for c in coeffs], [c[1] for c in coeffs[1:]], "generic")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
