"""Time evolution of finite Toda chains.

Canonical equations on the index window:

    b_k' = u_{k+1} - u_k,        u_k' = u_k (b_k - b_{k-1}).

Two closures are supported. ``molecule``: sites 0..n-1 carrying
b_0..b_{n-1} and interior u_1..u_{n-1}, with u_0 = u_n = 0 pinned.
``typeB_mirror``: the half lattice b_0..b_{n-1}, u_0..u_{n-1} with
b_{-1} = 0, so u_0' = u_0 b_0; the right end u_n is 0 or a prescribed
function of t. The mirrored full chain (sites -n-1..n-1) is recovered by
b_{-2-k} = -b_k, u_{-1-k} = u_k.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .spectral import JacobiMatrix, build_typeB, eigendecompose

MODES = ("molecule", "typeB_mirror")
COLLISION_TOL = 1e-8


class SimulationError(RuntimeError):
    pass


@dataclass
class TodaState:
    """Initial data for a finite chain.

    Parameters
    ----------
    b : array
        Diagonal b_0..b_{n-1}.
    u : array
        ``molecule``: u_1..u_{n-1}. ``typeB_mirror``: u_0..u_{n-1}.
    mode : str
        Closure, one of ``molecule`` or ``typeB_mirror``.
    t : float
        Initial time.
    u_right : callable, optional
        u_n(t) at the right end in ``typeB_mirror`` mode (default 0).
    """

    b: np.ndarray
    u: np.ndarray
    mode: str = "molecule"
    t: float = 0.0
    u_right: Callable[[float], float] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.mode not in MODES:
            raise ValueError(f"unknown closure mode {self.mode!r}")
        n = self.b.size
        if n == 0:
            raise ValueError("empty chain")
        want = n - 1 if self.mode == "molecule" else n
        if self.u.size != want:
            raise ValueError(f"{self.mode} with {n} sites needs {want} u values, got {self.u.size}")
        if self.u_right is not None and self.mode != "typeB_mirror":
            raise ValueError("a right boundary function needs typeB_mirror mode")

    @property
    def n(self) -> int:
        return self.b.size

    def pack(self) -> np.ndarray:
        return np.concatenate([self.b, self.u])

    def full_chain(self) -> "TodaState":
        """The mirrored molecule on sites -n-1..n-1 (typeB_mirror with u_n = 0 only)."""
        if self.mode != "typeB_mirror":
            raise ValueError("only a mirrored half lattice has a full chain")
        if self.u_right is not None:
            raise ValueError("the full chain of a window with a moving right end is infinite")
        b = np.concatenate([-self.b[::-1], [0.0], self.b])
        u = np.concatenate([self.u[::-1], self.u])
        return TodaState(b, u, "molecule", self.t)


def _rhs_molecule(n: int):
    def f(t, y):
        b, u = y[:n], y[n:]
        uu = np.concatenate([[0.0], u, [0.0]])  # u_0..u_n
        db = uu[1:] - uu[:-1]
        du = u * (b[1:] - b[:-1])
        return np.concatenate([db, du])

    return f


def _rhs_mirror(n: int, u_right):
    def f(t, y):
        b, u = y[:n], y[n:]
        un = 0.0 if u_right is None else u_right(t)
        uu = np.concatenate([u, [un]])  # u_0..u_n
        db = uu[1:] - uu[:-1]
        bm = np.concatenate([[0.0], b[:-1]])  # b_{-1}..b_{n-2}
        du = u * (b - bm)
        return np.concatenate([db, du])

    return f


@dataclass
class Trajectory:
    times: np.ndarray
    b: np.ndarray
    u: np.ndarray
    mode: str
    dense: Callable = field(repr=False)
    u_right: Callable | None = field(default=None, repr=False)
    eigen_paths: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.b.shape[1]

    def state_at(self, t: float) -> TodaState:
        if not self.times[0] - 1e-12 <= t <= self.times[-1] + 1e-12:
            raise ValueError(f"t={t} outside the trajectory [{self.times[0]}, {self.times[-1]}]")
        y = self.dense(t)
        n = self.n
        return TodaState(y[:n], y[n:], self.mode, t, self.u_right)

    def window(self, t: float) -> JacobiMatrix:
        """The Jacobi matrix on sites 0..n-1 (for typeB_mirror, u_0 sits outside it)."""
        s = self.state_at(t)
        u = s.u if self.mode == "molecule" else s.u[1:]
        return JacobiMatrix(s.b, u, "generic")

    def source(self, t: float) -> float:
        """u_0(t): zero for a molecule."""
        return 0.0 if self.mode == "molecule" else float(self.state_at(t).u[0])


def simulate(init: TodaState, t_end: float, tol: float = 1e-10, n_samples: int = 101) -> Trajectory:
    """Integrate with an embedded 8(5,3) Runge-Kutta pair; rtol = tol, atol = tol * 1e-2."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if t_end <= init.t:
        raise ValueError("t_end must exceed the initial time")
    n = init.n
    f = _rhs_molecule(n) if init.mode == "molecule" else _rhs_mirror(n, init.u_right)
    times = np.linspace(init.t, t_end, n_samples)
    sol = solve_ivp(f, (init.t, t_end), init.pack(), method="DOP853", rtol=tol, atol=tol * 1e-2,
                    t_eval=times, dense_output=True)
    if sol.status != 0:
        raise SimulationError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    Y = sol.y.T
    return Trajectory(sol.t, Y[:, :n], Y[:, n:], init.mode, sol.sol, init.u_right)


# diagnostics

def hamiltonian(b, u) -> float:
    """sum b_k^2 / 2 + sum of interior u_k (molecule)."""
    return 0.5 * float(np.sum(np.asarray(b) ** 2)) + float(np.sum(u))


def hamiltonian_drift(traj: Trajectory) -> float:
    if traj.mode != "molecule":
        raise ValueError("the Hamiltonian is conserved on molecules only")
    H = np.array([hamiltonian(b, u) for b, u in zip(traj.b, traj.u)])
    return float(np.max(np.abs(H - H[0])) / max(1.0, abs(H[0])))


def mirror_drift(traj: Trajectory) -> float:
    """Max deviation from b_{-2-k} = -b_k, u_{-1-k} = u_k on a full odd-size molecule."""
    if traj.mode != "molecule" or traj.n % 2 == 0:
        raise ValueError("mirror drift needs a full molecule of odd size")
    c = traj.n // 2
    db = np.max(np.abs(traj.b + traj.b[:, ::-1]))
    du = np.max(np.abs(traj.u - traj.u[:, ::-1]))
    mid = np.max(np.abs(traj.b[:, c]))
    return float(max(db, du, mid))


def _fd(f, t, h):
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h)


def lax_residual(traj: Trajectory, t: float, include_source: bool = True, h: float = 1e-3) -> float:
    """||J' - [J, A] + u_0 M - u_n M'||_inf with J' by a 4th-order central difference.

    A is the strictly lower part of J, M the top-left and M' the bottom-right
    unit matrix; u_n is the prescribed right end (zero unless the window has a
    moving boundary). With include_source=False both source terms are dropped
    (the pure Lax form).
    """
    if t - 2 * h < traj.times[0] or t + 2 * h > traj.times[-1]:
        raise ValueError("t too close to the trajectory boundary for central differences")
    Jdot = _fd(lambda s: traj.window(s).dense(), t, h)
    J = traj.window(t).dense()
    A = np.tril(J, -1)
    R = Jdot - (J @ A - A @ J)
    if include_source:
        R[0, 0] += traj.source(t)
        if traj.u_right is not None:
            R[-1, -1] -= traj.u_right(t)
    return float(np.max(np.sum(np.abs(R), axis=1)))


@dataclass
class EigenFlow:
    times: np.ndarray
    paths: np.ndarray
    max_rate: float


def eigenflow(traj: Trajectory) -> EigenFlow:
    """Eigenvalues of the window matrix at each sample, matched to the previous sample."""
    paths = np.empty((traj.times.size, traj.n))
    prev = None
    for i, t in enumerate(traj.times):
        x = np.array(eigendecompose(traj.window(t)).x)
        if x.size > 1 and np.min(np.diff(x)) < COLLISION_TOL:
            raise SimulationError(f"eigenvalue collision at t={t:.6g}")
        if prev is not None:
            order = _match(prev, x)
            x = x[order]
        paths[i] = x
        prev = x
    rate = np.gradient(paths, traj.times, axis=0) if traj.times.size > 1 else np.zeros_like(paths)
    traj.eigen_paths = paths
    return EigenFlow(traj.times, paths, float(np.max(np.abs(rate))))


def _match(prev: np.ndarray, cur: np.ndarray) -> np.ndarray:
    order, used = [], set()
    for p in prev:
        cands = [j for j in range(cur.size) if j not in used]
        j = min(cands, key=lambda j: abs(cur[j] - p))
        used.add(j)
        order.append(j)
    return np.array(order)


@dataclass
class CoordinateView:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    antisymmetry: float | None
    velocity_mismatch: float


def coordinate_view(traj: Trajectory, q_cm0: float = 0.0) -> CoordinateView:
    """Positions and momenta with u_k = exp(q_{k-1} - q_k) and p_k = -b_k.

    An odd full molecule is anchored at its middle site (q = 0 there) and
    checked for q_{-n} = -q_n, p_{-n} = -p_n. Otherwise positions are fixed
    by the centre of mass, which moves at the mean momentum. The report also
    gives max |q' - p| from finite differences of the reconstruction.
    """
    if np.any(traj.u <= 0):
        raise ValueError("coordinates need u_k > 0")
    n = traj.n
    p = -traj.b
    if traj.mode == "typeB_mirror":
        raise ValueError("build the full chain first: coordinates live on the mirrored molecule")
    logs = np.log(traj.u)
    q = np.zeros((traj.times.size, n))
    q[:, 1:] = -np.cumsum(logs, axis=1)
    anti = None
    if n % 2 == 1 and _looks_mirrored(traj):
        q -= q[:, [n // 2]]
        anti = float(max(np.max(np.abs(q + q[:, ::-1])), np.max(np.abs(p + p[:, ::-1]))))
    else:
        cm = q_cm0 + (traj.times - traj.times[0]) * p[0].mean()
        q += (cm - q.mean(axis=1))[:, None]
    if traj.times.size >= 5:
        qdot = np.gradient(q, traj.times, axis=0, edge_order=2)
        mismatch = float(np.max(np.abs(qdot[2:-2] - p[2:-2])))
    else:
        mismatch = 0.0
    return CoordinateView(traj.times, q, p, anti, mismatch)


def _looks_mirrored(traj: Trajectory, tol: float = 1e-6) -> bool:
    b0, u0 = traj.b[0], traj.u[0]
    return bool(np.max(np.abs(b0 + b0[::-1]), initial=0) < tol and np.max(np.abs(u0 - u0[::-1]), initial=0) < tol)


def mirror_init(b_half, u_half) -> TodaState:
    """The full mirrored molecule built from half-lattice data (type B)."""
    return TodaState(b_half, u_half, "typeB_mirror").full_chain()


def full_typeB_matrix(traj: Trajectory, t: float) -> JacobiMatrix:
    s = traj.state_at(t)

    class _RC:
        b = {k: v for k, v in enumerate(s.b)}
        u = {k: v for k, v in enumerate(s.u)}

    return build_typeB(_RC, s.n)


def right_boundary_from_potential(spec, n: int, order_guard: int = 2) -> Callable[[float], float]:
    """u_n(t) computed afresh from the moments of a named potential at each t."""
    from .core import moments_from_initial, recurrence_from_moments
    from .jets import jet_lift

    K = 2 * n + 2 + order_guard

    def u_n(t: float) -> float:
        u0 = jet_lift(spec, float(t), K)
        m = moments_from_initial(u0, u0, 2 * n + 1)
        rc = recurrence_from_moments(m, n)
        return float(rc.u[n].value) if hasattr(rc.u[n], "value") else float(rc.u[n])

    return u_n


def write_csv(traj: Trajectory, path: str) -> None:
    """t, b_*, u_*, eigenvalues of the window (if tracked), energy (molecules)."""
    n = traj.n
    ulabels = [f"u_{k + 1}" for k in range(traj.u.shape[1])] if traj.mode == "molecule" else [
        f"u_{k}" for k in range(traj.u.shape[1])]
    header = ["t"] + [f"b_{k}" for k in range(n)] + ulabels
    if traj.eigen_paths is not None:
        header += [f"eig_{k}" for k in range(n)]
    header.append("energy")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, t in enumerate(traj.times):
            row = [repr(float(t))] + [repr(float(v)) for v in traj.b[i]] + [repr(float(v)) for v in traj.u[i]]
            if traj.eigen_paths is not None:
                row += [repr(float(v)) for v in traj.eigen_paths[i]]
            e = hamiltonian(traj.b[i], traj.u[i]) if traj.mode == "molecule" else math.nan
            row.append(repr(e))
            w.writerow(row)
