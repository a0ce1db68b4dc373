"""Bundled verification suites.

Each suite returns a list of ``Check`` records; ``run_suite`` times a suite
and ``SUITES`` maps CLI names to suite functions. Tolerances and sizes are
the documented acceptance thresholds.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bargmann import (
    bargmann_solution,
    conserved_fit,
    exact_poles_at_zero,
    hahn_identification_check,
    pole_dynamics_residual,
    predicted_poles_at_zero,
    soliton_polynomial,
    track_poles,
)
from .core import (
    kdv_moment_identification,
    moments_from_initial,
    recurrence_from_moments,
    riccati_residual,
    second_kind_check,
    stieltjes_series,
)
from .exact import Poly, RationalFunction, SeriesOrderError
from .jets import PotentialSpec, jet_lift
from .painleve import b_from_toda, laguerre_hahn_residual, pii_residual, pii_solution, yv_moments
from .sim import (
    TodaState,
    coordinate_view,
    eigenflow,
    hamiltonian_drift,
    lax_residual,
    mirror_drift,
    mirror_init,
    simulate,
)
from .spectral import (
    JacobiMatrix,
    eigendecompose,
    inverse_from_weights,
    is_per_skew,
    pi_at_eigenvalues,
    perskew_from_tau,
    perskew_property_checks,
)

DEFAULT_SEED = 20240611


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    name: str
    checks: list
    seconds: float
    budget: float | None = None

    @property
    def passed(self) -> bool:
        within = self.budget is None or self.seconds <= self.budget
        return within and all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        out = [f"{c.name}: {c.detail}" for c in self.checks if not c.passed]
        if self.budget is not None and self.seconds > self.budget:
            out.append(f"time budget: {self.seconds:.2f}s > {self.budget}s")
        return out


def seed() -> int:
    return int(os.environ.get("TODA_SEED", DEFAULT_SEED))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# 1 Darboux polynomials

def suite_darboux() -> list[Check]:
    y = Poly([Fraction(0), Fraction(1)], "y")

    def yp(*cs):
        return Poly([Fraction(c) for c in cs], "y")

    expected = {
        1: Poly([yp(0, 2), yp(1)], "z"),
        2: Poly([yp(-4, 0, 12), yp(0, 6), yp(1)], "z"),
        3: Poly([yp(0, -72, 0, 120), yp(-16, 0, 60), yp(0, 12), yp(1)], "z"),
    }
    assert expected[3].coeffs[0] == y * (y * y * 5 - 3) * 24
    checks = []
    for N, want in expected.items():
        got = soliton_polynomial(N).Q
        checks.append(Check(f"Q_{N} coefficients", got == want, f"got {got}"))
    return checks


# 2 named potentials

def _closed_forms(spec: PotentialSpec, t: float, n: int) -> tuple[float, float]:
    if spec.kind == "centrifugal":
        a = float(spec.alpha)
        return (n * (n + 1) + a) / t**2, -2.0 * (n + 1) / t
    if spec.kind == "sec2":
        a = float(spec.alpha)
        return (a + n * (n + 1)) / math.cos(t) ** 2, 2.0 * (n + 1) * math.tan(t)
    if spec.kind == "sech2":
        N = spec.N
        return (N * (N + 1) - n * (n + 1)) / math.cosh(t) ** 2, -2.0 * (n + 1) * math.tanh(t)
    raise ValueError(spec.kind)


def named_recurrence(spec: PotentialSpec, t: float, n_max: int):
    K = 2 * n_max + 1
    u0 = jet_lift(spec, t, K + 2)
    m = moments_from_initial(u0, u0, K)
    return recurrence_from_moments(m, n_max)


def suite_named_potentials(n_max: int = 8, tol: float = 1e-10) -> list[Check]:
    cases = [
        (PotentialSpec("centrifugal", alpha=1), 1.0),
        (PotentialSpec("centrifugal", alpha=2), 1.0),
        (PotentialSpec("sec2", alpha=1), 0.3),
        (PotentialSpec("sech2", N=2), 0.3),
        (PotentialSpec("sech2", N=3), 0.3),
    ]
    checks = []
    for spec, t in cases:
        rc = named_recurrence(spec, t, n_max)
        worst = 0.0
        top = n_max if spec.kind != "sech2" else spec.N - 1
        for n in range(top + 1):
            u_ref, b_ref = _closed_forms(spec, t, n)
            worst = max(worst, _rel(float(rc.u[n].value), u_ref), _rel(float(rc.b[n].value), b_ref))
        ok = worst <= tol
        if spec.kind == "sech2":
            ok = ok and rc.singular_at == spec.N
        checks.append(Check(f"{spec} at t={t}", ok, f"max rel err {worst:.2e}, window ends at {rc.singular_at}"))
    return checks


# 3 Painleve-II

def suite_painleve(N_max: int = 6, N_toda: int = 5) -> list[Check]:
    checks = []
    for N in range(N_max + 1):
        sol = pii_solution(N)
        checks.append(Check(f"PII residual N={N}", pii_residual(sol).is_zero()))
    for N in range(N_toda + 1):
        V = pii_solution(N).V
        rc = recurrence_from_moments(yv_moments(2 * N + 1), N)
        bN = rc.b[N] if isinstance(rc.b[N], RationalFunction) else RationalFunction(rc.b[N])
        checks.append(Check(f"b_{N} (Hankel) = V_{N}", bN == V))
        checks.append(Check(f"b_{N} (Toda equations) = V_{N}", b_from_toda(N) == V))
    return checks


# 4 KdV densities

def suite_kdv(m_exact: int = 10, m_jet: int = 10, t0: float = 0.2) -> list[Check]:
    U = Poly([Fraction(0), Fraction(-1)], "t")
    rep = kdv_moment_identification(U, m_exact)
    checks = [Check(f"U=-t, m<={m_exact} exact", rep.passed)]
    for N in (1, 2, 3):
        U = -jet_lift(PotentialSpec("sech2", N=N), t0, m_jet + 1)
        rep = kdv_moment_identification(U, m_jet, tol=1e-10)
        checks.append(Check(f"U=-{N * (N + 1)}sech^2, m<={m_jet}", rep.passed, f"max dev {rep.max_deviation:.2e}"))
    return checks


# 5 solitonic spectra at t = 0

def suite_soliton_spectra(N_max: int = 6) -> list[Check]:
    checks = []
    for N in range(1, N_max + 1):
        got = exact_poles_at_zero(N)
        checks.append(Check(f"Q_{N}(z;0) roots", got == predicted_poles_at_zero(N), str([str(r) for r in got])))
        rep = hahn_identification_check(N)
        checks.append(Check(f"Hahn identification N={N}", rep.passed, str(rep)))
    return checks


# 6 per-skew Jacobi matrices

def random_mirrored(rng: np.random.Generator, size: int) -> JacobiMatrix:
    """Random per-skew matrix: antisymmetric reversed diagonal, palindromic u > 0."""
    half = size // 2
    b = rng.uniform(-1.0, 1.0, half)
    diag = list(-b[::-1]) + ([0.0] if size % 2 else []) + list(b)
    nu = size - 1
    uh = rng.uniform(0.5, 2.0, (nu + 1) // 2)
    sub = list(uh) + list(uh[: nu // 2][::-1])
    return JacobiMatrix(diag, sub, "typeB" if size % 2 else "typeC")


def tau_from_matrix(J: JacobiMatrix) -> tuple[list, list, str]:
    x, pi = pi_at_eigenvalues(J)
    N = J.size
    m = N // 2
    return list(x[N - m:]), list(np.abs(pi[:m])), "odd" if N % 2 else "even"


def _matrix_dev(A: JacobiMatrix, B: JacobiMatrix) -> float:
    a = np.array(list(A.b) + list(A.u), dtype=float)
    b = np.array(list(B.b) + list(B.u), dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


def suite_perskew(count: int = 50, max_size: int = 13, rng_seed: int | None = None) -> list[Check]:
    rng = np.random.default_rng(seed() if rng_seed is None else rng_seed)
    worst = {"symmetry": 0.0, "ww": 0.0, "pph": 0.0, "inverse": 0.0, "tau": 0.0}
    not_perskew = 0
    for i in range(count):
        size = 2 + i % (max_size - 1) if i < max_size - 1 else int(rng.integers(2, max_size + 1))
        J = random_mirrored(rng, size)
        if not is_per_skew(J):
            not_perskew += 1
            continue
        rep = perskew_property_checks(J)
        worst["symmetry"] = max(worst["symmetry"], rep.symmetry, rep.middle_zero or 0.0)
        worst["ww"] = max(worst["ww"], rep.ww)
        worst["pph"] = max(worst["pph"], rep.pph)
        worst["inverse"] = max(worst["inverse"], _matrix_dev(inverse_from_weights(eigendecompose(J)), J))
        xh, tau, parity = tau_from_matrix(J)
        worst["tau"] = max(worst["tau"], _matrix_dev(perskew_from_tau(xh, tau, parity), J))
    return [
        Check("random matrices are per-skew", not_perskew == 0, f"{not_perskew} failed"),
        Check("eigenvalue symmetry", worst["symmetry"] <= 1e-10, f"{worst['symmetry']:.2e}"),
        Check("weight product law", worst["ww"] <= 1e-10, f"{worst['ww']:.2e}"),
        Check("pi_{N-1} product law", worst["pph"] <= 1e-10, f"{worst['pph']:.2e}"),
        Check("inverse_from_weights round trip", worst["inverse"] <= 1e-8, f"{worst['inverse']:.2e}"),
        Check("perskew_from_tau round trip", worst["tau"] <= 1e-8, f"{worst['tau']:.2e}"),
    ]


# 7 simulation

def suite_simulation(tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed())
    bh, uh = rng.uniform(-1, 1, 4), rng.uniform(0.5, 2.0, 4)
    full = simulate(mirror_init(bh, uh), 1.0, tol)
    md, hd = mirror_drift(full), hamiltonian_drift(full)
    cv = coordinate_view(full)
    half = simulate(TodaState(bh, uh, "typeB_mirror"), 1.0, tol)
    agree = float(np.max(np.abs(half.b - full.b[:, 5:])))

    window = simulate(TodaState([0.0, 0.0], [6.0, 4.0], "typeB_mirror"), 1.0, tol)
    lax_with = max(lax_residual(window, t) for t in (0.25, 0.5, 0.75))
    lax_without = min(lax_residual(window, t, include_source=False) for t in (0.25, 0.5, 0.75))
    flow = eigenflow(window)
    roots = track_poles(soliton_polynomial(2), window.times)
    eig_dev = float(np.max(np.abs(flow.paths - roots)))
    return [
        Check("mirror drift", md < 1e-8, f"{md:.2e}"),
        Check("Hamiltonian drift", hd < 1e-8, f"{hd:.2e}"),
        Check("coordinate antisymmetry", cv.antisymmetry is not None and cv.antisymmetry < 1e-8, f"{cv.antisymmetry}"),
        Check("half lattice = full molecule", agree < 1e-8, f"{agree:.2e}"),
        Check("Lax residual with source", lax_with < 1e-6, f"{lax_with:.2e}"),
        Check("pure Lax residual detects source", lax_without >= 1e-2, f"{lax_without:.2e}"),
        Check("eigenflow = Q_2 roots", eig_dev < 1e-7, f"{eig_dev:.2e}"),
    ]


# 8 pole dynamics

def suite_pole_dynamics(N_max: int = 3) -> list[Check]:
    ts = np.linspace(0.0, 1.0, 11)
    checks = []
    for N in range(1, N_max + 1):
        sol = bargmann_solution(N, ts)
        res = max(float(np.max(np.abs(pole_dynamics_residual(sol, t)))) for t in ts)
        fit = conserved_fit(sol)
        sumA = max(abs(float(np.sum(sol.residues[i])) - N * (N + 1) / math.cosh(t) ** 2) for i, t in enumerate(ts))
        checks.append(Check(f"pole equations N={N}", res < 1e-6, f"{res:.2e}"))
        checks.append(Check(f"conserved W fit N={N}", fit.residual < 1e-6, f"{fit.residual:.2e}, W={fit.W}"))
        checks.append(Check(f"sum of residues N={N}", sumA < 1e-8, f"{sumA:.2e}"))
    return checks


# 9 formal series

def suite_series(K: int = 12, n_max: int = 4) -> list[Check]:
    m = yv_moments(K)
    T = Poly([Fraction(0), Fraction(1)], "t")
    ric = riccati_residual(stieltjes_series(m), T, T)
    ric_ok = ric.order is not None and ric.order >= K and ric.truncate(K).is_zero()
    lh = laguerre_hahn_residual(K)
    checks = [
        Check(f"Riccati residual through z^-{K}", ric_ok, f"order {ric.order}"),
        Check(f"Laguerre-Hahn residual through z^-{K}", lh.is_zero() and lh.order >= K, f"order {lh.order}"),
    ]
    rc = recurrence_from_moments(yv_moments(2 * n_max + 1), n_max)
    mt = yv_moments(2 * n_max + 1)
    checks += [_second_kind(mt, rc, n, None, "linear, exact") for n in range(n_max + 1)]
    for spec, t in ((PotentialSpec("centrifugal", alpha=1), 1.0), (PotentialSpec("sec2", alpha=1), 0.3)):
        K2 = 2 * n_max + 2
        u0 = jet_lift(spec, t, K2 + 2)
        mm = moments_from_initial(u0, u0, K2)
        rcj = recurrence_from_moments(mm, n_max)
        checks += [_second_kind(mm, rcj, n, 1e-9, str(spec)) for n in range(n_max + 1)]
    return checks


def _second_kind(m, rc, n: int, tol, label: str) -> Check:
    name = f"second kind h_{n} ({label})"
    try:
        lead = second_kind_check(m, rc, n, tol=tol)
    except (AssertionError, SeriesOrderError) as exc:
        return Check(name, False, str(exc))
    return Check(name, True, f"leading coefficient {lead}")


ACCEPTANCE = [
    ("1 Darboux polynomials", suite_darboux, 1.0),
    ("2 named-potential coefficients", suite_named_potentials, 5.0),
    ("3 Painleve-II", suite_painleve, 30.0),
    ("4 KdV identification", suite_kdv, 5.0),
    ("5 solitonic spectra and Hahn map", suite_soliton_spectra, 5.0),
    ("6 per-skew Jacobi suite", suite_perskew, 30.0),
    ("7 simulation", suite_simulation, 60.0),
    ("8 pole dynamics", suite_pole_dynamics, 30.0),
    ("9 formal series", suite_series, 10.0),
]

SUITES = {
    "darboux": suite_darboux,
    "named": suite_named_potentials,
    "painleve": suite_painleve,
    "kdv": suite_kdv,
    "spectra": suite_soliton_spectra,
    "perskew": suite_perskew,
    "simulation": suite_simulation,
    "poles": suite_pole_dynamics,
    "series": suite_series,
}

_BUDGETS = {key: budget for key, (_, _, budget) in zip(SUITES, ACCEPTANCE)}


def run_suite(name: str, fn=None, budget: float | None = None) -> SuiteResult:
    fn = fn or SUITES[name]
    start = time.perf_counter()
    checks = fn()
    elapsed = time.perf_counter() - start
    return SuiteResult(name, checks, elapsed, budget if budget is not None else _BUDGETS.get(name))
