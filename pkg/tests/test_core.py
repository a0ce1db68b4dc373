from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toda.core import (
    MomentTable,
    RecurrenceCoefficients,
    SingularHankel,
    WindowError,
    associated_polynomial,
    beta_shift,
    bilinear_residual,
    dotP_residual,
    from_mechanical,
    hankel,
    kdv_densities,
    kdv_moment_identification,
    moments_from_initial,
    op_polynomial,
    op_polynomial_det,
    propagate_schrodinger,
    recurrence_from_moments,
    reflect_extend,
    riccati_residual,
    schrodinger_residual,
    schrodinger_to_stieltjes,
    second_kind_check,
    second_kind_recurrence_residual,
    stieltjes_series,
    to_mechanical,
    toda_equation_residuals,
    toda_forward,
)
from toda.exact import FormalSeries, Poly
from toda.jets import Jet, PotentialSpec, jet_exp, jet_lift, jet_tanh
from toda.spectral import JacobiMatrix, eigendecompose

CENT1 = PotentialSpec("centrifugal", alpha=1)
SEC2 = PotentialSpec("sec2", alpha=1)


def table(spec, t0, N):
    u0 = jet_lift(spec, t0, N + 2)
    return moments_from_initial(u0, u0, N)


def P(*cs, var="t"):
    return Poly([Fraction(c) for c in cs], var)


# moments and Hankel determinants

def test_linear_moments(t):
    m = moments_from_initial(t, t, 4)
    assert m.c[1:] == (P(1), t * t, t * 4, t**3 * 2 + 5)


def test_centrifugal_moments():
    m = table(CENT1, 1.0, 2)
    assert [c.value for c in m.c] == pytest.approx([1, -2, 7])


def test_constant_moments():
    k = Fraction(3)
    m = moments_from_initial(k, k, 3)
    assert m.c == (3, 0, 9, 0)


def test_moments_need_invertible_c0():
    with pytest.raises(ZeroDivisionError):
        moments_from_initial(Jet(0.0, (0.0, 1.0, 0.0)), Jet(0.0, (1.0, 0.0, 0.0)), 2)


def test_hankel_examples(t):
    m = moments_from_initial(t, t, 4)
    assert hankel(m, 0) == 1
    assert hankel(m, 1) == t
    assert hankel(m, 2) == t**3 - 1
    with pytest.raises(WindowError):
        hankel(m, 4)


# recurrence coefficients against closed forms

def test_centrifugal_coefficients():
    rc = recurrence_from_moments(table(CENT1, 1.0, 9), 4)
    assert rc.u[1].value == pytest.approx(3, rel=1e-12)
    assert rc.b[1].value == pytest.approx(-4, rel=1e-12)
    for n in range(5):
        assert rc.b[n].value == pytest.approx(-2 * (n + 1), rel=1e-11)
        if n:
            assert rc.u[n].value == pytest.approx(n * (n + 1) + 1, rel=1e-11)


def test_sech2_window_truncates():
    rc = recurrence_from_moments(table(PotentialSpec("sech2", N=2), 0.0, 7), 3)
    assert rc.u[1].value == pytest.approx(4)
    assert rc.b[0].value == pytest.approx(0, abs=1e-14) and rc.b[1].value == pytest.approx(0, abs=1e-14)
    assert rc.singular_at == 2 and rc.u[2].value == 0 and 2 not in rc.b
    with pytest.raises(SingularHankel):
        recurrence_from_moments(table(PotentialSpec("sech2", N=2), 0.0, 7), 3, strict=True)


def test_sec2_coefficients():
    t0 = 0.3
    rc = recurrence_from_moments(table(SEC2, t0, 5), 2)
    assert rc.u[1].value == pytest.approx(3 / math.cos(t0) ** 2, rel=1e-12)
    assert rc.b[1].value == pytest.approx(4 * math.tan(t0), rel=1e-12)


def test_exact_and_numeric_routes_agree():
    # rational jets go through Gram orthogonalization; the polynomial route
    # through Hankel ratios; both at t = 2 for the linear potential
    tt = P(0, 1)
    exact = recurrence_from_moments(moments_from_initial(tt, tt, 7), 3)
    u0 = jet_lift(PotentialSpec("linear"), Fraction(2), 9)
    numeric = recurrence_from_moments(moments_from_initial(u0, u0, 7), 3)
    for n in range(4):
        assert numeric.b[n].value == exact.b[n](Fraction(2))
        if n:
            assert numeric.u[n].value == exact.u[n](Fraction(2))


def test_toda_forward_agrees_with_moments():
    u0 = jet_lift(SEC2, 0.3, 14)
    rc = recurrence_from_moments(moments_from_initial(u0, u0, 9), 4)
    fw = toda_forward(u0, u0, 4)
    for n in range(5):
        assert fw.b[n].value == pytest.approx(rc.b[n].value, rel=1e-10)
        assert fw.u[n].value == pytest.approx(rc.u[n].value, rel=1e-10)


@pytest.mark.parametrize("spec,t0", [(CENT1, 1.0), (SEC2, 0.3), (PotentialSpec("sech2", N=3), 0.2)])
def test_toda_equations_hold(spec, t0):
    rc = recurrence_from_moments(table(spec, t0, 11), 5)
    for r in toda_equation_residuals(rc):
        assert abs(r.value) < 1e-9


def test_exact_toda_equations(t):
    rc = recurrence_from_moments(moments_from_initial(t, t, 7), 3)
    assert all(r.is_zero() for r in toda_equation_residuals(rc))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 5.0), st.sampled_from([-1.0, 1.0]))
def test_kappa_normalization(mu, sign):
    m = table(SEC2, 0.3, 9)
    scaled = MomentTable(tuple(c * (mu * sign) for c in m.c), m.u0, m.ratio)
    a, b = recurrence_from_moments(m, 4), recurrence_from_moments(scaled, 4)
    for n in range(1, 5):
        assert b.u[n].value == pytest.approx(a.u[n].value, rel=1e-9)
        assert b.b[n].value == pytest.approx(a.b[n].value, rel=1e-9)


# polynomials

def test_op_polynomials():
    rc = recurrence_from_moments(table(PotentialSpec("sech2", N=2), 0.0, 7), 3)
    assert op_polynomial(rc, 0).coeffs[0].value == 1
    assert [c.value for c in op_polynomial(rc, 2).coeffs] == pytest.approx([-4, 0, 1], abs=1e-12)
    assert [c.value for c in associated_polynomial(rc, 1).coeffs] == pytest.approx([0, 1], abs=1e-12)
    with pytest.raises(WindowError):
        op_polynomial(rc, 4)


def test_op_polynomial_matches_determinant(t):
    m = moments_from_initial(t, t, 7)
    rc = recurrence_from_moments(m, 3)
    for n in range(4):
        rec = op_polynomial(rc, n)
        det = op_polynomial_det(m, n)
        assert rec.degree == det.degree == n
        for k in range(n + 1):
            assert rec.coeff(k) == det.coeff(k)


def test_discrete_orthogonality():
    # Gauss quadrature from the truncated Jacobi matrix realizes the functional
    m = table(CENT1, 1.0, 11)
    rc = recurrence_from_moments(m, 5)
    n = 5
    J = JacobiMatrix([rc.b[k].value for k in range(n)], [rc.u[k].value for k in range(1, n)])
    sd = eigendecompose(J, c0=m.c[0].value)
    x, w = np.array(sd.x), np.array(sd.w)
    Ps = [op_polynomial(rc, k) for k in range(n)]
    vals = [np.polynomial.polynomial.polyval(x, [c.value for c in p.coeffs]) for p in Ps]
    h = m.c[0].value
    for i in range(n):
        for k in range(n):
            s = float(np.sum(w * vals[i] * vals[k]))
            target = h if i == k else 0.0
            assert s == pytest.approx(target, rel=1e-8, abs=1e-8 * h)
        if i + 1 < n:
            h *= rc.u[i + 1].value
    for k in range(2 * n):
        assert float(np.sum(w * x**k)) == pytest.approx(m.c[k].value, rel=1e-8)


# series

def test_stieltjes_series(t):
    F = stieltjes_series(moments_from_initial(t, t, 3))
    assert F.coeff(-1) == t and F.coeff(-2) == 1 and F.coeff(-3) == t * t and F.coeff(-4) == t * 4
    assert stieltjes_series(MomentTable((Fraction(1),), 0, 0)).terms() == [(-1, 1)]


def test_riccati_zero_and_perturbed(t):
    m = moments_from_initial(t, t, 8)
    assert riccati_residual(stieltjes_series(m), t, t).is_zero()
    c = list(m.c)
    c[2] = c[2] + 1
    lead = riccati_residual(FormalSeries.stieltjes(c), t, t).leading()
    assert lead[0] == -2


def test_riccati_empty():
    F = FormalSeries.stieltjes([Fraction(0)])
    assert riccati_residual(F, Fraction(0), Fraction(0)).is_zero()


def test_riccati_on_jets():
    m = table(SEC2, 0.3, 10)
    res = riccati_residual(stieltjes_series(m), m.c[0], m.u0)
    scale = max(c.max_abs() for c in m.c)
    assert res.is_zero(1e-13 * scale)


def test_second_kind_leading(t):
    m = moments_from_initial(t, t, 9)
    rc = recurrence_from_moments(m, 4)
    assert second_kind_check(m, rc, 0) == t
    assert second_kind_check(m, rc, 1) == rc.u[1] * t


def test_second_kind_degenerate_window():
    m = table(PotentialSpec("sech2", N=2), 0.0, 7)
    rc = recurrence_from_moments(m, 3)
    assert abs(second_kind_check(m, rc, 2, tol=1e-10).value) < 1e-10


def test_second_kind_literal_form_needs_unit_mass(t):
    m = moments_from_initial(t, t, 9)
    rc = recurrence_from_moments(m, 4)
    for n in range(4):
        assert second_kind_recurrence_residual(m, rc, n).is_zero()
    # the c_0-scaled functions satisfy the recurrence with c_0 in place of 1
    assert second_kind_recurrence_residual(m, rc, 0, literal=False).is_zero()


@pytest.mark.parametrize("spec,t0", [(CENT1, 1.0), (SEC2, 0.3)])
def test_dotP_residual(spec, t0):
    m = table(spec, t0, 9)
    rc = recurrence_from_moments(m, 4)
    assert dotP_residual(rc, m, 0).is_zero()
    for n in (1, 2, 3):
        res = dotP_residual(rc, m, n)
        assert max((abs(c.value) for c in res.coeffs), default=0.0) < 1e-9


def test_bilinear(t):
    m = moments_from_initial(t, t, 6)
    assert bilinear_residual(m, t, 1).is_zero()
    assert bilinear_residual(m, t, 2).is_zero()
    mj = table(PotentialSpec("sech2", N=2), 0.1, 8)
    assert abs(bilinear_residual(mj, mj.u0, 2).value) < 1e-9


# KdV densities

def test_kdv_linear(t):
    sig = kdv_densities(-t, 4)
    assert sig == [t, P(1), t * t, t * 4]
    rep = kdv_moment_identification(-t, 10)
    assert rep.passed and rep.exact


def test_kdv_zero():
    assert kdv_densities(Fraction(0), 5) == [0] * 5


def test_kdv_sech2_against_moments():
    U = -jet_lift(PotentialSpec("sech2", N=1), 0.0, 8)
    sig = kdv_densities(U, 6)
    m = moments_from_initial(-U, -U, 5)
    for s, c in zip(sig, m.c):
        assert s.value == pytest.approx(c.value, abs=1e-12)


def test_kdv_sech2_report():
    U = -jet_lift(PotentialSpec("sech2", N=3), 0.2, 10)
    rep = kdv_moment_identification(U, 8)
    assert rep.passed and rep.max_deviation < 1e-10


# reflection, shifts, conventions

def sech2_rc(t0=0.3):
    return recurrence_from_moments(table(PotentialSpec("sech2", N=1), t0, 5), 2)


def test_reflect_extend_sech2():
    rc = sech2_rc()
    out = reflect_extend(rc, -1)
    assert out.u[-1].value == pytest.approx(rc.u[0].value)
    assert out.b[-2].value == pytest.approx(-rc.b[0].value)
    assert out.u[-2].value == 0
    assert out.b[-1] == 0


def test_reflect_extend_zero_chain():
    rc = RecurrenceCoefficients({0: 0.0, 1: 0.0}, {0: 0.0, 1: 0.0})
    out = reflect_extend(rc, -1)
    assert all(v == 0 for v in out.b.values()) and all(v == 0 for v in out.u.values())


def test_reflect_extend_rejects_nonzero_mirror():
    rc = RecurrenceCoefficients({0: 1.0, 1: 0.5}, {1: 2.0})
    with pytest.raises(ValueError):
        reflect_extend(rc, 0)


def test_molecule_from_reflection():
    rc = recurrence_from_moments(table(PotentialSpec("sech2", N=3), 0.4, 9), 4)
    assert rc.singular_at == 3
    out = reflect_extend(rc, -1)
    assert out.u[-4].value == 0


def test_beta_shift():
    rc = recurrence_from_moments(table(CENT1, 1.0, 5), 2)
    assert beta_shift(rc, 0).b == rc.b
    shifted = beta_shift(rc, 5)
    assert shifted.b[0].value == pytest.approx(3) and shifted.b[1].value == pytest.approx(1)
    for r in toda_equation_residuals(shifted):
        assert abs(r.value) < 1e-9


def test_mechanical_adapter_roundtrip():
    b, u = [1.0, 2.0], [None, 3.0, 4.0]
    assert from_mechanical(*to_mechanical(b, u)) == (b, u)


# Schrodinger picture

def test_free_schrodinger():
    z, t0, K = 1.5, 0.0, 8
    psi = jet_exp(Jet.variable(t0, K) * (-z / 2))
    u0 = Jet.constant(0.0, t0, K)
    assert schrodinger_to_stieltjes(psi, u0, z).max_abs() < 1e-12


def test_linear_schrodinger_random_data():
    rng = np.random.default_rng(3)
    for _ in range(5):
        u0 = jet_lift(PotentialSpec("linear"), float(rng.uniform(-1, 1)), 10)
        psi = propagate_schrodinger(u0, 1.0, float(rng.uniform(0.5, 2)), float(rng.uniform(-1, 1)))
        assert schrodinger_residual(psi, u0, 1.0).max_abs() < 1e-10
        assert schrodinger_to_stieltjes(psi, u0, 1.0).max_abs() < 1e-10


def test_one_soliton_wave_function():
    z, t0, K = 0.7, 0.25, 10
    u0 = jet_lift(PotentialSpec("sech2", N=1), t0, K)
    psi = jet_exp(Jet.variable(t0, K) * (-z / 2)) * (jet_tanh(t0, K) * 2 + z)
    assert schrodinger_residual(psi, u0, z).max_abs() < 1e-9
    assert schrodinger_to_stieltjes(psi, u0, z).max_abs() < 1e-9
