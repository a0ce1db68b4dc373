from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toda.jets import (
    Jet,
    JetError,
    PotentialSpec,
    jet_derivative,
    jet_lift,
    jet_product,
    jet_reciprocal,
    parse_potential,
)

floats = st.floats(-3, 3, allow_nan=False)


def J(*cs, t0=0.0):
    return Jet(t0, tuple(cs))


def close(a: Jet, b, tol=1e-12):
    b = list(b.coeffs) if isinstance(b, Jet) else list(b)
    return len(a.coeffs) == len(b) and all(abs(x - y) <= tol * max(1.0, abs(y)) for x, y in zip(a.coeffs, b))


def test_sech2_lift():
    assert close(jet_lift(PotentialSpec("sech2", N=1), 0.0, 4), [2, 0, -2, 0, 4 / 3])


def test_linear_and_centrifugal_lift():
    assert jet_lift(PotentialSpec("linear"), 0, 3).coeffs == (0, 1, 0, 0)
    assert jet_lift(PotentialSpec("centrifugal", alpha=1), 1, 2).coeffs == (1, -2, 3)


def test_exact_lift_is_fraction():
    j = jet_lift(PotentialSpec("centrifugal", alpha=Fraction(2)), Fraction(1, 2), 3)
    assert all(isinstance(c, Fraction) for c in j.coeffs)
    assert j.coeffs[0] == 8


@pytest.mark.parametrize("spec,t0", [
    (PotentialSpec("centrifugal", alpha=1), 0),
    (PotentialSpec("sec2", alpha=1), math.pi / 2),
])
def test_lift_rejects_poles(spec, t0):
    with pytest.raises(JetError):
        jet_lift(spec, t0, 3)


def test_product_examples():
    assert jet_product(J(1, 1), J(1, -1)).coeffs == (1, 0)
    assert jet_product(J(0, 1, 0), J(0, 1, 0)).coeffs == (0, 0, 1)
    assert jet_product(J(2, 0, -2), J(1, 0, 0)).coeffs == (2, 0, -2)


def test_product_rejects_mismatched_base():
    with pytest.raises(JetError):
        J(1, 0) * J(1, 0, t0=1.0)


def test_reciprocal_examples():
    assert jet_reciprocal(J(1, 1)).coeffs == (1, -1)
    assert jet_reciprocal(J(2, 0)).coeffs == (0.5, 0)
    with pytest.raises(ZeroDivisionError):
        jet_reciprocal(J(0, 1))


def test_derivative_examples():
    assert jet_derivative(J(0, 1, 0, 0)).coeffs == (1, 0, 0)
    assert close(jet_derivative(J(2, 0, -2, 0, 4 / 3)), [0, -4, 0, 16 / 3])
    assert jet_derivative(J(3.0, 0, 0)) == 0
    with pytest.raises(JetError):
        jet_derivative(J(1.0))


def test_deriv_value():
    j = jet_lift(PotentialSpec("sech2", N=1), 0.0, 4)
    assert j.deriv_value(2) == pytest.approx(-4.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(floats, min_size=4, max_size=4).filter(lambda c: abs(c[0]) > 0.1))
def test_reciprocal_involution(cs):
    a = J(*cs)
    assert close(jet_reciprocal(jet_reciprocal(a)), a, 1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(floats, min_size=5, max_size=5), st.lists(floats, min_size=5, max_size=5))
def test_leibniz(x, y):
    a, b = J(*x), J(*y)
    lhs = jet_derivative(a * b)
    rhs = jet_derivative(a) * b.truncate(3) + a.truncate(3) * jet_derivative(b)
    assert close(lhs, rhs, 1e-10)


SPECS = [
    (PotentialSpec("centrifugal", alpha=2), 1.3),
    (PotentialSpec("sec2", alpha=1), 0.3),
    (PotentialSpec("sech2", N=3), 0.2),
    (PotentialSpec("linear"), 0.7),
]


@pytest.mark.parametrize("spec,t0", SPECS)
def test_coefficient_stability(spec, t0):
    K = 9
    assert close(jet_lift(spec, t0, K).truncate(K - 1), jet_lift(spec, t0, K - 1), 1e-14)


@pytest.mark.parametrize("spec,t0", SPECS)
def test_first_coefficient_matches_finite_difference(spec, t0):
    h = 1e-5
    fd = (spec(t0 + h) - spec(t0 - h)) / (2 * h)
    j1 = jet_lift(spec, t0, 2).coeffs[1]
    assert j1 == pytest.approx(fd, rel=1e-6, abs=1e-9)


def test_parse_grammar():
    assert parse_potential("centrifugal:alpha=3/2") == PotentialSpec("centrifugal", alpha=Fraction(3, 2))
    assert parse_potential("sec2:alpha=0.5").alpha == 0.5
    assert parse_potential("sech2:N=4").N == 4
    assert parse_potential("linear").kind == "linear"
    assert parse_potential("series:1,2,3/4").series == (1, 2, Fraction(3, 4))
    assert str(parse_potential("sech2:N=2")) == "sech2:N=2"


@pytest.mark.parametrize("bad", ["", "sech2:N=x", "cubic", "centrifugal:beta=1", "sech2:N=0"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_potential(bad)
