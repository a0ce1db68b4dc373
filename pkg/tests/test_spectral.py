from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import binom

from toda.core import RecurrenceCoefficients
from toda.spectral import (
    JacobiMatrix,
    SpectralData,
    SpectralError,
    _reversal,
    _sign_matrix,
    build_typeB,
    build_typeC,
    eigendecompose,
    hahn_matrix,
    hahn_recurrence,
    inverse_from_weights,
    is_per_skew,
    is_persymmetric,
    orthonormal_values,
    persymmetric_from_spectrum,
    perskew_from_tau,
    perskew_property_checks,
    pi_at_eigenvalues,
    pph_sign,
    tau_pattern,
    weights_from_rho,
)

F = Fraction


def rc_of(b, u):
    return RecurrenceCoefficients(dict(enumerate(b)), dict(enumerate(u)))


def random_rc(rng, N):
    return rc_of(rng.normal(size=N).tolist(), rng.uniform(0.3, 2.0, size=N).tolist())


# construction

def test_typeB_small():
    J = build_typeB(rc_of([F(2)], [F(5)]), 1)
    assert J.b == (-2, 0, 2) and J.u == (5, 5) and J.tag == "typeB"
    J = build_typeB(rc_of([F(1), F(3)], [F(7), F(4)]), 2)
    assert J.b == (-3, -1, 0, 1, 3) and J.u == (4, 7, 7, 4)


def test_typeC_small():
    J = build_typeC(rc_of([F(1), F(3)], [F(7), F(4)]), 2)
    assert J.b == (-3, -1, 1, 3) and J.u == (4, 7, 4) and J.tag == "typeC"


def test_build_needs_window():
    with pytest.raises(SpectralError):
        build_typeB(rc_of([F(1)], [F(1)]), 2)


def test_shape_validation():
    with pytest.raises(SpectralError):
        JacobiMatrix([1, 2], [])
    with pytest.raises(SpectralError):
        JacobiMatrix([], [])


def test_sign_and_reversal_are_involutions():
    for n in (1, 4, 7):
        S, R = _sign_matrix(n), _reversal(n)
        assert np.array_equal(S @ S, np.eye(n)) and np.array_equal(R @ R, np.eye(n))


@pytest.mark.parametrize("N", range(1, 6))
def test_mirrored_matrices_are_per_skew(N):
    rng = np.random.default_rng(N)
    rc = random_rc(rng, N)
    for J in (build_typeB(rc, N), build_typeC(rc, N)):
        assert is_per_skew(J)
        M = J.dense()
        S, R = _sign_matrix(J.size), _reversal(J.size)
        assert np.allclose(S @ R @ M @ R @ S, -M.T)


def test_per_skew_negative_examples():
    assert not is_per_skew(JacobiMatrix([F(1), F(1)], [F(1)]))
    assert not is_per_skew(JacobiMatrix([-1.0, 0.0, 1.0], [1.0, 2.0]))
    assert is_persymmetric(JacobiMatrix([1.0, 2.0, 1.0], [3.0, 3.0]))
    assert not is_persymmetric(JacobiMatrix([1.0, 2.0, 0.0], [3.0, 3.0]))


def test_char_poly_exact():
    J = JacobiMatrix([F(0), F(0)], [F(4)])
    assert J.char_poly().coeffs == (-4, 0, 1)


# spectra

def test_eigendecompose_path_graph():
    sd = eigendecompose(JacobiMatrix([0.0, 0.0, 0.0], [1.0, 1.0]))
    assert sd.x == pytest.approx([-math.sqrt(2), 0, math.sqrt(2)], abs=1e-14)
    assert sd.w == pytest.approx([0.25, 0.5, 0.25])


def test_eigendecompose_mass_and_size_one():
    sd = eigendecompose(JacobiMatrix([0.0, 0.0, 0.0], [1.0, 1.0]), c0=4.0)
    assert sum(sd.w) == pytest.approx(4.0)
    one = eigendecompose(JacobiMatrix([2.5], []), c0=3.0)
    assert one.x == (2.5,) and one.w == (3.0,)


def test_eigendecompose_rejects_nonpositive_u():
    with pytest.raises(SpectralError):
        eigendecompose(JacobiMatrix([0.0, 0.0], [-1.0]))


def test_two_by_two_product_law():
    beta, u = 0.7, 2.0
    J = JacobiMatrix([beta, -beta], [u])
    x = np.array(eigendecompose(J).x)
    assert x == pytest.approx([-math.sqrt(beta**2 + u), math.sqrt(beta**2 + u)])
    pi = orthonormal_values(J, x, 1)
    assert pi[0] * pi[1] == pytest.approx(-1.0)
    assert pph_sign(2) == -1 and pph_sign(3) == 1


@pytest.mark.parametrize("N", range(1, 7))
@pytest.mark.parametrize("kind", ["B", "C"])
def test_perskew_properties(N, kind):
    rng = np.random.default_rng(10 * N + (kind == "C"))
    rc = random_rc(rng, N)
    J = build_typeB(rc, N) if kind == "B" else build_typeC(rc, N)
    rep = perskew_property_checks(J, c0=1.0)
    assert rep.max_residual() < 1e-9
    assert (rep.middle_zero is not None) == (J.size % 2 == 1)


def test_ww_law_with_mass():
    rc = random_rc(np.random.default_rng(7), 3)
    assert perskew_property_checks(build_typeC(rc, 3), c0=2.5).ww < 1e-9


def test_property_checks_reject_generic():
    with pytest.raises(SpectralError):
        perskew_property_checks(JacobiMatrix([1.0, 2.0], [1.0]))


# inverse problems

def test_inverse_path_graph():
    J = inverse_from_weights(SpectralData((-math.sqrt(2), 0.0, math.sqrt(2)), (0.25, 0.5, 0.25)))
    assert J.b == pytest.approx([0, 0, 0], abs=1e-14)
    assert J.u == pytest.approx([1, 1])


def test_inverse_single_node():
    J = inverse_from_weights(SpectralData((1.5,), (2.0,)))
    assert J.b == (1.5,) and J.u == ()


def test_inverse_rejects_bad_data():
    with pytest.raises(SpectralError):
        inverse_from_weights(SpectralData((0.0, 1.0), (1.0, 0.0)))
    with pytest.raises(SpectralError):
        inverse_from_weights(SpectralData((1.0, 1.0), (0.5, 0.5)))
    with pytest.raises(SpectralError):
        inverse_from_weights(SpectralData((), ()))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_inverse_roundtrip(N, seed):
    rng = np.random.default_rng(seed)
    b = rng.normal(size=N)
    u = rng.uniform(0.5, 2.0, size=N - 1)
    J = JacobiMatrix(b, u)
    back = inverse_from_weights(eigendecompose(J))
    assert np.allclose(back.b, b, atol=1e-8)
    assert np.allclose(back.u, u, rtol=1e-8)


def test_roundtrip_size_twelve():
    rng = np.random.default_rng(12)
    x = np.sort(rng.uniform(-5, 5, size=12))
    w = rng.uniform(0.1, 1.0, size=12)
    sd = SpectralData(tuple(x), tuple(w / w.sum()))
    back = eigendecompose(inverse_from_weights(sd))
    assert np.allclose(back.x, x, atol=1e-10) and np.allclose(back.w, sd.w, atol=1e-10)


def test_persymmetric_from_spectrum():
    x = [-3.0, -1.0, 1.0, 3.0]
    J = persymmetric_from_spectrum(x)
    assert is_persymmetric(J)
    assert np.allclose(eigendecompose(J).x, x)
    with pytest.raises(SpectralError):
        persymmetric_from_spectrum([-2.0, 1.0])


# tau parametrization

def test_tau_pattern_examples():
    assert tau_pattern([F(2)], 2) == [-2, F(1, 2)]
    assert tau_pattern([F(2)], 3) == [2, -1, F(1, 2)]
    assert tau_pattern([F(2), F(3)], 4) == [-2, 3, F(-1, 3), F(1, 2)]
    with pytest.raises(SpectralError):
        tau_pattern([F(0)], 2)
    with pytest.raises(SpectralError):
        tau_pattern([F(1)], 4)


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_tau_one_gives_persymmetric(parity):
    x_half = [F(1), F(2), F(4)]
    J = perskew_from_tau(x_half, [F(1)] * 3, parity)
    assert is_per_skew(J)
    full = [-4, -2, -1] + ([0] if parity == "odd" else []) + [1, 2, 4]
    ref = persymmetric_from_spectrum([float(v) for v in full])
    assert np.allclose([float(v) for v in J.b], ref.b, atol=1e-10)
    assert np.allclose([float(v) for v in J.u], ref.u, rtol=1e-10)


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_tau_reproduces_prescribed_data(parity):
    x_half, tau = [F(1), F(3)], [F(2), F(1, 3)]
    J = perskew_from_tau(x_half, tau, parity)
    assert is_per_skew(J) and all(isinstance(v, Fraction) for v in J.b + J.u)
    x = np.array(eigendecompose(J).x)
    assert np.allclose(x[x > 1e-9], [1, 3])
    pi = orthonormal_values(J, x, J.size - 1)
    assert np.allclose(pi, [float(v) for v in tau_pattern(tau, J.size)], rtol=1e-9)
    fl = perskew_from_tau([1.0, 3.0], [2.0, 1 / 3], parity)
    assert np.allclose(fl.b, [float(v) for v in J.b], atol=1e-10)
    assert np.allclose(fl.u, [float(v) for v in J.u], rtol=1e-10)


def test_tau_tau_from_matrix_roundtrip():
    rc = random_rc(np.random.default_rng(5), 3)
    J = build_typeC(rc, 3)
    x = np.array(eigendecompose(J).x)
    pi = orthonormal_values(J, x, J.size - 1)
    tau = [abs(pi[s]) for s in range(J.size // 2)]
    back = perskew_from_tau(list(x[J.size // 2:]), tau, "even")
    assert np.allclose(back.b, J.b, atol=1e-9) and np.allclose(back.u, J.u, rtol=1e-9)


def test_tau_rejects_bad_input():
    with pytest.raises(SpectralError):
        perskew_from_tau([F(2), F(1)], [F(1), F(1)], "even")
    with pytest.raises(SpectralError):
        perskew_from_tau([F(1)], [F(1)], "sideways")
    with pytest.raises(SpectralError):
        perskew_from_tau([F(1)], [F(0)], "even")


# rho weights

def test_rho_with_omega_is_per_skew():
    x = [-3.0, -1.0, 0.0, 1.0, 3.0]
    J = inverse_from_weights(weights_from_rho(x, [2.0, 0.7]))
    assert is_per_skew(J, tol=1e-10)


def test_literal_rho_is_not_per_skew_for_four_nodes():
    x = [-3.0, -1.0, 1.0, 3.0]
    J = inverse_from_weights(weights_from_rho(x, [2.0, 0.7], with_omega=False))
    assert not is_per_skew(J, tol=1e-6)


def test_rho_validation():
    with pytest.raises(SpectralError):
        weights_from_rho([-1.0, 1.0], [])


# Hahn

def test_hahn_examples():
    assert hahn_recurrence(0, 0, 1, 0) == (F(1, 2), 0)
    assert hahn_recurrence(0, 0, 1, 1) == (F(1, 2), F(1, 4))
    with pytest.raises(ValueError):
        hahn_recurrence(0, 0, 2, 3)


@pytest.mark.parametrize("a,b,M", [(F(1, 2), F(1, 2), 4), (1, 2, 5), (0, 0, 3)])
def test_hahn_matrix_spectrum_and_weights(a, b, M):
    J = hahn_matrix(a, b, M)
    sd = eigendecompose(J)
    assert np.allclose(sd.x, np.arange(M + 1), atol=1e-10)
    k = np.arange(M + 1)
    w = binom(float(a) + k, k) * binom(float(b) + M - k, M - k)
    assert np.allclose(sd.w, w / w.sum(), rtol=1e-9)


def test_pi_at_eigenvalues_matches_recurrence_on_small_matrix():
    J = JacobiMatrix([0.7, -0.7], [2.0])
    x, pi = pi_at_eigenvalues(J)
    assert np.allclose(pi, orthonormal_values(J, x, 1))


def test_pi_at_eigenvalues_is_stable_where_recurrence_drifts():
    # size-13 mirrored matrix whose pi_{N-1} values span roughly 1/85..85
    from toda.verify import random_mirrored

    rng = np.random.default_rng(2)
    for i in range(32):
        size = 2 + i % 12 if i < 12 else int(rng.integers(2, 14))
        J = random_mirrored(rng, size)
    assert J.size == 13
    _, pi = pi_at_eigenvalues(J)
    assert np.max(np.abs(pi * pi[::-1] - pph_sign(13))) < 1e-12
