import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dv_spectrum import spinor as sp
from dv_spectrum.specfun import omega, omega_minus, omega_plus

ALL_ALPHAS = [(p, a) for p in sp.PARTICLES for a in sp.AXES]


def rand(seed):
    return sp.random_spinor(np.random.default_rng(seed))


def dirac_pauli(label, pauli):
    return sp.product(sp.dirac_vector(label), pauli)


def combo(a, b, sign, pauli):
    return sp.product(sp.dirac_vector(a) + sign * sp.dirac_vector(b), pauli)


# ---------------------------------------------------------------------------
# vectors and basis
# ---------------------------------------------------------------------------

def test_basis_ordering():
    # index = 8 d_e + 4 d_p + 2 s_e + s_p (zero-based, up before down)
    v = sp.basis_vector(2, 1, -0.5, 0.5)
    assert np.argmax(np.abs(v.amplitudes)) == 8 + 2


def test_vector_validation_and_immutability():
    with pytest.raises(ValueError):
        sp.SpinorVector(np.zeros(15))
    v = rand(0)
    with pytest.raises(ValueError):
        v.amplitudes[0] = 1.0
    with pytest.raises(ValueError):
        sp.SpinorVector(np.zeros(16)).normalized()


def test_vector_arithmetic():
    a, b = rand(1), rand(2)
    np.testing.assert_allclose((a + b - b).amplitudes, a.amplitudes)
    np.testing.assert_allclose((2 * a / 2).amplitudes, a.amplitudes)
    np.testing.assert_allclose((-a).amplitudes, -a.amplitudes)
    assert a.normalized().norm() == pytest.approx(1.0, abs=1e-15)
    assert a.vdot(b) == pytest.approx(np.vdot(a.amplitudes, b.amplitudes))


def test_dump_round_trip():
    v = rand(3)
    text = v.dump()
    lines = text.splitlines()
    assert len(lines) == 16
    assert lines[5].split()[0] == "5"
    back = sp.SpinorVector.from_dump(text)
    np.testing.assert_array_equal(back.amplitudes, v.amplitudes)


def test_dump_golden_sector_vector():
    text = sp.build_sector_spinor(sp.A0).dump()
    expected = {1: 0.5, 2: -0.5, 13: -0.5, 14: 0.5}
    for line in text.splitlines():
        n, re, im = line.split()
        assert float(re) == pytest.approx(expected.get(int(n), 0.0), abs=1e-15)
        assert float(im) == 0.0


def test_dump_requires_all_indices():
    with pytest.raises(ValueError):
        sp.SpinorVector.from_dump("0 1.0 0.0\n")


def test_coupled_transform_unitary_round_trip():
    U = sp.coupled_basis_matrix()
    np.testing.assert_allclose(U.conj().T @ U, np.eye(16), atol=1e-14)
    for seed in range(10):
        v = rand(seed)
        assert np.max(np.abs(sp.from_coupled(sp.to_coupled(v)).amplitudes - v.amplitudes)) <= 1e-14


def test_bad_dirac_label():
    with pytest.raises(ValueError):
        sp.dirac_vector("13")


# ---------------------------------------------------------------------------
# alpha, gamma4, mass
# ---------------------------------------------------------------------------

def test_alpha_ez_on_product_basis():
    v = sp.basis_vector(1, 1, 0.5, 0.5)
    assert sp.apply_alpha("e", "z", v).allclose(sp.basis_vector(2, 1, 0.5, 0.5))


@pytest.mark.parametrize("particle,axis", ALL_ALPHAS)
def test_alpha_is_involution(particle, axis):
    for seed in range(16):
        v = rand(seed)
        w = sp.apply_alpha(particle, axis, sp.apply_alpha(particle, axis, v))
        assert w.allclose(v, atol=1e-13)


def test_alpha_ez_on_light_combination():
    for phi in (0.0, 0.4, 2.0):
        v = combo("11", "22", +1, omega_plus(phi))
        expected = -combo("12", "21", +1, omega_minus(phi))
        assert sp.apply_alpha("e", "z", v).allclose(expected)


def test_alpha_matrix_rejects_unknown_particle():
    with pytest.raises(ValueError):
        sp.alpha_matrix("q", "x")


def test_operators_hermitian():
    mats = [sp.alpha_matrix(p, a) for p, a in ALL_ALPHAS] + [sp.gamma4_matrix("e"), sp.gamma4_matrix("p")]
    for m in mats:
        np.testing.assert_array_equal(m, m.conj().T)


def test_alpha_anticommutation_within_particle():
    for p in sp.PARTICLES:
        for a, b in itertools.product(sp.AXES, repeat=2):
            A, B = sp.alpha_matrix(p, a), sp.alpha_matrix(p, b)
            np.testing.assert_array_equal(A @ B + B @ A, 2 * np.eye(16) * (a == b))
        for a in sp.AXES:
            A, G = sp.alpha_matrix(p, a), sp.gamma4_matrix(p)
            np.testing.assert_array_equal(A @ G + G @ A, 0)


def test_electron_positron_operators_commute():
    e_ops = [sp.alpha_matrix("e", a) for a in sp.AXES] + [sp.gamma4_matrix("e")]
    p_ops = [sp.alpha_matrix("p", a) for a in sp.AXES] + [sp.gamma4_matrix("p")]
    for A in e_ops:
        for B in p_ops:
            np.testing.assert_array_equal(A @ B, B @ A)


def test_gamma4_examples():
    up = omega(1, 1)
    assert sp.apply_gamma4("e", dirac_pauli("22", up)).allclose(-dirac_pauli("22", up))
    assert sp.apply_gamma4("e", dirac_pauli("11", up)).allclose(dirac_pauli("11", up))
    v = combo("12", "21", -1, up)
    assert sp.apply_gamma4_sq(v).allclose(-v)


@pytest.mark.parametrize("sign", [+1, -1])
def test_mass_operator_couples_g_and_u(sign):
    m = 0.7
    s0 = omega(0, 0)
    v = combo("11", "22", sign, s0)
    assert sp.apply_mass(v, m).allclose(2 * m * combo("11", "22", -sign, s0))


def test_mass_annihilates_mixed_dirac():
    v = combo("12", "21", +1, omega(1, 0))
    assert sp.apply_mass(v).norm() == 0.0


def test_g_u_projectors():
    G, U = sp.PROJECT_G, sp.PROJECT_U
    np.testing.assert_array_equal(G + U, np.eye(16))
    np.testing.assert_array_equal(G @ U, 0)
    np.testing.assert_array_equal(G @ G, G)
    v = rand(5)
    assert (sp.project_g(v) + sp.project_u(v)).allclose(v)
    # g: e11 + e22 even part; u: odd part
    assert sp.project_u(combo("11", "22", +1, omega(0, 0))).norm() == 0.0


# ---------------------------------------------------------------------------
# two-body spin operators
# ---------------------------------------------------------------------------

def test_sigma_dot_sigma_eigenvalues():
    for lab in sp.DIRAC_LABELS:
        assert sp.eigenvalue(sp.SIGMA_DOT_SIGMA, dirac_pauli(lab, omega(0, 0))) == pytest.approx(-3, abs=1e-15)
        for Sz in (-1, 0, 1):
            assert sp.eigenvalue(sp.SIGMA_DOT_SIGMA, dirac_pauli(lab, omega(1, Sz))) == pytest.approx(1, abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_sigma_dot_sigma_quadratic_identity(seed):
    v = rand(seed)
    ss = sp.sigma_dot_sigma
    lhs = ss(ss(v))
    rhs = 3 * v - 2 * ss(v)
    assert lhs.allclose(rhs, atol=1e-12)


@pytest.mark.parametrize(
    "a,b,sign,S,expected",
    [
        ("11", "22", -1, 0, 3),
        ("11", "22", +1, 0, -3),
        ("12", "21", +1, 0, -3),
        ("12", "21", -1, 0, 3),
        ("11", "22", +1, 1, 1),
        ("11", "22", -1, 1, -1),
        ("12", "21", +1, 1, 1),
        ("12", "21", -1, 1, -1),
    ],
)
def test_alpha_dot_alpha_pattern(a, b, sign, S, expected):
    states = [omega(0, 0)] if S == 0 else [omega(1, Sz) for Sz in (-1, 0, 1)]
    for pauli in states:
        v = combo(a, b, sign, pauli)
        assert sp.eigenvalue(sp.ALPHA_DOT_ALPHA, v) == pytest.approx(expected, abs=1e-13)


def test_alpha0_sq_sector_values():
    for s in sp.SECTORS:
        v = sp.build_sector_spinor(s, 0.3)
        lam = sp.eigenvalue(sp.alpha0_sq, v)
        assert lam == pytest.approx(-2.0 if s.heavy else 0.0, abs=1e-13)


@settings(max_examples=16, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_alpha0_sq_commutes_with_gamma4_sq(seed):
    v = rand(seed)
    a = sp.alpha0_sq(sp.apply_gamma4_sq(v))
    b = sp.apply_gamma4_sq(sp.alpha0_sq(v))
    assert a.allclose(b, atol=1e-12)


def test_gaunt_split():
    for seed in range(5):
        v = rand(seed)
        lon, tra = sp.gaunt_split(v)
        assert (lon + tra).allclose(sp.alpha_dot_alpha(v), atol=1e-13)
    for s in sp.SECTORS:
        v = sp.build_sector_spinor(s, 1.1)
        lon, _ = sp.gaunt_split(v)
        assert lon.allclose(v)
        # Coulomb (-1) plus longitudinal Gaunt (+1) cancels on every sector
        assert (lon - v).norm() < 1e-14


def test_exchange():
    for lab in ("11", "22"):
        assert sp.exchange(dirac_pauli(lab, omega(0, 0))).allclose(-dirac_pauli(lab, omega(0, 0)))
        assert sp.exchange(dirac_pauli(lab, omega(1, 1))).allclose(dirac_pauli(lab, omega(1, 1)))
    # exchange also swaps the Dirac indices
    assert sp.exchange(dirac_pauli("12", omega(1, 1))).allclose(dirac_pauli("21", omega(1, 1)))
    np.testing.assert_array_equal(sp.EXCHANGE @ sp.EXCHANGE, np.eye(16))


# ---------------------------------------------------------------------------
# sectors
# ---------------------------------------------------------------------------

def test_sector_spinor_forms():
    r = 1 / math.sqrt(2)
    assert sp.build_sector_spinor(sp.A0).allclose(combo("11", "22", -1, omega(0, 0)) * r)
    assert sp.build_sector_spinor(sp.S0).allclose(combo("12", "21", -1, omega(0, 0)) * r)
    omega_p = (omega(1, -1) + omega(1, 1)) * r
    assert sp.build_sector_spinor(sp.S1_1, 0.0).allclose(combo("11", "22", +1, omega_p) * r)
    assert sp.build_sector_spinor(sp.S1_2, 0.0).allclose(combo("12", "21", +1, omega_p) * r)


@pytest.mark.parametrize("phi", [0.0, 0.7, 3.0])
def test_sectors_orthonormal(phi):
    vs = [sp.build_sector_spinor(s, phi) for s in sp.SECTORS]
    G = np.array([[a.vdot(b) for b in vs] for a in vs])
    np.testing.assert_allclose(G, np.eye(4), atol=1e-15)


EIGEN_TABLE = {
    # alpha.alpha, alpha0^2, sigma.sigma, alpha_ez alpha_pz, gamma4^2
    "A0": (3, -2, -3, 1, 1),
    "S0": (3, -2, -3, 1, -1),
    "S1_1": (1, 0, 1, 1, 1),
    "S1_2": (1, 0, 1, 1, -1),
}


@pytest.mark.parametrize("name", list(EIGEN_TABLE))
def test_sector_simultaneous_eigenvalues(name):
    lon = sp.alpha_matrix("e", "z") @ sp.alpha_matrix("p", "z")
    ops = (sp.ALPHA_DOT_ALPHA, sp.ALPHA0_SQ, sp.SIGMA_DOT_SIGMA, lon, sp.GAMMA4_SQ)
    for phi in (0.0, 0.9, 2.5):
        v = sp.build_sector_spinor(sp.sector_by_name(name), phi)
        for op, expected in zip(ops, EIGEN_TABLE[name]):
            lam = sp.eigenvalue(op, v, tol=1e-13)
            assert lam is not None
            assert abs(lam - expected) <= 1e-13


def test_eigenvalue_returns_none_for_non_eigenvector():
    assert sp.eigenvalue(sp.ALPHA_DOT_ALPHA, rand(0)) is None
    with pytest.raises(ValueError):
        sp.eigenvalue(sp.ALPHA_DOT_ALPHA, sp.SpinorVector(np.zeros(16)))


def test_sector_lookup():
    assert sp.sector_by_name("S1_2") is sp.S1_2
    assert sp.S0.heavy and not sp.S1_1.heavy
    with pytest.raises(ValueError):
        sp.sector_by_name("B0")


# ---------------------------------------------------------------------------
# symmetry table
# ---------------------------------------------------------------------------

def test_table_examples():
    assert sp.table1_symmetries(sp.A0, 10) == (-1, -1)
    assert sp.table1_symmetries(sp.S0, 10) == (1, 1)
    assert sp.table1_symmetries(sp.S1_1, 1) == (-1, 1)


def test_table_label_swap_for_odd_J():
    for s in sp.SECTORS:
        even = sp.table1_symmetries(s, 2)
        odd = sp.table1_symmetries(s, 3)
        assert odd[0] == -even[0]


def test_table_matches_operator_derivation():
    for s in sp.SECTORS:
        for J in range(0 if s.heavy else 1, 13):
            assert sp.table1_symmetries(s, J) == sp.derived_symmetries(s, J), (s.name, J)


def test_table_rejects_bad_J():
    with pytest.raises(ValueError):
        sp.table1_symmetries(sp.S1_1, 0)
    with pytest.raises(ValueError):
        sp.table1_symmetries(sp.A0, -1)
