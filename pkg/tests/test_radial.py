import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from dv_spectrum import radial as rad
from dv_spectrum.specfun import QuadratureRule, spherical_bessel_j


def coulomb_diag_j0(n, rho0):
    # -(1/rho0) Cin(2 n pi), Cin(x) = gamma + ln x - Ci(x); scipy sici oracle
    x = 2 * n * math.pi
    return -(np.euler_gamma + math.log(x) - special.sici(x)[1]) / rho0


# frozen from the Cin closed form above at rho0 = 1
J0_COULOMB_DIAG = [-2.43765339, -3.11435655, -3.51647438, -3.80295565,
                   -4.02553782, -4.20755289, -4.36151824, -4.49492913]


def smooth_test_function(J, rho0):
    # vanishes at rho0 and behaves as rho^J at the origin, like the basis
    return lambda r: (r / rho0) ** J * (1 - r / rho0) ** 2 * np.exp(-r / rho0)


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

def test_sine_basis_example():
    b = rad.build_basis(0, 4, 1.0)
    np.testing.assert_allclose(b.k, math.pi * np.arange(1, 5), rtol=1e-14)
    np.testing.assert_allclose(b.grid, np.arange(1, 5) / 5, rtol=1e-13)


def test_j1_basis_example():
    b = rad.build_basis(1, 2, 2.0)
    np.testing.assert_allclose(b.k, [4.4934094579 / 2, 7.7252518369 / 2], rtol=1e-10)


@pytest.mark.parametrize("J,N,rho0", [(0, 8, 1.0), (1, 8, 2.0), (10, 40, 1e-4), (25, 60, 3.0)])
def test_basis_invariants(J, N, rho0):
    b = rad.build_basis(J, N, rho0)
    assert np.max(np.abs(spherical_bessel_j(J, b.k * rho0))) < 1e-10
    np.testing.assert_allclose(b.norms**2, 2.0 / (rho0**3 * spherical_bessel_j(J + 1, b.k * rho0) ** 2), rtol=1e-14)
    assert b.grid.size == N
    assert np.all(np.diff(b.grid) > 0)
    assert 0 < b.grid[0] and b.grid[-1] < rho0
    assert np.max(np.abs(spherical_bessel_j(J, b.k_next * b.grid))) < 1e-10


def test_basis_arrays_are_read_only():
    b = rad.build_basis(2, 5, 1.0)
    with pytest.raises(ValueError):
        b.k[0] = 1.0


@pytest.mark.parametrize("N,rho0", [(0, 1.0), (1001, 1.0), (2.5, 1.0), (4, 0.0), (4, -1.0)])
def test_basis_rejects_bad_input(N, rho0):
    with pytest.raises(ValueError):
        rad.build_basis(0, N, rho0)


def test_fig_configuration_norm_diagnostic():
    b = rad.build_basis(10, 40, 1e-4)
    dev = b.asymptotic_norm_deviation()
    # the large-k form improves monotonically along the basis
    assert abs(dev[-1]) < abs(dev[0])
    assert abs(dev[-1]) < 0.01


@pytest.mark.parametrize("J,N", [(0, 8), (1, 8), (10, 40)])
def test_orthonormality(J, N):
    b = rad.build_basis(J, N, 1e-4)
    g = rad.potential_matrix(b, rad.custom(lambda r: np.ones_like(r)))
    assert np.max(np.abs(g - np.eye(N))) < 1e-8


@pytest.mark.parametrize("J,rho0", [(0, 1.0), (1, 1.0), (10, 1e-4)])
def test_completeness_error_halves_when_N_doubles(J, rho0):
    g = smooth_test_function(J, rho0)
    pts = np.array([0.3, 0.5, 0.7]) * rho0
    nodes, weights = QuadratureRule(400, 16, (0.0, rho0)).nodes_weights()
    errors = []
    for N in (8, 16, 32, 64):
        b = rad.build_basis(J, N, rho0)
        kernel = b.functions(pts).T @ b.functions(nodes)
        approx = kernel @ (nodes**2 * g(nodes) * weights)
        errors.append(np.max(np.abs(approx - g(pts))))
    ratios = np.array(errors[:-1]) / np.array(errors[1:])
    assert np.all(ratios >= 2.0), ratios


def test_basis_is_thread_safe():
    b = rad.build_basis(10, 40, 1e-4)
    rho = np.linspace(0, 1e-4, 500)
    expected = b.functions(rho)
    results = [None] * 4

    def work(slot):
        results[slot] = b.functions(rho)

    threads = [threading.Thread(target=work, args=(s,)) for s in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    for r in results:
        np.testing.assert_array_equal(r, expected)


def test_functions_workers_match_serial():
    b = rad.build_basis(3, 30, 1.0)
    rho = np.linspace(0, 1, 101)
    np.testing.assert_array_equal(b.functions(rho, workers=3), b.functions(rho))


# ---------------------------------------------------------------------------
# potentials and matrices
# ---------------------------------------------------------------------------

def test_potential_forms():
    r = np.array([0.5, 1.0, 4.0])
    np.testing.assert_allclose(rad.coulomb()(r), -1 / r)
    np.testing.assert_allclose(rad.dv_heavy()(r), 2 / r)
    np.testing.assert_array_equal(rad.dv_light()(r), 0.0)
    np.testing.assert_allclose(rad.coulomb(e2=3.0)(r), -3 / r)
    for pot in (rad.coulomb(), rad.dv_heavy(), rad.dv_light()):
        np.testing.assert_allclose(pot(r), pot.sector_factor * (-pot.e2 / r))


def test_potential_by_name():
    assert rad.potential_by_name("dv_heavy").sector_factor == -2.0
    with pytest.raises(ValueError):
        rad.potential_by_name("yukawa")
    with pytest.raises(ValueError):
        rad.PotentialSpec("custom")
    with pytest.raises(ValueError):
        rad.PotentialSpec("harmonic")


def test_j0_coulomb_diagonal_closed_form():
    b = rad.build_basis(0, 8, 1.0)
    m = rad.potential_matrix(b, rad.coulomb())
    diag = np.diag(m)
    np.testing.assert_allclose(diag, [coulomb_diag_j0(n, 1.0) for n in range(1, 9)], rtol=1e-11)
    np.testing.assert_allclose(diag, J0_COULOMB_DIAG, atol=5e-9)


def test_j0_coulomb_diagonal_scales_with_box():
    rho0 = 1e-4
    m = rad.potential_matrix(rad.build_basis(0, 3, rho0), rad.coulomb())
    np.testing.assert_allclose(np.diag(m), [coulomb_diag_j0(n, rho0) for n in (1, 2, 3)], rtol=1e-11)


def test_potential_matrix_exactly_symmetric():
    m = rad.potential_matrix(rad.build_basis(10, 40, 1e-4), rad.coulomb())
    np.testing.assert_array_equal(m, m.T)


def test_dv_light_matrix_is_zero():
    m = rad.potential_matrix(rad.build_basis(4, 10, 1.0), rad.dv_light())
    np.testing.assert_array_equal(m, 0.0)


def test_heavy_is_minus_two_coulomb():
    b = rad.build_basis(10, 40, 1e-4)
    c = rad.potential_matrix(b, rad.coulomb())
    h = rad.potential_matrix(b, rad.dv_heavy())
    assert np.max(np.abs(h + 2 * c)) <= 1e-12 * np.max(np.abs(c))


def test_potential_matrix_workers_match_serial():
    b = rad.build_basis(2, 12, 1.0)
    np.testing.assert_allclose(rad.potential_matrix(b, rad.coulomb(), workers=3),
                               rad.potential_matrix(b, rad.coulomb()), rtol=1e-14, atol=1e-14)


def test_potential_matrix_reports_nonconvergence():
    from dv_spectrum.specfun import QuadratureError

    b = rad.build_basis(0, 2, 1.0)
    wild = rad.custom(lambda r: np.sin(1e7 * r))
    with pytest.raises(QuadratureError):
        rad.potential_matrix(b, wild, quad=QuadratureRule(1, 2, (0.0, 1.0)))


# ---------------------------------------------------------------------------
# diagonalize
# ---------------------------------------------------------------------------

def test_diagonalize_identity():
    e = rad.diagonalize(np.eye(2))
    np.testing.assert_array_equal(e.values, [1.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 12), seed=st.integers(0, 2**31 - 1))
def test_diagonalize_properties(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    a = a + a.T
    e = rad.diagonalize(a)
    v = e.vectors
    assert np.all(np.diff(e.values) >= 0)
    assert np.max(np.abs(v.T @ v - np.eye(n))) <= 1e-10
    assert np.max(np.abs(a - v @ np.diag(e.values) @ v.T)) <= 1e-10 * max(1.0, np.max(np.abs(a)))
    assert abs(e.values.sum() - np.trace(a)) <= 1e-10 * max(1.0, np.sum(np.abs(e.values)))
    pivot = np.argmax(np.abs(v), axis=0)
    assert np.all(v[pivot, np.arange(n)] > 0)


def test_diagonalize_rejects_asymmetric_and_nonsquare():
    with pytest.raises(ValueError):
        rad.diagonalize([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        rad.diagonalize(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# analytic DV states
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("N,rho0", [(4, 1.0), (8, 1e-4), (20, 2.0)])
def test_j0_analytic_grid_and_energies(N, rho0):
    b = rad.build_basis(0, N, rho0)
    states = rad.analytic_dv_states(b, rad.coulomb())
    i = np.arange(1, N + 1)
    np.testing.assert_allclose([s.rho_i for s in states], i * rho0 / (N + 1), rtol=1e-13)
    np.testing.assert_allclose([s.energy for s in states], -(N + 1) / (i * rho0), rtol=1e-13)
    assert [s.index for s in states] == list(i)


def test_sector_energies():
    b = rad.build_basis(10, 40, 1e-4)
    heavy = rad.analytic_dv_states(b, rad.dv_heavy())
    light = rad.analytic_dv_states(b, rad.dv_light())
    np.testing.assert_allclose([s.energy for s in heavy], 2 / b.grid, rtol=1e-15)
    assert all(s.energy == 0.0 for s in light)


def test_analytic_coefficients_unit_norm():
    b = rad.build_basis(10, 40, 1e-4)
    for s in rad.analytic_dv_states(b, rad.coulomb()):
        assert np.sum(s.coeffs**2) == pytest.approx(1.0, abs=1e-14)


def test_j0_analytic_vectors_form_orthogonal_sine_transform():
    N = 8
    b = rad.build_basis(0, N, 1.0)
    c = np.array([s.coeffs for s in rad.analytic_dv_states(b, rad.coulomb())])
    np.testing.assert_allclose(c @ c.T, np.eye(N), atol=1e-13)
    n, i = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1))
    dst = np.sqrt(2 / (N + 1)) * np.sin(n * i * math.pi / (N + 1)) * (-1) ** (n + 1)
    np.testing.assert_allclose(np.abs(c), np.abs(dst), atol=1e-13)


def test_norm_D_and_width_diagnostic():
    b = rad.build_basis(0, 40, 1.0)
    states = rad.analytic_dv_states(b, rad.coulomb())
    # sine basis: D^2 equals the (uniform) grid spacing exactly
    for s in states:
        assert s.width == pytest.approx(1 / 41, rel=1e-12)
        assert s.d2_over_width == pytest.approx(1.0, rel=1e-10)


# ---------------------------------------------------------------------------
# evaluate_radial
# ---------------------------------------------------------------------------

def test_radial_function_normalized():
    b = rad.build_basis(10, 40, 1e-4)
    nodes, weights = QuadratureRule(200, 16, (0.0, 1e-4)).nodes_weights()
    for s in rad.analytic_dv_states(b, rad.coulomb())[::7]:
        r = rad.evaluate_radial(s, nodes)
        assert np.sum(weights * r**2) == pytest.approx(1.0, abs=1e-6)


def test_radial_function_peaks_near_grid_point():
    b = rad.build_basis(10, 40, 1e-4)
    rho = np.linspace(0, 1e-4, 20001)
    spacing = np.max(np.diff(b.grid))
    for s in rad.analytic_dv_states(b, rad.coulomb())[19:]:
        peak = rho[np.argmax(rad.evaluate_radial(s, rho) ** 2)]
        assert abs(peak - s.rho_i) <= spacing, s.index


def test_j0_radial_is_dirichlet_sum():
    N, rho0 = 8, 1.0
    b = rad.build_basis(0, N, rho0)
    rho = np.linspace(0, rho0, 1001)
    for s in rad.analytic_dv_states(b, rad.coulomb()):
        n = np.arange(1, N + 1)
        direct = np.sin(np.outer(rho, n) * math.pi) @ np.sin(n * math.pi * s.rho_i)
        r = rad.evaluate_radial(s, rho)
        scale = np.dot(r, direct) / np.dot(direct, direct)
        np.testing.assert_allclose(r, scale * direct, atol=1e-12)
        # the image term of the truncated sine sum pulls the edge peaks slightly inward
        assert rho[np.argmax(np.abs(r))] == pytest.approx(s.index * rho0 / (N + 1), abs=0.5 * rho0 / (N + 1))


def test_evaluate_radial_rejects_outside_box():
    s = rad.analytic_dv_states(rad.build_basis(0, 4, 1.0), rad.coulomb())[0]
    with pytest.raises(ValueError):
        rad.evaluate_radial(s, [1.5])
    with pytest.raises(ValueError):
        rad.evaluate_radial(s, [-0.1])


# ---------------------------------------------------------------------------
# numeric vs analytic
# ---------------------------------------------------------------------------

BRACKET_CASES = [(0, 8, 1.0), (0, 40, 1.0), (10, 40, 1e-4)]


@pytest.mark.parametrize("J,N,rho0", BRACKET_CASES)
def test_coulomb_eigenvalues_upper_edge(J, N, rho0):
    b = rad.build_basis(J, N, rho0)
    vals = rad.diagonalize(rad.potential_matrix(b, rad.coulomb())).values
    # variational bound: -1/rho >= ... >= -1/rho0 gives a strict ceiling
    assert np.all(vals < -1 / rho0)
    assert vals[-1] <= -1 / b.grid[-1] * 0.95


@pytest.mark.xfail(strict=True, reason="lowest eigenvalue sits below -1/rho_1 by more than 5% "
                                       "(48% at J=0, 5.3% at J=10); low-rho states are not localized")
@pytest.mark.parametrize("J,N,rho0", BRACKET_CASES)
def test_coulomb_eigenvalues_lower_edge(J, N, rho0):
    b = rad.build_basis(J, N, rho0)
    vals = rad.diagonalize(rad.potential_matrix(b, rad.coulomb())).values
    assert np.all(vals >= -1 / b.grid[0] * 1.05)


def test_comparison_report_structure():
    b = rad.build_basis(10, 40, 1e-4)
    rep = rad.compare_numeric_analytic(b, rad.coulomb())
    assert [r.i for r in rep.rows] == list(range(1, 41))
    e_num = np.array([r.e_numeric for r in rep.rows])
    # most negative eigenvalue pairs with the innermost grid point
    assert np.all(np.diff(e_num) > 0)
    np.testing.assert_allclose([r.e_analytic for r in rep.rows], -1 / b.grid)


def test_energy_error_decreases_with_i():
    b = rad.build_basis(10, 40, 1e-4)
    rel = rad.compare_numeric_analytic(b, rad.coulomb()).rel_diffs()
    tail = rel[9:]
    # monotone up to small wiggles
    assert np.all(np.diff(tail) <= 1e-3)
    assert tail[-1] < tail[0]


def test_fig_configuration_overlaps_recorded():
    # The committed 0.98 threshold is met from i = 21 on; i = 20 sits at 0.978.
    b = rad.build_basis(10, 40, 1e-4)
    ov = rad.compare_numeric_analytic(b, rad.coulomb()).overlaps()
    assert ov[19] == pytest.approx(0.97833, abs=1e-4)
    assert np.all(ov[20:] >= 0.98)
