"""Invariant suites run by ``dv-spectrum verify``.

Every check records what was measured, the tolerance it was held to and a
short anchor naming the relation it exercises.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import boost as bst
from . import kinetic as kin
from . import radial as rad
from . import spinor as sp
from .specfun import spherical_bessel_j


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    value: float
    tolerance: float
    kind: str  # "max" (value <= tol) or "min" (value >= tol)
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def at_most(name: str, anchor: str, value: float, tol: float) -> Check:
    value = float(value)
    return Check(name, anchor, value, tol, "max", bool(value <= tol))


def at_least(name: str, anchor: str, value: float, tol: float) -> Check:
    value = float(value)
    return Check(name, anchor, value, tol, "min", bool(value >= tol))


# ---------------------------------------------------------------------------
# radial
# ---------------------------------------------------------------------------

def gram_matrix(basis: rad.RadialBasis, workers: int = 1) -> np.ndarray:
    """N_n N_m int rho^2 j_J(k_n rho) j_J(k_m rho) d rho."""
    one = rad.custom(lambda r: np.ones_like(r))
    return rad.potential_matrix(basis, one, workers=workers)


def radial_suite(J: int, N: int, rho0: float, workers: int = 1) -> list[Check]:
    checks = []
    for j, n in sorted({(0, 8), (1, 8), (10, 40), (J, N)}):
        b = rad.build_basis(j, n, rho0)
        g = gram_matrix(b, workers)
        checks.append(
            at_most(f"orthonormality J={j} N={n}", "radial orthonormality",
                    np.max(np.abs(g - np.eye(n))), 1e-8)
        )
    b = rad.build_basis(J, N, rho0)
    edge = np.max(np.abs(spherical_bessel_j(J, b.k * rho0)))
    checks.append(at_most("boundary zeros j_J(k_n rho0)", "box boundary condition", edge, 1e-10))

    c = rad.potential_matrix(b, rad.coulomb(), workers=workers)
    h = rad.potential_matrix(b, rad.dv_heavy(), workers=workers)
    checks.append(
        at_most("heavy = -2 x Coulomb matrix", "DV potential sector factor",
                np.max(np.abs(h + 2 * c)) / np.max(np.abs(c)), 1e-12)
    )

    rep = rad.compare_numeric_analytic(b, rad.coulomb(), workers=workers)
    i = np.arange(1, N + 1)
    rel, ov = rep.rel_diffs(), rep.overlaps()
    half, three_q = i >= N // 2, i >= (3 * N) // 4
    checks.append(at_most(f"Coulomb energies i>={N // 2}", "numeric vs analytic energies",
                          rel[half].max(), 0.05))
    checks.append(at_most(f"Coulomb energies i>={(3 * N) // 4}", "numeric vs analytic energies",
                          rel[three_q].max(), 0.01))
    checks.append(at_least(f"eigenvector overlap i>={N // 2}", "numeric vs analytic wavefunctions",
                           ov[half].min(), 0.98))
    rep0 = rad.compare_numeric_analytic(rad.build_basis(0, 8, 1.0), rad.coulomb())
    checks.append(at_least("J=0 N=8 eigenvector overlap", "sine-basis DV states",
                           rep0.overlaps().min(), 0.9999))
    return checks


# ---------------------------------------------------------------------------
# spinor
# ---------------------------------------------------------------------------

def _eig_error(op, v: sp.SpinorVector, expected: float) -> float:
    w = sp.apply(op, v)
    return float(np.max(np.abs(w.amplitudes - expected * v.amplitudes)))


def spinor_suite() -> list[Check]:
    checks = []
    singlet = sp.product(sp.dirac_vector("11"), sp.omega(0, 0))
    checks.append(at_most("sigma.sigma singlet -3", "spin-spin operator eigenvalues",
                          _eig_error(sp.SIGMA_DOT_SIGMA, singlet, -3.0), 1e-13))
    for Sz in (-1, 0, 1):
        t = sp.product(sp.dirac_vector("11"), sp.omega(1, Sz))
        checks.append(at_most(f"sigma.sigma triplet Sz={Sz} +1", "spin-spin operator eigenvalues",
                              _eig_error(sp.SIGMA_DOT_SIGMA, t, 1.0), 1e-13))
    expected_aa = {
        ("11", "22", -1, 0): 3.0, ("11", "22", 1, 0): -3.0,
        ("12", "21", -1, 0): 3.0, ("12", "21", 1, 0): -3.0,
        ("11", "22", -1, 1): -1.0, ("11", "22", 1, 1): 1.0,
        ("12", "21", -1, 1): -1.0, ("12", "21", 1, 1): 1.0,
    }
    for (a, b, s, S), lam in expected_aa.items():
        d = sp.dirac_vector(a) + s * sp.dirac_vector(b)
        spins = [(0, 0)] if S == 0 else [(1, -1), (1, 0), (1, 1)]
        err = max(_eig_error(sp.ALPHA_DOT_ALPHA, sp.product(d, sp.omega(*q)), lam) for q in spins)
        label = f"e{a}{'+' if s > 0 else '-'}e{b} S={S}"
        checks.append(at_most(f"alpha.alpha {label} {lam:+g}", "alpha_e.alpha_p eigenvalues", err, 1e-13))
    alpha_zz = sp.alpha_matrix("e", "z") @ sp.alpha_matrix("p", "z")
    for sec in sp.SECTORS:
        v = sp.build_sector_spinor(sec, 0.37)
        a0 = -2.0 if sec.S == 0 else 0.0
        checks.append(at_most(f"alpha0^2 on {sec.name} = {a0:+g}", "sector energies -2 and 0 times Coulomb",
                              _eig_error(sp.ALPHA0_SQ, v, a0), 1e-13))
        checks.append(at_most(f"alpha_ez alpha_pz on {sec.name} = +1", "longitudinal Gaunt term",
                              _eig_error(alpha_zz, v, 1.0), 1e-13))
        lon, _ = sp.gaunt_split(v)
        checks.append(at_most(f"Coulomb + longitudinal Gaunt on {sec.name} = 0",
                              "only the transverse Gaunt term survives",
                              np.max(np.abs(v.amplitudes - lon.amplitudes)), 1e-13))
    herm = max(
        np.max(np.abs(m - m.conj().T))
        for m in [sp.alpha_matrix(p, a) for p in "ep" for a in sp.AXES]
        + [sp.gamma4_matrix("e"), sp.gamma4_matrix("p")]
    )
    checks.append(at_most("alpha, gamma4 Hermitian", "Dirac matrix definitions", herm, 0.0))
    anti = 0.0
    for p in "ep":
        for a in sp.AXES:
            for b in sp.AXES:
                A, B = sp.alpha_matrix(p, a), sp.alpha_matrix(p, b)
                anti = max(anti, np.max(np.abs(A @ B + B @ A - 2.0 * (a == b) * np.eye(sp.DIM))))
    checks.append(at_most("{alpha_i, alpha_j} = 2 delta_ij", "Dirac matrix definitions", anti, 0.0))
    comm = max(
        np.max(np.abs(sp.alpha_matrix("e", a) @ sp.alpha_matrix("p", b)
                      - sp.alpha_matrix("p", b) @ sp.alpha_matrix("e", a)))
        for a in sp.AXES for b in sp.AXES
    )
    checks.append(at_most("[alpha_e, alpha_p] = 0", "independent particles", comm, 0.0))
    checks.append(at_most("[alpha0^2, gamma4^2] = 0", "adjoint-spinor commutation",
                          np.max(np.abs(sp.ALPHA0_SQ @ sp.GAMMA4_SQ - sp.GAMMA4_SQ @ sp.ALPHA0_SQ)), 0.0))
    m = sp.mass_matrix(1.0)
    plus = sp.product(sp.dirac_vector("11") + sp.dirac_vector("22"), sp.omega(0, 0))
    minus = sp.product(sp.dirac_vector("11") - sp.dirac_vector("22"), sp.omega(0, 0))
    checks.append(at_most("mass operator couples g and u", "mass operator on e11 +- e22",
                          max(np.max(np.abs(sp.apply(m, plus).amplitudes - 2 * minus.amplitudes)),
                              np.max(np.abs(sp.apply(m, minus).amplitudes - 2 * plus.amplitudes))), 1e-15))
    proj = max(np.max(np.abs(sp.PROJECT_G + sp.PROJECT_U - np.eye(sp.DIM))),
               np.max(np.abs(sp.PROJECT_G @ sp.PROJECT_U)))
    checks.append(at_most("g/u projectors complete and orthogonal", "g/u decomposition", proj, 1e-15))
    checks.append(at_most("singlet exchange -1", "exchange symmetry of spin states",
                          _eig_error(sp.EXCHANGE, singlet, -1.0), 1e-15))
    mismatch = sum(
        sp.table1_symmetries(sec, J) != sp.derived_symmetries(sec, J)
        for sec in sp.SECTORS for J in range(0 if sec.S == 0 else 1, 13)
    )
    checks.append(at_most("exchange/parity table vs operators (J<=12)", "exchange and parity table",
                          mismatch, 0))
    return checks


# ---------------------------------------------------------------------------
# kinetic
# ---------------------------------------------------------------------------

def kinetic_suite(J: int, k: float = 3.0) -> list[Check]:
    checks = []
    Js = sorted(set(range(1, 13)) | {J})
    bad_zero, bad_nonzero = 0, 0
    for j in Js:
        for name in kin.ANOMALOUS:
            if j == 0 and name.startswith("S1"):
                continue
            bad_zero += not kin.apply_K(kin.combination(name, j, k)).is_zero()
        for name in kin.COMPLEMENTARY:
            if j == 0 and name.startswith("S1"):
                continue
            bad_nonzero += kin.apply_K(kin.combination(name, j, k)).is_zero()
    checks.append(at_most(f"K annihilates anomalous states J in {Js[0]}..{Js[-1]}",
                          "kinetic annihilation", bad_zero, 0))
    checks.append(at_most("K does not annihilate complementary states",
                          "kinetic annihilation", bad_nonzero, 0))
    for j in sorted({0, 1, 2, 3, min(J, 5)}):
        rep = kin.finite_difference_oracle(j, k, 0.02, 2.0)
        checks.append(at_least(f"sigma.pi oracle order J={j} (>=1.8)", "sigma.pi recoupling rules",
                               rep.order, 1.8))
        checks.append(at_most(f"sigma.pi oracle order J={j} (<=2.2)", "sigma.pi recoupling rules",
                              rep.order, 2.2))
        checks.append(at_least(f"sigma.pi flipped-sign residual J={j}", "sigma.pi recoupling rules",
                               rep.flipped_residual, 0.1))
    return checks


# ---------------------------------------------------------------------------
# boost
# ---------------------------------------------------------------------------

def boost_suite(rho_i: float = 1.0, seed: int = 0) -> list[Check]:
    checks = []
    rng = np.random.default_rng(seed)
    law = 0.0
    for b in rng.uniform(0.0, 1.0, 1000):
        gp = bst.BoostParams(float(b))
        c, s = gp.weights
        bp = gp.beta_prime
        law = max(law,
                  abs((1 - bp) * (1 + bp) - 1 / gp.gamma_prime**2),
                  abs(c - gp.gamma) / gp.gamma,
                  abs(s - gp.beta * gp.gamma) / gp.gamma)
    checks.append(at_most("beta'/gamma' addition law", "two-body velocity addition", law, 1e-14))

    inv, form, unit, adj = 0.0, 0.0, 0.0, 0.0
    for gprime in 1.0 + rng.exponential(3.0, 100):
        gp = bst.BoostParams.from_gamma_prime(float(gprime))
        for sec in sp.SECTORS:
            v = sp.build_sector_spinor(sec, 0.21)
            raw = bst.two_body_boost(v, gp)
            inv = max(inv, abs(bst.conjugate_expectation(sp.ALPHA0_SQ, raw)
                               - bst.conjugate_expectation(sp.ALPHA0_SQ, v)))
            adj = max(adj, abs(bst.adjoint_expectation(np.eye(sp.DIM), raw)
                               - bst.adjoint_expectation(np.eye(sp.DIM), v)))
            form = max(form, np.max(np.abs(bst.product_boost_matrix(gp) @ v.amplitudes
                                           - raw.amplitudes)))
            s = bst.boost_dv_state(bst.directed_state(sec, rho_i, math.pi / 3), gp)
            unit = max(unit, abs(s.state.spinor.norm() - 1.0))
    checks.append(at_most("alpha0^2 conjugate expectation invariant", "conjugate expectation of alpha0^2",
                          inv, 1e-12))
    checks.append(at_most("adjoint norm invariant (raw boost)", "adjoint spinor Lorentz scalar", adj, 1e-12))
    checks.append(at_most("product boost = reduced boost on sectors", "two-body boost operator",
                          form, 1e-12))
    checks.append(at_most("boosted states unit norm", "renormalized moving-frame states", unit, 1e-13))

    lower, upper, eq0, eq90, expect = 0.0, 0.0, 0.0, 0.0, 0.0
    for theta in np.linspace(0.0, math.pi, 25):
        for g in (1.0, 1.25, 2.0, 5.0, 20.0):
            gp = bst.BoostParams.from_gamma(g)
            s = bst.directed_state(sp.A0, rho_i, float(theta))
            moved = bst.boost_dv_state(s, gp)
            m = moved.state.mass
            expect = max(expect, abs(bst.expectation_mass(moved) - m) / m)
            lower = max(lower, (s.mass - m) / s.mass)
            upper = max(upper, (m - gp.gamma * s.mass) / s.mass)
            if theta in (0.0, math.pi):
                eq0 = max(eq0, abs(m - gp.gamma * s.mass) / s.mass)
            if abs(theta - math.pi / 2) < 1e-12:
                eq90 = max(eq90, abs(m - s.mass) / s.mass)
    checks.append(at_most("heavy mass M' >= M", "moving-frame mass bounds", lower, 1e-13))
    checks.append(at_most("heavy mass M' <= gamma M", "moving-frame mass bounds", upper, 1e-13))
    checks.append(at_most("M' = gamma M on the z axis", "moving-frame mass bounds", eq0, 1e-13))
    checks.append(at_most("M' = M at theta = pi/2", "moving-frame mass bounds", eq90, 1e-13))
    checks.append(at_most("M' from alpha0^2 expectation = 2e^2/rho'", "moving-frame mass from the Lorentz potential",
                          expect, 1e-10))

    light = 0.0
    for sec in (sp.S1_1, sp.S1_2):
        b = bst.boost_dv_state(bst.directed_state(sec, rho_i, math.pi / 2), bst.BoostParams(0.6))
        for P in (0.1, 1.0, 10.0):
            light = max(light, bst.dirac_residual(b, P, +1), bst.dirac_residual(b, P, -1))
    checks.append(at_most("light Dirac residual", "one-body Dirac equation in the moving frame",
                          light, 1e-12))
    rest = bst.BoostParams(0.0)
    a0 = bst.boost_dv_state(bst.directed_state(sp.A0, rho_i), rest)
    s0 = bst.boost_dv_state(bst.directed_state(sp.S0, rho_i), rest)
    checks.append(at_most("heavy A0 Dirac residual P'=0 (+M')", "one-body Dirac equation in the moving frame",
                          bst.dirac_residual(a0, 0.0, +1), 1e-12))
    checks.append(at_most("heavy S0 Dirac residual P'=0 (+M') equals 2M'",
                          "one-body Dirac equation in the moving frame",
                          abs(bst.dirac_residual(s0, 0.0, +1) - 2 * s0.state.mass), 1e-12))
    checks.append(at_most("heavy S0 Dirac residual P'=0 (-M')", "one-body Dirac equation in the moving frame",
                          bst.dirac_residual(s0, 0.0, -1), 1e-12))
    kz = sp.alpha_matrix("e", "z") - sp.alpha_matrix("p", "z")
    kin_adj = max(
        abs(bst.adjoint_expectation(kz, bst.two_body_boost(sp.build_sector_spinor(sec), bst.BoostParams(0.7))))
        for sec in sp.SECTORS
    )
    checks.append(at_most("adjoint <(alpha_ez - alpha_pz)> = 0", "anomalous states stay kinetic-free",
                          kin_adj, 1e-13))
    plus, minus = bst.chiral_light_states(0.4)
    chi_p, h_p = bst.chirality_helicity(plus)
    chi_m, h_m = bst.chirality_helicity(minus)
    err = max(
        abs(x.eigenvalue - want) if x.eigenvalue is not None else math.inf
        for x, want in ((chi_p, 1.0), (h_p, 1.0), (chi_m, -1.0), (h_m, -1.0))
    )
    checks.append(at_most("chirality/helicity eigenvalues (+1,+1)/(-1,-1)", "light chiral doublet", err, 1e-12))
    chi_a, _ = bst.chirality_helicity(sp.build_sector_spinor(sp.A0))
    checks.append(at_most("heavy A0 not a chirality eigenstate", "massive states mix chirality",
                          float(chi_a.is_eigenstate), 0))
    checks.append(at_most("classical potential v.v = 1 vanishes", "classical velocity-dependent potential",
                          abs(bst.classical_potential(1.0, rho_i)), 0.0))
    return checks


SUITES: dict[str, Callable] = {
    "radial": radial_suite,
    "spinor": spinor_suite,
    "kinetic": kinetic_suite,
    "boost": boost_suite,
}
