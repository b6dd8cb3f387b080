"""Spherical-Bessel radial basis and the discrete-variable (DV) construction.

A basis of N functions j_J(k_n rho), k_n = x_{J,n}/rho0, vanishing at the
box edge rho0, is used two ways:

* numerically, by diagonalizing the matrix of a multiplicative potential
  in the basis (:func:`potential_matrix`, :func:`diagonalize`);
* analytically, by truncating the completeness relation at the N zeros of
  j_J(k_{N+1} rho), which gives states localized at those grid points with
  energy equal to the potential there (:func:`analytic_dv_states`).

Units are bohr and hartree with the coupling e^2 = 1 by default.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .specfun import (
    QuadratureError,
    QuadratureRule,
    bessel_zeros,
    default_rule,
    spherical_bessel_j,
)

THREADS_ENV = "DV_SPECTRUM_THREADS"


class EigensolverError(RuntimeError):
    pass


def worker_count() -> int:
    """Worker cap from ``DV_SPECTRUM_THREADS`` (default: CPU count)."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return value
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class RadialBasis:
    """Bessel basis on [0, rho0] for total angular momentum J.

    Attributes
    ----------
    k : ndarray
        The N wavenumbers x_{J,n}/rho0 (1/bohr).
    k_next : float
        k_{N+1}, whose Bessel zeros define the DV grid.
    norms : ndarray
        N_Jn = sqrt(2 / (rho0^3 j_{J+1}(k_n rho0)^2)) in bohr^{-3/2}.
    grid : ndarray
        The N zeros of j_J(k_{N+1} rho) inside (0, rho0).
    """

    J: int
    N: int
    rho0: float
    k: np.ndarray
    k_next: float
    norms: np.ndarray
    grid: np.ndarray

    def functions(self, rho, workers: int = 1) -> np.ndarray:
        """Radial factors N_Jn j_J(k_n rho), shape (N, len(rho))."""
        rho = np.atleast_1d(np.asarray(rho, dtype=float))

        def rows(sl):
            x = self.k[sl, None] * rho[None, :]
            return self.norms[sl, None] * spherical_bessel_j(self.J, x)

        if workers <= 1 or self.N < 2 * workers:
            return rows(slice(None))
        bounds = np.linspace(0, self.N, workers + 1).astype(int)
        slices = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(rows, slices))
        return np.vstack(parts)

    def grid_widths(self) -> np.ndarray:
        """Width of each grid cell, (rho_{i+1} - rho_{i-1})/2 with rho_0 = 0, rho_{N+1} = rho0."""
        padded = np.concatenate([[0.0], self.grid, [self.rho0]])
        return 0.5 * (padded[2:] - padded[:-2])

    def asymptotic_norm_deviation(self) -> np.ndarray:
        """Relative deviation of N_Jn from the large-k form sqrt(2/rho0) k_n."""
        approx = np.sqrt(2.0 / self.rho0) * self.k
        return (self.norms - approx) / self.norms


def build_basis(J: int, N: int, rho0: float) -> RadialBasis:
    """Build the (J, N, rho0) Bessel basis and its DV grid."""
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    if N > 1000:
        raise ValueError("N must not exceed 1000")
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0!r}")
    zeros = bessel_zeros(J, N + 1)
    k = zeros[:N] / rho0
    k_next = zeros[N] / rho0
    j_next = spherical_bessel_j(J + 1, zeros[:N])
    norms = np.sqrt(2.0 / (rho0**3 * j_next**2))
    # zeros of j_J(k_{N+1} rho) below rho0 are x_{J,m}/k_{N+1}, m = 1..N
    grid = zeros[:N] / k_next
    for arr in (k, norms, grid):
        arr.setflags(write=False)
    return RadialBasis(int(J), int(N), float(rho0), k, float(k_next), norms, grid)


# ---------------------------------------------------------------------------
# Potentials
# ---------------------------------------------------------------------------

POTENTIAL_KINDS = ("coulomb", "dv_heavy", "dv_light", "custom")


@dataclass(frozen=True)
class PotentialSpec:
    """A multiplicative radial potential.

    ``sector_factor`` is the alpha_0^2 eigenvalue that multiplies the bare
    Coulomb term: 1 for plain Coulomb, -2 on the heavy (S=0) sectors and 0
    on the light (S=1) sectors.
    """

    kind: str
    e2: float = 1.0
    sector_factor: float = 1.0
    radial_form: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "custom" and self.radial_form is None:
            raise ValueError("custom potentials need a radial_form")

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.radial_form is not None:
            return self.radial_form(rho)
        return self.sector_factor * (-self.e2 / rho)


def coulomb(e2: float = 1.0) -> PotentialSpec:
    return PotentialSpec("coulomb", e2, 1.0)


def dv_heavy(e2: float = 1.0) -> PotentialSpec:
    """Coulomb plus Gaunt on an S=0 sector: +2 e^2 / rho."""
    return PotentialSpec("dv_heavy", e2, -2.0)


def dv_light(e2: float = 1.0) -> PotentialSpec:
    """Coulomb plus Gaunt on an S=1 sector: identically zero."""
    return PotentialSpec("dv_light", e2, 0.0)


def custom(radial_form: Callable[[np.ndarray], np.ndarray]) -> PotentialSpec:
    return PotentialSpec("custom", 1.0, 1.0, radial_form)


def potential_by_name(name: str, e2: float = 1.0) -> PotentialSpec:
    factories = {"coulomb": coulomb, "dv_heavy": dv_heavy, "dv_light": dv_light}
    try:
        return factories[name](e2)
    except KeyError:
        raise ValueError(f"unknown potential {name!r}; expected one of {sorted(factories)}") from None


# ---------------------------------------------------------------------------
# Numerical DV: matrix assembly and diagonalization
# ---------------------------------------------------------------------------

def potential_matrix(
    basis: RadialBasis,
    pot: PotentialSpec,
    quad: Optional[QuadratureRule] = None,
    workers: int = 1,
) -> np.ndarray:
    """Phi_nm = N_n N_m int_0^rho0 rho^2 j_J(k_n rho) Phi(rho) j_J(k_m rho) d rho.

    Panels are doubled until every entry is stable to 1e-11 relative to the
    largest one. The upper triangle is mirrored so the result is exactly
    symmetric.
    """
    if quad is None:
        quad = default_rule(basis.N, basis.rho0)

    def matrix_on(rule):
        nodes, weights = rule.nodes_weights()
        f = basis.functions(nodes, workers)
        weighted = f * (nodes**2 * pot(nodes) * weights)[None, :]
        return weighted @ f.T

    mat = _converged_matrix(quad, matrix_on)
    upper = np.triu(mat)
    return upper + np.triu(mat, 1).T


def _converged_matrix(rule: QuadratureRule, assemble, rtol: float = 1e-11, max_doublings: int = 8):
    previous = assemble(rule)
    for _ in range(max_doublings):
        rule = rule.doubled()
        current = assemble(rule)
        diff = np.max(np.abs(current - previous))
        scale = np.max(np.abs(current))
        if diff <= rtol * scale or scale == 0.0:
            return current
        previous = current
    raise QuadratureError("potential matrix did not converge", previous, current)


@dataclass(frozen=True)
class Eigenpairs:
    """Ascending eigenvalues and orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray


def diagonalize(matrix) -> Eigenpairs:
    """Dense symmetric eigendecomposition with deterministic signs.

    Each eigenvector is flipped so its largest-magnitude component (first
    one on ties) is positive.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric to 1e-12")
    try:
        values, vectors = np.linalg.eigh(0.5 * (a + a.T))
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    pivot = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivot, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return Eigenpairs(values, vectors * signs[None, :])


# ---------------------------------------------------------------------------
# Analytic DV states
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DVState:
    """One radially quantized state over a :class:`RadialBasis`.

    ``coeffs`` are unit-normalized expansion coefficients. ``norm_D`` is
    the delta-function prefactor D (bohr^{1/2}) that makes the truncated
    completeness kernel integrate to one near its peak, and ``width`` the
    local grid spacing; D^2 ~ width is expected only away from small
    rho_i at high J.
    """

    basis: RadialBasis
    index: int
    rho_i: float
    energy: float
    coeffs: np.ndarray
    norm_D: float
    width: float

    @property
    def d2_over_width(self) -> float:
        return self.norm_D**2 / self.width


def analytic_dv_states(basis: RadialBasis, pot: PotentialSpec) -> list[DVState]:
    """States from the truncated completeness relation at each grid point."""
    table = basis.functions(basis.grid)  # (N basis, N grid)
    widths = basis.grid_widths()
    energies = np.asarray(pot(basis.grid), dtype=float) * np.ones(basis.N)
    states = []
    for i in range(basis.N):
        c = table[:, i]
        norm = float(np.linalg.norm(c))
        rho_i = float(basis.grid[i])
        states.append(
            DVState(
                basis=basis,
                index=i + 1,
                rho_i=rho_i,
                energy=float(energies[i]),
                coeffs=c / norm,
                norm_D=1.0 / (rho_i * norm),
                width=float(widths[i]),
            )
        )
    return states


def evaluate_radial(state: DVState, rho_values) -> np.ndarray:
    """Reduced radial function R_i(rho) = rho sum_n c_n N_Jn j_J(k_n rho).

    Normalized so that int_0^rho0 R_i^2 d rho = sum c_n^2 = 1. It equals the
    completeness-kernel form D rho^2 sum_n N_Jn^2 j_J(k_n rho) j_J(k_n rho_i)
    times rho_i / rho.
    """
    rho = np.asarray(rho_values, dtype=float)
    if np.any(rho < 0) or np.any(rho > state.basis.rho0 * (1 + 1e-12)):
        raise ValueError("rho values must lie in [0, rho0]")
    flat = np.atleast_1d(rho).ravel()
    values = flat * (state.coeffs @ state.basis.functions(flat))
    return values.reshape(rho.shape)


# ---------------------------------------------------------------------------
# Numeric versus analytic comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonRow:
    i: int
    rho_i: float
    overlap: float
    e_numeric: float
    e_analytic: float
    rel_diff: float


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    basis: RadialBasis
    potential: PotentialSpec
    matrix: np.ndarray
    eigen: Eigenpairs
    analytic: list[DVState]
    numeric: list[DVState]
    rows: list[ComparisonRow]

    def overlaps(self) -> np.ndarray:
        return np.array([r.overlap for r in self.rows])

    def rel_diffs(self) -> np.ndarray:
        return np.array([r.rel_diff for r in self.rows])


def compare_numeric_analytic(
    basis: RadialBasis,
    pot: PotentialSpec,
    quad: Optional[QuadratureRule] = None,
    workers: int = 1,
) -> ComparisonReport:
    """Diagonalize the potential matrix and pair eigenpairs with grid points.

    Eigenvalues in ascending order are matched to grid points sorted by
    ascending analytic energy Phi(rho_i); for Coulomb that is ascending
    rho_i. Rows are reported in grid order i = 1..N.
    """
    mat = potential_matrix(basis, pot, quad, workers)
    eig = diagonalize(mat)
    analytic = analytic_dv_states(basis, pot)
    e_analytic = np.array([s.energy for s in analytic])
    order = np.argsort(e_analytic, kind="stable")

    numeric: list[Optional[DVState]] = [None] * basis.N
    rows: list[Optional[ComparisonRow]] = [None] * basis.N
    for rank, i in enumerate(order):
        a = analytic[i]
        v = eig.vectors[:, rank]
        lam = float(eig.values[rank])
        numeric[i] = DVState(basis, a.index, a.rho_i, lam, v, a.norm_D, a.width)
        denom = abs(a.energy)
        rel = abs(lam - a.energy) / denom if denom > 0 else abs(lam - a.energy)
        rows[i] = ComparisonRow(a.index, a.rho_i, float(abs(v @ a.coeffs)), lam, a.energy, rel)
    return ComparisonReport(basis, pot, mat, eig, analytic, numeric, rows)
