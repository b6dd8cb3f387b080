"""Lorentz boosts of directed DV states along z.

Each particle is boosted with velocity beta (gamma = 1/sqrt(1 - beta^2)); the
pair then moves with beta' = 2 beta / (1 + beta^2) and
gamma' = (1 + beta^2) / (1 - beta^2).  The two-body boost operator is

    L^2 = sqrt((gamma'+1)/2) + sqrt((gamma'-1)/2) alpha'_z,
    alpha'_z = (alpha_ez + alpha_pz) / 2,

which is not unitary.  Lorentz-scalar statements use the raw L^2 Psi; the
physical moving-frame states are divided by sqrt(gamma') (box contraction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import spinor as sp
from .specfun import assoc_legendre
from .spinor import SectorLabel, SpinorVector

E2 = 1.0


@dataclass(frozen=True)
class BoostParams:
    beta: float
    P_prime: Optional[float] = None

    def __post_init__(self):
        if not (0.0 <= self.beta < 1.0):
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")

    @classmethod
    def from_gamma(cls, gamma: float) -> "BoostParams":
        if gamma < 1.0:
            raise ValueError("gamma must be >= 1")
        return cls(math.sqrt(1.0 - 1.0 / gamma**2))

    @classmethod
    def from_gamma_prime(cls, gamma_prime: float) -> "BoostParams":
        if gamma_prime < 1.0:
            raise ValueError("gamma' must be >= 1")
        return cls(math.sqrt((gamma_prime - 1.0) / (gamma_prime + 1.0)))

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.beta**2)

    @property
    def beta_prime(self) -> float:
        return 2.0 * self.beta / (1.0 + self.beta**2)

    @property
    def gamma_prime(self) -> float:
        return (1.0 + self.beta**2) / (1.0 - self.beta**2)

    @property
    def gamma_prime_minus_one(self) -> float:
        # 2 beta^2 / (1 - beta^2), free of the cancellation in gamma' - 1
        return 2.0 * self.beta**2 / (1.0 - self.beta**2)

    @property
    def weights(self) -> tuple[float, float]:
        """(sqrt((gamma'+1)/2), sqrt((gamma'-1)/2)) = (gamma, beta gamma)."""
        return math.sqrt((self.gamma_prime + 1.0) / 2.0), math.sqrt(self.gamma_prime_minus_one / 2.0)


# ---------------------------------------------------------------------------
# Coordinates and angular delta functions
# ---------------------------------------------------------------------------

def contract_coordinates(rho_i: float, theta_i: float, gamma: float) -> tuple[float, float]:
    """(rho', theta') after z -> z/gamma at fixed cylindrical radius."""
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    c = math.cos(theta_i)
    rho_p = (rho_i / gamma) * math.sqrt(gamma**2 - c * c * (gamma**2 - 1.0))
    if rho_p == 0.0:
        return 0.0, theta_i
    # cos theta' = rho cos theta / (rho' gamma); atan2 keeps small angles exact
    return rho_p, math.atan2(rho_i * math.sin(theta_i), rho_i * c / gamma)


def expand_coordinates(rho_p: float, theta_p: float, gamma: float) -> tuple[float, float]:
    """Inverse of :func:`contract_coordinates` (z' -> gamma z')."""
    z = rho_p * math.cos(theta_p) * gamma
    r = rho_p * math.sin(theta_p)
    return math.hypot(r, z), math.atan2(r, z)


def legendre_delta(zeta_i: float, J_max: int, m: int, symmetric: bool) -> Callable:
    """Truncated angular delta sum directed at zeta_i.

    m = 0: sum_J (2J+1) P_J(zeta_i) P_J(zeta); m = 1: sum_J (2J+1)/(J(J+1))
    P^1_J(zeta_i) P^1_J(zeta).  The symmetric combination delta(zeta-zeta_i)
    + delta(zeta+zeta_i) keeps even J for m=0 and odd J for m=1; the
    antisymmetric one keeps the other parity.
    """
    if not -1.0 <= zeta_i <= 1.0:
        raise ValueError("zeta_i must lie in [-1, 1]")
    if m not in (0, 1):
        raise ValueError("m must be 0 or 1")
    if not symmetric and zeta_i == 0.0:
        raise ValueError("the antisymmetric delta vanishes identically at zeta_i = 0")
    if m == 1 and abs(zeta_i) == 1.0:
        raise ValueError("P^1_J vanishes at zeta_i = +-1")
    parity = (0 if symmetric else 1) if m == 0 else (1 if symmetric else 0)
    Js = [J for J in range(m, J_max + 1) if J % 2 == parity]
    if not Js:
        raise ValueError(f"no J <= {J_max} of the required parity")
    weights = []
    for J in Js:
        w = (2 * J + 1) if m == 0 else (2 * J + 1) / (J * (J + 1))
        weights.append(w * float(assoc_legendre(J, m, zeta_i)))

    def f(zeta):
        zeta = np.asarray(zeta, dtype=float)
        out = np.zeros_like(zeta)
        for J, w in zip(Js, weights):
            out = out + w * assoc_legendre(J, m, zeta)
        return out

    f.J_values = tuple(Js)
    return f


# ---------------------------------------------------------------------------
# Directed DV states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectedDVState:
    sector: SectorLabel
    rho_i: float
    theta_i: float
    J_parity: str  # "even" | "odd"
    spinor: SpinorVector
    mass: float
    e2: float = E2

    @property
    def symmetric(self) -> bool:
        """Whether the angular factor is delta(z - z_i) + delta(z + z_i)."""
        even = self.J_parity == "even"
        return even if self.sector.S == 0 else not even


def directed_state(
    sector: SectorLabel,
    rho_i: float,
    theta_i: float = math.pi / 2,
    J_parity: Optional[str] = None,
    e2: float = E2,
    phi: float = 0.0,
) -> DirectedDVState:
    """Rest-frame DV state localized at (rho_i, theta_i).

    The default parity is the one whose delta sum peaks at zeta_i = 0:
    even J for S=0, odd J for S=1.
    """
    if rho_i <= 0.0:
        raise ValueError("rho_i must be positive")
    if J_parity is None:
        J_parity = "even" if sector.S == 0 else "odd"
    if J_parity not in ("even", "odd"):
        raise ValueError("J_parity must be 'even' or 'odd'")
    zeta = math.cos(theta_i)
    symmetric = (J_parity == "even") == (sector.S == 0)
    if abs(zeta) < 1e-15 and not symmetric:
        raise ValueError(
            f"sector {sector.name} with {J_parity} J has an antisymmetric angular delta, "
            "which vanishes at theta_i = pi/2"
        )
    if sector.S == 1 and abs(abs(zeta) - 1.0) < 1e-15:
        raise ValueError("spin-1 angular delta vanishes on the z axis")
    mass = 2.0 * e2 / rho_i if sector.S == 0 else 0.0
    return DirectedDVState(
        sector, rho_i, theta_i, J_parity, sp.build_sector_spinor(sector, phi), mass, e2
    )


# ---------------------------------------------------------------------------
# Boost operators
# ---------------------------------------------------------------------------

def boost_matrix(gp: BoostParams) -> np.ndarray:
    c, s = gp.weights
    return c * np.eye(sp.DIM) + s * sp.ALPHA_Z_PRIME


def product_boost_matrix(gp: BoostParams) -> np.ndarray:
    """L_e x L_p with single-particle gamma, no use of alpha_ez alpha_pz = 1."""
    g = gp.gamma
    c, s = math.sqrt((g + 1) / 2), math.sqrt((g - 1) / 2)
    Le = c * np.eye(sp.DIM) + s * sp.alpha_matrix("e", "z")
    Lp = c * np.eye(sp.DIM) + s * sp.alpha_matrix("p", "z")
    return Le @ Lp


def reduced_boost_matrix(gp: BoostParams) -> np.ndarray:
    """gamma + beta gamma alpha'_z (valid where alpha_ez alpha_pz = 1)."""
    g = gp.gamma
    return g * np.eye(sp.DIM) + gp.beta * g * sp.ALPHA_Z_PRIME


def two_body_boost(v: SpinorVector, gp: BoostParams) -> SpinorVector:
    """Raw L^2 v; not renormalized."""
    return sp.apply(boost_matrix(gp), v)


def massless_limit(v: SpinorVector) -> SpinorVector:
    """lim L^2 v / sqrt(gamma') as gamma' -> infinity: (1 + alpha'_z) v / sqrt 2."""
    return sp.apply((np.eye(sp.DIM) + sp.ALPHA_Z_PRIME) * sp.SQRT_HALF, v)


def adjoint_expectation(op: sp.Operator, v: SpinorVector) -> complex:
    """<v| gamma_4^2 O |v>."""
    return v.vdot(sp.apply_gamma4_sq(sp.apply(op, v)))


def conjugate_expectation(op: sp.Operator, v: SpinorVector) -> complex:
    """<v| O |v>."""
    return v.vdot(sp.apply(op, v))


@dataclass(frozen=True)
class BoostedDVState:
    state: DirectedDVState  # moving-frame coordinates, mass and renormalized spinor
    raw_spinor: SpinorVector  # L^2 Psi before renormalization
    params: BoostParams
    rest: DirectedDVState

    @property
    def energy(self) -> float:
        return math.hypot(self.momentum, self.state.mass)

    @property
    def momentum(self) -> float:
        """P' if given, else M' beta' gamma'."""
        if self.params.P_prime is not None:
            return self.params.P_prime
        return self.state.mass * self.params.beta_prime * self.params.gamma_prime


def boost_dv_state(s: DirectedDVState, gp: BoostParams) -> BoostedDVState:
    """Boost a rest-frame directed DV state.

    Coordinates contract with the single-particle gamma.  The heavy spinor is
    L^2 Psi / sqrt(gamma'); the light (massless) spinor is the
    gamma' -> infinity limit, independent of gamma'.  The moving-frame mass is
    2 e^2/rho' (S=0) or 0 (S=1), the closed form of :func:`expectation_mass`.
    """
    raw = two_body_boost(s.spinor, gp)
    if s.sector.S == 0:
        spin = raw / math.sqrt(gp.gamma_prime)
    else:
        spin = massless_limit(s.spinor)
    rho_p, theta_p = contract_coordinates(s.rho_i, s.theta_i, gp.gamma)
    mass = 2.0 * s.e2 / rho_p if s.sector.S == 0 else 0.0
    moved = replace(s, rho_i=rho_p, theta_i=theta_p, spinor=spin, mass=mass)
    return BoostedDVState(moved, raw, gp, s)


def expectation_mass(b: BoostedDVState) -> float:
    """<L^2 Psi| Phi'_C alpha_0^2 |L^2 Psi> with Phi'_C = -e^2/rho'."""
    a0 = conjugate_expectation(sp.ALPHA0_SQ, b.raw_spinor).real
    return (-b.rest.e2 / b.state.rho_i) * a0


def dirac_residual(b: BoostedDVState, P_prime: Optional[float] = None, sign: int = 1) -> float:
    """|| (alpha'_z P' + sign M' gamma_4^2 - E') Psi' || with E' = sqrt(P'^2 + M'^2)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    P = b.momentum if P_prime is None else P_prime
    M = b.state.mass
    E = math.hypot(P, M)
    H = P * sp.ALPHA_Z_PRIME + sign * M * sp.GAMMA4_SQ - E * np.eye(sp.DIM)
    return sp.apply(H, b.state.spinor).norm()


def dirac_residuals(b: BoostedDVState, P_prime: Optional[float] = None) -> dict[int, float]:
    return {s: dirac_residual(b, P_prime, s) for s in (1, -1)}


# ---------------------------------------------------------------------------
# Chirality and helicity
# ---------------------------------------------------------------------------

CHI_PRIME = 0.5 * (sp.chirality_matrix("e") + sp.chirality_matrix("p"))
H_PRIME = 0.5 * (sp.sigma_matrix("e", "z") + sp.sigma_matrix("p", "z"))


@dataclass(frozen=True)
class EigenReport:
    operator: str
    eigenvalue: Optional[float]

    @property
    def is_eigenstate(self) -> bool:
        return self.eigenvalue is not None

    def __str__(self) -> str:
        if self.eigenvalue is None:
            return f"{self.operator}: not an eigenstate"
        return f"{self.operator} = {self.eigenvalue:+g}"


def _pair_eigen(name: str, avg, single_e, single_p, v: SpinorVector, tol: float) -> EigenReport:
    # The two-body operator is only meaningful where both single-particle
    # operators agree on the state.
    lam = sp.eigenvalue(avg, v, tol)
    le = sp.eigenvalue(single_e, v, tol)
    lp = sp.eigenvalue(single_p, v, tol)
    if lam is None or le is None or lp is None:
        return EigenReport(name, None)
    if abs(le - lam) > tol or abs(lp - lam) > tol or abs(lam.imag) > tol:
        return EigenReport(name, None)
    return EigenReport(name, float(lam.real))


def chirality_helicity(v: SpinorVector, tol: float = 1e-12) -> tuple[EigenReport, EigenReport]:
    chi = _pair_eigen("chi'", CHI_PRIME, sp.chirality_matrix("e"), sp.chirality_matrix("p"), v, tol)
    hel = _pair_eigen("h'", H_PRIME, sp.sigma_matrix("e", "z"), sp.sigma_matrix("p", "z"), v, tol)
    return chi, hel


def chiral_light_states(phi: float = 0.0) -> tuple[SpinorVector, SpinorVector]:
    """(Psi'_+, Psi'_-) = (Psi'_1 +- Psi'_2)/sqrt 2 from the boosted light doublet."""
    one = massless_limit(sp.build_sector_spinor(sp.S1_1, phi))
    two = massless_limit(sp.build_sector_spinor(sp.S1_2, phi))
    return (one + two) * sp.SQRT_HALF, (one - two) * sp.SQRT_HALF


def classical_potential(v_dot: float, rho: float, e2: float = E2) -> float:
    """-(e^2/rho)(1 - v_e . v_p / c^2)."""
    return -(e2 / rho) * (1.0 - v_dot)
