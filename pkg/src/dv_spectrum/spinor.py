"""Two-body Dirac x Pauli spinor algebra on a 16-dimensional space.

Amplitudes are indexed by (d_e, d_p, s_e, s_p) in lexicographic order with
d in {1, 2} -> {0, 1} and s in {+1/2, -1/2} -> {0, 1}, so

    index = 8 * d_e + 4 * d_p + 2 * s_e + s_p.

The Dirac label e_ij puts the electron in Dirac component i and the
positron in component j.  Single-particle operators act as

    alpha_k e_1 = sigma_k e_2,  alpha_k e_2 = sigma_k e_1,
    gamma_4 e_1 = e_1,          gamma_4 e_2 = -e_2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Optional, Union

import numpy as np

from .specfun import omega, omega_plus

DIM = 16
SQRT_HALF = math.sqrt(0.5)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": _X, "y": _Y, "z": _Z}
AXES = ("x", "y", "z")
PARTICLES = ("e", "p")


def _kron(*factors) -> np.ndarray:
    out = reduce(np.kron, factors)
    out.setflags(write=False)
    return out


def _check_particle(particle: str) -> None:
    if particle not in PARTICLES:
        raise ValueError(f"particle must be 'e' or 'p', got {particle!r}")


def alpha_matrix(particle: str, axis: str) -> np.ndarray:
    _check_particle(particle)
    s = PAULI[axis]
    if particle == "e":
        return _kron(_X, _I2, s, _I2)
    return _kron(_I2, _X, _I2, s)


def gamma4_matrix(particle: str) -> np.ndarray:
    _check_particle(particle)
    if particle == "e":
        return _kron(_Z, _I2, _I2, _I2)
    return _kron(_I2, _Z, _I2, _I2)


def sigma_matrix(particle: str, axis: str) -> np.ndarray:
    """Pauli matrix on one particle's spin index, no Dirac action."""
    _check_particle(particle)
    s = PAULI[axis]
    if particle == "e":
        return _kron(_I2, _I2, s, _I2)
    return _kron(_I2, _I2, _I2, s)


def chirality_matrix(particle: str) -> np.ndarray:
    """chi = -gamma_5 for one particle: swaps its Dirac index."""
    _check_particle(particle)
    if particle == "e":
        return _kron(_X, _I2, _I2, _I2)
    return _kron(_I2, _X, _I2, _I2)


def _exchange_matrix() -> np.ndarray:
    P = np.zeros((DIM, DIM), dtype=complex)
    for de in range(2):
        for dp in range(2):
            for se in range(2):
                for sp in range(2):
                    src = 8 * de + 4 * dp + 2 * se + sp
                    dst = 8 * dp + 4 * de + 2 * sp + se
                    P[dst, src] = 1.0
    P.setflags(write=False)
    return P


GAMMA4_SQ = _kron(_Z, _Z, _I2, _I2)
EXCHANGE = _exchange_matrix()
DIRAC_SWAP = _kron(_X, _X, _I2, _I2)  # e11 <-> e22, e12 <-> e21
ALPHA_DOT_ALPHA = sum(alpha_matrix("e", a) @ alpha_matrix("p", a) for a in AXES)
SIGMA_DOT_SIGMA = sum(sigma_matrix("e", a) @ sigma_matrix("p", a) for a in AXES)
ALPHA0_SQ = np.eye(DIM) - ALPHA_DOT_ALPHA
ALPHA_Z_PRIME = 0.5 * (alpha_matrix("e", "z") + alpha_matrix("p", "z"))
PROJECT_G = 0.5 * (np.eye(DIM) + DIRAC_SWAP)
PROJECT_U = 0.5 * (np.eye(DIM) - DIRAC_SWAP)
for _m in (ALPHA_DOT_ALPHA, SIGMA_DOT_SIGMA, ALPHA0_SQ, ALPHA_Z_PRIME, PROJECT_G, PROJECT_U):
    _m.setflags(write=False)


def mass_matrix(m: float = 1.0) -> np.ndarray:
    """M = m (gamma_e4 + gamma_p4)."""
    return m * (gamma4_matrix("e") + gamma4_matrix("p"))


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinorVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if a.shape != (DIM,):
            raise ValueError(f"spinor needs {DIM} amplitudes, got {a.size}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def __add__(self, other: "SpinorVector") -> "SpinorVector":
        return SpinorVector(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "SpinorVector") -> "SpinorVector":
        return SpinorVector(self.amplitudes - other.amplitudes)

    def __mul__(self, c: complex) -> "SpinorVector":
        return SpinorVector(c * self.amplitudes)

    __rmul__ = __mul__

    def __neg__(self) -> "SpinorVector":
        return SpinorVector(-self.amplitudes)

    def __truediv__(self, c: complex) -> "SpinorVector":
        return SpinorVector(self.amplitudes / c)

    def vdot(self, other: "SpinorVector") -> complex:
        """<self|other>, conjugating self."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "SpinorVector":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero spinor")
        return SpinorVector(self.amplitudes / n)

    def allclose(self, other: "SpinorVector", atol: float = 1e-13) -> bool:
        return bool(np.max(np.abs(self.amplitudes - other.amplitudes)) <= atol)

    def dump(self) -> str:
        """16 lines of 'index re im' with round-trip precision."""
        return "".join(
            f"{n} {a.real!r} {a.imag!r}\n" for n, a in enumerate(self.amplitudes.tolist())
        )

    @classmethod
    def from_dump(cls, text: str) -> "SpinorVector":
        amps = np.zeros(DIM, dtype=complex)
        seen = set()
        for line in text.strip().splitlines():
            n, re, im = line.split()
            amps[int(n)] = complex(float(re), float(im))
            seen.add(int(n))
        if seen != set(range(DIM)):
            raise ValueError("dump must list all 16 indices")
        return cls(amps)


def dirac_vector(label: str) -> np.ndarray:
    """e_ij as a 4-vector over (d_e, d_p); label like '12'."""
    i, j = int(label[0]), int(label[1])
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError(f"bad Dirac label {label!r}")
    v = np.zeros(4, dtype=complex)
    v[2 * (i - 1) + (j - 1)] = 1.0
    return v


DIRAC_LABELS = ("11", "12", "21", "22")


def product(dirac: np.ndarray, pauli: np.ndarray) -> SpinorVector:
    """e (Dirac 4-vector) tensor Omega (Pauli 4-vector)."""
    return SpinorVector(np.kron(np.asarray(dirac, complex), np.asarray(pauli, complex)))


def basis_vector(d_e: int, d_p: int, s_e: float, s_p: float) -> SpinorVector:
    """Product basis vector with d in {1,2} and s in {+0.5,-0.5}."""
    si = {0.5: 0, -0.5: 1}
    a = np.zeros(DIM, dtype=complex)
    a[8 * (d_e - 1) + 4 * (d_p - 1) + 2 * si[s_e] + si[s_p]] = 1.0
    return SpinorVector(a)


def random_spinor(rng: np.random.Generator) -> SpinorVector:
    return SpinorVector(rng.normal(size=DIM) + 1j * rng.normal(size=DIM))


# ---------------------------------------------------------------------------
# Operators on vectors
# ---------------------------------------------------------------------------

Operator = Union[np.ndarray, Callable[[SpinorVector], SpinorVector]]


def apply(op: Operator, v: SpinorVector) -> SpinorVector:
    if callable(op):
        return op(v)
    return SpinorVector(np.asarray(op) @ v.amplitudes)


def apply_alpha(particle: str, axis: str, v: SpinorVector) -> SpinorVector:
    return apply(alpha_matrix(particle, axis), v)


def apply_gamma4(particle: str, v: SpinorVector) -> SpinorVector:
    return apply(gamma4_matrix(particle), v)


def apply_gamma4_sq(v: SpinorVector) -> SpinorVector:
    return apply(GAMMA4_SQ, v)


def apply_mass(v: SpinorVector, m: float = 1.0) -> SpinorVector:
    return apply(mass_matrix(m), v)


def alpha_dot_alpha(v: SpinorVector) -> SpinorVector:
    return apply(ALPHA_DOT_ALPHA, v)


def sigma_dot_sigma(v: SpinorVector) -> SpinorVector:
    return apply(SIGMA_DOT_SIGMA, v)


def alpha0_sq(v: SpinorVector) -> SpinorVector:
    """alpha_0^2 = 1 - alpha_e . alpha_p."""
    return apply(ALPHA0_SQ, v)


def gaunt_split(v: SpinorVector) -> tuple[SpinorVector, SpinorVector]:
    """(alpha_ez alpha_pz v, (alpha_ex alpha_px + alpha_ey alpha_py) v)."""
    lon = apply(alpha_matrix("e", "z") @ alpha_matrix("p", "z"), v)
    tra = apply(
        alpha_matrix("e", "x") @ alpha_matrix("p", "x")
        + alpha_matrix("e", "y") @ alpha_matrix("p", "y"),
        v,
    )
    return lon, tra


def exchange(v: SpinorVector) -> SpinorVector:
    """Swap (d_e, s_e) <-> (d_p, s_p)."""
    return apply(EXCHANGE, v)


def project_g(v: SpinorVector) -> SpinorVector:
    """Part symmetric under e11 <-> e22, e12 <-> e21."""
    return apply(PROJECT_G, v)


def project_u(v: SpinorVector) -> SpinorVector:
    return apply(PROJECT_U, v)


def eigenvalue(op: Operator, v: SpinorVector, tol: float = 1e-12) -> Optional[complex]:
    """Eigenvalue of op on v, or None if v is not an eigenvector to tol."""
    w = apply(op, v)
    n2 = v.vdot(v)
    if n2 == 0:
        raise ValueError("zero vector has no eigenvalue")
    lam = v.vdot(w) / n2
    if np.max(np.abs(w.amplitudes - lam * v.amplitudes)) > tol * max(1.0, v.norm()):
        return None
    return lam


# ---------------------------------------------------------------------------
# Coupled basis e_ij x Omega^S_Sz
# ---------------------------------------------------------------------------

SPIN_STATES = ((0, 0), (1, 1), (1, 0), (1, -1))


def coupled_basis_matrix() -> np.ndarray:
    """Unitary whose columns are e_ij x Omega^S_Sz.

    Column order: Dirac label outer (11, 12, 21, 22), spin state inner as in
    ``SPIN_STATES``.
    """
    cols = [
        product(dirac_vector(lab), omega(S, Sz)).amplitudes
        for lab in DIRAC_LABELS
        for S, Sz in SPIN_STATES
    ]
    return np.stack(cols, axis=1)


_COUPLED = coupled_basis_matrix()
_COUPLED.setflags(write=False)


def to_coupled(v: SpinorVector) -> np.ndarray:
    return _COUPLED.conj().T @ v.amplitudes


def from_coupled(c) -> SpinorVector:
    return SpinorVector(_COUPLED @ np.asarray(c, dtype=complex))


# ---------------------------------------------------------------------------
# DV sectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorLabel:
    name: str
    S: int
    dirac_combo: tuple[str, str, int]  # (label_a, label_b, relative sign)

    @property
    def heavy(self) -> bool:
        return self.S == 0

    def dirac(self) -> np.ndarray:
        a, b, sign = self.dirac_combo
        return dirac_vector(a) + sign * dirac_vector(b)


A0 = SectorLabel("A0", 0, ("11", "22", -1))
S0 = SectorLabel("S0", 0, ("12", "21", -1))
S1_1 = SectorLabel("S1_1", 1, ("11", "22", +1))
S1_2 = SectorLabel("S1_2", 1, ("12", "21", +1))
SECTORS = (A0, S0, S1_1, S1_2)


def sector_by_name(name: str) -> SectorLabel:
    for s in SECTORS:
        if s.name == name:
            return s
    raise ValueError(f"unknown sector {name!r}; expected one of {[s.name for s in SECTORS]}")


def build_sector_spinor(sector: SectorLabel, phi: float = 0.0) -> SpinorVector:
    """Omega^0_0 or Omega^1_+(phi) times the sector's Dirac combination / sqrt 2."""
    pauli = omega(0, 0) if sector.S == 0 else omega_plus(phi)
    return product(sector.dirac(), pauli) * SQRT_HALF


def table1_symmetries(sector: SectorLabel, J: int) -> tuple[int, int]:
    """(X, P) for the anomalous state of the given sector and J.

    For odd J the S/A naming is reversed; the (-1)^J factors below already
    carry that swap.
    """
    if J < 0:
        raise ValueError("J must be non-negative")
    if sector.S == 1 and J == 0:
        raise ValueError("spin-1 sectors need J > 0")
    even = (-1) ** J
    odd = -even
    table = {
        "A0": (odd, odd),
        "S0": (even, even),
        "S1_1": (even, odd),
        "S1_2": (even, even),
    }
    return table[sector.name]


def derived_symmetries(sector: SectorLabel, J: int) -> tuple[int, int]:
    """(X, P) rebuilt from operators as a cross-check of the table.

    X = (spinor exchange eigenvalue) * (-1)^L with L = J, and
    P = -(-1)^L * (gamma_4^2 eigenvalue), the relative intrinsic parity of a
    particle-antiparticle pair being -1.
    """
    v = build_sector_spinor(sector)
    x = eigenvalue(EXCHANGE, v)
    g = eigenvalue(GAMMA4_SQ, v)
    if x is None or g is None:
        raise ArithmeticError(f"sector {sector.name} is not an exchange/gamma4^2 eigenstate")
    sign_l = (-1) ** J
    return int(round(x.real)) * sign_l, -sign_l * int(round(g.real))

