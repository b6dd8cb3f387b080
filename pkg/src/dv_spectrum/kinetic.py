"""Exact term algebra for K = (alpha_e - alpha_p) . pi on anomalous states.

A wavefunction is a sum of terms

    coeff * j_L(k rho) [Y^L Omega^S]^J_0 e_ij,

closed under the four sigma . pi rules on phi_0 = j_J [Y^J Omega^0]^J and
phi_1 = j_J [Y^J Omega^1]^J (common normalization N_Jk dropped):

    (sigma_e . pi) phi_0 = -k phi_alpha,   (sigma_p . pi) phi_0 = +k phi_alpha,
    (sigma_e . pi) phi_1 = +k phi_beta,    (sigma_p . pi) phi_1 = +k phi_beta,

    phi_alpha = i { a j_{J+1}[Y^{J+1}Omega^1]^J + b j_{J-1}[Y^{J-1}Omega^1]^J },
    phi_beta  = i {-b j_{J+1}[Y^{J+1}Omega^1]^J + a j_{J-1}[Y^{J-1}Omega^1]^J },

with a = sqrt((J+1)/(2J+1)), b = sqrt(J/(2J+1)).  The rules are checked
independently against central differences in :func:`finite_difference_oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .specfun import coupled_harmonic, spherical_bessel_j

MERGE_TOL = 1e-14


class RuleNotApplicable(ValueError):
    """sigma . pi requested on a term outside {phi_0, phi_1}."""


def recoupling(J: int) -> tuple[float, float]:
    return math.sqrt((J + 1) / (2 * J + 1)), math.sqrt(J / (2 * J + 1))


@dataclass(frozen=True)
class Term:
    coeff: complex
    radial_order: int
    angular: tuple[int, int]  # (L, S)
    dirac: str  # "11", "12", "21", "22"
    k: float
    J: int

    def __post_init__(self):
        L, S = self.angular
        J = self.J
        if (L, S) not in {(J, 0), (J, 1), (J + 1, 1), (J - 1, 1)} or L < 0:
            raise ValueError(f"angular label {self.angular} outside the closed set for J={J}")
        if self.radial_order != L:
            raise ValueError("radial order must equal the orbital order L")
        if self.dirac not in ("11", "12", "21", "22"):
            raise ValueError(f"bad Dirac label {self.dirac!r}")

    @property
    def key(self) -> tuple:
        return (self.J, self.k, self.angular, self.dirac)


@dataclass(frozen=True)
class TermWavefunction:
    terms: tuple[Term, ...] = ()
    canonical: bool = field(default=False, compare=False)

    def canonicalize(self) -> "TermWavefunction":
        acc: dict[tuple, complex] = {}
        proto: dict[tuple, Term] = {}
        for t in self.terms:
            acc[t.key] = acc.get(t.key, 0.0) + t.coeff
            proto.setdefault(t.key, t)
        out = []
        for key in sorted(acc, key=lambda q: (q[0], q[1], q[2], q[3])):
            c = acc[key]
            if abs(c) > MERGE_TOL:
                p = proto[key]
                out.append(Term(c, p.radial_order, p.angular, p.dirac, p.k, p.J))
        return TermWavefunction(tuple(out), canonical=True)

    def is_zero(self) -> bool:
        return len(self.canonicalize().terms) == 0

    def __add__(self, other: "TermWavefunction") -> "TermWavefunction":
        return TermWavefunction(self.terms + other.terms).canonicalize()

    def __sub__(self, other: "TermWavefunction") -> "TermWavefunction":
        return self + other.scale(-1.0)

    def scale(self, c: complex) -> "TermWavefunction":
        return TermWavefunction(
            tuple(Term(c * t.coeff, t.radial_order, t.angular, t.dirac, t.k, t.J) for t in self.terms)
        ).canonicalize()

    def __len__(self) -> int:
        return len(self.terms)


def phi(J: int, S: int, k: float, dirac_combo: Iterable[tuple[str, complex]]) -> TermWavefunction:
    """phi_S(Jk) times a Dirac combination such as [("11", 1), ("22", -1)]."""
    if S == 1 and J == 0:
        raise ValueError("phi_1 needs J > 0")
    return TermWavefunction(
        tuple(Term(complex(c), J, (J, S), lab, k, J) for lab, c in dirac_combo)
    ).canonicalize()


# The eight phi_S x Dirac combinations; the first four are the anomalous ones.
ANOMALOUS = {
    "A0": (0, (("11", 1), ("22", -1))),
    "S0": (0, (("12", 1), ("21", -1))),
    "S1_1": (1, (("11", 1), ("22", 1))),
    "S1_2": (1, (("12", 1), ("21", 1))),
}
COMPLEMENTARY = {
    "A0c": (0, (("11", 1), ("22", 1))),
    "S0c": (0, (("12", 1), ("21", 1))),
    "S1_1c": (1, (("11", 1), ("22", -1))),
    "S1_2c": (1, (("12", 1), ("21", -1))),
}


def combination(name: str, J: int, k: float) -> TermWavefunction:
    table = {**ANOMALOUS, **COMPLEMENTARY}
    S, combo = table[name]
    return phi(J, S, k, combo)


def _swap(label: str, particle: str) -> str:
    i, j = label
    flip = {"1": "2", "2": "1"}
    return flip[i] + j if particle == "e" else i + flip[j]


def _rule(particle: str, S: int, J: int, sign: float = 1.0) -> list[tuple[int, complex]]:
    """(L, coefficient / k) pairs for (sigma . pi) phi_S; sign=-1 flips the rule."""
    a, b = recoupling(J)
    if S == 0:
        pre = -1.0 if particle == "e" else 1.0
        pairs = [(J + 1, a), (J - 1, b)]
    else:
        pre = 1.0
        pairs = [(J + 1, -b), (J - 1, a)]
    return [(L, sign * pre * 1j * c) for L, c in pairs if L >= 0 and c != 0.0]


def apply_sigma_pi(
    particle: str, w: TermWavefunction, dirac_swap: bool = True, sign: float = 1.0
) -> TermWavefunction:
    """Apply sigma_particle . pi term by term.

    With ``dirac_swap`` (the default) the acted particle's Dirac index is
    swapped as well, i.e. the result is alpha_particle . pi.  ``sign=-1``
    flips the rules (a sensitivity control).
    """
    if particle not in ("e", "p"):
        raise ValueError("particle must be 'e' or 'p'")
    out: list[Term] = []
    for t in w.terms:
        L, S = t.angular
        if L != t.J:
            raise RuleNotApplicable(
                f"no sigma.pi rule for [Y^{L} Omega^{S}]^{t.J}; only phi_0 and phi_1 are closed"
            )
        dirac = _swap(t.dirac, particle) if dirac_swap else t.dirac
        for Lnew, c in _rule(particle, S, t.J, sign):
            out.append(Term(t.coeff * t.k * c, Lnew, (Lnew, 1), dirac, t.k, t.J))
    return TermWavefunction(tuple(out)).canonicalize()


def apply_K(w: TermWavefunction) -> TermWavefunction:
    """K = (alpha_e - alpha_p) . pi, mass term omitted."""
    return apply_sigma_pi("e", w) - apply_sigma_pi("p", w)


# ---------------------------------------------------------------------------
# Coordinate-space check of the rules
# ---------------------------------------------------------------------------

_SIG = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _spin_op(particle: str, axis: str) -> np.ndarray:
    s, i = _SIG[axis], np.eye(2)
    return np.kron(s, i) if particle == "e" else np.kron(i, s)


def evaluate_terms(w: TermWavefunction, points: np.ndarray) -> np.ndarray:
    """Pauli 4-spinor value of a single-Dirac-label wavefunction at Cartesian points."""
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    rho = np.sqrt(x * x + y * y + z * z)
    theta = np.arccos(np.clip(z / rho, -1.0, 1.0))
    ph = np.arctan2(y, x)
    out = np.zeros(points.shape[:-1] + (4,), dtype=complex)
    for t in w.terms:
        L, S = t.angular
        radial = spherical_bessel_j(L, t.k * rho)
        out += t.coeff * np.asarray(radial)[..., None] * coupled_harmonic(L, S, t.J)(theta, ph)
    return out


def _sigma_pi_fd(w: TermWavefunction, particle: str, points: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros(points.shape[:-1] + (4,), dtype=complex)
    for n, axis in enumerate("xyz"):
        step = np.zeros(3)
        step[n] = h
        grad = (evaluate_terms(w, points + step) - evaluate_terms(w, points - step)) / (2 * h)
        out += -1j * grad @ _spin_op(particle, axis).T
    return out


@dataclass(frozen=True)
class OracleReport:
    J: int
    k: float
    h: float
    box: float
    residual: float  # max relative residual at h
    residual_half: float  # same at h/2
    order: float  # log2(residual / residual_half)
    flipped_residual: float  # residual with every rule sign flipped, at h
    per_rule: dict = field(default_factory=dict)

    @property
    def converges(self) -> bool:
        return 1.8 <= self.order <= 2.2


def _stencil_points(h: float, box: float, samples: int, seed: int) -> np.ndarray:
    """Interior grid nodes of the cube [-box, box]^3 with spacing h, off the ball rho < 4h."""
    rng = np.random.default_rng(seed)
    n = int(math.floor(box / h)) - 1
    pts = []
    while len(pts) < samples:
        idx = rng.integers(-n, n + 1, size=(4 * samples, 3))
        p = idx * h
        keep = np.linalg.norm(p, axis=1) >= 4 * h
        pts.extend(p[keep])
    return np.array(pts[:samples])


def _residuals(J: int, k: float, h: float, points: np.ndarray, sign: float) -> dict:
    res = {}
    kinds = [0] + ([1] if J >= 1 else [])
    for S in kinds:
        w = phi(J, S, k, [("11", 1)])
        for particle in ("e", "p"):
            lhs = _sigma_pi_fd(w, particle, points, h)
            rhs = evaluate_terms(apply_sigma_pi(particle, w, dirac_swap=False, sign=sign), points)
            scale = np.max(np.abs(rhs))
            res[f"sigma_{particle}.pi phi_{S}"] = float(np.max(np.abs(lhs - rhs)) / scale)
    return res


def finite_difference_oracle(
    J: int, k: float, h: float, box: float, samples: int = 200, seed: int = 0
) -> OracleReport:
    """Compare the sigma . pi rules with central differences of the explicit functions.

    Grid nodes (spacing h) are sampled from the cube of half-width ``box``;
    the derivative at each node is the 3-D central difference, taken again
    with spacing h/2 at the same nodes to read off the order.
    """
    if J < 0 or J > 5:
        raise ValueError("oracle supports 0 <= J <= 5")
    if k * h >= 0.2:
        raise ValueError(f"grid too coarse: k*h = {k * h:.3g} >= 0.2")
    points = _stencil_points(h, box, samples, seed)
    r1 = _residuals(J, k, h, points, 1.0)
    r2 = _residuals(J, k, h / 2, points, 1.0)
    rf = _residuals(J, k, h, points, -1.0)
    res, res_half = max(r1.values()), max(r2.values())
    return OracleReport(
        J=J,
        k=k,
        h=h,
        box=box,
        residual=res,
        residual_half=res_half,
        order=math.log2(res / res_half),
        flipped_residual=max(rf.values()),
        per_rule=r1,
    )
