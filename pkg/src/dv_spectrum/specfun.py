"""Special functions and quadrature used by the DV radial and angular code.

Spherical Bessel functions of integer order, their positive zeros,
normalized associated Legendre functions (orders 0 and 1), real
Clebsch-Gordan coefficients, LS-coupled spherical-harmonic spin functions
with J_z = 0, and composite Gauss-Legendre integration.

Everything here is pure: values are computed on demand and nothing is
cached in mutable module state, so the functions are safe to call from
many threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

MAX_BESSEL_ORDER = 200
MAX_ZERO_COUNT = 10_000

SQRT_HALF = math.sqrt(0.5)


class QuadratureError(RuntimeError):
    """Raised when the panel-doubling integrator fails to converge."""

    def __init__(self, message: str, previous, last):
        super().__init__(f"{message} (previous={previous!r}, last={last!r})")
        self.previous = previous
        self.last = last


# ---------------------------------------------------------------------------
# Spherical Bessel functions
# ---------------------------------------------------------------------------

def _check_order(L: int) -> int:
    if isinstance(L, bool) or int(L) != L:
        raise ValueError(f"Bessel order must be an integer, got {L!r}")
    L = int(L)
    if L < 0 or L > MAX_BESSEL_ORDER:
        raise ValueError(f"Bessel order {L} outside supported range 0..{MAX_BESSEL_ORDER}")
    return L


def _upward(L: int, x: np.ndarray) -> np.ndarray:
    # stable for x >= L
    j_prev = np.sin(x) / x
    if L == 0:
        return j_prev
    j_cur = np.sin(x) / x**2 - np.cos(x) / x
    for n in range(1, L):
        j_prev, j_cur = j_cur, (2 * n + 1) / x * j_cur - j_prev
    return j_cur


def _miller(L: int, x: np.ndarray) -> np.ndarray:
    """Downward recurrence for 0 < x < L, normalized with sum (2n+1) j_n^2 = 1."""
    top = int(max(L, float(np.max(x)))) + 30 + int(4.0 * math.sqrt(max(L, float(np.max(x)))))
    f_next = np.zeros_like(x)
    f_cur = np.full_like(x, 1e-30)
    total = np.zeros_like(x)
    f_L = np.zeros_like(x)
    f_1 = np.zeros_like(x)
    for n in range(top, 0, -1):
        total += (2 * n + 1) * f_cur * f_cur
        if n == L:
            f_L = f_cur.copy()
        if n == 1:
            f_1 = f_cur.copy()
        f_prev = (2 * n + 1) / x * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        big = np.abs(f_cur) > 1e150
        if np.any(big):
            scale = np.where(big, 1e-150, 1.0)
            f_cur *= scale
            f_next *= scale
            f_L *= scale
            f_1 *= scale
            total *= scale * scale
    f_0 = f_cur
    total += f_0 * f_0
    if L == 0:
        f_L = f_0
    magnitude = 1.0 / np.sqrt(total)
    # sign from whichever of j_0, j_1 is better conditioned at x
    j0 = np.sin(x) / x
    j1 = np.sin(x) / x**2 - np.cos(x) / x
    use_j0 = np.abs(j0) >= np.abs(j1)
    ref_exact = np.where(use_j0, j0, j1)
    ref_trial = np.where(use_j0, f_0, f_1)
    sign = np.sign(ref_exact) * np.sign(ref_trial)
    sign = np.where(sign == 0, 1.0, sign)
    return sign * magnitude * f_L


def spherical_bessel_j(L: int, x):
    """Spherical Bessel function j_L(x) for integer ``0 <= L <= 200``.

    ``x`` may be a scalar or an array of non-negative finite values; the
    result has the same shape. Upward recurrence is used where ``x >= L``
    and Miller's downward recurrence below that.
    """
    L = _check_order(L)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("spherical_bessel_j requires finite arguments")
    if np.any(arr < 0):
        raise ValueError("spherical_bessel_j requires x >= 0")
    flat = arr.ravel()
    out = np.zeros_like(flat)
    zero = flat == 0.0
    if L == 0:
        out[zero] = 1.0
    up = (flat >= L) & ~zero
    down = ~up & ~zero
    if np.any(up):
        out[up] = _upward(L, flat[up])
    if np.any(down):
        out[down] = _miller(L, flat[down])
    out = out.reshape(arr.shape)
    if out.ndim == 0:
        return float(out)
    return out


def bessel_zeros(J: int, count: int) -> np.ndarray:
    """First ``count`` positive zeros of j_J, strictly increasing.

    Sign changes are bracketed on a pi/4 scan that starts at J + 1/2 (below
    the first zero of J_{J+1/2}) and each bracket is bisected until the
    interval stops shrinking in floating point.
    """
    J = _check_order(J)
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise ValueError(f"count must be a positive integer, got {count!r}")
    count = int(count)
    if count > MAX_ZERO_COUNT:
        raise ValueError(f"count {count} exceeds {MAX_ZERO_COUNT}")

    step = math.pi / 4
    start = J + 0.5
    n_steps = 4 * (count + J // 2 + 4)
    while True:
        grid = start + step * np.arange(n_steps + 1)
        values = spherical_bessel_j(J, grid)
        positive = values > 0
        idx = np.nonzero(positive[:-1] != positive[1:])[0]
        if idx.size >= count:
            idx = idx[:count]
            break
        n_steps *= 2

    lo = grid[idx].copy()
    hi = grid[idx + 1].copy()
    lo_positive = positive[idx]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        f_mid = spherical_bessel_j(J, mid)
        same = (f_mid > 0) == lo_positive
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Legendre functions and spherical harmonics
# ---------------------------------------------------------------------------

def assoc_legendre(J: int, m: int, zeta, condon_shortley: bool = True):
    """Associated Legendre function P_J^m(zeta) for m in {0, 1}.

    With ``condon_shortley=False`` the (-1)^m phase is dropped, which is
    the convention of Abramowitz & Stegun.
    """
    if m not in (0, 1):
        raise ValueError("only orders m = 0 and m = 1 are supported")
    if J < 0 or int(J) != J:
        raise ValueError(f"degree must be a non-negative integer, got {J!r}")
    if m == 1 and J == 0:
        raise ValueError("P_J^1 requires J >= 1")
    z = np.asarray(zeta, dtype=float)
    if np.any(np.abs(z) > 1.0 + 1e-14):
        raise ValueError("argument must lie in [-1, 1]")
    z = np.clip(z, -1.0, 1.0)

    if m == 0:
        p_prev, p_cur = np.ones_like(z), z.copy()
        if J == 0:
            p_cur = p_prev
        for ell in range(2, J + 1):
            p_prev, p_cur = p_cur, ((2 * ell - 1) * z * p_cur - (ell - 1) * p_prev) / ell
    else:
        s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        p_prev = -s
        p_cur = 3.0 * z * p_prev
        if J == 1:
            p_cur = p_prev
        for ell in range(3, J + 1):
            p_prev, p_cur = p_cur, ((2 * ell - 1) * z * p_cur - ell * p_prev) / (ell - 1)
        if not condon_shortley:
            p_cur = -p_cur
    if p_cur.ndim == 0:
        return float(p_cur)
    return p_cur


def legendre_norm(J: int, m: int) -> float:
    """Normalization A_m^J: sqrt((2J+1)/2) for m=0, -sqrt((2J+1)/(2J(J+1))) for m=1."""
    if m == 0:
        return math.sqrt((2 * J + 1) / 2)
    if m == 1:
        if J < 1:
            raise ValueError("A_1^J requires J >= 1")
        return -math.sqrt((2 * J + 1) / (2 * J * (J + 1)))
    raise ValueError("only orders m = 0 and m = 1 are supported")


def normalized_assoc_legendre(J: int, m: int, zeta, condon_shortley: bool = True):
    """A_m^J P_m^J(zeta), unit-normalized on [-1, 1]."""
    return legendre_norm(J, m) * assoc_legendre(J, m, zeta, condon_shortley)


def spherical_harmonic(L: int, M: int, theta, phi):
    """Y_L^M(theta, phi) with the Condon-Shortley phase, for |M| <= 1."""
    if abs(M) > L:
        raise ValueError(f"|M|={abs(M)} exceeds L={L}")
    if abs(M) > 1:
        raise ValueError("only |M| <= 1 is needed for J_z = 0 coupling")
    zeta = np.cos(np.asarray(theta, dtype=float))
    phi = np.asarray(phi, dtype=float)
    if M == 0:
        return normalized_assoc_legendre(L, 0, zeta) / math.sqrt(2 * math.pi) + 0j * phi
    # Y_L^1 = -A_1^L P_L^1 e^{i phi} / sqrt(2 pi); Y_L^{-1} = -conj(Y_L^1)
    base = -normalized_assoc_legendre(L, 1, zeta) / math.sqrt(2 * math.pi)
    if M == 1:
        return base * np.exp(1j * phi)
    return -base * np.exp(-1j * phi)


# ---------------------------------------------------------------------------
# Clebsch-Gordan coefficients
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def clebsch_gordan(L: int, S: int, J: int, M: int, Sz: int) -> float:
    """Real Clebsch-Gordan coefficient <L M; S Sz | J, M+Sz> (Racah formula).

    Returns 0 when the triangle rule or a projection bound fails.
    """
    Mt = M + Sz
    if min(L, S, J) < 0 or abs(M) > L or abs(Sz) > S or abs(Mt) > J:
        return 0.0
    if J < abs(L - S) or J > L + S:
        return 0.0
    f = math.factorial
    pre = Fraction(
        (2 * J + 1) * f(J + L - S) * f(J - L + S) * f(L + S - J),
        f(L + S + J + 1),
    ) * (f(J + Mt) * f(J - Mt) * f(L - M) * f(L + M) * f(S - Sz) * f(S + Sz))
    total = Fraction(0)
    k_min = max(0, S - J - M, L - J + Sz)
    k_max = min(L + S - J, L - M, S + Sz)
    for k in range(k_min, k_max + 1):
        den = (f(k) * f(L + S - J - k) * f(L - M - k) * f(S + Sz - k)
               * f(J - S + M + k) * f(J - L - Sz + k))
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    value = math.sqrt(pre * total * total)
    return value if total > 0 else -value


# ---------------------------------------------------------------------------
# Two-particle Pauli spin states and coupled harmonics
# ---------------------------------------------------------------------------

_UP = np.array([1.0, 0.0])
_DOWN = np.array([0.0, 1.0])


def omega(S: int, Sz: int) -> np.ndarray:
    """Two-particle spin state Omega^S_{Sz} in the (s_e, s_p) product basis.

    Basis order is (up,up), (up,down), (down,up), (down,down).
    """
    if S == 0 and Sz == 0:
        return SQRT_HALF * (np.kron(_UP, _DOWN) - np.kron(_DOWN, _UP)) + 0j
    if S == 1:
        if Sz == 1:
            return np.kron(_UP, _UP) + 0j
        if Sz == 0:
            return SQRT_HALF * (np.kron(_UP, _DOWN) + np.kron(_DOWN, _UP)) + 0j
        if Sz == -1:
            return np.kron(_DOWN, _DOWN) + 0j
    raise ValueError(f"no spin state with S={S}, Sz={Sz}")


def omega_plus(phi: float = 0.0) -> np.ndarray:
    """Omega^1_+ = (Omega^1_{-1} e^{i phi} + Omega^1_1 e^{-i phi}) / sqrt 2."""
    return SQRT_HALF * (omega(1, -1) * np.exp(1j * phi) + omega(1, 1) * np.exp(-1j * phi))


def omega_minus(phi: float = 0.0) -> np.ndarray:
    """Omega^1_- = (Omega^1_{-1} e^{i phi} - Omega^1_1 e^{-i phi}) / sqrt 2."""
    return SQRT_HALF * (omega(1, -1) * np.exp(1j * phi) - omega(1, 1) * np.exp(-1j * phi))


@dataclass(frozen=True)
class CoupledHarmonic:
    """[Y^L Omega^S]^J_0 = sum_M C(L S J; M, -M) Y^L_M Omega^S_{-M}.

    Calling the object with angle arrays of shape ``s`` returns a complex
    array of shape ``s + (4,)`` over the (s_e, s_p) spin basis.
    """

    L: int
    S: int
    J: int

    def terms(self) -> list[tuple[int, float]]:
        out = []
        for M in range(-min(self.L, self.S), min(self.L, self.S) + 1):
            c = clebsch_gordan(self.L, self.S, self.J, M, -M)
            if c != 0.0:
                out.append((M, c))
        return out

    def __call__(self, theta, phi) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        shape = np.broadcast(theta, phi).shape
        out = np.zeros(shape + (4,), dtype=complex)
        for M, c in self.terms():
            y = np.broadcast_to(spherical_harmonic(self.L, M, theta, phi), shape)
            out += c * y[..., None] * omega(self.S, -M)
        return out


def coupled_harmonic(L: int, S: int, J: int) -> CoupledHarmonic:
    """Build the J_z = 0 coupled harmonic for spin S in {0, 1}."""
    if S not in (0, 1):
        raise ValueError("two-particle spin must be 0 or 1")
    if L < 0 or J < 0 or not (abs(L - S) <= J <= L + S):
        raise ValueError(f"triangle rule fails for L={L}, S={S}, J={J}")
    if not any(c != 0.0 for _, c in CoupledHarmonic(L, S, J).terms()):
        raise ValueError(f"[Y^{L} Omega^{S}]^{J}_0 vanishes identically")
    return CoupledHarmonic(L, S, J)


def coupled_harmonic_closed_form(J: int, S: int, theta, phi) -> np.ndarray:
    """Legendre expansion of [Y^J Omega^S]^J_0.

    S=0: A_0^J P_0^J(cos theta) Omega^0_0 / sqrt(2 pi).
    S=1: A_1^J P_1^J(cos theta) Omega^1_+ / sqrt(2 pi), with P_1^J taken
    without the Condon-Shortley phase (the Abramowitz & Stegun
    convention); with the phase included the same identity carries a -1.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    zeta = np.cos(theta)
    if S == 0:
        radial = normalized_assoc_legendre(J, 0, zeta) / math.sqrt(2 * math.pi)
        return np.asarray(radial)[..., None] * omega(0, 0)
    if S == 1:
        radial = normalized_assoc_legendre(J, 1, zeta, condon_shortley=False) / math.sqrt(2 * math.pi)
        spin = SQRT_HALF * (
            np.exp(1j * phi)[..., None] * omega(1, -1) + np.exp(-1j * phi)[..., None] * omega(1, 1)
        )
        return np.asarray(radial)[..., None] * spin
    raise ValueError("S must be 0 or 1")


# ---------------------------------------------------------------------------
# Composite Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule: ``panel_count`` equal panels, ``order`` points each."""

    panel_count: int
    order: int
    interval: tuple[float, float]

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("order must be >= 2")
        if self.panel_count < 1:
            raise ValueError("panel_count must be >= 1")
        a, b = self.interval
        if not a < b:
            raise ValueError("interval must satisfy a < b")

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        a, b = self.interval
        x, w = _gauss_legendre(self.order)
        edges = np.linspace(a, b, self.panel_count + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return nodes, weights

    def doubled(self) -> "QuadratureRule":
        return QuadratureRule(2 * self.panel_count, self.order, self.interval)


def default_rule(N: int, rho0: float) -> QuadratureRule:
    """4(N+1) panels of order 16 on [0, rho0]."""
    return QuadratureRule(4 * (N + 1), 16, (0.0, float(rho0)))


def integrate(rule: QuadratureRule, f: Callable[[np.ndarray], np.ndarray]):
    """Apply ``rule`` to a vectorized integrand.

    ``f`` receives the 1-D node array and may return values of shape
    ``(n_nodes,)`` or ``(..., n_nodes)``; the last axis is contracted.
    """
    nodes, weights = rule.nodes_weights()
    values = np.asarray(f(nodes))
    if not np.all(np.isfinite(values)):
        raise QuadratureError("integrand not finite on the quadrature nodes", None, None)
    result = values @ weights
    if np.ndim(result) == 0:
        return float(result)
    return result


def integrate_converged(
    rule: QuadratureRule,
    f: Callable[[np.ndarray], np.ndarray],
    rtol: float = 1e-11,
    max_doublings: int = 10,
):
    """Double ``panel_count`` until successive estimates agree to ``rtol``.

    For array-valued integrands the change is measured against the largest
    magnitude entry. Raises :class:`QuadratureError` after ``max_doublings``.
    """
    previous = integrate(rule, f)
    for _ in range(max_doublings):
        rule = rule.doubled()
        current = integrate(rule, f)
        diff = np.max(np.abs(np.asarray(current) - np.asarray(previous)))
        scale = np.max(np.abs(current))
        if diff <= rtol * scale or (scale == 0.0 and diff == 0.0):
            return current
        previous = current
    raise QuadratureError("panel doubling did not converge", previous, current)
