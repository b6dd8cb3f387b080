"""Command-line driver: figure data, verification suites, boost sweeps.

    dv-spectrum figures     [--J 10 --N 40 --rho0 1e-4 --stride 4 --emit-svg]
    dv-spectrum verify      [--suite spinor|kinetic|boost|radial|all]
    dv-spectrum boost-sweep [--beta B --theta T]
    dv-spectrum basis

Exit codes: 0 success, 1 failed check or numerical failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import boost as bst
from . import checks
from . import radial as rad
from . import spinor as sp
from .specfun import QuadratureError, QuadratureRule

POTENTIALS = ("coulomb", "dv_heavy", "dv_light")
SUITE_NAMES = ("spinor", "kinetic", "boost", "radial", "all")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    J: int = 10
    N: int = 40
    rho0: float = 1e-4
    potential: str = "coulomb"
    quad_panels: Optional[int] = None  # default 4 (N + 1)
    quad_order: int = 16
    output_dir: str = "."
    emit_svg: bool = False
    boost_beta: Optional[float] = None
    theta_i: Optional[float] = None
    stride: int = 4
    samples: int = 1000

    def validate(self) -> "RunConfig":
        if not isinstance(self.J, int) or self.J < 0 or self.J > 200:
            raise ConfigError(f"J must be an integer in [0, 200], got {self.J!r}")
        if not isinstance(self.N, int) or not 1 <= self.N <= 1000:
            raise ConfigError(f"N must be an integer in [1, 1000], got {self.N!r}")
        if not (isinstance(self.rho0, (int, float)) and self.rho0 > 0 and math.isfinite(self.rho0)):
            raise ConfigError(f"rho0 must be a positive number, got {self.rho0!r}")
        if self.potential not in POTENTIALS:
            raise ConfigError(f"potential must be one of {POTENTIALS}, got {self.potential!r}")
        if self.quad_panels is not None and (not isinstance(self.quad_panels, int) or self.quad_panels < 1):
            raise ConfigError("quad_panels must be a positive integer")
        if not isinstance(self.quad_order, int) or self.quad_order < 2:
            raise ConfigError("quad_order must be an integer >= 2")
        if not isinstance(self.stride, int) or self.stride < 1:
            raise ConfigError("stride must be a positive integer")
        if not isinstance(self.samples, int) or self.samples < 2:
            raise ConfigError("samples must be an integer >= 2")
        if self.boost_beta is not None and not 0.0 <= self.boost_beta < 1.0:
            raise ConfigError("boost_beta must lie in [0, 1)")
        if self.theta_i is not None and not 0.0 <= self.theta_i <= math.pi:
            raise ConfigError("theta_i must lie in [0, pi]")
        return self

    def quadrature(self) -> QuadratureRule:
        panels = self.quad_panels if self.quad_panels is not None else 4 * (self.N + 1)
        return QuadratureRule(panels, self.quad_order, (0.0, float(self.rho0)))


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "rho0" in data and isinstance(data["rho0"], int):
        data["rho0"] = float(data["rho0"])
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config)
    overrides = {
        "J": args.J, "N": args.N, "rho0": args.rho0, "potential": args.potential,
        "stride": args.stride, "output_dir": args.output_dir,
        "boost_beta": getattr(args, "beta", None), "theta_i": getattr(args, "theta", None),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "emit_svg", False):
        values["emit_svg"] = True
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _workers() -> int:
    try:
        return rad.worker_count()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def figure_samples(cfg: RunConfig) -> np.ndarray:
    """Log-spaced radii over three decades below rho0, ending at rho0."""
    return cfg.rho0 * np.logspace(-3.0, 0.0, cfg.samples)


def cmd_figures(cfg: RunConfig) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    basis = rad.build_basis(cfg.J, cfg.N, cfg.rho0)
    pot = rad.potential_by_name(cfg.potential)
    rep = rad.compare_numeric_analytic(basis, pot, cfg.quadrature(), _workers())

    rho = figure_samples(cfg)
    shown = [i for i in range(1, cfg.N + 1) if i % cfg.stride == 0]
    header = ["rho"]
    columns = []
    for i in shown:
        header += [f"R2_analytic_{i}", f"R2_numeric_{i}"]
        columns.append(rad.evaluate_radial(rep.analytic[i - 1], rho) ** 2)
        columns.append(rad.evaluate_radial(rep.numeric[i - 1], rho) ** 2)
    write_csv(out / "fig1_wavefunctions.csv", header,
              zip(rho, *columns) if columns else ([r] for r in rho))
    write_csv(out / "fig2_energies.csv", ["i", "rho_i", "E_numeric", "E_analytic", "rel_diff"],
              ((r.i, r.rho_i, r.e_numeric, r.e_analytic, r.rel_diff) for r in rep.rows))
    if cfg.emit_svg:
        _write_svgs(out, cfg, rho, shown, columns, rep)
    print(f"wrote {out / 'fig1_wavefunctions.csv'} and {out / 'fig2_energies.csv'}")
    return 0


def _write_svgs(out: Path, cfg: RunConfig, rho, shown, columns, rep) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "dv-spectrum"
    meta = {"Date": None}

    fig, ax = plt.subplots(figsize=(7, 4))
    for n, i in enumerate(shown):
        line, = ax.plot(rho, columns[2 * n], lw=1.0)
        ax.plot(rho, columns[2 * n + 1], lw=1.0, ls="--", color=line.get_color())
    ax.set_xscale("log")
    ax.set_xlabel("rho (bohr)")
    ax.set_ylabel("R_i^2 (1/bohr)")
    ax.set_title(f"J={cfg.J}, N={cfg.N}: analytic (solid) and numeric (dashed)")
    fig.tight_layout()
    fig.savefig(out / "fig1_wavefunctions.svg", metadata=meta)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4))
    x = [r.rho_i for r in rep.rows]
    ax.plot(x, [r.e_analytic for r in rep.rows], "-", label="Phi(rho_i)")
    ax.plot(x, [r.e_numeric for r in rep.rows], "o", ms=3, label="eigenvalues")
    ax.set_xscale("log")
    ax.set_xlabel("rho_i (bohr)")
    ax.set_ylabel("E (hartree)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "fig2_energies.svg", metadata=meta)
    plt.close(fig)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def run_suites(cfg: RunConfig, suite: str) -> list[checks.Check]:
    names = ["spinor", "kinetic", "boost", "radial"] if suite == "all" else [suite]
    out: list[checks.Check] = []
    for name in names:
        if name == "radial":
            out += checks.radial_suite(cfg.J, cfg.N, cfg.rho0, _workers())
        elif name == "kinetic":
            out += checks.kinetic_suite(cfg.J)
        elif name == "boost":
            out += checks.boost_suite()
        else:
            out += checks.spinor_suite()
    return out


def cmd_verify(cfg: RunConfig, suite: str, report: Optional[str]) -> int:
    start = time.perf_counter()
    results = run_suites(cfg, suite)
    payload = {
        "suite": suite,
        "config": asdict(cfg),
        "elapsed_s": time.perf_counter() - start,
        "passed": all(c.passed for c in results),
        "checks": [c.to_dict() for c in results],
    }
    text = json.dumps(payload, indent=2)
    if report:
        Path(report).parent.mkdir(parents=True, exist_ok=True)
        Path(report).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0 if payload["passed"] else 1


# ---------------------------------------------------------------------------
# boost-sweep
# ---------------------------------------------------------------------------

SWEEP_THETAS = tuple(np.linspace(0.0, math.pi / 2, 7))
SWEEP_BETAS = (0.0, 0.2, 0.4, 0.6, math.sqrt(3.0) / 2.0, 0.95)


def sweep_rows(rho_i: float, thetas, betas):
    for theta in thetas:
        for beta in betas:
            gp = bst.BoostParams(float(beta))
            heavy = bst.boost_dv_state(bst.directed_state(sp.A0, rho_i, float(theta)), gp)
            # the spin-1 angular delta vanishes on the z axis; nudge off it
            light_rest = bst.directed_state(sp.S1_1, rho_i, max(float(theta), 1e-3))
            light = bst.boost_dv_state(light_rest, gp)
            raw, rest = heavy.raw_spinor, heavy.rest.spinor
            adj = abs(bst.adjoint_expectation(np.eye(sp.DIM), raw)
                      - bst.adjoint_expectation(np.eye(sp.DIM), rest))
            a0 = abs(bst.conjugate_expectation(sp.ALPHA0_SQ, raw)
                     - bst.conjugate_expectation(sp.ALPHA0_SQ, rest))
            yield (
                theta, beta, gp.gamma, gp.beta_prime, gp.gamma_prime,
                heavy.state.rho_i, heavy.state.theta_i,
                heavy.rest.mass, heavy.state.mass, light.state.mass, adj, a0,
            )


def cmd_boost_sweep(cfg: RunConfig) -> int:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    basis = rad.build_basis(cfg.J, cfg.N, cfg.rho0)
    rho_i = float(basis.grid[(cfg.N - 1) // 2])
    thetas = SWEEP_THETAS if cfg.theta_i is None else (cfg.theta_i,)
    betas = SWEEP_BETAS if cfg.boost_beta is None else (cfg.boost_beta,)
    header = [
        "theta_i", "beta", "gamma", "beta_prime", "gamma_prime", "rho_i_prime", "theta_i_prime",
        "M_heavy", "M_heavy_prime", "M_light_prime", "adjoint_norm_residual", "alpha0_sq_residual",
    ]
    write_csv(out / "boost_sweep.csv", header, sweep_rows(rho_i, thetas, betas))
    print(f"wrote {out / 'boost_sweep.csv'} (rho_i = {rho_i:.17g} bohr)")
    return 0


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

def cmd_basis(cfg: RunConfig) -> int:
    basis = rad.build_basis(cfg.J, cfg.N, cfg.rho0)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["n", "k_n", "N_Jn", "rho_n"])
    for n in range(basis.N):
        w.writerow([n + 1, _fmt(basis.k[n]), _fmt(basis.norms[n]), _fmt(basis.grid[n])])
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file with RunConfig keys; flags override it")
    common.add_argument("--J", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--rho0", type=float, help="box radius in bohr")
    common.add_argument("--potential", choices=POTENTIALS)
    common.add_argument("--stride", type=int, help="emit every stride-th wavefunction (default 4)")
    common.add_argument("--output-dir", dest="output_dir")

    parser = argparse.ArgumentParser(prog="dv-spectrum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figures", parents=[common], help="write Fig. 1/2 data as CSV")
    p.add_argument("--emit-svg", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="run invariant suites")
    p.add_argument("--suite", choices=SUITE_NAMES, default="all")
    p.add_argument("--report", help="also write the JSON report to this path")

    p = sub.add_parser("boost-sweep", parents=[common], help="moving-frame masses over (theta, beta)")
    p.add_argument("--beta", type=float)
    p.add_argument("--theta", type=float, help="theta_i in radians")

    sub.add_parser("basis", parents=[common], help="print k_n, N_Jn and the DV grid")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        if args.command == "figures":
            return cmd_figures(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite, args.report)
        if args.command == "boost-sweep":
            return cmd_boost_sweep(cfg)
        return cmd_basis(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, rad.EigensolverError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
