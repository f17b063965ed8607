"""
Command-line surface: coupling sweeps, the balance-estimation protocol,
closed-form vs oracle comparison reports, and single-point precision
summaries, all emitted as plottable CSV with a '#'-prefixed metadata
header.  Output is a deterministic byte stream for fixed inputs (no
timestamps); exit codes are 0 on success, 1 on usage/config errors and 2
when a tuning sweep is inconclusive.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dc_fields, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from . import __version__
from .balance import estimate_jx
from .dynamics import oracle_signal, relaxation_time
from .errors import (
    BridgeConfigError,
    InconclusiveSweepError,
    NoBalanceError,
    NotBalancedError,
    OutOfRegimeError,
)
from .metrology import (
    crb_bound,
    gaussian_qfi,
    homodyne_precision,
    mu_coefficient,
    optimal_homodyne_phase,
    optimal_homodyne_precision,
    precision_report,
)
from .network import BridgeConfig, read_config_file
from .reduction import balanced_eigenvalues, longtime_mean, reduced_drift

__all__ = ["SweepRow", "SweepResult", "run_sweep", "run_balance", "run_precision", "run_compare", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2


@dataclass(frozen=True)
class SweepRow:
    jx: float
    delta_analytic: float | None
    delta_numeric: float | None
    log10_delta: float
    balanced: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    t: float
    alpha: float


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QWBRIDGE_THREADS", "1")))
    except ValueError:
        return 1


def _grid_map(func: Callable[[float], tuple], grid: Sequence[float]) -> list[tuple]:
    workers = _thread_count()
    if workers == 1:
        return [func(x) for x in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, grid))


def _slowest_decay_rate(config: BridgeConfig, jx: float) -> float:
    """-Re of the least-damped reduced eigenvalue at the given coupling."""
    ev = np.linalg.eigvals(reduced_drift(replace(config, jx=jx)))
    return -float(ev.real.max())


def run_sweep(
    config: BridgeConfig,
    alpha: float,
    jx_min: float,
    jx_max: float,
    steps: int,
    horizon_mult: float = 10.0,
    analytic: bool = True,
    numeric: bool = True,
) -> SweepResult:
    """Uncertainty of jx across a coupling grid.

    The analytic column is the balance-point closed form inflated by the
    reduced-model envelope decay exp(-Re E_slow(jx) t): the uncertainty
    penalty for the signal that has leaked away by the measurement time.
    Its minimum sits exactly at the balance point.  The numeric column is
    honest error propagation through the full-model oracle (central
    differences); off balance it also picks up the jx-sensitivity of the
    decay itself, which genuinely lowers the uncertainty there, so its
    minimum is not a balance locator.
    """
    if steps < 3:
        raise BridgeConfigError(f"sweep needs at least 3 steps, got {steps}")
    balanced = config.balanced()
    jx_bal = balanced.jx
    t = horizon_mult * relaxation_time(config)
    delta_bal = optimal_homodyne_precision(balanced, alpha) if analytic else None
    grid = np.linspace(jx_min, jx_max, steps)
    bal_index = int(np.argmin(np.abs(grid - jx_bal))) if jx_min <= jx_bal <= jx_max else -1

    def one(jx: float) -> tuple:
        d_an = d_num = None
        if analytic:
            d_an = delta_bal * math.exp(_slowest_decay_rate(config, jx) * t)
        if numeric:
            d_num = homodyne_precision(
                balanced, None, t, alpha, y=jx - jx_bal, derivative="oracle"
            )
        return d_an, d_num

    results = _grid_map(one, [float(x) for x in grid])
    rows = []
    for i, (jx, (d_an, d_num)) in enumerate(zip(grid, results)):
        primary = d_an if d_an is not None else d_num
        rows.append(
            SweepRow(
                jx=float(jx),
                delta_analytic=d_an,
                delta_numeric=d_num,
                log10_delta=math.log10(primary),
                balanced=(i == bal_index),
            )
        )
    return SweepResult(rows=tuple(rows), t=t, alpha=alpha)


def _config_echo(config: BridgeConfig) -> list[str]:
    lines = []
    for f in sorted(dc_fields(config), key=lambda f: f.name):
        value = getattr(config, f.name)
        if value is not None:
            lines.append(f"# {f.name} = {value!r}")
    return lines


def _open_out(path: str) -> TextIO:
    if path == "-":
        return sys.stdout
    return open(path, "w")


def _emit(out: TextIO, lines: Iterable[str]) -> None:
    for line in lines:
        out.write(line + "\n")


def _header(kind: str, config: BridgeConfig, extra: dict[str, object]) -> list[str]:
    lines = [f"# qwbridge {__version__} {kind}"]
    lines += _config_echo(config)
    for key, value in extra.items():
        lines.append(f"# {key} = {value!r}")
    return lines


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(value)


def write_sweep(out: TextIO, config: BridgeConfig, result: SweepResult) -> None:
    _emit(out, _header("sweep", config, {"alpha": result.alpha, "t": result.t}))
    _emit(out, ["jx,delta_analytic,delta_numeric,log10_delta,balanced"])
    for row in result.rows:
        _emit(out, [
            f"{row.jx!r},{_fmt(row.delta_analytic)},{_fmt(row.delta_numeric)},"
            f"{row.log10_delta!r},{int(row.balanced)}"
        ])


def run_balance(
    config: BridgeConfig,
    alpha: float,
    j3_min: float,
    j3_max: float,
    steps: int,
    horizon_mult: float,
    out: TextIO,
) -> int:
    """Sweep j3, locate the persistent-signal peak, and report the jx estimate.

    Needs a long horizon (hundreds of relaxation times) for the off-balance
    envelope to decay appreciably; short sweeps tilt the profile toward a
    grid boundary and come back inconclusive.
    """
    grid = [float(x) for x in np.linspace(j3_min, j3_max, steps)]
    t = horizon_mult * relaxation_time(config)
    extra = {"alpha": alpha, "t": t, "horizon_mult": horizon_mult}
    try:
        estimate = estimate_jx(config, grid, alpha, t)
    except InconclusiveSweepError as exc:
        lines = _header("balance", config, extra)
        lines.append(f"# inconclusive: {exc}")
        lines.append("j3,magnitude")
        lines += [f"{j3!r},{mag!r}" for j3, mag in getattr(exc, "profile", ())]
        _emit(out, lines)
        return EXIT_INCONCLUSIVE
    extra["jx_estimate"] = estimate.jx_estimate
    extra["j3_peak"] = estimate.j3_peak
    lines = _header("balance", config, extra)
    lines.append("j3,magnitude")
    lines += [f"{j3!r},{mag!r}" for j3, mag in estimate.profile]
    _emit(out, lines)
    return EXIT_OK


def run_precision(
    config: BridgeConfig, alpha: float, horizon_mult: float, out: TextIO
) -> int:
    t = horizon_mult * relaxation_time(config)
    report = precision_report(config.balanced(), alpha, t)
    lines = _header("precision", config, {"alpha": alpha, "t": t})
    lines.append("quantity,value")
    lines.append(f"delta_homodyne,{report.delta_homodyne!r}")
    lines.append(f"delta_homodyne_optimal,{report.delta_homodyne_optimal!r}")
    lines.append(f"qfi,{report.qfi!r}")
    lines.append(f"crb,{report.crb!r}")
    lines.append(f"g,{report.g!r}")
    lines.append(f"optimal_phase,{optimal_homodyne_phase(config.balanced(), t)!r}")
    _emit(out, lines)
    return EXIT_OK


def _rel_dev(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny)


def run_compare(config: BridgeConfig, alpha: float, horizon_mult: float, out: TextIO) -> int:
    """Closed forms against the full-model oracle, one row per quantity."""
    balanced = config.balanced()
    t = horizon_mult * relaxation_time(config)
    eig = balanced_eigenvalues(balanced)
    rows: list[tuple[str, float, float, str]] = []

    rows.append(("eig_dark_im_numeric_vs_printed", eig.dark.imag, eig.dark_printed.imag,
                 "printed-formula mismatch (matches damped branch instead)"
                 if eig.printed_formula_mismatch else ""))
    if eig.dark_swapped is not None:
        rows.append(("eig_dark_im_numeric_vs_swapped", eig.dark.imag, eig.dark_swapped.imag,
                     "frequency-swapped variant of the printed formula"))
    rows.append(("eig_damped_re_numeric_vs_printed", eig.damped.real, eig.damped_printed.real, ""))

    a2_oracle, a3_oracle, _ = oracle_signal(balanced, alpha, t)
    a2_formula, a3_formula = longtime_mean(balanced, alpha, 0.0, t)
    rows.append(("longtime_abs_a2_oracle_vs_formula", abs(a2_oracle), abs(a2_formula), ""))
    rows.append(("longtime_abs_a3_oracle_vs_formula", abs(a3_oracle), abs(a3_formula), ""))

    delta_opt = optimal_homodyne_precision(balanced, alpha)
    delta_num = homodyne_precision(balanced, None, t, alpha, derivative="oracle")
    rows.append(("delta_optimal_formula_vs_oracle", delta_opt, delta_num, ""))

    bound, g = crb_bound(balanced, alpha)
    rows.append(("crb_vs_inverse_sqrt_qfi", bound, 1.0 / math.sqrt(gaussian_qfi(balanced, alpha)), ""))
    rows.append(("g_coefficient", g, g, ""))

    lines = _header("compare", config, {
        "alpha": alpha,
        "t": t,
        "abs_mu": abs(mu_coefficient(balanced)),
        "printed_formula_mismatch": eig.printed_formula_mismatch,
    })
    lines.append("quantity,value_a,value_b,rel_deviation,note")
    for name, a, b, note in rows:
        lines.append(f"{name},{a!r},{b!r},{_rel_dev(a, b)!r},{note}")
    _emit(out, lines)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwbridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--alpha", type=float, default=None,
                       help="probe amplitude (overrides the config file)")
        p.add_argument("--horizon-mult", type=float, default=10.0,
                       help="measurement time as a multiple of the relaxation time")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    p_sweep = sub.add_parser("sweep", help="uncertainty of jx across a coupling grid")
    common(p_sweep)
    p_sweep.add_argument("--jx-min", type=float, required=True)
    p_sweep.add_argument("--jx-max", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, default=201)
    cols = p_sweep.add_mutually_exclusive_group()
    cols.add_argument("--analytic-only", action="store_true")
    cols.add_argument("--numeric-only", action="store_true")

    p_bal = sub.add_parser("balance", help="estimate jx by tuning j3 to balance")
    common(p_bal)
    p_bal.add_argument("--j3-min", type=float, required=True)
    p_bal.add_argument("--j3-max", type=float, required=True)
    p_bal.add_argument("--steps", type=int, default=21)

    p_prec = sub.add_parser("precision", help="precision report at the balance point")
    common(p_prec)

    p_cmp = sub.add_parser("compare", help="closed forms vs the full-model oracle")
    common(p_cmp)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config, alpha_file = read_config_file(args.config)
    except (OSError, BridgeConfigError) as exc:
        print(f"qwbridge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    alpha = args.alpha if args.alpha is not None else alpha_file
    if alpha is None:
        print("qwbridge: no alpha in config file; pass --alpha", file=sys.stderr)
        return EXIT_USAGE

    try:
        out = _open_out(args.out)
    except OSError as exc:
        print(f"qwbridge: cannot open output: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "sweep":
            result = run_sweep(
                config, alpha, args.jx_min, args.jx_max, args.steps,
                horizon_mult=args.horizon_mult,
                analytic=not args.numeric_only,
                numeric=not args.analytic_only,
            )
            write_sweep(out, config, result)
            return EXIT_OK
        if args.command == "balance":
            return run_balance(config, alpha, args.j3_min, args.j3_max, args.steps,
                               args.horizon_mult, out)
        if args.command == "precision":
            return run_precision(config, alpha, args.horizon_mult, out)
        if args.command == "compare":
            return run_compare(config, alpha, args.horizon_mult, out)
        raise AssertionError(f"unhandled command {args.command}")
    except (BridgeConfigError, NoBalanceError, NotBalancedError,
            OutOfRegimeError, ZeroDivisionError) as exc:
        print(f"qwbridge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
