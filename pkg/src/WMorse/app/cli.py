# src/WMorse/app/cli.py
"""
Command-line front end.

    wmorse spectrum      --g 1 --k 0 --levels 6 [--out spectrum.json]
    wmorse eigenfunction --g 1 --k 0 --levels 6 --level 3 --xmax 3 --samples 601
    wmorse verify        --suite all|whittaker|spectrum|crum|ortho|wkb|morse [--L 2]
    wmorse deform        --g 1 --k -0.5 (--crum L | --L L | --krein-adler 1,2) --out DIR
    wmorse wkb           --g 1 --k 0 --levels 30 [--exact]

Data goes to --out (or stdout); logs go to stderr. Exit codes: 0 ok,
1 failed check, 2 config error, 3 solver failure, 4 level out of range,
5 inadmissible deletion set.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from WMorse.config.constants import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_INADMISSIBLE,
    EXIT_LEVEL_RANGE,
    EXIT_OK,
    EXIT_SOLVER,
)
from WMorse.config.run_config import RunConfig, build_config, load_config_file
from WMorse.core.analysis.wkb import wkb_invert
from WMorse.core.oracle.finite_difference import symmetric_half_line_spectrum
from WMorse.core.spectrum.eigenfunctions import eigenfunction_sampled
from WMorse.core.spectrum.potential import symmetric_potential
from WMorse.core.spectrum.solver import compute_spectrum
from WMorse.core.transforms.deformation import DeletionSet, DeformedSystem, deformation_manifest
from WMorse.core.types import EigenLevel, OrderKind, symmetric_grid
from WMorse.core.verification.suites import SUITES, run_suite
from WMorse.utils.errors import (
    ConfigError,
    DomainError,
    InadmissibleSet,
    IndexOutOfSpectrum,
    OracleError,
    WMorseError,
)
from WMorse.utils.io_utils import dumps_json, fmt_float, write_csv, write_json
from WMorse.utils.logging_utils import console_log, init_console, safe_log

LOG = console_log


# ---- output helpers ----

def _emit_json(cfg: RunConfig, payload: Any) -> None:
    if cfg.output.path is None:
        sys.stdout.write(dumps_json(payload))
    else:
        write_json(cfg.output.path, payload)
        safe_log(LOG, f"[DONE] wrote {cfg.output.path}")


def _emit_csv(cfg: RunConfig, header: Sequence[str], rows: List[Sequence[float]]) -> None:
    if cfg.output.path is None:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(fmt_float(v) for v in row) + "\n")
    else:
        write_csv(cfg.output.path, header, rows)
        safe_log(LOG, f"[DONE] wrote {cfg.output.path}")


def level_record(lv: EigenLevel) -> Dict[str, Any]:
    return {
        "index": lv.index,
        "parity": lv.parity.value,
        "order_kind": lv.order.kind.value,
        "order_value": lv.order.value,
        "energy": lv.energy,
        "residual": lv.residual,
    }


def _spectrum(cfg: RunConfig, n_levels: Optional[int] = None) -> List[EigenLevel]:
    return compute_spectrum(
        cfg.params,
        n_levels or cfg.n_levels,
        tol=cfg.tolerances.root_tol,
        ode_tol=cfg.tolerances.ode_tol,
        log_fn=LOG,
    )


# ---- subcommands ----

def cmd_spectrum(cfg: RunConfig) -> int:
    params = cfg.params
    levels = _spectrum(cfg)
    comparison: List[Dict[str, Any]] = []
    try:
        oracle = symmetric_half_line_spectrum(lambda x: symmetric_potential(params, x), len(levels), log_fn=LOG)
        for lv, e in zip(levels, oracle):
            comparison.append({"index": lv.index, "fd_energy": e, "rel_error": abs(lv.energy - e) / max(abs(e), 1e-300)})
    except OracleError as e:
        safe_log(LOG, f"[WARN] oracle comparison skipped: {e}")

    if cfg.output.format == "csv":
        fd = {c["index"]: c for c in comparison}
        rows = [
            [lv.index, lv.parity.sign, lv.order.value, lv.energy, lv.residual,
             fd.get(lv.index, {}).get("fd_energy", float("nan")), fd.get(lv.index, {}).get("rel_error", float("nan"))]
            for lv in levels
        ]
        _emit_csv(cfg, ["index", "parity_sign", "order_value", "energy", "residual", "fd_energy", "rel_error"], rows)
    else:
        _emit_json(cfg, {"params": params.as_dict(), "levels": [level_record(lv) for lv in levels], "oracle_comparison": comparison})
    return EXIT_OK


def cmd_eigenfunction(cfg: RunConfig, level_index: Optional[int]) -> int:
    if level_index is None:
        raise ConfigError("eigenfunction needs --level")
    if not 0 <= level_index < cfg.n_levels:
        raise IndexOutOfSpectrum(f"level {level_index} outside the {cfg.n_levels} computed level(s); raise --levels")
    levels = _spectrum(cfg)
    level = levels[level_index]
    grid = symmetric_grid(cfg.grid.x_max, cfg.grid.n_samples)
    f = eigenfunction_sampled(cfg.params, level, grid)
    if cfg.output.format == "json":
        _emit_json(cfg, {
            "params": cfg.params.as_dict(),
            "level": level_record(level),
            "x": f.grid,
            "psi": f.values,
            "dpsi": f.derivs,
        })
    else:
        _emit_csv(cfg, ["x", "psi", "dpsi"], [list(r) for r in zip(f.grid, f.values, f.derivs)])
    return EXIT_OK


def cmd_verify(cfg: RunConfig, suite: str, L: Optional[int]) -> int:
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite '{suite}' (choose from all, {', '.join(SUITES)})")
    report = run_suite(suite, L=L, log_fn=LOG)
    _emit_json(cfg, report.as_dict())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _deletion_set(crum: Optional[int], krein_adler: Optional[str]) -> DeletionSet:
    if (crum is None) == (krein_adler is None):
        raise ConfigError("deform needs exactly one of --crum/--L or --krein-adler")
    try:
        return DeletionSet.crum(crum) if crum is not None else DeletionSet.parse(krein_adler or "")
    except DomainError as e:
        raise ConfigError(str(e)) from e


def cmd_deform(cfg: RunConfig, crum: Optional[int], krein_adler: Optional[str]) -> int:
    dset = _deletion_set(crum, krein_adler)
    bad = dset.violating_m()
    if bad is not None:
        raise InadmissibleSet(f"deletion set {dset}: m={bad} violates positivity", violating_m=bad)

    out_dir = cfg.output.path or Path("deform_out")
    levels = _spectrum(cfg, max(cfg.n_levels, max(dset.labels) + 2))
    system = DeformedSystem(cfg.params, dset, levels, log_fn=LOG)
    grid = symmetric_grid(cfg.grid.x_max, cfg.grid.n_samples)

    v = system.potential(grid)
    write_csv(out_dir / "potential.csv", ["x", "V_deformed"], [list(r) for r in zip(v.grid, v.values)])
    files = ["potential.csv"]
    for lv in system.remaining:
        f = system.eigenfunction(lv.index, grid)
        name = f"level_{lv.index}.csv"
        write_csv(out_dir / name, ["x", "psi", "dpsi"], [list(r) for r in zip(f.grid, f.values, f.derivs)])
        files.append(name)

    manifest = deformation_manifest(system)
    manifest["files"] = files
    manifest["grid"] = {"x_max": cfg.grid.x_max, "n_samples": cfg.grid.n_samples}
    write_json(out_dir / "manifest.json", manifest)
    safe_log(LOG, f"[DONE] {len(files)} file(s) + manifest in {out_dir}")
    return EXIT_OK


def cmd_wkb(cfg: RunConfig, exact: bool) -> int:
    params = cfg.params
    rows: List[Dict[str, Any]] = []
    computed = {lv.index: lv for lv in _spectrum(cfg)} if exact else {}
    for n in range(cfg.n_levels):
        row: Dict[str, Any] = {"n": n, "nu_wkb": wkb_invert(params, n)}
        lv = computed.get(n)
        if lv is not None and lv.order.kind is OrderKind.IMAGINARY:
            row["nu_exact"] = lv.order.value
            row["gap"] = row["nu_wkb"] - lv.order.value
        rows.append(row)

    if cfg.output.format == "csv":
        nan = float("nan")
        _emit_csv(
            cfg,
            ["n", "nu_wkb", "nu_exact", "gap"],
            [[r["n"], r["nu_wkb"], r.get("nu_exact", nan), r.get("gap", nan)] for r in rows],
        )
    else:
        _emit_json(cfg, {"params": params.as_dict(), "rows": rows})
    return EXIT_OK


# ---- argument parsing ----

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmorse",
        description="Spectra, eigenfunctions and Crum/Krein-Adler deformations of the symmetric Morse potential.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", type=float, default=None, help="coupling g > 0")
    common.add_argument("--k", type=float, default=None, help="shape parameter k = h + 1/2")
    common.add_argument("--levels", type=int, default=None, help="number of levels to compute")
    common.add_argument("--xmax", type=float, default=None, help="sample grid half-width")
    common.add_argument("--samples", type=int, default=None, help="sample count (odd puts x = 0 on the grid)")
    common.add_argument("--out", type=Path, default=None, help="output file (directory for deform)")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    common.add_argument("--config", type=Path, default=None, help="JSON run configuration")

    sub.add_parser("spectrum", parents=[common], help="discrete spectrum with oracle comparison")
    p = sub.add_parser("eigenfunction", parents=[common], help="sample one normalised eigenfunction")
    p.add_argument("--level", type=int, default=None, help="level index m")
    p = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    p.add_argument("--suite", default="all", help=f"all | {' | '.join(SUITES)}")
    p.add_argument("--L", type=int, default=None, help="Crum depth for the crum suite")
    p = sub.add_parser("deform", parents=[common], help="Crum or Krein-Adler deformation")
    p.add_argument("--crum", type=int, default=None, help="delete levels 0..L-1")
    p.add_argument("--L", type=int, default=None, help="same as --crum")
    p.add_argument("--krein-adler", dest="krein_adler", default=None, help="comma-separated deletion set, e.g. 1,2")
    p = sub.add_parser("wkb", parents=[common], help="WKB level orders, optionally against computed ones")
    p.add_argument("--exact", action="store_true", help="also compute the levels and report the gap")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else None
    fmt = args.format
    if fmt is None and args.command == "eigenfunction" and not (file_values or {}).get("output", {}).get("format"):
        fmt = "csv"
    return build_config(file_values, {
        "g": args.g,
        "k": args.k,
        "n_levels": args.levels,
        "x_max": args.xmax,
        "n_samples": args.samples,
        "path": args.out,
        "format": fmt,
    })


def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    if args.command == "spectrum":
        return cmd_spectrum(cfg)
    if args.command == "eigenfunction":
        return cmd_eigenfunction(cfg, args.level)
    if args.command == "verify":
        return cmd_verify(cfg, args.suite, args.L)
    if args.command == "deform":
        crum = args.crum if args.crum is not None else args.L
        return cmd_deform(cfg, crum, args.krein_adler)
    if args.command == "wkb":
        return cmd_wkb(cfg, args.exact)
    raise ConfigError(f"unknown command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    init_console()
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except ConfigError as e:
        safe_log(LOG, f"[ERROR] config: {e}")
        return EXIT_CONFIG
    except IndexOutOfSpectrum as e:
        safe_log(LOG, f"[ERROR] {e}")
        return EXIT_LEVEL_RANGE
    except InadmissibleSet as e:
        safe_log(LOG, f"[ERROR] {e}")
        return EXIT_INADMISSIBLE
    except WMorseError as e:
        safe_log(LOG, f"[ERROR] {type(e).__name__}: {e}")
        return EXIT_SOLVER
