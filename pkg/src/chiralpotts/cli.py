"""Command-line front end.

Usage:
    chiralpotts verify --n 3 --len 4 --lambda 0.5
    chiralpotts correlations --n 2 --len 2 --lambda 0 --which all --output csv
    chiralpotts spectrum --n 3 --len 5 --which k=1
    chiralpotts correlations --n 3 --len 4 --lambda-start 0.1 --lambda-stop 1.9 --lambda-steps 10 --out sweep.json
    chiralpotts negative-control --n 3 --len 3 --seed 7
    chiralpotts --fm-conjecture

Exit status: 0 success, 1 verification failure, 2 usage error, 3 dimension
budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .correlations import correlation_table, negative_control
from .exceptions import ChainError, DimensionBudgetError
from .model import build_hamiltonian, build_translation
from .operators import ModelParams
from .records import (
    correlation_block,
    dumps_csv,
    dumps_json,
    dumps_summary_csv,
    eigenvector_block,
    make_metadata,
    params_block,
    spectrum_block,
    summary_row,
)
from .spectra import assemble_simultaneous, select_ground_states
from .tolerances import Tolerances
from .verify import run_verification

log = logging.getLogger("chiralpotts")

MODES = ("spectrum", "correlations", "verify", "negative-control")
DEFAULT_COUPLING = 0.5
FM_LENGTHS = (4, 6, 8)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    n_states: int
    lengths: tuple[int, ...]
    couplings: tuple[float, ...]
    mode: str = "correlations"
    which: str = "ground"
    output_format: str = "json"
    output_path: Path | None = None
    seed: int = 0
    tolerances: Tolerances = field(default_factory=Tolerances)
    coupling_default: bool = False
    fm_conjecture: bool = False
    timestamp: bool = True

    @property
    def is_sweep(self) -> bool:
        return len(self.couplings) * len(self.lengths) > 1

    @property
    def label(self) -> str:
        return "fm-conjecture" if self.fm_conjecture else self.mode


def _select(report, which: str):
    """(index, eigenvector) pairs picked by ``--which``."""
    indexed = list(enumerate(report.eigenvectors))
    if which == "all":
        return indexed
    if which == "ground":
        ground = set(map(id, select_ground_states(report)))
        return [(i, ev) for i, ev in indexed if id(ev) in ground]
    k = int(which.split("=", 1)[1]) % report.params.length
    return [(i, ev) for i, ev in indexed if ev.momentum == k]


def _correlation_blocks(params, chosen, tol):
    blocks, sym, mid = [], 0.0, None
    for i, ev in chosen:
        table = correlation_table(ev, params, i)
        blocks.append(correlation_block(ev, table, tol))
        sym = max(sym, table.max_symmetry_residual)
        if table.midpoint_imag is not None:
            mid = max(mid or 0.0, table.max_midpoint_imag)
    return blocks, sym, mid


def run_point(params: ModelParams, config: RunConfig) -> dict:
    """One OutputRecord for a single (N, L, lambda) point."""
    tol = config.tolerances
    record = {"params": params_block(params)}
    if config.mode == "verify":
        result = run_verification(params, tol, config.seed)
        report = result.report
        record["spectrum"] = spectrum_block(report)
        record["checks"] = [c.as_dict() for c in result.checks]
        record["max_symmetry_residual"] = max(tb.max_symmetry_residual for tb in result.tables)
        mids = [tb.max_midpoint_imag for tb in result.tables if tb.midpoint_imag is not None]
        record["max_midpoint_imag"] = max(mids) if mids else None
        ground = select_ground_states(report, tol.degeneracy)
        record["eigenvectors"] = [
            correlation_block(ev, result.tables[i], tol) for i, ev in enumerate(ground)
        ]
        record["passed"] = result.passed
        for c in result.failures():
            log.error("check %s failed: %s %s %s", c.name, c.value, c.comparison, c.tolerance)
        return record

    bundle = build_hamiltonian(params, tol.hermitian)
    t = build_translation(params)
    report = assemble_simultaneous(params, bundle, t, tol.residual, tol.degeneracy, tol.leakage)
    record["spectrum"] = spectrum_block(report)
    chosen = _select(report, config.which)

    if config.mode == "spectrum":
        record["eigenvectors"] = [eigenvector_block(i, ev) for i, ev in chosen]
        record["passed"] = True
    elif config.mode == "negative-control":
        nc = negative_control(params, bundle, config.seed, threshold=tol.negative_control, report=report)
        record["negative_control"] = {
            "seed": nc.seed,
            "threshold": nc.threshold,
            "attempts": list(nc.attempts),
            "control_residual": nc.control_residual,
            "passed": nc.passed,
        }
        record["max_symmetry_residual"] = nc.control_residual
        record["passed"] = nc.passed
        if not nc.passed:
            log.warning("negative control stayed below %g after %d attempts", nc.threshold, len(nc.attempts))
    else:
        blocks, sym, mid = _correlation_blocks(params, chosen, tol)
        record["eigenvectors"] = blocks
        record["max_symmetry_residual"] = sym
        record["max_midpoint_imag"] = mid
        record["passed"] = all(b["passed"]["symmetry"] and b["passed"]["midpoint"] is not False for b in blocks)
    return record


def run(config: RunConfig) -> tuple[int, dict]:
    records = []
    for length in config.lengths:
        for coupling in config.couplings:
            params = ModelParams(config.n_states, length, coupling)
            log.info("running %s for N=%d L=%d lambda=%.17g", config.label, params.n_states, length, coupling)
            records.append(run_point(params, config))
    document = {
        "metadata": make_metadata(config.label, config.seed, config.tolerances,
                                  coupling_default=config.coupling_default, timestamp=config.timestamp),
        "records": records,
        "summary": [summary_row(r) for r in records],
    }
    gated = config.mode == "verify" or config.fm_conjecture
    status = EXIT_FAIL if gated and not all(r["passed"] for r in records) else EXIT_OK
    return status, document


def write_outputs(document: dict, config: RunConfig) -> None:
    if config.output_format == "json":
        body, summary, suffix = dumps_json(document), None, ".json"
        if config.is_sweep:
            summary = dumps_json({"metadata": document["metadata"], "summary": document["summary"]})
    else:
        body, suffix = dumps_csv(document), ".csv"
        summary = dumps_summary_csv(document) if config.is_sweep else None
    if config.output_path is None:
        sys.stdout.write(body)
        return
    path = config.output_path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(body)
    if summary is not None:
        path.with_name(path.stem + ".summary" + suffix).write_text(summary)


_TOL_RE = re.compile(r"^--tol-([A-Za-z_-]+)(?:=(.*))?$")


def _parse_tolerance_flags(extras: list[str], parser: argparse.ArgumentParser) -> dict[str, float]:
    overrides = {}
    i = 0
    while i < len(extras):
        m = _TOL_RE.match(extras[i])
        if not m:
            parser.error(f"unrecognized arguments: {' '.join(extras[i:])}")
        key, value = m.group(1).replace("-", "_"), m.group(2)
        if value is None:
            if i + 1 >= len(extras):
                parser.error(f"{extras[i]} needs a value")
            i += 1
            value = extras[i]
        try:
            overrides[key] = float(value)
        except ValueError:
            parser.error(f"tolerance {key} must be a number, got {value!r}")
        i += 1
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralpotts",
        description="Exact diagonalization and two-point symmetry checks for the periodic "
                    "superintegrable chiral Potts chain.",
        epilog="Tolerances: --tol-KEY=VAL with KEY in {%s}. CHAIN_DIM_BUDGET caps N**L (default 2**20)."
               % ", ".join(Tolerances().as_dict()),
    )
    parser.add_argument("mode_arg", nargs="?", choices=MODES, metavar="MODE",
                        help="one of %s (same as --mode)" % ", ".join(MODES))
    parser.add_argument("--mode", choices=MODES, default=None)
    parser.add_argument("--n", "--n-states", dest="n_states", type=int, help="number of spin states N")
    parser.add_argument("--len", "--length", dest="length", type=int, help="chain length L")
    parser.add_argument("--lambda", dest="coupling", type=float, help="coupling lambda (default 0.5)")
    parser.add_argument("--lambda-start", type=float)
    parser.add_argument("--lambda-stop", type=float)
    parser.add_argument("--lambda-steps", type=int)
    parser.add_argument("--which", default="ground", help="ground | all | k=K (default: ground)")
    parser.add_argument("--output", choices=("json", "csv"), default="json")
    parser.add_argument("--out", type=Path, default=None, help="output file (stdout when omitted)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fm-conjecture", action="store_true",
                        help="N=3, even L (default 4, 6, 8): midpoint reality of rho_1(L/2) in all ground states")
    parser.add_argument("--no-timestamp", action="store_true", help=argparse.SUPPRESS)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def parse_config(argv: list[str] | None = None) -> RunConfig:
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    overrides = _parse_tolerance_flags(extras, parser)
    try:
        tol = Tolerances().with_overrides(overrides)
    except (KeyError, ValueError) as exc:
        parser.error(str(exc.args[0]))

    if args.mode_arg and args.mode and args.mode_arg != args.mode:
        parser.error(f"conflicting modes {args.mode_arg!r} and --mode {args.mode!r}")
    mode = args.mode_arg or args.mode or "correlations"

    if not (args.which in ("ground", "all") or re.fullmatch(r"k=-?\d+", args.which)):
        parser.error(f"--which must be ground, all or k=K, got {args.which!r}")

    sweep_flags = (args.lambda_start, args.lambda_stop, args.lambda_steps)
    coupling_default = False
    if any(v is not None for v in sweep_flags):
        if args.coupling is not None:
            parser.error("--lambda cannot be combined with a --lambda-start/stop/steps sweep")
        if args.lambda_start is None or args.lambda_steps is None:
            parser.error("a sweep needs --lambda-start and --lambda-steps")
        if args.lambda_steps < 1:
            parser.error("--lambda-steps must be >= 1")
        if args.lambda_steps > 1 and args.lambda_stop is None:
            parser.error("a sweep with more than one step needs --lambda-stop")
        if args.lambda_steps == 1:
            couplings = (float(args.lambda_start),)
        else:
            couplings = tuple(float(x) for x in np.linspace(args.lambda_start, args.lambda_stop, args.lambda_steps))
    elif args.coupling is not None:
        couplings = (args.coupling,)
    else:
        couplings = (DEFAULT_COUPLING,)
        coupling_default = True
    if not all(np.isfinite(couplings)):
        parser.error("coupling must be finite")

    if args.fm_conjecture:
        if args.n_states not in (None, 3):
            parser.error("--fm-conjecture fixes N=3")
        if args.length is not None and args.length % 2:
            parser.error("--fm-conjecture needs an even chain length")
        if args.mode_arg or args.mode:
            parser.error("--fm-conjecture is its own mode")
        n_states = 3
        lengths = (args.length,) if args.length is not None else FM_LENGTHS
        mode, which = "correlations", "ground"
    else:
        if args.n_states is None or args.length is None:
            parser.error("--n and --len are required")
        n_states, lengths, which = args.n_states, (args.length,), args.which
    if n_states < 2 or any(length < 2 for length in lengths):
        parser.error("need N >= 2 and L >= 2")

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return RunConfig(
        n_states=n_states,
        lengths=lengths,
        couplings=couplings,
        mode=mode,
        which=which,
        output_format=args.output,
        output_path=args.out,
        seed=args.seed,
        tolerances=tol,
        coupling_default=coupling_default,
        fm_conjecture=args.fm_conjecture,
        timestamp=not args.no_timestamp,
    )


def main(argv: list[str] | None = None) -> int:
    config = parse_config(argv)
    try:
        status, document = run(config)
    except DimensionBudgetError as exc:
        print(f"chiralpotts: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ChainError as exc:
        print(f"chiralpotts: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    write_outputs(document, config)
    if status != EXIT_OK:
        print("chiralpotts: verification failed", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
