"""``qcomplexity`` command-line entry point.

Exit status: 0 on success, 1 when any grid point or validation check failed,
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .config import DESK_DEFAULTS, FORMATS, SweepConfig, parse_angle, read_config
from .errors import ConfigError, InvalidInputError, QComplexityError
from .pipeline import NUMBER_BASIS, ModelSpec, run_coupling
from .sweep import JOBS_ENV, default_jobs, format_rows, run_sweep

EXIT_OK, EXIT_FAILURES, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcomplexity", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log DMRG progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a parameter grid from a config file")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", help="output file (overrides [output] path; default stdout)")
    sw.add_argument("--format", choices=FORMATS)
    sw.add_argument("--jobs", type=int, help=f"worker processes (default ${JOBS_ENV} or 1)")
    sw.add_argument("--timing", action="store_true", help="include per-row wall time")

    pt = sub.add_parser("point", help="evaluate a single grid point")
    pt.add_argument("--model", choices=("ising", "bosehubbard"), default="ising")
    pt.add_argument("--coupling", type=float, required=True, help="B/J (ising) or U/J (bosehubbard)")
    pt.add_argument("--theta", default="0", help="measurement angle, e.g. 1.5708 or pi/2 (ising)")
    pt.add_argument("--L", type=int, default=3)
    pt.add_argument("--N", type=int)
    pt.add_argument("--chi", type=int)
    pt.add_argument("--n-max", type=int, default=3)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--merge-tol", type=float, default=1e-8)
    pt.add_argument("--p-floor", type=float, default=1e-12)
    pt.add_argument("--format", choices=FORMATS, default="csv")
    pt.add_argument("--timing", action="store_true")

    va = sub.add_parser("validate", help="run the golden-process and oracle checks")
    va.add_argument("--quick", action="store_true", help="reduced oracle grid")
    va.add_argument("--merge-tol", type=float, default=1e-8)
    return ap


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_sweep(args) -> int:
    cfg = read_config(args.config)
    fmt = args.format or cfg.out_format
    path = args.out or cfg.out_path
    if path is not None:
        # fail on an unwritable destination before spending any compute
        try:
            open(path, "w").close()
        except OSError as exc:
            print(f"error: cannot write {path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    jobs = args.jobs if args.jobs is not None else default_jobs()
    rows = run_sweep(cfg, jobs=max(1, jobs))
    _write(format_rows(rows, fmt, timing=args.timing, cfg=cfg), path)
    failures = sum(r.status != "ok" for r in rows)
    for r in rows:
        if r.status != "ok":
            print(f"point failed: {r.error}", file=sys.stderr)
    return EXIT_FAILURES if failures else EXIT_OK


def cmd_point(args) -> int:
    desk = DESK_DEFAULTS[args.model]
    try:
        spec = ModelSpec(
            model=args.model,
            N=args.N or desk["N"],
            chi=args.chi or desk["chi"],
            n_max=args.n_max,
            seed=args.seed,
            merge_tol=args.merge_tol,
            p_floor=args.p_floor,
        )
        basis = parse_angle(args.theta) if args.model == "ising" else NUMBER_BASIS
        # reuse the sweep validation for window capacity and chain length
        cfg = SweepConfig(spec, (args.coupling,), (basis,), (args.L,), out_format=args.format)
    except (ConfigError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = run_coupling(spec, args.coupling, [(cfg.bases[0], args.L)])
    sys.stdout.write(format_rows(rows, args.format, timing=args.timing, cfg=cfg))
    if rows[0].status != "ok":
        print(f"point failed: {rows[0].error}", file=sys.stderr)
        return EXIT_FAILURES
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validate import run_all

    ok = run_all(quick=args.quick, merge_tol=args.merge_tol, emit=lambda line: print(line, flush=True))
    return EXIT_OK if ok else EXIT_FAILURES


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    handler = {"sweep": cmd_sweep, "point": cmd_point, "validate": cmd_validate}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QComplexityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
