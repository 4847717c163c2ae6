"""Grid execution and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor

from .config import SweepConfig
from .pipeline import REPORT_COLUMNS, ComplexityReport, run_coupling

JOBS_ENV = "QCOMPLEXITY_JOBS"


def default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[ComplexityReport]:
    """Rows in grid order (coupling, basis, L) whatever the execution order."""
    points = [(b, L) for b in cfg.bases for L in cfg.Ls]
    if jobs <= 1 or len(cfg.couplings) == 1:
        groups = [run_coupling(cfg.spec, c, points) for c in cfg.couplings]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_coupling, cfg.spec, c, points) for c in cfg.couplings]
            groups = [f.result() for f in futures]
    return [row for g in groups for row in g]


def columns(timing: bool = False) -> list[str]:
    return [c for c in REPORT_COLUMNS if timing or c != "wall_time"]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def summary(rows: list[ComplexityReport], cfg: SweepConfig | None = None) -> dict:
    out = {"points": len(rows), "failures": sum(r.status != "ok" for r in rows)}
    out["not_converged"] = sum(r.status == "ok" and not r.converged for r in rows)
    out["E_estimator"] = "block-mutual-information-L"
    if cfg is not None and cfg.spec.model == "bosehubbard":
        out["filling"] = "quadratic-penalty"
    return out


def format_rows(rows: list[ComplexityReport], fmt: str = "csv", timing: bool = False,
                cfg: SweepConfig | None = None) -> str:
    cols = columns(timing)
    info = summary(rows, cfg)
    buf = io.StringIO(newline="")
    if fmt == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            d = r.as_dict()
            w.writerow([_fmt(d[c]) for c in cols])
        for k, v in info.items():
            buf.write(f"# {k}={v}\n")
    elif fmt == "jsonl":
        for r in rows:
            d = r.as_dict()
            buf.write(json.dumps({c: _json_value(d[c]) for c in cols}) + "\n")
        buf.write(json.dumps({"summary": info}) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return buf.getvalue()
