"""Sweep configuration files.

An INI-style text file of ``key = value`` lines under section headers::

    [model]
    name = ising          # or bosehubbard
    N = 64
    operators = spin      # ising only: spin (S = sigma/2) or pauli
    n_max = 3             # bosehubbard only
    nu = 1

    [grid]
    coupling = 0.05:1.50:0.05   # start:stop:step, or a comma list
    theta = 0, pi/4, pi/2       # ising only
    L = 1, 3, 5

    [dmrg]
    chi = 48
    seed = 0
    max_sweeps = 30

    [compmech]
    merge_tol = 1e-8
    p_floor = 1e-12

    [output]
    path = results.csv
    format = csv

Unknown sections or keys are rejected.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

from .errors import ConfigError, InvalidInputError
from .mps import MAX_WORD_BITS
from .pipeline import MODELS, NUMBER_BASIS, ModelSpec

FORMATS = ("csv", "jsonl")
ANGLE_SLACK = 1e-4

DESK_DEFAULTS = {
    "ising": {"N": 64, "chi": 48},
    "bosehubbard": {"N": 24, "chi": 32, "n_max": 3},
}

_KEYS = {
    "model": {"name", "N", "J", "operators", "symmetry_break_h", "n_max", "nu", "penalty_weight"},
    "grid": {"coupling", "theta", "L"},
    "dmrg": {"chi", "seed", "max_sweeps", "energy_tol", "lanczos_tol"},
    "compmech": {"merge_tol", "p_floor"},
    "output": {"path", "format"},
}

_PI_TERM = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*?\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_angle(text: str) -> float:
    """A float, or a multiple/fraction of ``pi`` such as ``pi/4`` or ``3*pi/8``."""
    text = text.strip()
    m = _PI_TERM.match(text)
    try:
        if m:
            num = float(m.group(1)) if m.group(1) else 1.0
            den = float(m.group(2)) if m.group(2) else 1.0
            return num * math.pi / den
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive of ``stop``) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"bad range {text!r}")
            n = int(round((stop - start) / step)) + 1
            return [round(start + k * step, 12) for k in range(n)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None


@dataclass(frozen=True)
class SweepConfig:
    spec: ModelSpec
    couplings: tuple[float, ...]
    bases: tuple  # angles (ising) or ("number",)
    Ls: tuple[int, ...]
    out_path: str | None = None
    out_format: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.couplings or not self.bases or not self.Ls:
            raise ConfigError("coupling, basis and L grids must be non-empty")
        if self.out_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        d = self.spec.d
        for L in self.Ls:
            if L < 1:
                raise ConfigError("L values must be positive")
            if 2 * L * math.log2(d) > MAX_WORD_BITS + 1e-9:
                raise ConfigError(f"L={L} needs {d}^{2 * L} words, beyond the table capacity")
        if self.spec.N < 4 * max(self.Ls):
            raise ConfigError(f"N={self.spec.N} is below 4*max(L)={4 * max(self.Ls)}")
        if any(c < 0 for c in self.couplings):
            raise ConfigError("couplings must be non-negative")
        if self.spec.model == "ising":
            if any(not 0 <= t <= math.pi / 2 + ANGLE_SLACK for t in self.bases):
                raise ConfigError("theta must lie in [0, pi/2]")
            # a rounded pi/2 such as 1.5708 means the x axis
            object.__setattr__(self, "bases", tuple(min(t, math.pi / 2) for t in self.bases))

    def grid(self) -> list[tuple[float, object, int]]:
        """Points in output order: coupling, then basis, then L."""
        return [(c, b, L) for c in self.couplings for b in self.bases for L in self.Ls]


def load_config(text: str) -> SweepConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep N and L upper case
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for sec in cp.sections():
        if sec not in _KEYS:
            raise ConfigError(f"unknown section [{sec}]")
        unknown = set(cp[sec]) - _KEYS[sec]
        if unknown:
            raise ConfigError(f"unknown keys in [{sec}]: {', '.join(sorted(unknown))}")

    def get(sec, key, conv=str, default=None):
        if cp.has_option(sec, key):
            try:
                return conv(cp.get(sec, key))
            except ValueError:
                raise ConfigError(f"bad value for {sec}.{key}") from None
        return default

    model = get("model", "name", str.strip, "ising")
    if model not in MODELS:
        raise ConfigError(f"model name must be one of {MODELS}")
    desk = DESK_DEFAULTS[model]
    try:
        spec = ModelSpec(
            model=model,
            N=get("model", "N", int, desk["N"]),
            chi=get("dmrg", "chi", int, desk["chi"]),
            J=get("model", "J", float, 1.0),
            operators=get("model", "operators", str.strip, "spin"),
            symmetry_break_h=get("model", "symmetry_break_h", float),
            n_max=get("model", "n_max", int, desk.get("n_max", 3)),
            nu=get("model", "nu", float, 1.0),
            penalty_weight=get("model", "penalty_weight", float),
            seed=get("dmrg", "seed", int, 0),
            max_sweeps=get("dmrg", "max_sweeps", int, 30),
            energy_tol=get("dmrg", "energy_tol", float, 1e-12),
            lanczos_tol=get("dmrg", "lanczos_tol", float, 1e-14),
            merge_tol=get("compmech", "merge_tol", float, 1e-8),
            p_floor=get("compmech", "p_floor", float, 1e-12),
        )
        # surface model-level validation (filling, operators) before any compute
        spec.params(1.0)
        spec.dmrg_config()
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from None

    couplings = get("grid", "coupling", parse_grid)
    if couplings is None:
        raise ConfigError("grid.coupling is required")
    if model == "ising":
        theta = get("grid", "theta", str, "0")
        bases = tuple(parse_angle(t) for t in theta.split(",") if t.strip())
    else:
        if cp.has_option("grid", "theta"):
            raise ConfigError("theta applies to the Ising model only")
        bases = (NUMBER_BASIS,)
    Ls = tuple(get("grid", "L", _ints, [1]))
    return SweepConfig(
        spec=spec,
        couplings=tuple(couplings),
        bases=bases,
        Ls=Ls,
        out_path=get("output", "path", str.strip),
        out_format=get("output", "format", str.strip, "csv"),
    )


def read_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return load_config(text)
