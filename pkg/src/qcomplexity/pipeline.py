"""End-to-end evaluation of one (model, coupling, basis, L) point.

Two routes produce the same report: the MPS route (MPO, DMRG, canonical form,
basis rotation, central-window word table) and the dense route, which only
exists for chains small enough to diagonalize exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .compmech import (
    DEFAULT_MERGE_TOL,
    DEFAULT_P_FLOOR,
    EpsilonMachine,
    WordDistribution,
    build_machine,
    conditionals,
    entropy_rate,
    excess_entropy,
    statistical_complexity,
)
from .dmrg import DmrgConfig, DmrgResult, ground_state
from .errors import InvalidInputError, QComplexityError
from .models import (
    BoseHubbardParams,
    IsingParams,
    MeasurementBasis,
    bose_hubbard_mpo,
    ising_mpo,
    number_basis,
    sigma_theta_basis,
)
from .mps import (
    MpsState,
    Window,
    apply_local_basis,
    canonicalize,
    expectation,
    half_chain_entropy,
    product_state,
    word_distribution,
)
from .qmodel import GramMatrix, gram_fixed_point, quantum_memory

MODELS = ("ising", "bosehubbard")
NUMBER_BASIS = "number"


class PointError(QComplexityError):
    """A module error raised while evaluating a specific grid point."""

    def __init__(self, point: "PointSpec", cause: Exception):
        super().__init__(f"{point.describe()}: {type(cause).__name__}: {cause}")
        self.point = point
        self.cause = cause


@dataclass(frozen=True)
class ModelSpec:
    """Chain and solver settings shared by every point of a sweep."""

    model: str = "ising"
    N: int = 64
    chi: int = 48
    J: float = 1.0
    operators: str = "spin"
    symmetry_break_h: float | None = None
    n_max: int = 3
    nu: float = 1.0
    penalty_weight: float | None = None
    seed: int = 0
    max_sweeps: int = 30
    energy_tol: float = 1e-12
    lanczos_tol: float = 1e-14
    merge_tol: float = DEFAULT_MERGE_TOL
    p_floor: float = DEFAULT_P_FLOOR

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidInputError(f"model must be one of {MODELS}, got {self.model!r}")

    @property
    def d(self) -> int:
        return 2 if self.model == "ising" else self.n_max + 1

    def params(self, coupling: float) -> IsingParams | BoseHubbardParams:
        if self.model == "ising":
            return IsingParams(J=self.J, B=coupling * self.J, N=self.N,
                               symmetry_break_h=self.symmetry_break_h, operators=self.operators)
        return BoseHubbardParams(J=self.J, U=coupling * self.J, N=self.N, n_max=self.n_max,
                                 nu=self.nu, penalty_weight=self.penalty_weight)

    def dmrg_config(self) -> DmrgConfig:
        return DmrgConfig(chi=self.chi, max_sweeps=self.max_sweeps, energy_tol=self.energy_tol,
                          lanczos_tol=self.lanczos_tol, seed=self.seed)


@dataclass(frozen=True)
class PointSpec:
    """``basis`` is a measurement angle for Ising and ``"number"`` for bosons."""

    spec: ModelSpec
    coupling: float
    basis: float | str
    L: int

    def describe(self) -> str:
        return f"{self.spec.model} coupling={self.coupling:g} basis={basis_label(self.basis)} L={self.L}"


def basis_label(basis: float | str) -> str:
    return basis if isinstance(basis, str) else repr(float(basis))


def measurement_basis(spec: ModelSpec, basis: float | str) -> MeasurementBasis:
    if spec.model == "ising":
        if isinstance(basis, str):
            raise InvalidInputError("Ising points are measured at an angle theta")
        return sigma_theta_basis(float(basis))
    if basis != NUMBER_BASIS:
        raise InvalidInputError("Bose-Hubbard points are measured in the number basis")
    return number_basis(spec.n_max)


@dataclass
class ComplexityReport:
    model: str
    coupling: float
    basis: str
    L: int
    N: int
    chi: int
    C_mu: float
    C_q: float
    E: float
    S_half: float
    h_mu: float
    energy: float
    max_truncation_error: float
    n_states: int
    gram_iterations: int
    dropped_mass: float
    converged: bool
    wall_time: float = float("nan")
    status: str = "ok"
    error: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


REPORT_COLUMNS = tuple(ComplexityReport.__dataclass_fields__)


@dataclass
class Analysis:
    """Everything derived from one ``2L`` word table."""

    machine: EpsilonMachine
    gram: GramMatrix
    C_mu: float
    C_q: float
    E: float
    h_mu: float
    dropped_mass: float


def analyze_words(wd: WordDistribution, L: int, merge_tol: float = DEFAULT_MERGE_TOL,
                  p_floor: float = DEFAULT_P_FLOOR) -> Analysis:
    cf = conditionals(wd, L, p_floor)
    m = build_machine(cf, merge_tol)
    g = gram_fixed_point(m)
    return Analysis(
        machine=m,
        gram=g,
        C_mu=statistical_complexity(m),
        C_q=quantum_memory(g, m.stationary),
        E=excess_entropy(wd, L),
        h_mu=entropy_rate(cf),
        dropped_mass=cf.dropped_mass,
    )


def filling_state(p: BoseHubbardParams) -> MpsState:
    """Occupation product state with exactly ``nu * N`` bosons, spread evenly."""
    counts = [math.floor((l + 1) * p.nu + 1e-9) - math.floor(l * p.nu + 1e-9) for l in range(p.N)]
    return product_state([np.eye(p.d)[c] for c in counts])


@dataclass
class GroundStateRun:
    spec: ModelSpec
    coupling: float
    dmrg: DmrgResult
    S_half: float
    number_variance: float = float("nan")
    # canonical forms keyed by window start, reused across bases
    _by_center: dict = field(default_factory=dict, repr=False)

    def centered_on(self, start: int) -> MpsState:
        if start not in self._by_center:
            self._by_center[start] = canonicalize(self.dmrg.ground_state, start)
        return self._by_center[start]


def solve(spec: ModelSpec, coupling: float) -> GroundStateRun:
    p = spec.params(coupling)
    if isinstance(p, IsingParams):
        res = ground_state(ising_mpo(p), spec.dmrg_config())
        return GroundStateRun(spec, coupling, res, half_chain_entropy(canonicalize(res.ground_state, 0)))
    # start inside the target particle-number sector; the Hamiltonian conserves it
    res = ground_state(bose_hubbard_mpo(p), spec.dmrg_config(), initial=filling_state(p))
    counter = replace(p, J=0.0, U=0.0, penalty_weight=1.0)
    var = expectation(res.ground_state, bose_hubbard_mpo(counter))
    return GroundStateRun(spec, coupling, res, half_chain_entropy(canonicalize(res.ground_state, 0)), var)


def evaluate(run: GroundStateRun, basis: float | str, L: int) -> ComplexityReport:
    spec = run.spec
    a = analyze_words(mps_words(run, basis, L), L, spec.merge_tol, spec.p_floor)
    return ComplexityReport(
        model=spec.model,
        coupling=run.coupling,
        basis=basis_label(basis),
        L=L,
        N=spec.N,
        chi=spec.chi,
        C_mu=a.C_mu,
        C_q=a.C_q,
        E=a.E,
        S_half=run.S_half,
        h_mu=a.h_mu,
        energy=run.dmrg.energy,
        max_truncation_error=run.dmrg.max_truncation_error,
        n_states=a.machine.n_states,
        gram_iterations=a.gram.iterations,
        dropped_mass=a.dropped_mass,
        converged=run.dmrg.converged,
    )


def failed_report(point: PointSpec, exc: Exception) -> ComplexityReport:
    nan = float("nan")
    return ComplexityReport(
        model=point.spec.model, coupling=point.coupling, basis=basis_label(point.basis), L=point.L,
        N=point.spec.N, chi=point.spec.chi, C_mu=nan, C_q=nan, E=nan, S_half=nan, h_mu=nan,
        energy=nan, max_truncation_error=nan, n_states=0, gram_iterations=0, dropped_mass=nan,
        converged=False, status="error", error=str(exc),
    )


def run_point(point: PointSpec) -> ComplexityReport:
    t0 = time.perf_counter()
    try:
        report = evaluate(solve(point.spec, point.coupling), point.basis, point.L)
    except QComplexityError as exc:
        raise PointError(point, exc) from exc
    report.wall_time = time.perf_counter() - t0
    return report


def run_coupling(spec: ModelSpec, coupling: float, points: list[tuple[float | str, int]]) -> list[ComplexityReport]:
    """All (basis, L) rows sharing one ground state; failures become error rows."""
    t0 = time.perf_counter()
    try:
        run = solve(spec, coupling)
    except Exception as exc:  # noqa: BLE001 - recorded per row
        return [failed_report(PointSpec(spec, coupling, b, L), exc) for b, L in points]
    solve_time = time.perf_counter() - t0
    out = []
    for b, L in points:
        t1 = time.perf_counter()
        try:
            rep = evaluate(run, b, L)
        except Exception as exc:  # noqa: BLE001
            rep = failed_report(PointSpec(spec, coupling, b, L), PointError(PointSpec(spec, coupling, b, L), exc))
        rep.wall_time = solve_time + time.perf_counter() - t1
        out.append(rep)
    return out


# dense reference route


@dataclass
class OracleRun:
    spec: ModelSpec
    coupling: float
    energy: float
    state: object
    S_half: float


def solve_exact(spec: ModelSpec, coupling: float) -> OracleRun:
    from .oracle import dense_hamiltonian, exact_ground, exact_half_chain_entropy

    p = spec.params(coupling)
    e, s = exact_ground(dense_hamiltonian(p), spec.d, spec.N)
    return OracleRun(spec, coupling, e, s, exact_half_chain_entropy(s))


def evaluate_exact(run: OracleRun, basis: float | str, L: int) -> tuple[ComplexityReport, WordDistribution]:
    from .oracle import exact_word_distribution

    spec = run.spec
    win = Window.centered(spec.N, 2 * L)
    wd = exact_word_distribution(run.state, measurement_basis(spec, basis), win)
    a = analyze_words(wd, L, spec.merge_tol, spec.p_floor)
    rep = ComplexityReport(
        model=spec.model, coupling=run.coupling, basis=basis_label(basis), L=L, N=spec.N,
        chi=0, C_mu=a.C_mu, C_q=a.C_q, E=a.E, S_half=run.S_half, h_mu=a.h_mu,
        energy=run.energy, max_truncation_error=0.0, n_states=a.machine.n_states,
        gram_iterations=a.gram.iterations, dropped_mass=a.dropped_mass, converged=True,
    )
    return rep, wd


def mps_words(run: GroundStateRun, basis: float | str, L: int) -> WordDistribution:
    win = Window.centered(run.spec.N, 2 * L)
    state = apply_local_basis(run.centered_on(win.start), measurement_basis(run.spec, basis))
    return word_distribution(state, win)


def translation_stability(run: GroundStateRun, basis: float | str, L: int, shifts=(-2, 2)) -> float:
    """Largest total-variation gap between the central window and shifted copies.

    Small values mean the central statistics are bulk-like; the report uses the
    central window only.
    """
    win = Window.centered(run.spec.N, 2 * L)
    rot = measurement_basis(run.spec, basis)
    ref = word_distribution(apply_local_basis(run.centered_on(win.start), rot), win)
    gap = 0.0
    for s in shifts:
        w = win.shifted(s)
        w.validate(run.spec.N)
        other = word_distribution(apply_local_basis(run.centered_on(w.start), rot), w)
        gap = max(gap, ref.total_variation(other))
    return gap
