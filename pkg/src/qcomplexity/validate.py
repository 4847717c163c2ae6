"""Self-check suite: analytic processes and dense-vs-MPS equivalence."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .compmech import DEFAULT_MERGE_TOL
from .pipeline import ModelSpec, analyze_words, evaluate, evaluate_exact, mps_words, solve, solve_exact
from .processes import fair_coin, golden_mean, hmm_word_distribution, period_two
from .qmodel import explicit_quantum_memory

ENERGY_RTOL = 1e-9
WORD_TV = 1e-8
QUANTITY_TOL = 1e-6
VARIANCE_TOL = 1e-6


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f"  {self.detail}" if self.detail else "")


def golden_checks(merge_tol: float = DEFAULT_MERGE_TOL, L: int = 3) -> list[Check]:
    out = []
    for name, t, expect in (("period-2", period_two(), 1.0), ("fair-coin", fair_coin(), 0.0)):
        a = analyze_words(hmm_word_distribution(t, 2 * L), L, merge_tol)
        err = max(abs(a.C_mu - expect), abs(a.C_q - expect), abs(a.E - expect))
        out.append(Check(f"golden {name} C_mu=C_q=E={expect:g}", err <= 1e-9, f"max error {err:.2e}"))

    a = analyze_words(hmm_word_distribution(golden_mean(0.5), 2 * L), L, merge_tol)
    n = a.machine.n_states
    out.append(Check("golden-mean causal states", n == 2, f"{n} states"))
    err = abs(a.C_mu - (math.log2(3) - 2 / 3))
    out.append(Check("golden-mean C_mu", err <= 1e-9, f"error {err:.2e}"))
    if n == 2:
        err = abs(a.gram.matrix[0, 1] - math.sqrt(0.5))
        out.append(Check("golden-mean G_AB", err <= 1e-10, f"error {err:.2e}"))
    else:
        out.append(Check("golden-mean G_AB", False, "wrong state count"))
    err = abs(a.C_q - explicit_quantum_memory(a.machine, 12))
    out.append(Check("golden-mean C_q vs explicit memory states", err <= 1e-6, f"error {err:.2e}"))
    return out


def _compare(spec: ModelSpec, couplings, bases, Ls, label: str) -> list[Check]:
    out = []
    for c in couplings:
        run = solve(spec, c)
        ref = solve_exact(spec, c)
        e_err = abs(run.dmrg.energy - ref.energy) / abs(ref.energy)
        out.append(Check(f"{label} coupling={c:g} energy", e_err <= ENERGY_RTOL, f"rel error {e_err:.2e}"))
        if spec.model == "bosehubbard":
            v = run.number_variance
            out.append(Check(f"{label} coupling={c:g} number variance", v <= VARIANCE_TOL, f"{v:.2e}"))
        for b in bases:
            for L in Ls:
                tag = f"{label} coupling={c:g} basis={b if isinstance(b, str) else f'{b:.4f}'} L={L}"
                mine = evaluate(run, b, L)
                exact, wd = evaluate_exact(ref, b, L)
                tv = mps_words(run, b, L).total_variation(wd)
                out.append(Check(f"{tag} words", tv <= WORD_TV, f"TV {tv:.2e}"))
                err = max(abs(mine.C_mu - exact.C_mu), abs(mine.C_q - exact.C_q),
                          abs(mine.E - exact.E), abs(mine.S_half - exact.S_half))
                out.append(Check(f"{tag} quantities", err <= QUANTITY_TOL, f"max diff {err:.2e}"))
    return out


def oracle_checks(quick: bool = False, merge_tol: float = DEFAULT_MERGE_TOL) -> list[Check]:
    ising = ModelSpec(model="ising", N=10, chi=32, merge_tol=merge_tol)
    boson = ModelSpec(model="bosehubbard", N=6, chi=32, n_max=2, merge_tol=merge_tol)
    if quick:
        return (_compare(ising, [0.5], [0.0, math.pi / 2], [1, 3], "ising")
                + _compare(boson, [4.0], ["number"], [1, 2], "bosehubbard"))
    return (_compare(ising, [0.1, 0.5, 2.0], [0.0, math.pi / 4, math.pi / 2], [1, 2, 3], "ising")
            + _compare(boson, [1.0, 4.0, 10.0], ["number"], [1, 2], "bosehubbard"))


def run_all(quick: bool = False, merge_tol: float = DEFAULT_MERGE_TOL, emit=print) -> bool:
    ok = True
    for group in (lambda: golden_checks(merge_tol), lambda: oracle_checks(quick, merge_tol)):
        try:
            checks = group()
        except Exception as exc:  # noqa: BLE001 - reported, not raised
            checks = [Check("suite", False, f"{type(exc).__name__}: {exc}")]
        for c in checks:
            emit(c.line())
            ok &= c.passed
    return ok
