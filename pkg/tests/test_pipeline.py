import math

import numpy as np
import pytest

from qcomplexity.errors import InvalidInputError
from qcomplexity.pipeline import (
    ModelSpec,
    PointError,
    PointSpec,
    evaluate,
    evaluate_exact,
    filling_state,
    run_coupling,
    run_point,
    solve,
    solve_exact,
    translation_stability,
)
from qcomplexity.models import BoseHubbardParams


@pytest.fixture(scope="module")
def ising10():
    spec = ModelSpec(model="ising", N=10, chi=32)
    return solve(spec, 0.5), solve_exact(spec, 0.5)


@pytest.mark.parametrize("theta", [0.0, math.pi / 4, math.pi / 2])
@pytest.mark.parametrize("L", [1, 2])
def test_mps_route_matches_dense_route(ising10, theta, L):
    run, ref = ising10
    a = evaluate(run, theta, L)
    b, _ = evaluate_exact(ref, theta, L)
    for key in ("C_mu", "C_q", "E", "S_half", "h_mu"):
        assert getattr(a, key) == pytest.approx(getattr(b, key), abs=1e-6)
    assert a.n_states == b.n_states


def test_report_ordering_invariants(ising10):
    run, _ = ising10
    for theta in (0.0, 0.6, math.pi / 2):
        for L in (1, 2, 3):
            r = evaluate(run, theta, L)
            assert r.E <= r.C_q + 1e-9 <= r.C_mu + 2e-9
            assert min(r.C_mu, r.C_q, r.E, r.S_half, r.h_mu) >= 0


def test_filling_state_counts():
    p = BoseHubbardParams(N=6, nu=0.5, n_max=2)
    v = filling_state(p).to_dense()
    occ = np.indices((3,) * 6).sum(axis=0).reshape(-1)
    assert occ[np.argmax(np.abs(v))] == 3


def test_bose_hubbard_point_variance():
    spec = ModelSpec(model="bosehubbard", N=6, chi=16, n_max=2)
    run = solve(spec, 4.0)
    assert run.number_variance <= 1e-6
    r = evaluate(run, "number", 1)
    assert r.basis == "number"


def test_basis_mismatch_is_point_error():
    spec = ModelSpec(model="ising", N=8, chi=8)
    with pytest.raises(PointError) as err:
        run_point(PointSpec(spec, 0.5, "number", 1))
    assert "coupling=0.5" in str(err.value)
    with pytest.raises(InvalidInputError):
        ModelSpec(model="heisenberg")


def test_run_coupling_records_failures():
    spec = ModelSpec(model="ising", N=8, chi=8)
    rows = run_coupling(spec, 0.5, [(0.0, 1), (2.0, 1), (math.pi / 2, 1)])
    assert [r.status for r in rows] == ["ok", "error", "ok"]
    assert "theta" in rows[1].error


def test_polarized_phase_is_nearly_trivial():
    spec = ModelSpec(model="ising", N=32, chi=16)
    run = solve(spec, 5.0)
    z = evaluate(run, 0.0, 3)
    x = evaluate(run, math.pi / 2, 3)
    # residual correlations from virtual spin flips are ~1e-2 bits at B/J = 5
    assert max(z.C_q, z.E, z.S_half) <= 1e-2
    assert x.h_mu == pytest.approx(1.0, abs=1e-2)
    assert max(x.C_q, x.E) <= 1e-2


@pytest.mark.xfail(strict=True, reason="finite-L statistics keep 8 near-identical causal states")
def test_polarized_phase_x_basis_has_no_classical_memory():
    spec = ModelSpec(model="ising", N=32, chi=16)
    x = evaluate(solve(spec, 5.0), math.pi / 2, 3)
    assert x.C_mu <= 1e-3


def test_run_point_matches_small_oracle_at_n32():
    spec = ModelSpec(model="ising", N=32, chi=32)
    r = run_point(PointSpec(spec, 0.5, 0.0, 3))
    assert r.status == "ok" and r.converged
    assert r.E <= r.C_q <= r.C_mu + 1e-9


def test_translation_stability_bulk():
    spec = ModelSpec(model="ising", N=24, chi=32)
    assert translation_stability(solve(spec, 1.0), 0.0, 2) <= 1e-4
