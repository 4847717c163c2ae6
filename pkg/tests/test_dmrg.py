import numpy as np
import pytest

from qcomplexity.dmrg import DmrgConfig, ground_state
from qcomplexity.errors import ConvergenceError, InvalidInputError
from qcomplexity.models import BoseHubbardParams, IsingParams, bose_hubbard_mpo, ising_mpo
from qcomplexity.mps import is_canonical
from qcomplexity.oracle import dense_hamiltonian, exact_ground, number_variance, DenseState
from qcomplexity.pipeline import filling_state


def _fidelity(state, vec):
    v = state.to_dense()
    return abs(np.vdot(v, vec)) ** 2 / np.vdot(v, v).real


def test_config_validation():
    with pytest.raises(InvalidInputError):
        DmrgConfig(chi=1)
    with pytest.raises(InvalidInputError):
        DmrgConfig(energy_tol=0)


def test_ising_polarized_limit():
    p = IsingParams(J=1, B=5, N=8)
    res = ground_state(ising_mpo(p), DmrgConfig(chi=8))
    e, psi = exact_ground(dense_hamiltonian(p), 2, 8)
    assert abs(res.energy - e) <= 1e-8
    # the field favours the +1 eigenstate of the local z operator on every site
    polarized = np.zeros(2**8)
    polarized[0] = 1
    # first-order admixture of flipped pairs is about 7 * (1/40)^2
    assert _fidelity(res.ground_state, polarized) >= 0.99
    assert _fidelity(res.ground_state, psi.amplitudes) >= 1 - 1e-8
    assert is_canonical(res.ground_state)


@pytest.mark.parametrize("B", [0.1, 0.5, 2.0])
def test_ising_matches_exact(B):
    p = IsingParams(J=1, B=B, N=10)
    res = ground_state(ising_mpo(p), DmrgConfig(chi=32))
    e, psi = exact_ground(dense_hamiltonian(p), 2, 10)
    assert abs(res.energy - e) <= 1e-9 * abs(e)
    # variational within round-off
    assert res.energy >= e - 1e-12 * abs(e)
    assert _fidelity(res.ground_state, psi.amplitudes) >= 1 - 1e-8
    assert res.converged
    assert max(res.ground_state.bond_dims) <= 32


def test_energy_history_monotone_and_reproducible():
    p = IsingParams(J=1, B=0.5, N=12)
    a = ground_state(ising_mpo(p), DmrgConfig(chi=16, seed=3))
    b = ground_state(ising_mpo(p), DmrgConfig(chi=16, seed=3))
    assert a.energy_history == b.energy_history
    h = np.array(a.energy_history)
    assert np.all(np.diff(h) <= 1e-10)
    assert len(h) >= 4


def test_bose_hubbard_mott_limit():
    p = BoseHubbardParams(J=1, U=8, N=6, n_max=2)
    res = ground_state(bose_hubbard_mpo(p), DmrgConfig(chi=32), initial=filling_state(p))
    e, psi = exact_ground(dense_hamiltonian(p), 3, 6)
    assert abs(res.energy - e) <= 1e-9 * max(abs(e), 1)
    mott = np.zeros(3**6)
    mott[sum(3**k for k in range(6))] = 1
    assert _fidelity(res.ground_state, psi.amplitudes) >= 0.999
    # at U/J = 8 virtual hops still carry a quarter of the weight
    v = res.ground_state.to_dense()
    assert np.argmax(np.abs(v)) == np.argmax(mott)
    assert _fidelity(res.ground_state, mott) >= 0.7
    assert number_variance(DenseState(v / np.linalg.norm(v), 6, 3), 6) <= 1e-6


def test_bose_hubbard_from_random_start():
    p = BoseHubbardParams(J=1, U=4, N=6, n_max=2)
    res = ground_state(bose_hubbard_mpo(p), DmrgConfig(chi=32))
    e, _ = exact_ground(dense_hamiltonian(p), 3, 6)
    assert abs(res.energy - e) <= 1e-8 * max(abs(e), 1)


def test_not_converged_is_reported():
    p = IsingParams(J=1, B=0.5, N=12)
    res = ground_state(ising_mpo(p), DmrgConfig(chi=4, max_sweeps=1, min_sweeps=1))
    assert not res.converged
    assert len(res.energy_history) == 1


def test_lanczos_failure_carries_context():
    p = IsingParams(J=1, B=0.5, N=8)
    with pytest.raises(ConvergenceError) as err:
        ground_state(ising_mpo(p), DmrgConfig(chi=8, lanczos_max_iter=2, lanczos_tol_start=1e-14))
    assert "site" in err.value.context
