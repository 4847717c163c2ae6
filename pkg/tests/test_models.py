import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcomplexity.errors import InvalidInputError
from qcomplexity.models import (
    PAULI_X,
    PAULI_Z,
    BoseHubbardParams,
    IsingParams,
    MeasurementBasis,
    bose_hubbard_mpo,
    boson_ops,
    ising_mpo,
    number_basis,
    sigma_theta,
    sigma_theta_basis,
)
from qcomplexity.oracle import dense_hamiltonian


def _ground(h):
    return np.linalg.eigvalsh(h)[0]


def test_ising_two_site_coupling_only():
    h = ising_mpo(IsingParams(J=1, B=0, N=2, symmetry_break_h=0, operators="pauli")).to_dense()
    assert np.allclose(h, -np.kron(PAULI_X, PAULI_X), atol=1e-12)
    assert _ground(h) == pytest.approx(-1)


def test_ising_two_site_field_only():
    h = ising_mpo(IsingParams(J=0, B=1, N=2, symmetry_break_h=0, operators="pauli")).to_dense()
    expect = -np.kron(PAULI_Z, np.eye(2)) - np.kron(np.eye(2), PAULI_Z)
    assert np.allclose(h, expect, atol=1e-12)
    assert _ground(h) == pytest.approx(-2)


def test_spin_convention_scales_operators():
    p = IsingParams(J=1, B=0, N=2, symmetry_break_h=0)
    assert _ground(ising_mpo(p).to_dense()) == pytest.approx(-0.25)


@pytest.mark.parametrize("ops", ["spin", "pauli"])
@pytest.mark.parametrize("n", [2, 5, 8])
def test_ising_mpo_matches_dense(n, ops):
    p = IsingParams(J=1, B=0.5, N=n, operators=ops, symmetry_break_h=1e-3)
    mpo = ising_mpo(p)
    assert mpo.bond_dims == [3] * (n - 1)
    h = mpo.to_dense()
    assert np.max(np.abs(h - dense_hamiltonian(p))) <= 1e-12
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12


def test_ising_mpo_n12_matches_dense():
    p = IsingParams(J=0.7, B=1.3, N=12)
    assert np.max(np.abs(ising_mpo(p).to_dense() - dense_hamiltonian(p))) <= 1e-12


def test_ising_default_symmetry_break():
    assert IsingParams(J=2.0).h == pytest.approx(2e-8)
    assert IsingParams(symmetry_break_h=0.0).h == 0.0


def test_ising_invalid():
    with pytest.raises(InvalidInputError):
        IsingParams(N=1)
    with pytest.raises(InvalidInputError):
        IsingParams(B=-1)
    with pytest.raises(InvalidInputError):
        IsingParams(operators="qubit")


def test_boson_ops_truncation():
    b, bd, n = boson_ops(2)
    ket = np.eye(3)
    assert np.allclose(b @ ket[2], np.sqrt(2) * ket[1])
    assert np.allclose(bd @ ket[2], 0)
    assert np.allclose(bd @ b, n)


def test_bose_hubbard_atomic_limit():
    p = BoseHubbardParams(J=0, U=2, N=2, n_max=2, penalty_weight=100)
    h = bose_hubbard_mpo(p).to_dense()
    vals, vecs = np.linalg.eigh(h)
    assert vals[0] == pytest.approx(0, abs=1e-12)
    # |1,1> is index 1*3 + 1
    assert abs(vecs[4, 0]) == pytest.approx(1)


def test_bose_hubbard_two_boson_sector():
    p = BoseHubbardParams(J=1, U=0, N=2, n_max=2, penalty_weight=1.0)
    h = bose_hubbard_mpo(p).to_dense()
    occ = np.add.outer(np.arange(3), np.arange(3)).reshape(-1)
    sector = np.flatnonzero(occ == 2)
    assert _ground(h[np.ix_(sector, sector)]) == pytest.approx(-2)


@pytest.mark.parametrize("n,n_max,U", [(2, 1, 1.0), (4, 2, 4.0), (6, 2, 8.0), (3, 3, 0.5)])
def test_bose_hubbard_mpo_matches_dense(n, n_max, U):
    p = BoseHubbardParams(J=1, U=U, N=n, n_max=n_max)
    mpo = bose_hubbard_mpo(p)
    assert mpo.meta["filling"] == "quadratic-penalty"
    h = mpo.to_dense()
    assert np.max(np.abs(h - dense_hamiltonian(p))) <= 1e-12 * max(1, np.abs(h).max())
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12


def test_bose_hubbard_penalty_default_and_filling():
    assert BoseHubbardParams(J=1, U=4).weight == 40
    assert BoseHubbardParams(N=4, nu=0.5).n_particles == 2
    with pytest.raises(InvalidInputError):
        BoseHubbardParams(N=5, nu=0.5)
    with pytest.raises(InvalidInputError):
        BoseHubbardParams(penalty_weight=0)


def test_sigma_theta_basis_examples():
    assert np.allclose(sigma_theta_basis(0).matrix, np.eye(2))
    m = sigma_theta_basis(np.pi / 2).matrix
    assert np.allclose(m[:, 0], np.array([1, 1]) / np.sqrt(2))
    assert np.allclose(m[:, 1], np.array([-1, 1]) / np.sqrt(2))
    col = sigma_theta_basis(np.pi / 4).matrix[:, 0]
    assert np.max(np.abs(sigma_theta(np.pi / 4) @ col - col)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(0, np.pi / 2))
def test_sigma_theta_basis_diagonalizes(theta):
    u = sigma_theta_basis(theta).matrix
    assert np.allclose(u.conj().T @ sigma_theta(theta) @ u, np.diag([1, -1]), atol=1e-12)


def test_sigma_theta_basis_range():
    with pytest.raises(InvalidInputError):
        sigma_theta_basis(-0.1)
    with pytest.raises(InvalidInputError):
        sigma_theta_basis(2.0)


@pytest.mark.parametrize("n_max", [1, 2, 4])
def test_number_basis(n_max):
    nb = number_basis(n_max)
    assert np.allclose(nb.matrix, np.eye(n_max + 1))
    assert nb.labels == list(range(n_max + 1))


def test_measurement_basis_rejects_non_unitary():
    with pytest.raises(InvalidInputError):
        MeasurementBasis(np.array([[1, 1], [0, 1]]))
