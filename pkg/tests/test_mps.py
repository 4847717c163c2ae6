import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcomplexity.errors import CapacityError, InvalidInputError, InvalidStateError
from qcomplexity.models import IsingParams, ising_mpo, number_basis, sigma_theta_basis
from qcomplexity.mps import (
    MpsState,
    Window,
    apply_local_basis,
    canonicalize,
    entanglement_entropy,
    expectation,
    half_chain_entropy,
    is_canonical,
    product_state,
    random_mps,
    word_distribution,
)
from qcomplexity.oracle import DenseState, dense_hamiltonian, exact_word_distribution

DOWN = np.array([0.0, 1.0])
PLUS_X = np.array([1.0, 1.0]) / np.sqrt(2)


def _words(state, theta, win):
    s = canonicalize(state, win.start)
    return word_distribution(apply_local_basis(s, sigma_theta_basis(theta)), win)


def test_product_state_norm_and_bonds():
    rng = np.random.default_rng(0)
    kets = [v / np.linalg.norm(v) for v in rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))]
    s = product_state(kets)
    assert s.bond_dims == [1] * 4
    assert s.norm() == pytest.approx(1, abs=1e-12)


def test_product_state_rejects_unnormalized():
    with pytest.raises(InvalidInputError):
        product_state([np.array([1.0, 1.0])])


def test_product_state_has_no_entanglement():
    s = canonicalize(product_state([DOWN] * 4), 0)
    assert half_chain_entropy(s) == 0


def test_singlet_entropy():
    a = np.zeros((1, 2, 2))
    a[0, 0, 0] = a[0, 1, 1] = 1
    b = np.zeros((2, 2, 1))
    b[0, 1, 0], b[1, 0, 0] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    s = canonicalize(MpsState((a, b)), 0)
    assert half_chain_entropy(s) == pytest.approx(1.0, abs=1e-12)


def test_canonicalize_product_unchanged():
    kets = [DOWN, PLUS_X, DOWN]
    s = product_state(kets)
    for c in range(3):
        out = canonicalize(s, c)
        assert abs(abs(s.overlap(out)) - 1) <= 1e-12
        for t_in, t_out in zip(s.tensors, out.tensors):
            assert np.allclose(np.abs(t_in), np.abs(t_out))


@settings(max_examples=15, deadline=None)
@given(n=st.integers(2, 7), center=st.integers(0, 6), seed=st.integers(0, 2**31))
def test_canonicalize_preserves_state(n, center, seed):
    center = center % n
    s = random_mps(n, 2, 4, np.random.default_rng(seed))
    out = canonicalize(s, center)
    assert out.center == center
    assert is_canonical(out)
    assert abs(s.overlap(out)) >= 1 - 1e-10
    for lam in out.singular_values:
        assert lam is not None
        assert np.all(np.diff(lam) <= 0) and np.sum(lam**2) == pytest.approx(1, abs=1e-10)
    again = canonicalize(out, center)
    assert max(np.max(np.abs(a - b)) for a, b in zip(out.tensors, again.tensors)) <= 1e-12


def test_canonicalize_bad_center():
    with pytest.raises(InvalidInputError):
        canonicalize(product_state([DOWN, DOWN]), 2)


def test_half_chain_entropy_matches_dense():
    p = IsingParams(J=1, B=0.5, N=10)
    vals, vecs = np.linalg.eigh(dense_hamiltonian(p))
    from qcomplexity.dmrg import DmrgConfig, ground_state
    from qcomplexity.oracle import exact_half_chain_entropy

    res = ground_state(ising_mpo(p), DmrgConfig(chi=32))
    exact = exact_half_chain_entropy(DenseState(vecs[:, 0], 10, 2))
    assert half_chain_entropy(canonicalize(res.ground_state, 0)) == pytest.approx(exact, abs=1e-8)


def test_entanglement_entropy_odd_chain_rejected():
    with pytest.raises(InvalidInputError):
        half_chain_entropy(product_state([DOWN] * 3))
    assert entanglement_entropy(product_state([DOWN] * 3), 0) == 0


def test_apply_local_basis_identity_and_inverse():
    s = random_mps(5, 2, 4, np.random.default_rng(4))
    same = apply_local_basis(s, sigma_theta_basis(0.0))
    assert abs(s.overlap(same)) == pytest.approx(1, abs=1e-12)
    basis = sigma_theta_basis(0.7)
    rot = apply_local_basis(s, basis)
    assert rot.norm() == pytest.approx(1, abs=1e-12)
    from qcomplexity.models import MeasurementBasis

    back = apply_local_basis(rot, MeasurementBasis(basis.matrix.conj().T))
    assert abs(s.overlap(back)) == pytest.approx(1, abs=1e-12)


def test_apply_local_basis_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        apply_local_basis(product_state([DOWN]), number_basis(2))


def test_x_basis_on_plus_states_is_deterministic():
    s = product_state([PLUS_X] * 4)
    wd = _words(s, np.pi / 2, Window(0, 4))
    assert wd.prob((0, 0, 0, 0)) == pytest.approx(1)


def test_word_distribution_down_product():
    s = product_state([DOWN] * 5)
    assert _words(s, 0.0, Window(1, 3)).prob((1, 1, 1)) == pytest.approx(1)
    wd = _words(s, np.pi / 2, Window(1, 2))
    assert np.allclose(wd.probs, 0.25)


def test_word_distribution_matches_dense():
    rng = np.random.default_rng(7)
    s = random_mps(8, 2, 6, rng)
    dense = DenseState(s.to_dense() / np.linalg.norm(s.to_dense()), 8, 2)
    for theta in (0.0, 0.4, np.pi / 2):
        win = Window(2, 4)
        ref = exact_word_distribution(dense, sigma_theta_basis(theta), win)
        assert _words(s, theta, win).total_variation(ref) <= 1e-9


def test_word_distribution_marginal_consistency():
    s = random_mps(9, 3, 5, np.random.default_rng(8))
    c = canonicalize(s, 3)
    long = word_distribution(c, Window(2, 4))
    short = word_distribution(c, Window(2, 3))
    assert np.max(np.abs(long.marginal(keep_first=3).probs - short.probs)) <= 1e-10


def test_word_distribution_preconditions():
    s = canonicalize(product_state([DOWN] * 6), 0)
    with pytest.raises(InvalidStateError):
        word_distribution(s, Window(2, 2))
    big = canonicalize(product_state([DOWN] * 30), 0)
    with pytest.raises(CapacityError):
        word_distribution(big, Window(0, 27))
    with pytest.raises(InvalidInputError):
        word_distribution(s, Window(4, 4))


def test_window_centered():
    w = Window.centered(64, 10)
    assert (w.start, w.stop) == (27, 37)
    assert w.shifted(2).start == 29


def test_expectation_examples():
    p = IsingParams(J=1, B=1, N=2, symmetry_break_h=0, operators="pauli")
    up = np.array([1.0, 0.0])
    assert expectation(product_state([up, up]), ising_mpo(p)) == pytest.approx(-2)


def test_expectation_matches_dense_and_gauge():
    p = IsingParams(J=1, B=0.8, N=6, symmetry_break_h=0.1)
    s = random_mps(6, 2, 4, np.random.default_rng(11))
    v = s.to_dense()
    dense = np.real(v.conj() @ dense_hamiltonian(p) @ v) / np.vdot(v, v).real
    mpo = ising_mpo(p)
    assert expectation(s, mpo) == pytest.approx(dense, abs=1e-10)
    assert expectation(canonicalize(s, 3), mpo) == pytest.approx(dense, abs=1e-10)
