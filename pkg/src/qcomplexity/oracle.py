"""Brute-force reference path for small chains.

Everything here works on the full ``d^N`` state vector and is independent of
the MPS/MPO code, so it can be used to check that path.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .compmech import WordDistribution
from .errors import CapacityError, InvalidInputError
from .models import BoseHubbardParams, IsingParams, MeasurementBasis, boson_ops
from .mps import Window
from .tensor import hermitian_eigs

MAX_DENSE_DIM = 2**14


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray
    N: int
    d: int

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if a.shape[0] != self.d**self.N:
            raise InvalidInputError("amplitude vector has the wrong length")
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise InvalidInputError("dense state is not normalized")
        object.__setattr__(self, "amplitudes", a)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.d,) * self.N)


def _check_capacity(d: int, n: int) -> None:
    if d**n > MAX_DENSE_DIM:
        raise CapacityError(f"dense dimension {d}^{n} exceeds {MAX_DENSE_DIM}")


def _site_op(op: np.ndarray, site: int, n: int) -> np.ndarray:
    d = op.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    return reduce(np.kron, [op if j == site else eye for j in range(n)])


def _pair_op(a: np.ndarray, b: np.ndarray, site: int, n: int) -> np.ndarray:
    d = a.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    mats = [eye] * n
    mats[site] = a
    mats[site + 1] = b
    return reduce(np.kron, mats)


def dense_hamiltonian(p: IsingParams | BoseHubbardParams) -> np.ndarray:
    """Term-by-term dense Hamiltonian, including symmetry-break/penalty terms."""
    if isinstance(p, IsingParams):
        n = p.N
        _check_capacity(2, n)
        x, z = p.local_ops()
        h = np.zeros((2**n, 2**n), dtype=np.complex128)
        for l in range(n - 1):
            h -= p.J * _pair_op(x, x, l, n)
        for l in range(n):
            h -= p.B * _site_op(z, l, n) + p.h * _site_op(x, l, n)
        return h
    if isinstance(p, BoseHubbardParams):
        n, d = p.N, p.d
        _check_capacity(d, n)
        b, bd, num = boson_ops(p.n_max)
        dim = d**n
        h = np.zeros((dim, dim), dtype=np.complex128)
        for l in range(n - 1):
            hop = _pair_op(bd, b, l, n)
            h -= p.J * (hop + hop.conj().T)
        total = np.zeros((dim, dim), dtype=np.complex128)
        for l in range(n):
            nl = _site_op(num, l, n)
            h += 0.5 * p.U * (nl @ nl - nl)
            total += nl
        dev = total - p.n_particles * np.eye(dim)
        h += p.weight * dev @ dev
        return h
    raise InvalidInputError(f"unsupported model parameters {type(p).__name__}")


def exact_ground(h: np.ndarray, d: int, n: int) -> tuple[float, DenseState]:
    evals, evecs = hermitian_eigs(h)
    v = evecs[:, 0]
    return float(evals[0]), DenseState(v / np.linalg.norm(v), n, d)


def exact_word_distribution(
    s: DenseState, basis: MeasurementBasis, win: Window, meta: dict | None = None
) -> WordDistribution:
    """Born probabilities of the window's outcomes, other sites traced out."""
    _check_capacity(s.d, s.N)
    if basis.d != s.d:
        raise InvalidInputError("basis dimension does not match the local dimension")
    win.validate(s.N)
    psi = s.tensor()
    udag = basis.matrix.conj().T
    for site in range(win.start, win.stop):
        # amplitude <r| acting on this leg
        psi = np.moveaxis(np.tensordot(udag, psi, axes=([1], [site])), 0, site)
    prob = np.abs(psi) ** 2
    outside = tuple(j for j in range(s.N) if not win.start <= j < win.stop)
    if outside:
        prob = prob.sum(axis=outside)
    return WordDistribution.from_table(prob.reshape(-1), s.d, win.length, meta=meta)


def exact_half_chain_entropy(s: DenseState) -> float:
    if s.N % 2:
        raise InvalidInputError("half-chain entropy needs an even chain length")
    _check_capacity(s.d, s.N)
    half = s.d ** (s.N // 2)
    m = s.amplitudes.reshape(half, half)
    rho = m @ m.conj().T
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-16]
    return float(-np.sum(w * np.log2(w)))


def number_variance(s: DenseState, target: int) -> float:
    """``<(sum_l n_l - target)^2>`` in the occupation basis."""
    occ = np.indices((s.d,) * s.N).sum(axis=0).reshape(-1)
    return float(np.sum(np.abs(s.amplitudes) ** 2 * (occ - target) ** 2))
