"""Finite open-boundary matrix product states.

Site tensors have legs ``(left_bond, phys, right_bond)``. A state carries the
Schmidt values of every bond once it has been canonicalized; sites left of
``center`` are left-orthonormal and sites right of it right-orthonormal.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .compmech import WordDistribution
from .errors import (
    CapacityError,
    DegenerateStateError,
    DegenerateTruncationError,
    InvalidInputError,
    InvalidStateError,
)
from .models import MeasurementBasis, MpoOperator
from .tensor import DEFAULT_SVD_CUTOFF, svd_truncated

MAX_WORD_BITS = 26
# largest intermediate (in complex entries) held during breadth-first word contraction
_WORD_BLOCK = 1 << 22


@dataclass(frozen=True)
class MpsState:
    tensors: tuple[np.ndarray, ...]
    singular_values: tuple[np.ndarray | None, ...] = ()
    center: int | None = None
    chi_max: int | None = None

    def __post_init__(self):
        ts = tuple(np.asarray(t, dtype=np.complex128) for t in self.tensors)
        if not ts:
            raise InvalidInputError("MPS needs at least one site")
        if ts[0].shape[0] != 1 or ts[-1].shape[2] != 1:
            raise InvalidInputError("boundary bonds must have dimension 1")
        for i, t in enumerate(ts):
            if t.ndim != 3:
                raise InvalidInputError(f"site tensor {i} is not rank 3")
            if i + 1 < len(ts) and t.shape[2] != ts[i + 1].shape[0]:
                raise InvalidInputError(f"bond mismatch between sites {i} and {i + 1}")
            if not np.all(np.isfinite(t)):
                raise InvalidInputError(f"site tensor {i} has non-finite entries")
            t.flags.writeable = False
        sv = tuple(self.singular_values) or (None,) * (len(ts) - 1)
        if len(sv) != len(ts) - 1:
            raise InvalidInputError("need one singular-value list per bond")
        object.__setattr__(self, "tensors", ts)
        object.__setattr__(self, "singular_values", sv)

    @property
    def N(self) -> int:
        return len(self.tensors)

    @property
    def d(self) -> int:
        return self.tensors[0].shape[1]

    @property
    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    def to_dense(self) -> np.ndarray:
        acc = self.tensors[0][0]
        for t in self.tensors[1:]:
            acc = np.tensordot(acc, t, axes=([acc.ndim - 1], [0]))
        return acc[..., 0].reshape(-1)

    def overlap(self, other: "MpsState") -> complex:
        """``<self|other>``."""
        if (self.N, self.d) != (other.N, other.d):
            raise InvalidInputError("states live on different chains")
        env = np.ones((1, 1), dtype=np.complex128)
        for a, b in zip(self.tensors, other.tensors):
            x = np.tensordot(env, b, axes=([1], [0]))
            env = np.tensordot(a.conj(), x, axes=([0, 1], [0, 1]))
        return complex(env[0, 0])

    def norm(self) -> float:
        return float(np.sqrt(abs(self.overlap(self))))


@dataclass(frozen=True)
class Window:
    """Consecutive sites ``start .. start+length-1`` (0-based)."""

    start: int
    length: int

    @property
    def stop(self) -> int:
        return self.start + self.length

    def validate(self, n: int) -> None:
        if self.length < 1 or self.start < 0 or self.stop > n:
            raise InvalidInputError(f"window [{self.start}, {self.stop}) does not fit a chain of {n}")

    @classmethod
    def centered(cls, n: int, length: int) -> "Window":
        win = cls(n // 2 - length // 2, length)
        win.validate(n)
        return win

    def shifted(self, offset: int) -> "Window":
        return Window(self.start + offset, self.length)


def product_state(local_kets) -> MpsState:
    tensors = []
    for i, k in enumerate(local_kets):
        v = np.asarray(k, dtype=np.complex128).reshape(-1)
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise InvalidInputError(f"ket {i} is not normalized")
        tensors.append(v.reshape(1, -1, 1))
    sv = tuple(np.ones(1) for _ in range(len(tensors) - 1))
    return MpsState(tuple(tensors), sv, center=0)


def random_mps(n: int, d: int, chi: int, rng: np.random.Generator) -> MpsState:
    """Random normalized state with bond dimension at most ``chi``."""
    dims = [1] + [min(chi, d**min(i, n - i)) for i in range(1, n)] + [1]
    tensors = [
        rng.normal(size=(dims[i], d, dims[i + 1])) + 1j * rng.normal(size=(dims[i], d, dims[i + 1]))
        for i in range(n)
    ]
    s = MpsState(tuple(tensors))
    return canonicalize(s, 0)


def _pivot_phases(rows: np.ndarray) -> np.ndarray:
    """Phase of each row's first clearly non-zero entry.

    Dividing it out fixes the gauge of singular vectors so canonical forms of
    the same state come out identical.
    """
    mag = np.abs(rows)
    pivot = np.argmax(mag > 0.5 * mag.max(axis=1, keepdims=True), axis=1)
    z = rows[np.arange(rows.shape[0]), pivot]
    return z / np.abs(z)


def canonicalize(s: MpsState, center: int, cutoff: float = DEFAULT_SVD_CUTOFF,
                 chi_max: int | None = None) -> MpsState:
    """Mixed-canonical form with orthogonality center ``center``; fills all Schmidt values."""
    n = s.N
    if not 0 <= center < n:
        raise InvalidInputError(f"center {center} outside chain of {n}")
    chi = chi_max or 1 << 30
    ts = [t.copy() for t in s.tensors]
    # left-orthonormalize everything
    for i in range(n - 1):
        l, d, r = ts[i].shape
        q, rmat = np.linalg.qr(ts[i].reshape(l * d, r))
        ts[i] = q.reshape(l, d, -1)
        ts[i + 1] = np.tensordot(rmat, ts[i + 1], axes=([1], [0]))
    nrm = np.linalg.norm(ts[-1])
    if not np.isfinite(nrm) or nrm < 1e-300:
        raise DegenerateStateError("state has zero norm")
    ts[-1] = ts[-1] / nrm
    sv: list[np.ndarray | None] = [None] * (n - 1)
    try:
        # right sweep back to site 0: exact Schmidt values at every bond
        for i in range(n - 1, 0, -1):
            l, d, r = ts[i].shape
            res = svd_truncated(ts[i].reshape(l, d * r), chi, cutoff)
            s_i = res.singular_values / np.linalg.norm(res.singular_values)
            sv[i - 1] = s_i
            ph = _pivot_phases(res.right_isometry)
            ts[i] = (ph.conj()[:, None] * res.right_isometry).reshape(-1, d, r)
            us = res.left_isometry * (s_i * ph)[None, :]
            ts[i - 1] = np.tensordot(ts[i - 1], us, axes=([2], [0]))
        ts[0] = ts[0] / np.linalg.norm(ts[0])
        # move the center back to the requested site
        for i in range(center):
            l, d, r = ts[i].shape
            res = svd_truncated(ts[i].reshape(l * d, r), chi, cutoff)
            s_i = res.singular_values / np.linalg.norm(res.singular_values)
            sv[i] = s_i
            ph = _pivot_phases(res.left_isometry.T)
            ts[i] = (res.left_isometry * ph.conj()[None, :]).reshape(l, d, -1)
            svh = (s_i * ph)[:, None] * res.right_isometry
            ts[i + 1] = np.tensordot(svh, ts[i + 1], axes=([1], [0]))
    except DegenerateTruncationError as exc:
        raise DegenerateStateError(str(exc)) from exc
    return MpsState(tuple(ts), tuple(sv), center=center, chi_max=chi_max or s.chi_max)


def is_canonical(s: MpsState, tol: float = 1e-10) -> bool:
    if s.center is None:
        return False
    for i, t in enumerate(s.tensors):
        l, d, r = t.shape
        if i < s.center:
            m = t.reshape(l * d, r)
            if np.max(np.abs(m.conj().T @ m - np.eye(r))) > tol:
                return False
        elif i > s.center:
            m = t.reshape(l, d * r)
            if np.max(np.abs(m @ m.conj().T - np.eye(l))) > tol:
                return False
    return True


def entanglement_entropy(s: MpsState, bond: int) -> float:
    """Von Neumann entropy (bits) across ``bond`` (between sites bond and bond+1)."""
    lam = s.singular_values[bond]
    if lam is None:
        lam = canonicalize(s, s.center or 0).singular_values[bond]
    p = np.asarray(lam) ** 2
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def half_chain_entropy(s: MpsState) -> float:
    if s.N % 2:
        raise InvalidInputError("half-chain entropy needs an even chain length")
    return entanglement_entropy(s, s.N // 2 - 1)


def apply_local_basis(s: MpsState, basis: MeasurementBasis) -> MpsState:
    """Rotate every site so computational index ``r`` is the amplitude on ``basis[:, r]``."""
    if basis.d != s.d:
        raise InvalidInputError(f"basis dimension {basis.d} != local dimension {s.d}")
    udag = basis.matrix.conj().T
    ts = tuple(np.einsum("rs,lsk->lrk", udag, t) for t in s.tensors)
    return replace(s, tensors=ts)


def _word_probs(mats: list[np.ndarray]) -> np.ndarray:
    """``sum |A^{r1}...A^{rw}|^2`` for all words, assuming identity environments."""
    first = mats[0]
    l, d, r = first.shape
    # only M^dag M matters, so the left leg can be compressed by a QR
    if l > d * r:
        _, rmat = np.linalg.qr(first.reshape(l, d * r))
        first = rmat.reshape(-1, d, r)
    cur = first.transpose(1, 0, 2)  # (prefixes, left, right)
    return _extend(cur, mats[1:])


def _extend(cur: np.ndarray, rest: list[np.ndarray]) -> np.ndarray:
    if not rest:
        return np.sum(np.abs(cur) ** 2, axis=(1, 2))
    a = rest[0]
    p, l, _ = cur.shape
    _, d, r = a.shape
    if p * d * l * r > _WORD_BLOCK and p > 1:
        # depth-first on the current prefixes to bound memory
        return np.concatenate([_extend(cur[i : i + 1], rest) for i in range(p)])
    nxt = np.tensordot(cur, a, axes=([2], [0]))  # (p, l, d, r)
    nxt = nxt.transpose(0, 2, 1, 3).reshape(p * d, l, r)
    return _extend(nxt, rest[1:])


def word_distribution(s: MpsState, win: Window, meta: dict | None = None) -> WordDistribution:
    """Exact outcome distribution on ``win`` in the computational basis.

    Rotate with :func:`apply_local_basis` first to measure in another basis.
    """
    win.validate(s.N)
    if win.length * np.log2(s.d) > MAX_WORD_BITS + 1e-9:
        raise CapacityError(f"{s.d}^{win.length} words exceed the table capacity")
    if s.center is None or not win.start <= s.center < win.stop:
        raise InvalidStateError("orthogonality center must lie inside the window")
    probs = _word_probs(list(s.tensors[win.start : win.stop]))
    return WordDistribution.from_table(probs, s.d, win.length, meta=meta)


def expectation(s: MpsState, h: MpoOperator) -> float:
    if (s.N, s.d) != (h.N, h.d):
        raise InvalidInputError("MPS and MPO sizes differ")
    env = np.ones((1, 1, 1), dtype=np.complex128)  # (bra, mpo, ket)
    for a, w in zip(s.tensors, h.tensors):
        env = contract_left(env, a, w)
    val = complex(env[0, 0, 0]) / abs(s.overlap(s))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise InvalidInputError(f"expectation has imaginary part {val.imag:g}; MPO not Hermitian?")
    return float(val.real)


def contract_left(env: np.ndarray, a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Grow a left environment ``(bra, mpo, ket)`` by one site."""
    x = np.tensordot(env, a, axes=([2], [0]))  # (b, w, t, k')
    x = np.tensordot(x, w, axes=([1, 2], [0, 2]))  # (b, k', s, w')
    x = np.tensordot(a.conj(), x, axes=([0, 1], [0, 2]))  # (b', k', w')
    return x.transpose(0, 2, 1)


def contract_right(env: np.ndarray, b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Grow a right environment ``(bra, mpo, ket)`` by one site."""
    x = np.tensordot(b, env, axes=([2], [2]))  # (k, t, b', w')
    x = np.tensordot(w, x, axes=([2, 3], [1, 3]))  # (w, s, k, b')
    x = np.tensordot(b.conj(), x, axes=([1, 2], [1, 3]))  # (b, w, k)
    return x
