"""MPO Hamiltonians for the transverse-field Ising and Bose-Hubbard chains.

MPO site tensors have legs ``(left_bond, phys_out, phys_in, right_bond)``.
Both builders use the usual finite-state-machine layout: bond index 0 means
"no term started yet" and the last index means "term completed", so the
first site keeps row 0 and the last site keeps the final column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# "spin" means S = sigma / 2, which puts the Ising critical point at B/J = 0.5;
# "pauli" uses the bare Pauli matrices (critical point at B/J = 1).
OPERATOR_CONVENTIONS = ("spin", "pauli")


@dataclass(frozen=True)
class IsingParams:
    """Transverse-field Ising chain ``-J X_l X_{l+1} - B Z_l - h X_l``.

    ``symmetry_break_h=None`` selects the default ``1e-8 * J``.
    """

    J: float = 1.0
    B: float = 0.5
    N: int = 10
    symmetry_break_h: float | None = None
    operators: str = "spin"

    def __post_init__(self):
        if self.N < 2:
            raise InvalidInputError("Ising chain needs N >= 2")
        if self.J < 0 or self.B < 0:
            raise InvalidInputError("J and B must be non-negative")
        if self.symmetry_break_h is not None and self.symmetry_break_h < 0:
            raise InvalidInputError("symmetry_break_h must be non-negative")
        if self.operators not in OPERATOR_CONVENTIONS:
            raise InvalidInputError(f"operators must be one of {OPERATOR_CONVENTIONS}")

    @property
    def h(self) -> float:
        if self.symmetry_break_h is None:
            return 1e-8 * self.J
        return self.symmetry_break_h

    @property
    def coupling(self) -> float:
        return self.B / self.J if self.J else np.inf

    def local_ops(self) -> tuple[np.ndarray, np.ndarray]:
        scale = 0.5 if self.operators == "spin" else 1.0
        return scale * PAULI_X, scale * PAULI_Z


@dataclass(frozen=True)
class BoseHubbardParams:
    """Bose-Hubbard chain with a quadratic filling penalty.

    ``penalty_weight=None`` selects ``10 * max(J, U)`` (or 10 if both vanish).
    """

    J: float = 1.0
    U: float = 4.0
    N: int = 6
    n_max: int = 2
    nu: float = 1.0
    penalty_weight: float | None = None

    def __post_init__(self):
        if self.N < 2:
            raise InvalidInputError("Bose-Hubbard chain needs N >= 2")
        if self.J < 0 or self.U < 0:
            raise InvalidInputError("J and U must be non-negative")
        if self.n_max < 1:
            raise InvalidInputError("n_max must be >= 1")
        total = self.nu * self.N
        if abs(total - round(total)) > 1e-9:
            raise InvalidInputError(f"nu*N = {total} is not an integer")
        if total < 0 or total > self.n_max * self.N:
            raise InvalidInputError("filling outside the truncated Hilbert space")
        if self.penalty_weight is not None and self.penalty_weight <= 0:
            raise InvalidInputError("penalty_weight must be positive")

    @property
    def weight(self) -> float:
        if self.penalty_weight is None:
            return 10.0 * max(self.J, self.U) or 10.0
        return self.penalty_weight

    @property
    def n_particles(self) -> int:
        return int(round(self.nu * self.N))

    @property
    def d(self) -> int:
        return self.n_max + 1

    @property
    def coupling(self) -> float:
        return self.U / self.J if self.J else np.inf


def boson_ops(n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated ``(b, b_dag, n)`` on occupations ``0..n_max``."""
    b = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(np.complex128)
    bd = b.conj().T.copy()
    n = np.diag(np.arange(n_max + 1, dtype=float)).astype(np.complex128)
    return b, bd, n


@dataclass(frozen=True)
class MpoOperator:
    tensors: tuple[np.ndarray, ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.tensors:
            raise InvalidInputError("MPO needs at least one site")
        d = self.tensors[0].shape[1]
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[3] != 1:
            raise InvalidInputError("MPO boundary bonds must have dimension 1")
        for i, w in enumerate(self.tensors):
            if w.ndim != 4 or w.shape[1] != d or w.shape[2] != d:
                raise InvalidInputError(f"bad MPO tensor shape {w.shape} at site {i}")
            if i + 1 < len(self.tensors) and w.shape[3] != self.tensors[i + 1].shape[0]:
                raise InvalidInputError(f"MPO bond mismatch between sites {i} and {i + 1}")
            w.flags.writeable = False

    @property
    def N(self) -> int:
        return len(self.tensors)

    @property
    def d(self) -> int:
        return self.tensors[0].shape[1]

    @property
    def bond_dims(self) -> list[int]:
        return [w.shape[3] for w in self.tensors[:-1]]

    def to_dense(self) -> np.ndarray:
        """Full ``d^N x d^N`` matrix; only sensible for small chains."""
        acc = self.tensors[0][0]  # (out, in, right)
        for w in self.tensors[1:]:
            acc = np.tensordot(acc, w, axes=([acc.ndim - 1], [0]))
        acc = acc[..., 0]
        n = self.N
        # legs alternate out_1, in_1, out_2, in_2, ...
        order = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
        dim = self.d**n
        return acc.transpose(order).reshape(dim, dim)


def _bulk_to_chain(bulk: np.ndarray, n: int) -> list[np.ndarray]:
    """Slice a bulk FSM tensor ``(D, d, d, D)`` into an open chain of ``n`` sites."""
    tensors = []
    for i in range(n):
        w = bulk.copy()
        if i == 0:
            w = w[:1]
        if i == n - 1:
            w = w[..., -1:]
        tensors.append(w)
    return tensors


def ising_mpo(p: IsingParams) -> MpoOperator:
    x, z = p.local_ops()
    eye = np.eye(2, dtype=np.complex128)
    w = np.zeros((3, 2, 2, 3), dtype=np.complex128)
    w[0, :, :, 0] = eye
    w[0, :, :, 1] = x
    w[1, :, :, 2] = -p.J * x
    w[0, :, :, 2] = -p.B * z - p.h * x
    w[2, :, :, 2] = eye
    meta = {"model": "ising", "J": p.J, "B": p.B, "N": p.N, "h": p.h, "operators": p.operators}
    return MpoOperator(tuple(_bulk_to_chain(w, p.N)), meta)


def bose_hubbard_mpo(p: BoseHubbardParams) -> MpoOperator:
    """Bose-Hubbard Hamiltonian plus ``weight * (sum_l n_l - nu N)^2``.

    The penalty is built from the shifted counts ``m_l = n_l - nu`` as
    ``w sum m_l^2 + 2 w sum_{l<m} m_l m_m``. Expanding in ``n_l`` instead
    leaves a constant ``w (nu N)^2`` that cancels against the other terms
    and costs digits in the energy.
    """
    d = p.d
    b, bd, n = boson_ops(p.n_max)
    eye = np.eye(d, dtype=np.complex128)
    wgt = p.weight
    m = n - p.nu * eye
    onsite = 0.5 * p.U * (n @ n - n) + wgt * (m @ m)
    w = np.zeros((5, d, d, 5), dtype=np.complex128)
    w[0, :, :, 0] = eye
    w[0, :, :, 1] = bd
    w[0, :, :, 2] = b
    w[0, :, :, 3] = m
    w[1, :, :, 4] = -p.J * b
    w[2, :, :, 4] = -p.J * bd
    w[3, :, :, 3] = eye
    w[3, :, :, 4] = 2.0 * wgt * m
    w[0, :, :, 4] = onsite
    w[4, :, :, 4] = eye
    meta = {
        "model": "bosehubbard",
        "J": p.J,
        "U": p.U,
        "N": p.N,
        "n_max": p.n_max,
        "nu": p.nu,
        "penalty_weight": wgt,
        "filling": "quadratic-penalty",
    }
    return MpoOperator(tuple(_bulk_to_chain(w, p.N)), meta)


@dataclass(frozen=True)
class MeasurementBasis:
    """Unitary whose column ``r`` is the eigenstate reported as symbol ``r``."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError("basis must be a square matrix")
        if np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) > 1e-12:
            raise InvalidInputError("basis is not unitary")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def labels(self) -> list[int]:
        return list(range(self.d))


def sigma_theta(theta: float) -> np.ndarray:
    return np.cos(theta) * PAULI_Z + np.sin(theta) * PAULI_X


def sigma_theta_basis(theta: float) -> MeasurementBasis:
    """Eigenbasis of ``cos(t) Z + sin(t) X``; symbol 0 is the +1 outcome."""
    if not (0.0 <= theta <= np.pi / 2 + 1e-12):
        raise InvalidInputError(f"theta={theta} outside [0, pi/2]")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    m = np.array([[c, -s], [s, c]], dtype=np.complex128)
    return MeasurementBasis(m, label=f"theta={theta:.17g}")


def number_basis(n_max: int) -> MeasurementBasis:
    if n_max < 1:
        raise InvalidInputError("n_max must be >= 1")
    return MeasurementBasis(np.eye(n_max + 1, dtype=np.complex128), label="number")
