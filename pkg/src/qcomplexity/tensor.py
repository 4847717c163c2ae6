"""Dense complex linear algebra: truncated SVD, Hermitian eigensolver, Lanczos.

Matrices are plain 2-D numpy arrays; site tensors are 3-D arrays with legs
``(left_bond, phys, right_bond)``. LAPACK does the factorizations, the Lanczos
ground-state solver is implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DegenerateTruncationError, InvalidInputError

DEFAULT_SVD_CUTOFF = 1e-14
DEFAULT_LANCZOS_TOL = 1e-12


@dataclass(frozen=True)
class SvdResult:
    """Truncated singular value decomposition ``m ~ U @ diag(s) @ Vh``."""

    left_isometry: np.ndarray
    singular_values: np.ndarray
    right_isometry: np.ndarray
    truncation_error: float

    @property
    def rank(self) -> int:
        return len(self.singular_values)


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def svd_truncated(m, chi_max: int, cutoff: float = DEFAULT_SVD_CUTOFF) -> SvdResult:
    """Keep at most ``chi_max`` singular values, dropping any ``<= cutoff``.

    ``truncation_error`` is the discarded weight, the sum of squares of the
    dropped singular values.
    """
    a = as_matrix(m)
    if chi_max < 1:
        raise InvalidInputError("chi_max must be >= 1")
    if cutoff < 0:
        raise InvalidInputError("cutoff must be non-negative")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but robust
        import scipy.linalg

        u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
    k = min(chi_max, int(np.count_nonzero(s > cutoff)))
    if k == 0:
        raise DegenerateTruncationError(
            f"all {len(s)} singular values are below cutoff {cutoff:g}"
        )
    discarded = float(np.sum(s[k:] ** 2))
    return SvdResult(u[:, :k], s[:k].copy(), vh[:k, :], discarded)


def hermitian_eigs(m, herm_tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"matrix must be square, got {a.shape}")
    if a.size and np.max(np.abs(a - a.conj().T)) > herm_tol:
        raise InvalidInputError("matrix is not Hermitian")
    w, v = np.linalg.eigh(a)
    return w, v


@dataclass
class LanczosInfo:
    iterations: int
    residual: float
    krylov_dim: int


def lanczos_ground(
    apply: Callable[[np.ndarray], np.ndarray],
    dim: int,
    max_iter: int = 300,
    tol: float = DEFAULT_LANCZOS_TOL,
    seed_vector: np.ndarray | None = None,
    *,
    restart: int = 120,
    relative: bool = False,
    info: LanczosInfo | None = None,
) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a Hermitian linear map.

    The Krylov basis is fully reorthogonalized. When the basis reaches
    ``restart`` vectors the solver restarts from the current Ritz vector;
    ``max_iter`` bounds the total number of ``apply`` calls. Convergence is
    declared once ``||apply(v) - E v|| <= tol`` for the normalized Ritz
    vector ``v``; with ``relative=True`` the bound becomes
    ``tol * max(1, max|Ritz value|)``, i.e. relative to the spectral scale.
    """
    if dim < 1:
        raise InvalidInputError("dim must be >= 1")
    if seed_vector is None:
        raise InvalidInputError("a seed vector is required")
    v0 = np.asarray(seed_vector, dtype=np.complex128).reshape(-1)
    if v0.shape[0] != dim:
        raise InvalidInputError(f"seed has length {v0.shape[0]}, expected {dim}")
    nrm = np.linalg.norm(v0)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise InvalidInputError("seed vector must be non-zero and finite")
    v = v0 / nrm
    restart = max(2, min(restart, dim))

    best_res = np.inf
    n_apply = 0
    energy = np.nan
    while True:
        basis = np.empty((restart, dim), dtype=np.complex128)
        alphas: list[float] = []
        betas: list[float] = []
        basis[0] = v
        for k in range(restart):
            w = np.asarray(apply(basis[k]), dtype=np.complex128).reshape(-1)
            n_apply += 1
            alpha = float(np.real(np.vdot(basis[k], w)))
            alphas.append(alpha)
            # full reorthogonalization, applied twice for stability
            q = basis[: k + 1]
            for _ in range(2):
                # (q^* w) without materializing q.conj()
                w = w - (q @ w.conj()).conj() @ q
            beta = float(np.linalg.norm(w))

            t = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
            evals, evecs = np.linalg.eigh(t)
            energy = float(evals[0])
            y = evecs[:, 0]
            ritz_res = beta * abs(y[-1])
            if relative:
                ritz_res /= max(1.0, abs(evals[0]), abs(evals[-1]))
            best_res = min(best_res, ritz_res)
            invariant = beta < 1e-14 * max(1.0, abs(energy)) or k + 1 == dim
            if ritz_res <= tol or invariant:
                vec = y @ basis[: k + 1]
                vec /= np.linalg.norm(vec)
                if info is not None:
                    info.iterations = n_apply
                    info.residual = float(ritz_res)
                    info.krylov_dim = k + 1
                return energy, vec
            if n_apply >= max_iter:
                raise ConvergenceError(
                    f"Lanczos did not converge in {max_iter} iterations",
                    residual=float(best_res),
                )
            if k + 1 < restart:
                betas.append(beta)
                basis[k + 1] = w / beta
        v = y @ basis
        v /= np.linalg.norm(v)
