"""Quantum statistical memory from memory-state overlaps.

The memory states are never built. Unitarity of the step map fixes their
overlaps through the recursion

    G[j, k] = sum_r sqrt(P(r|j) P(r|k)) G[succ(j, r), succ(k, r)]

whose iterates, started from all ones, are Bhattacharyya overlaps of
ever-longer future distributions. The stationary memory state has the same
spectrum as ``sqrt(P_j P_k) G[j, k]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compmech import EpsilonMachine
from .errors import ConvergenceError, InvalidGramError, InvalidInputError

EIG_FLOOR = 1e-14


@dataclass(frozen=True)
class GramMatrix:
    matrix: np.ndarray
    iterations: int
    residual: float

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def gram_fixed_point(m: EpsilonMachine, tol: float = 1e-12, max_iter: int = 100_000) -> GramMatrix:
    n, d = m.n_states, m.d
    amp = np.sqrt(m.emission)  # (n, d)
    succ = m.successor
    g = np.ones((n, n))
    # symbols a state never emits contribute nothing; point them anywhere
    succ_safe = np.where(succ < 0, 0, succ)
    residual = np.inf
    for it in range(1, max_iter + 1):
        new = np.zeros((n, n))
        for r in range(d):
            a = amp[:, r]
            s = succ_safe[:, r]
            new += np.outer(a, a) * g[np.ix_(s, s)]
        np.fill_diagonal(new, 1.0)
        np.clip(new, 0.0, 1.0, out=new)
        residual = float(np.max(np.abs(new - g)))
        g = new
        if residual <= tol:
            # the previous iterate already was the fixed point
            return GramMatrix(g, max(it - 1, 1), residual)
    raise ConvergenceError(f"Gram recursion did not converge in {max_iter} iterations", residual=residual)


def quantum_memory(g: GramMatrix | np.ndarray, stationary) -> float:
    """Von Neumann entropy (bits) of the stationary memory state."""
    gm = g.matrix if isinstance(g, GramMatrix) else np.asarray(g, dtype=float)
    p = np.asarray(stationary, dtype=float)
    if gm.shape != (len(p), len(p)):
        raise InvalidInputError("Gram matrix and stationary distribution disagree in size")
    if abs(p.sum() - 1.0) > 1e-9 or np.any(p < 0):
        raise InvalidInputError("stationary distribution is not normalized")
    sq = np.sqrt(p)
    mmat = sq[:, None] * gm * sq[None, :]
    mu = np.linalg.eigvalsh(mmat)
    if mu[0] < -1e-10:
        raise InvalidGramError(f"memory state has negative eigenvalue {mu[0]:g}")
    mu = mu[mu > EIG_FLOOR]
    return float(max(-np.sum(mu * np.log2(mu)), 0.0)) + 0.0


def explicit_memory_overlaps(m: EpsilonMachine, horizon: int = 12) -> np.ndarray:
    """Overlaps of memory kets built from length-``horizon`` future words.

    Test oracle only: cost grows as ``d**horizon``.
    """
    kets = np.array([np.sqrt(m.future_distribution(j, horizon)) for j in range(m.n_states)])
    return kets @ kets.T


def explicit_quantum_memory(m: EpsilonMachine, horizon: int = 12) -> float:
    """Entropy of ``sum_j P_j |s_j><s_j|`` with the kets written out explicitly."""
    kets = np.array([np.sqrt(m.future_distribution(j, horizon)) for j in range(m.n_states)])
    weighted = np.sqrt(m.stationary)[:, None] * kets
    # nonzero spectrum of rho = W^T W equals that of W W^T; use SVD of W directly
    s = np.linalg.svd(weighted, compute_uv=False) ** 2
    s = s[s > EIG_FLOOR]
    return float(-np.sum(s * np.log2(s)))
