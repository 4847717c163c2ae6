"""Small hidden-Markov sources with known structure, used as golden references."""

from __future__ import annotations

import numpy as np

from .compmech import WordDistribution
from .errors import InvalidInputError


def hmm_word_distribution(transitions, w: int, stationary=None) -> WordDistribution:
    """Length-``w`` word probabilities of an edge-labelled hidden Markov chain.

    ``transitions[r][i, j]`` is the probability of emitting ``r`` while moving
    from state ``i`` to ``j``. Without ``stationary`` the chain's stationary
    distribution is used.
    """
    t = np.asarray(transitions, dtype=float)
    if t.ndim != 3 or t.shape[1] != t.shape[2]:
        raise InvalidInputError("transitions must have shape (d, n, n)")
    d, n, _ = t.shape
    total = t.sum(axis=0)
    if not np.allclose(total.sum(axis=1), 1.0, atol=1e-12):
        raise InvalidInputError("rows of the summed transition matrix must sum to 1")
    if stationary is None:
        vals, vecs = np.linalg.eig(total.T)
        pi = np.real(vecs[:, np.argmin(np.abs(vals - 1.0))])
        pi = pi / pi.sum()
    else:
        pi = np.asarray(stationary, dtype=float)
    rows = pi[None, :]
    for _ in range(w):
        # every prefix row branches into d children, last symbol fastest
        rows = np.einsum("pi,rij->prj", rows, t).reshape(-1, n)
    return WordDistribution.from_table(rows.sum(axis=1), d, w)


def golden_mean(p: float = 0.5) -> np.ndarray:
    """No two consecutive 1s; state A emits 1 with probability ``p``."""
    t = np.zeros((2, 2, 2))
    t[0, 0, 0] = 1 - p
    t[1, 0, 1] = p
    t[0, 1, 0] = 1.0
    return t


def period_two() -> np.ndarray:
    t = np.zeros((2, 2, 2))
    t[0, 0, 1] = 1.0
    t[1, 1, 0] = 1.0
    return t


def fair_coin() -> np.ndarray:
    return np.full((2, 1, 1), 0.5)
