"""Causal states, epsilon-machines and block information measures.

A word of length ``w`` over ``d`` symbols is stored as its base-``d`` integer
with the leftmost (earliest) symbol most significant, so a table of shape
``(d**w,)`` reshapes to ``(d,) * w`` with axis 0 the first symbol.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateProcessError, InvalidInputError, QComplexityError

PROB_CLAMP = 1e-14
DEFAULT_P_FLOOR = 1e-12
DEFAULT_MERGE_TOL = 1e-8


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float).reshape(-1)
    p = p[p > 0]
    return float(max(-np.sum(p * np.log2(p)), 0.0)) + 0.0


def word_to_int(symbols, d: int) -> int:
    out = 0
    for s in symbols:
        out = out * d + int(s)
    return out


def int_to_word(index: int, d: int, w: int) -> tuple[int, ...]:
    digits = []
    for _ in range(w):
        index, r = divmod(index, d)
        digits.append(r)
    return tuple(reversed(digits))


@dataclass(frozen=True)
class WordDistribution:
    d: int
    w: int
    probs: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.shape[0] != self.d**self.w:
            raise InvalidInputError(f"table has {p.shape[0]} entries, expected {self.d}^{self.w}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InvalidInputError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > 1e-10:
            raise InvalidInputError(f"probabilities sum to {p.sum():.17g}")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_table(cls, table, d: int, w: int, meta: dict | None = None,
                   clamp: float = PROB_CLAMP) -> "WordDistribution":
        """Clamp entries below ``clamp`` (including tiny negatives) and renormalize."""
        p = np.real(np.asarray(table, dtype=np.complex128)).reshape(-1).astype(float)
        p = np.where(p < clamp, 0.0, p)
        total = p.sum()
        if total <= 0:
            raise InvalidInputError("word table has no probability mass")
        return cls(d, w, p / total, dict(meta or {}))

    def table(self) -> np.ndarray:
        return self.probs.reshape((self.d,) * self.w)

    def prob(self, word) -> float:
        return float(self.probs[word_to_int(word, self.d)])

    def marginal(self, keep_first: int | None = None, keep_last: int | None = None) -> "WordDistribution":
        """Marginal on the first (or last) symbols of the window."""
        t = self.table()
        if keep_first is not None:
            sub = t.sum(axis=tuple(range(keep_first, self.w))) if keep_first < self.w else t
            w = keep_first
        elif keep_last is not None:
            sub = t.sum(axis=tuple(range(0, self.w - keep_last))) if keep_last < self.w else t
            w = keep_last
        else:
            raise InvalidInputError("give keep_first or keep_last")
        return WordDistribution(self.d, w, np.asarray(sub).reshape(-1) / np.sum(sub), dict(self.meta))

    def total_variation(self, other: "WordDistribution") -> float:
        if (self.d, self.w) != (other.d, other.w):
            raise InvalidInputError("distributions have different shapes")
        return 0.5 * float(np.sum(np.abs(self.probs - other.probs)))

    # -- text serialization -------------------------------------------------
    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write("# word-distribution v1\n")
        buf.write(f"d {self.d}\n")
        buf.write(f"w {self.w}\n")
        buf.write("meta " + json.dumps(self.meta, sort_keys=True, default=str) + "\n")
        buf.write("data\n")
        for i, p in enumerate(self.probs):
            buf.write(f"{i} {p:.17g}\n")
        return buf.getvalue()

    @classmethod
    def loads(cls, text: str) -> "WordDistribution":
        d = w = None
        meta: dict = {}
        rows: list[tuple[int, float]] = []
        in_data = False
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if in_data:
                k, v = line.split()
                rows.append((int(k), float(v)))
                continue
            key, _, rest = line.partition(" ")
            if key == "d":
                d = int(rest)
            elif key == "w":
                w = int(rest)
            elif key == "meta":
                meta = json.loads(rest)
            elif key == "data":
                in_data = True
            else:
                raise InvalidInputError(f"unknown header line {line!r}")
        if d is None or w is None:
            raise InvalidInputError("missing d or w header")
        p = np.zeros(d**w)
        for k, v in rows:
            p[k] = v
        return cls(d, w, p, meta)


@dataclass(frozen=True)
class ConditionalFamily:
    """Futures of length L conditioned on retained pasts of length L.

    ``pasts`` are word indices; ``past_probs[i]`` and ``cond[i]`` (shape
    ``(d**L,)``) belong to ``pasts[i]``.
    """

    d: int
    L: int
    pasts: np.ndarray
    past_probs: np.ndarray
    cond: np.ndarray
    dropped_mass: float = 0.0

    def index_of(self) -> dict[int, int]:
        return {int(u): i for i, u in enumerate(self.pasts)}

    def next_symbol(self) -> np.ndarray:
        """``P(r | u)``, shape ``(n_pasts, d)``."""
        if self.L == 0:
            return self.cond.reshape(len(self.pasts), self.d)
        return self.cond.reshape(len(self.pasts), self.d, -1).sum(axis=2)


def conditionals(wd: WordDistribution, L: int, p_floor: float = DEFAULT_P_FLOOR) -> ConditionalFamily:
    if L < 1 or wd.w != 2 * L:
        raise InvalidInputError(f"need a length-{2 * L} distribution, got length {wd.w}")
    if p_floor < 0:
        raise InvalidInputError("p_floor must be non-negative")
    joint = wd.probs.reshape(wd.d**L, wd.d**L)
    pu = joint.sum(axis=1)
    keep = (pu >= p_floor) & (pu > 0)
    if not np.any(keep):
        raise DegenerateProcessError("every past fell below the probability floor")
    pasts = np.flatnonzero(keep)
    kept = pu[keep]
    dropped = float(1.0 - kept.sum())
    cond = joint[keep] / kept[:, None]
    cond = cond / cond.sum(axis=1, keepdims=True)
    return ConditionalFamily(wd.d, L, pasts, kept / kept.sum(), cond, max(dropped, 0.0))


@dataclass
class EpsilonMachine:
    """Unifilar causal-state model built from a conditional family.

    ``states[j]`` lists the past word indices merged into state ``j``;
    ``successor[j, r]`` is ``-1`` where ``emission[j, r] == 0``.
    """

    d: int
    L: int
    states: list[list[int]]
    emission: np.ndarray
    successor: np.ndarray
    stationary: np.ndarray
    max_intra_distance: float = 0.0
    dropped_emission: float = 0.0

    @property
    def n_states(self) -> int:
        return len(self.states)

    def transition_matrices(self) -> np.ndarray:
        """``T[r, k, j] = P(r|j) delta(k, successor(j, r))``."""
        n = self.n_states
        t = np.zeros((self.d, n, n))
        for j in range(n):
            for r in range(self.d):
                k = self.successor[j, r]
                if k >= 0:
                    t[r, k, j] = self.emission[j, r]
        return t

    def stationarity_residual(self) -> float:
        t = self.transition_matrices().sum(axis=0)
        return float(np.max(np.abs(t @ self.stationary - self.stationary)))

    def future_distribution(self, j: int, h: int) -> np.ndarray:
        """Length-``h`` future word distribution generated from state ``j``."""
        probs = np.ones(1)
        states = np.array([j])
        for _ in range(h):
            e = self.emission[states]  # (n_words, d)
            probs = (probs[:, None] * e).reshape(-1)
            states = self.successor[states].reshape(-1)
            states = np.where(states < 0, 0, states)
        return probs


def _tv_matrix(cond: np.ndarray) -> np.ndarray:
    n = cond.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        out[i] = 0.5 * np.abs(cond - cond[i]).sum(axis=1)
    return out


def _connected_components(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    label = -np.ones(n, dtype=int)
    current = 0
    for start in range(n):
        if label[start] >= 0:
            continue
        stack = [start]
        label[start] = current
        while stack:
            i = stack.pop()
            for k in np.flatnonzero(adj[i] & (label < 0)):
                label[k] = current
                stack.append(k)
        current += 1
    return label


def build_machine(cf: ConditionalFamily, merge_tol: float = DEFAULT_MERGE_TOL) -> EpsilonMachine:
    """Merge pasts with matching length-L futures, then refine to unifilarity."""
    if merge_tol < 0:
        raise InvalidInputError("merge_tol must be non-negative")
    d, L = cf.d, cf.L
    n = len(cf.pasts)
    tv = _tv_matrix(cf.cond)
    label = _connected_components(tv <= merge_tol)

    # successor past for each (past, symbol): drop the oldest symbol, append r
    idx = cf.index_of()
    nxt = cf.next_symbol()
    succ_past = -np.ones((n, d), dtype=int)
    for i, u in enumerate(cf.pasts):
        base = (int(u) % d ** (L - 1)) * d
        for r in range(d):
            if nxt[i, r] > 0:
                succ_past[i, r] = idx.get(base + r, -1)

    for _ in range(n + 1):
        changed = False
        new_label = label.copy()
        next_free = label.max() + 1
        for s in np.unique(label):
            members = np.flatnonzero(label == s)
            if len(members) < 2:
                continue
            for r in range(d):
                targets = succ_past[members, r]
                ok = targets >= 0
                groups = np.unique(label[targets[ok]])
                if len(groups) < 2:
                    continue
                # split by successor state; pasts with no successor on r stay with the heaviest group
                mass = {g: cf.past_probs[members[ok][label[targets[ok]] == g]].sum() for g in groups}
                heaviest = max(groups, key=lambda g: (mass[g], -g))
                for g in groups:
                    if g == heaviest:
                        continue
                    sel = members[ok][label[targets[ok]] == g]
                    new_label[sel] = next_free
                    next_free += 1
                changed = True
                break
        label = new_label
        if not changed:
            break
    else:
        raise QComplexityError("unifilar refinement failed to stabilize")

    # relabel states in order of their smallest past index
    order = {}
    for i in range(n):
        order.setdefault(label[i], len(order))
    label = np.array([order[s] for s in label])
    n_states = len(order)

    states = [[int(cf.pasts[i]) for i in np.flatnonzero(label == s)] for s in range(n_states)]
    stationary = np.array([cf.past_probs[label == s].sum() for s in range(n_states)])
    emission = np.zeros((n_states, d))
    successor = -np.ones((n_states, d), dtype=int)
    dropped = 0.0
    for s in range(n_states):
        members = np.flatnonzero(label == s)
        w = cf.past_probs[members]
        emission[s] = (w[:, None] * nxt[members]).sum(axis=0) / w.sum()
        for r in range(d):
            targets = succ_past[members, r]
            ok = targets >= 0
            if np.any(ok):
                successor[s, r] = label[targets[ok][0]]
            elif emission[s, r] > 0:
                # successor past fell below the floor: its mass is negligible
                dropped += stationary[s] * emission[s, r]
                emission[s, r] = 0.0
        emission[s] /= emission[s].sum()

    intra = 0.0
    for s in range(n_states):
        members = np.flatnonzero(label == s)
        if len(members) > 1:
            intra = max(intra, float(tv[np.ix_(members, members)].max()))

    return EpsilonMachine(d, L, states, emission, successor, stationary / stationary.sum(),
                          intra, dropped)


def statistical_complexity(m: EpsilonMachine) -> float:
    return shannon_bits(m.stationary)


def excess_entropy(wd: WordDistribution, L: int) -> float:
    """Block mutual information ``I(R_{-L:0}; R_{0:L})`` in bits."""
    if wd.w != 2 * L:
        raise InvalidInputError(f"need a length-{2 * L} distribution, got length {wd.w}")
    joint = wd.probs.reshape(wd.d**L, wd.d**L)
    pu = joint.sum(axis=1)
    pv = joint.sum(axis=0)
    mi = shannon_bits(pu) + shannon_bits(pv) - shannon_bits(joint)
    return max(mi, 0.0)


def entropy_rate(cf: ConditionalFamily) -> float:
    nxt = cf.next_symbol()
    return float(sum(p * shannon_bits(row) for p, row in zip(cf.past_probs, nxt)))
