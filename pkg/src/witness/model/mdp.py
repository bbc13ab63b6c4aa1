"""Explicit-state MDP representation.

DTMCs are stored as MDPs with exactly one action (id 0) per state.
"""
from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from ..errors import ValidationError

ROW_SUM_TOL = 1e-9


class StateActionIndex:
    """Bijection between matrix rows and enabled (state, action) pairs.

    Rows are ordered state-major, then by ascending action id. Every state in
    ``range(state_count)`` owns a contiguous, nonempty block of rows.
    """

    def __init__(self, pairs: Iterable[tuple[int, int]], state_count: int | None = None):
        pairs = sorted((int(s), int(a)) for s, a in pairs)
        self.pairs: tuple[tuple[int, int], ...] = tuple(pairs)
        self._lookup = {p: i for i, p in enumerate(self.pairs)}
        if len(self._lookup) != len(self.pairs):
            raise ValidationError("duplicate (state, action) pair")
        self.states = np.fromiter((s for s, _ in self.pairs), dtype=np.int64, count=len(self.pairs))
        self.actions = np.fromiter((a for _, a in self.pairs), dtype=np.int64, count=len(self.pairs))
        if state_count is None:
            state_count = int(self.states[-1]) + 1 if len(self.pairs) else 0
        self.state_count = state_count
        counts = np.bincount(self.states, minlength=state_count)
        if len(counts) > state_count:
            raise ValidationError("pair references a state outside the index")
        missing = np.flatnonzero(counts == 0)
        if len(missing):
            raise ValidationError(f"state {int(missing[0])} has no enabled action")
        self.offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, row):
        return self.pairs[row]

    def __eq__(self, other):
        return isinstance(other, StateActionIndex) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def row(self, state: int, action: int) -> int:
        return self._lookup[(state, action)]

    def rows_of(self, state: int) -> range:
        return range(int(self.offsets[state]), int(self.offsets[state + 1]))

    def actions_of(self, state: int) -> tuple[int, ...]:
        lo, hi = self.offsets[state], self.offsets[state + 1]
        return tuple(int(a) for a in self.actions[lo:hi])


class MDP:
    """An MDP ``(S_all, Act, P, s0)`` with state labels.

    :param matrix: sparse matrix of shape (number of enabled pairs, state_count);
        row ``i`` holds the distribution of ``index[i]``
    :param index: the row index of enabled state-action pairs
    :param initial: the initial state
    :param labels: mapping from label names to sets of states
    :param is_dtmc: records whether the model was declared as a DTMC
    """

    def __init__(self, matrix, index: StateActionIndex, initial: int = 0,
                 labels: Mapping[str, Iterable[int]] | None = None, is_dtmc: bool = False):
        matrix = sp.csr_matrix(matrix, dtype=np.float64)
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()
        n = index.state_count
        if matrix.shape != (len(index), n):
            raise ValidationError(
                f"transition matrix has shape {matrix.shape}, expected {(len(index), n)}")
        if matrix.nnz and matrix.data.min() < 0:
            row = int(np.searchsorted(matrix.indptr, np.argmin(matrix.data), side="right") - 1)
            raise ValidationError(f"negative probability in row {index[row]}")
        sums = np.asarray(matrix.sum(axis=1)).ravel()
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if len(bad):
            s, a = index[int(bad[0])]
            raise ValidationError(
                f"probabilities of (state {s}, action {a}) sum to {sums[bad[0]]!r}, not 1")
        # rescale rows that are off by more than rounding; idempotent on re-read
        off = np.abs(sums - 1.0) > 1e-12
        if off.any():
            scale = np.where(off, 1.0 / np.where(sums > 0, sums, 1.0), 1.0)
            matrix = sp.csr_matrix(sp.diags(scale) @ matrix)
            matrix.sort_indices()
        if not 0 <= initial < n:
            raise ValidationError(f"initial state {initial} out of range")
        self._P = matrix
        self.index = index
        self.initial = int(initial)
        self.is_dtmc = bool(is_dtmc)
        lab = {}
        for name, states in (labels or {}).items():
            states = frozenset(int(s) for s in states)
            for s in states:
                if not 0 <= s < n:
                    raise ValidationError(f"label {name!r} references state {s} out of range")
            lab[str(name)] = states
        self.labels: dict[str, frozenset[int]] = lab

    @classmethod
    def from_transitions(cls, state_count: int,
                         transitions: Mapping[tuple[int, int], Iterable[tuple[int, float]]],
                         initial: int = 0, labels=None, is_dtmc: bool | None = None) -> "MDP":
        """Build an MDP from ``{(state, action): [(target, prob), ...]}``."""
        index = StateActionIndex(transitions.keys(), state_count)
        rows, cols, vals = [], [], []
        for (s, a), succ in transitions.items():
            r = index.row(int(s), int(a))
            for t, p in succ:
                if not 0 <= int(t) < state_count:
                    raise ValidationError(f"transition ({s},{a}) targets state {t} out of range")
                if p < 0:
                    raise ValidationError(f"negative probability {p} on ({s},{a})->{t}")
                rows.append(r)
                cols.append(int(t))
                vals.append(float(p))
        matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(index), state_count))
        if is_dtmc is None:
            is_dtmc = len(index) == state_count
        return cls(matrix, index, initial, labels, is_dtmc)

    @classmethod
    def dtmc(cls, matrix, initial: int = 0, labels=None) -> "MDP":
        """Build a DTMC from a square (dense or sparse) transition matrix."""
        matrix = sp.csr_matrix(matrix, dtype=np.float64)
        n = matrix.shape[0]
        index = StateActionIndex(((s, 0) for s in range(n)), n)
        return cls(matrix, index, initial, labels, True)

    @property
    def P(self) -> sp.csr_matrix:
        return self._P

    @property
    def state_count(self) -> int:
        return self.index.state_count

    @property
    def transition_count(self) -> int:
        return int(self._P.nnz)

    @property
    def actions_per_state(self) -> dict[int, tuple[int, ...]]:
        return {s: self.index.actions_of(s) for s in range(self.state_count)}

    def transitions(self, state: int, action: int) -> list[tuple[int, float]]:
        r = self.index.row(state, action)
        return self.row_transitions(r)

    def row_transitions(self, row: int) -> list[tuple[int, float]]:
        lo, hi = self._P.indptr[row], self._P.indptr[row + 1]
        return [(int(t), float(p)) for t, p in zip(self._P.indices[lo:hi], self._P.data[lo:hi])]

    def successors(self, state: int) -> set[int]:
        lo, hi = self.index.offsets[state], self.index.offsets[state + 1]
        ptr = self._P.indptr
        return set(int(t) for t in self._P.indices[ptr[lo]:ptr[hi]])

    def states_with_label(self, label: str) -> frozenset[int]:
        return self.labels.get(label, frozenset())

    def labels_of(self, state: int) -> set[str]:
        return {name for name, states in self.labels.items() if state in states}

    def is_deterministic(self) -> bool:
        return len(self.index) == self.state_count

    def __repr__(self):
        kind = "DTMC" if self.is_dtmc else "MDP"
        return (f"{kind}(states={self.state_count}, pairs={len(self.index)}, "
                f"transitions={self.transition_count}, initial={self.initial})")


def isomorphic(a: MDP, b: MDP, tol: float = 1e-12) -> bool:
    """Identical state count, enabled pairs and transition probabilities."""
    if a.state_count != b.state_count or a.index != b.index:
        return False
    diff = (a.P - b.P).tocsr()
    return diff.nnz == 0 or float(abs(diff).max()) <= tol
