from __future__ import annotations

from collections.abc import Iterable, Mapping

from ..errors import ValidationError


class LabelMap:
    """Labels ``L`` and an assignment of label subsets to the states of ``S``.

    :param labels: ordered label names
    :param assignment: state -> iterable of label names; states not listed
        carry no label
    :param state_count: size of ``S``
    """

    def __init__(self, labels: Iterable[str], assignment: Mapping[int, Iterable[str]],
                 state_count: int):
        self.labels = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError("duplicate label names")
        pos = {l: i for i, l in enumerate(self.labels)}
        self.state_count = int(state_count)
        per_state = [frozenset() for _ in range(self.state_count)]
        for s, names in assignment.items():
            s = int(s)
            if not 0 <= s < self.state_count:
                raise ValidationError(f"label assignment for state {s} outside S")
            names = frozenset(names)
            unknown = names - pos.keys()
            if unknown:
                raise ValidationError(f"undeclared label(s) {sorted(unknown)}")
            per_state[s] = names
        self._of = tuple(per_state)
        self._pos = pos

    @classmethod
    def unit(cls, state_count: int) -> "LabelMap":
        """One singleton label per state; label counts become state counts."""
        names = [f"s{s}" for s in range(state_count)]
        return cls(names, {s: [names[s]] for s in range(state_count)}, state_count)

    @classmethod
    def from_model(cls, rf, names: Iterable[str]) -> "LabelMap":
        """Use the named state labels of ``rf.system``."""
        names = list(names)
        n = rf.state_count
        known = rf.system.labels
        missing = [l for l in names if l not in known]
        if missing:
            raise ValidationError(f"model declares no label(s) {missing}")
        assignment = {s: [l for l in names if s in known[l]] for s in range(n)}
        return cls(names, assignment, n)

    def labels_of(self, state: int) -> frozenset[str]:
        return self._of[state]

    def index_of(self, label: str) -> int:
        return self._pos[label]

    def is_unit(self) -> bool:
        return all(len(ls) == 1 for ls in self._of) and \
            len({next(iter(ls)) for ls in self._of}) == self.state_count

    def present(self, states: Iterable[int]) -> frozenset[str]:
        """Labels carried by at least one of ``states``."""
        out = set()
        for s in states:
            out |= self._of[s]
        return frozenset(out)

    def induced_states(self, active: Iterable[str]) -> frozenset[int]:
        """States all of whose labels are ``active`` (unlabelled states included)."""
        active = frozenset(active)
        return frozenset(s for s, ls in enumerate(self._of) if ls <= active)

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"LabelMap(labels={list(self.labels)!r}, states={self.state_count})"
