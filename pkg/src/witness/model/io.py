"""Reading and writing the explicit .tra/.lab formats.

DTMC ``.tra``::

    <num_states> <num_transitions>
    <src> <dst> <prob>

MDP ``.tra``::

    <num_states> <num_choices> <num_transitions>
    <src> <choice> <dst> <prob> [<action name>]

``.lab``::

    0="init" 1="goal"
    <state>: <id> <id> ...
"""
from __future__ import annotations

import hashlib
import re
from collections import defaultdict

from ..errors import ModelSyntaxError, ValidationError
from .mdp import MDP

_LABEL_DECL = re.compile(r'(\d+)="([^"]*)"')
_LABEL_LINE = re.compile(r'^\s*(\d+)\s*:((?:\s+\d+)*)\s*$')


def _int(tok, lineno):
    try:
        return int(tok)
    except ValueError:
        raise ModelSyntaxError(f"expected an integer, got {tok!r}", lineno) from None


def _float(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ModelSyntaxError(f"expected a probability, got {tok!r}", lineno) from None


def parse_tra(tra_text: str):
    """Parse a .tra file into ``(state_count, transitions, is_dtmc)``."""
    lines = [(i, ln.split()) for i, ln in enumerate(tra_text.splitlines(), start=1)]
    lines = [(i, toks) for i, toks in lines if toks]
    if not lines:
        raise ModelSyntaxError("empty transition file", 1)
    hno, header = lines[0]
    if len(header) == 2:
        is_dtmc = True
        state_count, declared = (_int(t, hno) for t in header)
        choices = None
    elif len(header) == 3:
        is_dtmc = False
        state_count, choices, declared = (_int(t, hno) for t in header)
    else:
        raise ModelSyntaxError("header must have 2 (DTMC) or 3 (MDP) fields", hno)
    transitions = defaultdict(list)
    for lineno, toks in lines[1:]:
        if is_dtmc:
            if len(toks) != 3:
                raise ModelSyntaxError("expected '<src> <dst> <prob>'", lineno)
            src, dst, prob = _int(toks[0], lineno), _int(toks[1], lineno), _float(toks[2], lineno)
            act = 0
        else:
            if len(toks) not in (4, 5):
                raise ModelSyntaxError("expected '<src> <choice> <dst> <prob>'", lineno)
            src, act, dst = (_int(t, lineno) for t in toks[:3])
            prob = _float(toks[3], lineno)
        if not (0 <= src < state_count and 0 <= dst < state_count):
            raise ValidationError(f"line {lineno}: state index out of range")
        if act < 0:
            raise ModelSyntaxError("negative action id", lineno)
        if prob < 0:
            raise ValidationError(f"line {lineno}: negative probability {prob}")
        transitions[(src, act)].append((dst, prob))
    if len(lines) - 1 != declared:
        raise ValidationError(
            f"header declares {declared} transitions, file has {len(lines) - 1}")
    if choices is not None and len(transitions) != choices:
        raise ValidationError(f"header declares {choices} choices, file has {len(transitions)}")
    return state_count, dict(transitions), is_dtmc


def parse_lab(lab_text: str, state_count: int | None = None) -> dict[str, set[int]]:
    """Parse a .lab file into a mapping from label names to state sets."""
    lines = [(i, ln) for i, ln in enumerate(lab_text.splitlines(), start=1) if ln.strip()]
    if not lines:
        return {}
    hno, header = lines[0]
    decls = _LABEL_DECL.findall(header)
    if not decls and header.strip():
        raise ModelSyntaxError('expected label declarations like 0="init"', hno)
    by_id = {}
    labels: dict[str, set[int]] = {}
    for lid, name in decls:
        by_id[int(lid)] = name
        labels[name] = set()
    for lineno, line in lines[1:]:
        m = _LABEL_LINE.match(line)
        if m is None:
            raise ModelSyntaxError("expected '<state>: <id> <id> ...'", lineno)
        state = int(m.group(1))
        if state_count is not None and not 0 <= state < state_count:
            raise ValidationError(f"line {lineno}: state {state} out of range")
        for tok in m.group(2).split():
            lid = int(tok)
            if lid not in by_id:
                raise ModelSyntaxError(f"undeclared label id {lid}", lineno)
            labels[by_id[lid]].add(state)
    return labels


def parse_model(tra_text: str, lab_text: str = "") -> MDP:
    """Parse explicit .tra and .lab texts into a validated :class:`MDP`.

    The initial state is the unique state labelled ``init`` if there is one,
    otherwise state 0.

    :raises ModelSyntaxError: on a malformed line
    :raises ValidationError: on row sums other than 1, negative probabilities
        or states without actions
    """
    state_count, transitions, is_dtmc = parse_tra(tra_text)
    labels = parse_lab(lab_text, state_count)
    init = labels.get("init", set())
    initial = next(iter(init)) if len(init) == 1 else 0
    return MDP.from_transitions(state_count, transitions, initial, labels, is_dtmc)


def read_model(tra_path, lab_path=None) -> MDP:
    with open(tra_path) as f:
        tra = f.read()
    lab = ""
    if lab_path is not None:
        with open(lab_path) as f:
            lab = f.read()
    return parse_model(tra, lab)


def serialize_tra(mdp: MDP) -> str:
    """Canonical .tra text. Probabilities are written with ``repr`` so they
    round-trip exactly."""
    P = mdp.P
    dtmc = mdp.is_dtmc and mdp.is_deterministic() and not mdp.index.actions.any()
    if dtmc:
        out = [f"{mdp.state_count} {P.nnz}"]
    else:
        out = [f"{mdp.state_count} {len(mdp.index)} {P.nnz}"]
    for row, (s, a) in enumerate(mdp.index):
        for t, p in mdp.row_transitions(row):
            out.append(f"{s} {t} {p!r}" if dtmc else f"{s} {a} {t} {p!r}")
    return "\n".join(out) + "\n"


def serialize_lab(mdp: MDP) -> str:
    labels = dict(mdp.labels)
    labels.setdefault("init", frozenset({mdp.initial}))
    names = sorted(labels)
    if "init" in names:
        names.remove("init")
        names.insert(0, "init")
    header = " ".join(f'{i}="{name}"' for i, name in enumerate(names))
    per_state = defaultdict(list)
    for i, name in enumerate(names):
        for s in labels[name]:
            per_state[s].append(i)
    lines = [header]
    for s in sorted(per_state):
        lines.append(f"{s}: " + " ".join(str(i) for i in sorted(per_state[s])))
    return "\n".join(lines) + "\n"


def write_model(mdp: MDP, tra_path, lab_path=None):
    with open(tra_path, "w") as f:
        f.write(serialize_tra(mdp))
    if lab_path is not None:
        with open(lab_path, "w") as f:
            f.write(serialize_lab(mdp))


def model_digest(mdp: MDP) -> str:
    """SHA-256 of the canonical .tra serialization."""
    return hashlib.sha256(serialize_tra(mdp).encode("utf-8")).hexdigest()
