"""Graphviz export of MDPs and subsystems."""
from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from .mdp import MDP

PALE = 'style="filled,dashed" fillcolor="#f2f2f2" color="#c8c8c8" fontcolor="#b0b0b0"'
PALE_EDGE = 'color="#d0d0d0" fontcolor="#c0c0c0"'


def _fmt(x):
    return f"{float(x):.6g}"


def _quote(s):
    s = str(s).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + s + '"'


def export_dot(mdp: MDP, subsystem_mask=None, certificate_values=None, label_colors=None,
               values_kind=None) -> str:
    """Render ``mdp`` as a DOT digraph.

    Certificate values follow the reachability-form convention: the last two
    states are the goal and fail sinks and carry no entry, so a state vector
    has ``state_count - 2`` entries and a pair vector one entry per enabled
    pair of those states.

    :param subsystem_mask: states belonging to the subsystem; all others are
        drawn pale
    :param certificate_values: state vector (printed in the state nodes) or
        pair vector (printed next to the action nodes)
    :param label_colors: ``{label: color}``; states carrying the label are
        filled with the color (first matching label in sorted order wins)
    :param values_kind: ``"state"`` or ``"pair"``; inferred from the length
        when omitted
    :raises DimensionError: if the values fit neither kind
    """
    n = mdp.state_count
    inner = max(n - 2, 0)
    inner_pairs = int(mdp.index.offsets[inner])
    state_vals = pair_vals = None
    if certificate_values is not None:
        vals = np.asarray(certificate_values, dtype=float).ravel()
        if values_kind is None:
            values_kind = "state" if len(vals) == inner else "pair"
        if values_kind == "state" and len(vals) == inner:
            state_vals = vals
        elif values_kind == "pair" and len(vals) == inner_pairs:
            pair_vals = vals
        else:
            raise DimensionError(
                f"certificate has {len(vals)} entries; expected {inner} (states) "
                f"or {inner_pairs} (state-action pairs)")
    mask = None if subsystem_mask is None else set(int(s) for s in subsystem_mask)
    colors = dict(sorted((label_colors or {}).items()))
    draw_actions = not mdp.is_deterministic() or not mdp.is_dtmc

    out = ["digraph {", '  node [shape=circle fontsize=10];', '  edge [fontsize=9];']
    for s in range(n):
        text = str(s)
        if state_vals is not None and s < inner:
            text += "\n" + _fmt(state_vals[s])
        attrs = [f"label={_quote(text)}"]
        if s == mdp.initial:
            attrs.append("penwidth=2")
        pale = mask is not None and s not in mask
        if pale:
            attrs.append(PALE)
        else:
            for label, color in colors.items():
                if s in mdp.labels.get(label, ()):
                    attrs.append(f'style=filled fillcolor={_quote(color)}')
                    break
        out.append(f"  {s} [{' '.join(attrs)}];")
    for row, (s, a) in enumerate(mdp.index):
        pale = mask is not None and s not in mask
        estyle = f" {PALE_EDGE}" if pale else ""
        succ = mdp.row_transitions(row)
        if draw_actions:
            node = f'"{s}_{a}"'
            attrs = ["shape=point"]
            if pair_vals is not None and row < inner_pairs:
                attrs.append(f"xlabel={_quote(_fmt(pair_vals[row]))}")
            out.append(f"  {node} [{' '.join(attrs)}];")
            out.append(f'  {s} -> {node} [arrowhead=none label="{a}"{estyle}];')
            for t, p in succ:
                out.append(f'  {node} -> {t} [label="{_fmt(p)}"{estyle}];')
        else:
            for t, p in succ:
                out.append(f'  {s} -> {t} [label="{_fmt(p)}"{estyle}];')
    out.append("}")
    return "\n".join(out) + "\n"
