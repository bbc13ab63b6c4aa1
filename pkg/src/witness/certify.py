"""Farkas certificates for reachability thresholds.

========================  ==========  =====================================
property                  vector      condition
========================  ==========  =====================================
Pr^min(goal) |> lam       z over S    A z <= b  and  z(s0) |> lam
Pr^max(goal) |> lam       y >= 0      y A <= delta  and  y b |> lam
Pr^min(goal) <| lam       y >= 0      y A >= delta  and  y b <| lam
Pr^max(goal) <| lam       z over S    A z >= b  and  z(s0) <| lam
========================  ==========  =====================================

``|>`` is one of ``>=, >`` and ``<|`` one of ``<=, <``; ``y`` ranges over the
enabled state-action pairs of ``S`` and ``delta`` is the unit vector of the
initial state.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ModelSyntaxError, SolverError, Unsatisfied
from .lpsolver import ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LinearProblem, solve_lp
from .model.io import model_digest
from .reachform import ReachabilityForm

DEFAULT_TOLERANCE = 1e-6
# a strict inequality counts as satisfied only with this much room
STRICT_MARGIN = 1e-9

_SENSE_ALIASES = {"<=": "<=", "le": "<=", "<": "<", "lt": "<", ">=": ">=", "ge": ">=",
                  ">": ">", "gt": ">"}
SENSE_NAMES = {"<=": "le", "<": "lt", ">=": "ge", ">": "gt"}

STATE_VECTOR = "state_vector"
PAIR_VECTOR = "pair_vector"


@dataclass(frozen=True)
class PropertyQuery:
    """``Pr^mode(<> goal)  sense  threshold``."""

    mode: str
    sense: str
    threshold: float

    def __post_init__(self):
        if self.mode not in ("min", "max"):
            raise ValueError(f"mode must be 'min' or 'max', got {self.mode!r}")
        if self.sense not in _SENSE_ALIASES:
            raise ValueError(f"unknown sense {self.sense!r}")
        object.__setattr__(self, "sense", _SENSE_ALIASES[self.sense])
        lam = float(self.threshold)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {lam}")
        object.__setattr__(self, "threshold", lam)

    @property
    def lower_bound(self) -> bool:
        return self.sense in (">=", ">")

    @property
    def strict(self) -> bool:
        return self.sense in ("<", ">")

    @property
    def kind(self) -> str:
        if (self.mode == "min") == self.lower_bound:
            return STATE_VECTOR
        return PAIR_VECTOR


@dataclass(frozen=True)
class Certificate:
    kind: str
    values: np.ndarray
    query: PropertyQuery

    def __post_init__(self):
        if self.kind != self.query.kind:
            raise ValueError(f"{self.kind} does not match query {self.query}")
        values = np.array(self.values, dtype=float).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


def expected_length(rf: ReachabilityForm, kind: str) -> int:
    return rf.state_count if kind == STATE_VECTOR else rf.pair_count


def threshold_row(rf: ReachabilityForm, kind: str):
    """Coefficients of ``z(s0)`` (state vectors) or ``y b`` (pair vectors)."""
    if kind == STATE_VECTOR:
        return rf.initial_vector()
    return np.asarray(rf.to_goal, dtype=float)


def farkas_blocks(rf: ReachabilityForm, query: PropertyQuery, with_threshold: bool = True):
    """Linear constraint blocks ``(matrix, relation, rhs)`` of the query's
    certificate set, with strict senses relaxed to non-strict."""
    A, b, delta = rf.farkas_system()
    rel = "<=" if query.lower_bound else ">="
    blocks = []
    if query.kind == STATE_VECTOR:
        blocks.append((A, rel, b))
    else:
        blocks.append((sp.csr_matrix(A.T), rel, delta))
    if with_threshold:
        thr_rel = ">=" if query.lower_bound else "<="
        row = threshold_row(rf, query.kind)
        blocks.append((sp.csr_matrix(row.reshape(1, -1)), thr_rel, [query.threshold]))
    return blocks


def _solve(problem, backend):
    sol = solve_lp(problem, backend)
    if sol.status == ITERATION_LIMIT:
        raise SolverError("LP iteration limit reached", sol)
    return sol


def generate_certificate(rf: ReachabilityForm, query: PropertyQuery,
                         backend: str = "auto") -> Certificate:
    """Find a certificate for ``query`` or raise :class:`Unsatisfied`.

    Non-strict senses solve a feasibility LP with zero objective. Strict
    senses drop the threshold constraint, optimize its left-hand side in the
    strict direction and accept the optimum only if it clears the threshold
    by more than :data:`STRICT_MARGIN`.
    """
    kind = query.kind
    n = expected_length(rf, kind)
    if not query.strict:
        problem = LinearProblem.from_blocks(np.zeros(n), farkas_blocks(rf, query))
        sol = _solve(problem, backend)
        if sol.status != OPTIMAL:
            raise Unsatisfied()
        return Certificate(kind, sol.values, query)
    row = threshold_row(rf, kind)
    sense = "max" if query.lower_bound else "min"
    problem = LinearProblem.from_blocks(row, farkas_blocks(rf, query, False), sense=sense)
    sol = _solve(problem, backend)
    if sol.status == UNBOUNDED and query.lower_bound:
        raise SolverError("certificate LP unbounded; model not in reachability form?")
    if sol.status != OPTIMAL:
        raise Unsatisfied()
    value = float(row @ sol.values)
    lam = query.threshold
    ok = value > lam + STRICT_MARGIN if query.lower_bound else value < lam - STRICT_MARGIN
    if not ok:
        raise Unsatisfied()
    return Certificate(kind, sol.values, query)


@dataclass
class CheckResult:
    """Outcome of :func:`check_certificate`; truthy iff the vector passed.

    ``violations`` lists ``(constraint, residual)`` for every failed
    inequality, where the residual is by how much the unrelaxed inequality is
    violated.
    """

    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_certificate(rf: ReachabilityForm, query: PropertyQuery, vector,
                      tolerance: float = DEFAULT_TOLERANCE) -> CheckResult:
    """Check the tolerance-relaxed certificate conditions for ``query``.

    Each inequality is loosened by ``t`` in its own direction, for example
    ``A v - t <= b`` and ``v(s0) + t >= lam``; pair vectors must satisfy
    ``v >= -t``.

    :raises DimensionError: if ``vector`` has the wrong length
    """
    t = float(tolerance)
    if t < 0:
        raise ValueError("tolerance must be nonnegative")
    kind = query.kind
    v = np.asarray(vector, dtype=float).ravel()
    n = expected_length(rf, kind)
    if len(v) != n:
        raise DimensionError(f"{kind} for this model needs {n} entries, got {len(v)}")
    A, b, delta = rf.farkas_system()
    lam = query.threshold
    s0 = rf.initial
    violations = []
    if kind == STATE_VECTOR:
        Av = A @ v
        names = [f"row {p}" for p in rf.index]
        if query.lower_bound:
            bad = ~(Av - t <= b)
        else:
            bad = ~(Av + t >= b)
        violations += [(names[i], float(abs(Av[i] - b[i]))) for i in np.flatnonzero(bad)]
        lhs = v[s0]
        if query.lower_bound:
            good = lhs + t > lam if query.strict else lhs + t >= lam
        else:
            good = lhs - t < lam if query.strict else lhs - t <= lam
    else:
        yA = A.T @ v
        names = [f"column {s}" for s in range(rf.state_count)]
        if query.lower_bound:
            bad = ~(yA - t <= delta)
        else:
            bad = ~(yA + t >= delta)
        violations += [(names[i], float(abs(yA[i] - delta[i]))) for i in np.flatnonzero(bad)]
        neg = ~(v >= -t)
        violations += [(f"nonnegativity {rf.index[i]}", float(-v[i])) for i in np.flatnonzero(neg)]
        lhs = float(v @ b)
        if query.lower_bound:
            good = lhs + t > lam if query.strict else lhs + t >= lam
        else:
            good = lhs - t < lam if query.strict else lhs - t <= lam
    if not good:
        violations.append(("threshold", float(abs(lhs - lam))))
    return CheckResult(not violations, violations)


_HEADER = re.compile(r"^#\s*certificate\s+(.*)$")


def certificate_to_text(cert: Certificate, digest: str) -> str:
    q = cert.query
    lines = [f"# certificate kind={cert.kind} mode={q.mode} sense={SENSE_NAMES[q.sense]} "
             f"threshold={q.threshold!r} dim={len(cert.values)} digest={digest}"]
    for i in np.flatnonzero(cert.values):
        lines.append(f"{i} {float(cert.values[i])!r}")
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str):
    """Parse a certificate file; returns ``(certificate, digest)``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ModelSyntaxError("empty certificate file", 1)
    m = _HEADER.match(lines[0])
    if m is None:
        raise ModelSyntaxError("missing '# certificate' header", 1)
    fields = dict(tok.split("=", 1) for tok in m.group(1).split() if "=" in tok)
    try:
        query = PropertyQuery(fields["mode"], fields["sense"], float(fields["threshold"]))
        dim = int(fields["dim"])
        kind = fields["kind"]
        digest = fields["digest"]
    except (KeyError, ValueError) as exc:
        raise ModelSyntaxError(f"bad certificate header: {exc}", 1) from None
    values = np.zeros(dim)
    for lineno, line in enumerate(lines[1:], start=2):
        toks = line.split()
        if len(toks) != 2:
            raise ModelSyntaxError("expected '<index> <value>'", lineno)
        try:
            i, x = int(toks[0]), float(toks[1])
        except ValueError:
            raise ModelSyntaxError("expected '<index> <value>'", lineno) from None
        if not 0 <= i < dim:
            raise ModelSyntaxError(f"index {i} outside dimension {dim}", lineno)
        values[i] = x
    try:
        cert = Certificate(kind, values, query)
    except ValueError as exc:
        raise ModelSyntaxError(str(exc), 1) from None
    return cert, digest


def rf_digest(rf: ReachabilityForm) -> str:
    return model_digest(rf.system)
