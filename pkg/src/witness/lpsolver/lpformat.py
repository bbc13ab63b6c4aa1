"""Export to the CPLEX LP text format."""
from __future__ import annotations

import numpy as np

from .problem import LinearProblem


def _num(x):
    x = float(x)
    return repr(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def _expr(items):
    terms = []
    for j, coef in items:
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = f"x{j}" if mag == 1 else f"{_num(mag)} x{j}"
        terms.append((sign, body))
    if not terms:
        return "0 x0"
    first_sign, first = terms[0]
    out = [("- " if first_sign == "-" else "") + first]
    out += [f"{s} {b}" for s, b in terms[1:]]
    return " ".join(out)


def export_lp_format(problem: LinearProblem) -> str:
    """Render ``problem`` in LP format with variables named ``x0 .. x(n-1)``."""
    lines = ["\\ generated by witness", "Maximize" if problem.sense == "max" else "Minimize"]
    lines.append(" obj: " + _expr(enumerate(problem.objective)))
    lines.append("Subject To")
    A = problem.A.tocsr()
    for i in range(problem.n_constraints):
        lo, hi = A.indptr[i], A.indptr[i + 1]
        expr = _expr(zip(A.indices[lo:hi], A.data[lo:hi]))
        lines.append(f" c{i}: {expr} {problem.relations[i]} {_num(problem.rhs[i])}")
    lines.append("Bounds")
    for j in range(problem.n_vars):
        lo, hi = problem.lower[j], problem.upper[j]
        if np.isinf(hi):
            lines.append(f" x{j} >= {_num(lo)}")
        else:
            lines.append(f" {_num(lo)} <= x{j} <= {_num(hi)}")
    binaries = np.flatnonzero(problem.binary)
    if len(binaries):
        lines.append("Binary")
        lines.append(" " + " ".join(f"x{j}" for j in binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"
