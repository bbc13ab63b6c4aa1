"""Command line front end.

Exit codes: 0 on success (or a ``True`` verdict), 2 when the property does
not hold (or ``False``), 1 on usage, input and digest errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

from . import __version__
from .certify import (PropertyQuery, certificate_from_text, certificate_to_text,
                      check_certificate, generate_certificate)
from .errors import ModeMismatch, ModelSyntaxError, SolverError, Unsatisfied, ValidationError
from .generate import layered_dtmc, random_labels, random_mdp, rng
from .lpsolver import BACKENDS
from .model import export_dot, model_digest, read_model, write_model
from .reachform import reduce
from .subsys import LabelMap, QSConfig, milp_exact, qs_heuristic, read_mask, write_result

EXIT_OK, EXIT_ERROR, EXIT_UNSAT = 0, 1, 2
RUN_COLUMNS = ("command", "digest", "mode", "sense", "threshold", "method", "iteration",
               "states", "value", "seconds", "status")
METHODS = ("qs-ao", "qs-invf", "qs-invp", "milp")
UNSAT_MESSAGE = "Property is not satisfied!"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _model_args(p, reduce_flags=True):
    p.add_argument("--tra", required=True, help="explicit transition file")
    p.add_argument("--lab", help="label file")
    if reduce_flags:
        p.add_argument("--init", required=True, help="label of the initial state")
        p.add_argument("--goal", required=True, help="label of the goal states")


def _query_args(p, sense=True):
    p.add_argument("--mode", required=True, choices=("min", "max"))
    if sense:
        p.add_argument("--sense", required=True, choices=("le", "lt", "ge", "gt"))
    p.add_argument("--threshold", required=True, type=float)
    p.add_argument("--backend", default="auto", choices=BACKENDS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="witness", description="Farkas certificates and witnessing "
                     "subsystems for reachability in MDPs.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reduce", help="write the reachability form of a model")
    _model_args(p)
    p.add_argument("--out-tra", required=True)
    p.add_argument("--out-lab")

    p = sub.add_parser("certify", help="generate a certificate for a threshold property")
    _model_args(p)
    _query_args(p)
    p.add_argument("--out", default="certificate.cert")

    p = sub.add_parser("check", help="check a certificate")
    _model_args(p)
    _query_args(p)
    p.add_argument("--cert", required=True)
    p.add_argument("--tolerance", type=float, default=1e-6)

    p = sub.add_parser("minimize", help="compute witnessing subsystems")
    _model_args(p)
    _query_args(p, sense=False)
    p.add_argument("--method", required=True, choices=("qs", "milp"))
    p.add_argument("--init-obj", default="ao", choices=("ao", "invf", "invp"))
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--labels", help="comma-separated labels to minimize instead of states")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--csv", help="run log (default: <out>/runs.csv)")

    p = sub.add_parser("render", help="export a model as DOT")
    _model_args(p, reduce_flags=False)
    p.add_argument("--reduce", action="store_true", help="render the reachability form")
    p.add_argument("--init", default="init")
    p.add_argument("--goal", default="goal")
    p.add_argument("--mask", help="file with the indices of the subsystem states")
    p.add_argument("--cert", help="certificate whose values are shown")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="threshold sweep with CSV output")
    _model_args(p)
    p.add_argument("--mode", default="max", choices=("min", "max"))
    p.add_argument("--thresholds", required=True, help="start:stop:step, stop inclusive")
    p.add_argument("--methods", default="qs-ao,milp")
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--backend", default="auto", choices=BACKENDS)
    p.add_argument("--csv", default="runs.csv")

    p = sub.add_parser("generate", help="write a random model")
    p.add_argument("--kind", default="mdp", choices=("mdp", "dtmc", "layered", "labeled"))
    p.add_argument("--states", type=int, default=20, help="inner states (mdp/dtmc/labeled)")
    p.add_argument("--layers", type=int, default=300)
    p.add_argument("--width", type=int, default=100)
    p.add_argument("--labels", type=int, default=4)
    p.add_argument("--seed", type=int, help="default: $WITNESS_SEED or 0")
    p.add_argument("--out-tra", required=True)
    p.add_argument("--out-lab", required=True)
    return parser


def _load_rf(args):
    mdp = read_model(args.tra, args.lab)
    rf, _ = reduce(mdp, args.init, args.goal)
    return rf


def _query(args):
    try:
        return PropertyQuery(args.mode, args.sense, args.threshold)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _append_runs(path, records):
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(RUN_COLUMNS)
        for rec in records:
            w.writerow([rec.get(c, "") for c in RUN_COLUMNS])


def cmd_reduce(args):
    mdp = read_model(args.tra, args.lab)
    rf, _ = reduce(mdp, args.init, args.goal)
    write_model(rf.system, args.out_tra, args.out_lab)
    print(f"states: {rf.state_count}, pairs: {rf.pair_count}")
    return EXIT_OK


def cmd_certify(args):
    rf = _load_rf(args)
    query = _query(args)
    try:
        cert = generate_certificate(rf, query, args.backend)
    except Unsatisfied:
        print(UNSAT_MESSAGE, file=sys.stderr)
        return EXIT_UNSAT
    Path(args.out).write_text(certificate_to_text(cert, model_digest(rf.system)))
    print(f"{cert.kind} written to {args.out}")
    return EXIT_OK


def cmd_check(args):
    rf = _load_rf(args)
    query = _query(args)
    cert, digest = certificate_from_text(Path(args.cert).read_text())
    if digest != model_digest(rf.system):
        print("certificate digest does not match the model", file=sys.stderr)
        return EXIT_ERROR
    if cert.query != query:
        print(f"note: certificate was generated for {cert.query}", file=sys.stderr)
    if cert.kind != query.kind:
        print(f"False\n  certificate kind {cert.kind} does not fit {query}")
        return EXIT_UNSAT
    result = check_certificate(rf, query, cert.values, args.tolerance)
    print(result.ok)
    for name, residual in result.violations:
        print(f"  violated {name}: residual {residual!r}")
    return EXIT_OK if result.ok else EXIT_UNSAT


def _labels(rf, names_arg):
    if not names_arg:
        return None
    names = [s for s in names_arg.split(",") if s]
    try:
        return LabelMap.from_model(rf, names)
    except ValidationError as exc:
        raise UsageError(str(exc)) from None


def _run_method(rf, mode, lam, method, iterations, labels, backend):
    """Yield ``(result, seconds)`` per emitted result."""
    start = time.perf_counter()
    if method == "milp":
        res = milp_exact(rf, mode, lam, labels, backend)
        yield res, time.perf_counter() - start
        return
    init = method.split("-", 1)[1] if "-" in method else "ao"
    cfg = QSConfig(iterations=iterations, initial_objective=init, backend=backend)
    for res in qs_heuristic(rf, mode, lam, cfg, labels):
        now = time.perf_counter()
        yield res, now - start
        start = now


def cmd_minimize(args):
    rf = _load_rf(args)
    lam = args.threshold
    if not 0 <= lam <= 1:
        raise UsageError("threshold must lie in [0, 1]")
    if args.iterations < 1:
        raise UsageError("--iterations must be positive")
    labels = _labels(rf, args.labels)
    method = "milp" if args.method == "milp" else f"qs-{args.init_obj}"
    digest = model_digest(rf.system)
    out = Path(args.out)
    csv_path = args.csv or out / "runs.csv"
    base = dict(command="minimize", digest=digest, mode=args.mode, sense="ge", threshold=lam,
                method=method)
    records = []
    try:
        for res, secs in _run_method(rf, args.mode, lam, method, args.iterations, labels,
                                     args.backend):
            stem = "subsys" if method == "milp" else f"subsys-{res.iteration}"
            write_result(res, rf, out, stem)
            print(f"subsys states:{res.states}, value: {res.objective_value:g}")
            status = "optimal" if res.optimal else "iteration_limit"
            records.append(dict(base, iteration=res.iteration, states=res.states,
                                value=res.objective_value, seconds=f"{secs:.6f}",
                                status=status))
    except Unsatisfied:
        records.append(dict(base, status="Unsatisfied"))
        _append_runs(csv_path, records)
        print(UNSAT_MESSAGE, file=sys.stderr)
        return EXIT_UNSAT
    except ModeMismatch as exc:
        raise UsageError(str(exc)) from None
    _append_runs(csv_path, records)
    return EXIT_OK


def cmd_render(args):
    mdp = read_model(args.tra, args.lab)
    goal = None
    if args.reduce:
        rf, _ = reduce(mdp, args.init, args.goal)
        mdp, goal = rf.system, rf.goal
    mask = None
    if args.mask:
        mask = set(read_mask(args.mask, mdp.state_count))
        if goal is not None:
            mask.add(goal)
    values = None
    kind = None
    if args.cert:
        cert, digest = certificate_from_text(Path(args.cert).read_text())
        if digest != model_digest(mdp):
            print("certificate digest does not match the rendered model", file=sys.stderr)
            return EXIT_ERROR
        values = cert.values
        kind = "state" if cert.kind == "state_vector" else "pair"
    Path(args.out).write_text(export_dot(mdp, mask, values, values_kind=kind))
    return EXIT_OK


def parse_range(text: str) -> list[float]:
    """``start:stop:step`` with ``stop`` included when hit."""
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"threshold range {text!r} is not start:stop:step") from None
    if step <= 0 or b < a or not all(map(math.isfinite, (a, b, step))):
        raise UsageError(f"threshold range {text!r} is empty")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + k * step, 12) for k in range(count)]


def cmd_bench(args):
    thresholds = parse_range(args.thresholds)
    methods = [m for m in args.methods.split(",") if m]
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise UsageError(f"unknown method(s) {bad}; choose from {','.join(METHODS)}")
    if args.iterations < 1:
        raise UsageError("--iterations must be positive")
    rf = _load_rf(args)
    digest = model_digest(rf.system)
    records = []
    failed = 0
    for lam in thresholds:
        for method in methods:
            base = dict(command="bench", digest=digest, mode=args.mode, sense="ge",
                        threshold=lam, method=method)
            start = time.perf_counter()
            try:
                for res, secs in _run_method(rf, args.mode, lam, method, args.iterations, None,
                                             args.backend):
                    records.append(dict(base, iteration=res.iteration, states=res.states,
                                        value=res.objective_value, seconds=f"{secs:.6f}",
                                        status="optimal" if res.optimal else "iteration_limit"))
            except (Unsatisfied, ModeMismatch, SolverError) as exc:
                failed += 1
                records.append(dict(base, seconds=f"{time.perf_counter() - start:.6f}",
                                    status=type(exc).__name__))
    times = [float(r["seconds"]) for r in records if r["status"] in ("optimal",
                                                                      "iteration_limit")]
    records.append(dict(command="bench-summary", digest=digest, mode=args.mode, sense="ge",
                        method=",".join(methods), seconds=f"{max(times, default=0.0):.6f}",
                        status="max_time"))
    _append_runs(args.csv, records)
    print(f"{len(records) - 1} rows written to {args.csv}")
    return EXIT_UNSAT if failed == len(thresholds) * len(methods) else EXIT_OK


def cmd_generate(args):
    gen = rng(args.seed)
    if args.kind == "layered":
        mdp = layered_dtmc(gen, args.layers, args.width)
    else:
        mdp = random_mdp(gen, args.states, dtmc=args.kind == "dtmc")
        if args.kind == "labeled":
            mdp = random_labels(gen, mdp, args.labels)
    write_model(mdp, args.out_tra, args.out_lab)
    print(f"states: {mdp.state_count}, transitions: {mdp.transition_count}")
    return EXIT_OK


COMMANDS = {"reduce": cmd_reduce, "certify": cmd_certify, "check": cmd_check,
            "minimize": cmd_minimize, "render": cmd_render, "bench": cmd_bench,
            "generate": cmd_generate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"witness: error: {exc}", file=sys.stderr)
    except (OSError, ModelSyntaxError, ValidationError, SolverError, ValueError) as exc:
        print(f"witness: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
