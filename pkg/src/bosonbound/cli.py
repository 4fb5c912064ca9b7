"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 resource/cap error, 4 validation
error.  Every command prints a JSON report except ``convergence``, which
prints CSV.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
import time

import numpy as np

from . import __version__
from .amplitude import amplitude_exact, amplitude_theorem1
from .errors import DomainError, SizeError, UnsupportedError, ValidationError
from .estimator import (convergence_csv, convergence_study, estimate_amplitude,
                        make_plan)
from .fockspace import OccupationVector, transition_bound
from .optics import SCENARIOS
from .permanent import ALGORITHMS, NAIVE_CAP, EXACT_CAP

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_VALIDATION = 0, 2, 3, 4
THREADS_ENV = "BOSONBOUND_THREADS"


class InputError(Exception):
    pass


def _finite(x: complex) -> complex:
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise InputError("matrix entries must be finite")
    return x


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse a JSON ``{"m", "entries": [[re, im], ...]}`` document or CSV of ``re+imi`` cells."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
            m = int(doc["m"])
            entries = [complex(float(re), float(im)) for re, im in doc["entries"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise InputError(f"malformed JSON matrix: {exc}") from None
        if m < 0 or len(entries) != m * m:
            raise InputError(f"expected {m}*{m} entries, got {len(entries)}")
        return np.array([_finite(e) for e in entries], dtype=np.complex128).reshape(m, m)
    rows = []
    for row in csv.reader(io.StringIO(stripped)):
        if not row:
            continue
        try:
            rows.append([_finite(complex(c.strip().replace(" ", "").replace("i", "j"))) for c in row])
        except ValueError as exc:
            raise InputError(f"malformed CSV cell: {exc}") from None
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise InputError("CSV matrix must be square")
    return np.array(rows, dtype=np.complex128).reshape(m, m)


def matrix_to_json(U) -> str:
    U = np.asarray(U, dtype=np.complex128)
    return json.dumps({"m": U.shape[0], "entries": [[z.real, z.imag] for z in U.ravel()]})


def read_matrix(path: str) -> np.ndarray:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    return parse_matrix_text(text)


def _occupation(text: str, m: int | None = None) -> OccupationVector:
    s = OccupationVector.parse(text)
    if m is not None and s.modes != m:
        raise InputError(f"occupation vector {text} has {s.modes} modes, matrix has {m}")
    return s


def _seed(value):
    return secrets.randbits(63) if value is None else int(value)


def _report(command, inputs, value=None, *, bound=None, error_radius=None, method=None,
            seed=None, samples=None, start=0.0, **extra) -> dict:
    rep = {
        "command": command,
        "inputs": inputs,
        "result": None if value is None else {"re": value.real, "im": value.imag},
        "abs": None if value is None else abs(value),
        "bound": bound,
        "error_radius": error_radius,
        "method": method,
        "seed": seed,
        "samples": samples,
        "wall_time_ms": (time.perf_counter() - start) * 1e3,
        "version": __version__,
    }
    rep.update(extra)
    return rep


def cmd_permanent(args) -> dict:
    start = time.perf_counter()
    W = read_matrix(args.matrix)
    fn = ALGORITHMS[args.algo]
    kwargs = {} if args.algo == "naive" else {"workers": args.threads}
    value = fn(W, **kwargs)
    return _report("permanent", {"matrix": args.matrix, "m": W.shape[0], "algo": args.algo},
                   value, method=args.algo, error_radius=0.0, start=start)


def cmd_amplitude(args) -> dict:
    start = time.perf_counter()
    U = read_matrix(args.matrix)
    s = _occupation(args.s, U.shape[0])
    t = _occupation(args.t, U.shape[0])
    bound = transition_bound(s, t)
    check = not args.allow_nonunitary
    seed = samples = None
    if args.method == "exact":
        res = amplitude_exact(U, s, t, check_unitary=check)
    elif args.method == "theorem1":
        res = amplitude_theorem1(U, s, t, d=args.d, check_unitary=check)
    else:
        seed = _seed(args.seed)
        plan = make_plan(s, t, args.eps, args.delta, seed=seed, grid_order=args.d)
        res = estimate_amplitude(U, s, t, plan, workers=args.threads, check_unitary=check)
        samples = plan.samples
    inputs = {"matrix": args.matrix, "s": list(s), "t": list(t), "method": args.method,
              "eps": args.eps, "delta": args.delta, "d": args.d,
              "allow_nonunitary": args.allow_nonunitary}
    extra = {"per_sample_bound": res.per_sample_bound, "diagnostics": res.diagnostics}
    return _report("amplitude", inputs, res.value, bound=bound.value,
                   error_radius=res.error_radius, method=res.method, seed=seed,
                   samples=samples, start=start, **extra)


def cmd_bound(args) -> dict:
    start = time.perf_counter()
    s, t = _occupation(args.s), _occupation(args.t)
    b = transition_bound(s, t)
    return _report("bound", {"s": list(s), "t": list(t)}, complex(b.value), bound=b.value,
                   error_radius=0.0, method="closed_form", start=start,
                   forward_ratio=b.forward_ratio, reverse_ratio=b.reverse_ratio)


def cmd_scenario(args) -> dict:
    start = time.perf_counter()
    sc = SCENARIOS[args.name](args.n)
    res = sc.achieved()
    achieved = res.probability
    return _report("scenario", {"name": args.name, "n": args.n}, res.value,
                   bound=transition_bound(sc.target, sc.input).value, error_radius=0.0,
                   method=res.method, start=start,
                   predicted_p_max=sc.predicted_p_max, achieved_probability=achieved,
                   difference=achieved - sc.predicted_p_max,
                   input_state=list(sc.input), target_state=list(sc.target),
                   network=[el.to_dict() for el in sc.optimal_network])


def cmd_convergence(args) -> str:
    U = read_matrix(args.matrix)
    s = _occupation(args.s, U.shape[0])
    t = _occupation(args.t, U.shape[0])
    try:
        T_values = [int(x) for x in args.T_list.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad --T-list {args.T_list!r}") from None
    if args.repeats < 1:
        raise InputError("--repeats must be at least 1")
    if not T_values or min(T_values) < 1:
        raise InputError("--T-list needs positive sample counts")
    rows = convergence_study(U, s, t, T_values, args.repeats, seed=_seed(args.seed),
                             delta=args.delta, grid_order=args.d, workers=args.threads,
                             orientation=args.orientation)
    return convergence_csv(rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bosonbound", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=int(os.environ.get(THREADS_ENV, "1")),
                   help=f"worker threads (default ${THREADS_ENV} or 1); results do not depend on it")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("permanent", help="exact permanent of a matrix file")
    q.add_argument("matrix", help="JSON or CSV matrix file, '-' for stdin")
    q.add_argument("--algo", choices=sorted(ALGORITHMS), default="ryser")
    q.set_defaults(func=cmd_permanent)

    q = sub.add_parser("amplitude", help="transition amplitude <s|U|t>")
    q.add_argument("matrix")
    q.add_argument("--s", required=True, help="output occupation, e.g. 2,0")
    q.add_argument("--t", required=True, help="input occupation, e.g. 1,1")
    q.add_argument("--method", choices=("exact", "theorem1", "estimate"), default="exact")
    q.add_argument("--eps", type=float, default=0.1)
    q.add_argument("--delta", type=float, default=0.05)
    q.add_argument("--seed", type=int)
    q.add_argument("--d", type=int, help="grid order, default n+1")
    q.add_argument("--allow-nonunitary", action="store_true")
    q.set_defaults(func=cmd_amplitude)

    q = sub.add_parser("bound", help="universal transition bound")
    q.add_argument("--s", required=True)
    q.add_argument("--t", required=True)
    q.set_defaults(func=cmd_bound)

    q = sub.add_parser("scenario", help="verify a known-optimal network")
    q.add_argument("--name", required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_scenario)

    q = sub.add_parser("convergence", help="estimator error vs sample count (CSV)")
    q.add_argument("matrix")
    q.add_argument("--s", required=True)
    q.add_argument("--t", required=True)
    q.add_argument("--T-list", dest="T_list", default="100,400,1600")
    q.add_argument("--repeats", type=int, default=100)
    q.add_argument("--seed", type=int)
    q.add_argument("--delta", type=float, default=0.1)
    q.add_argument("--d", type=int)
    q.add_argument("--orientation", choices=("auto", "forward", "reversed"), default="auto")
    q.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "scenario" and args.name not in SCENARIOS:
        print(f"error: unknown scenario {args.name!r}; choose from {sorted(SCENARIOS)}", file=sys.stderr)
        return EXIT_INPUT
    try:
        out = args.func(args)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SizeError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    sys.stdout.write(out if isinstance(out, str) else json.dumps(out, indent=2) + "\n")
    return EXIT_OK


__all__ = ["main", "build_parser", "parse_matrix_text", "matrix_to_json", "NAIVE_CAP", "EXACT_CAP"]
