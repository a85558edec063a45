"""Command-line front end.

Exit codes: 0 success or detected, 10 clean negative verdict, 2 usage
error, 3 unreadable input, 4 numeric invariant failure.

Matrix files are JSON objects ``{"dims": [d_A, d_B], "data": [[re, im], ...]}``
with the entries listed row-major.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__, distill, montecarlo, permcrit, protocol, seeding, zoo
from .errors import (
    DimensionMismatch,
    EntglError,
    InvariantViolation,
    ParamOutOfRange,
    ParseError,
)
from .qstate import QuantumState, is_ppt, realign, trace_norm

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INVARIANT = 4
EXIT_NEGATIVE = 10

log = logging.getLogger("entglkit")


# ------------------------------------------------------------------ output


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any) -> str:
    """JSON with every float printed to 17 significant digits."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv(rows: Sequence[Sequence[Any]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt_float(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ------------------------------------------------------------- matrix files


def matrix_to_json(m: np.ndarray, dims: Sequence[int], meta: dict | None = None) -> str:
    m = np.asarray(m, dtype=complex)
    doc = {"dims": [int(x) for x in dims],
           "data": [[float(z.real), float(z.imag)] for z in m.ravel()]}
    if meta:
        doc["meta"] = meta
    return dumps(doc) + "\n"


def parse_matrix_file(text: str) -> tuple[np.ndarray, tuple[int, ...]]:
    """Parse a matrix document; structural problems raise :class:`ParseError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or "dims" not in doc or "data" not in doc:
        raise ParseError("expected an object with 'dims' and 'data'")
    dims = doc["dims"]
    if (not isinstance(dims, list) or not dims
            or not all(isinstance(x, int) and not isinstance(x, bool) and x > 0 for x in dims)):
        raise ParseError("'dims' must be a non-empty list of positive integers")
    n = int(np.prod(dims))
    data = doc["data"]
    if not isinstance(data, list) or len(data) != n * n:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise ParseError(f"'data' must hold {n * n} entries, got {got}")
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise ParseError("'data' entries must be [re, im] number pairs") from None
    if arr.shape != (n * n, 2):
        raise ParseError("'data' entries must be [re, im] number pairs")
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n), tuple(dims)


def load_state(path: str) -> QuantumState:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    m, dims = parse_matrix_file(text)
    try:
        return QuantumState(m, dims)
    except DimensionMismatch as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------- commands


def cmd_check(args) -> int:
    s = load_state(args.path)
    want = set(args.criteria or ("ppt", "realignment", "reduction"))
    report: dict[str, Any] = {"dims": list(s.dims)}
    bip = len(s.dims) == 2
    if "ppt" in want:
        report["ppt"] = is_ppt(s) if bip else None
    if "realignment" in want:
        report["realignment_norm"] = trace_norm(realign(s)) if bip else None
    if "reduction" in want:
        report["reduction_violation"] = distill.reduction_check(s) if bip else None
    report["witness"] = None
    if args.witness_out and bip and s.dims[0] == s.dims[1]:
        crit = permcrit.PermutationCriterion.of(permcrit.realignment_perm(), s.dims[0])
        try:
            w = permcrit.permutation_witness(s, crit)
        except EntglError:
            w = None
        if w is not None:
            _write_text(args.witness_out, matrix_to_json(w, s.dims, {"kind": "entanglement"}))
            report["witness"] = args.witness_out
    _write_text(args.out, dumps(report) + "\n")
    return EXIT_OK


def _seed(args) -> int:
    return seeding.fresh_seed() if args.seed is None else int(args.seed)


def cmd_distill(args) -> int:
    s = load_state(args.path)
    seed = _seed(args)
    if args.copies == 1:
        v = distill.distill_test_1copy(s, args.tests, args.opt_steps, seed, args.precision)
    else:
        v = distill.distill_test_ncopy(s, args.copies, args.tests, args.opt_steps, seed,
                                       args.precision)
    report = v.to_dict()
    report["copies"] = args.copies
    _write_text(args.out, dumps(report) + "\n")
    return EXIT_OK if v.detected else EXIT_NEGATIVE


def cmd_classify(args) -> int:
    c = permcrit.classify_independent(args.parties)
    report = {
        "r": c.r,
        "orbit_count": c.orbit_count,
        "includes_identity": c.includes_identity,
        "representatives": [list(p.sigma) for p in c.representatives],
    }
    _write_text(args.out, dumps(report) + "\n")
    return EXIT_OK


def cmd_volume(args) -> int:
    seed = _seed(args)
    rep = montecarlo.volume_experiment(args.dim, args.states, args.tests, args.opt_steps,
                                       seed, threads=args.threads)
    if args.out:
        _write_text(args.out, _csv(rep.detection_curve, ("test_index", "cumulative_fraction")))
    doc = rep.to_dict()
    _write_text(args.json, dumps(doc) + "\n")
    return EXIT_OK


_ZOO_PARAMS = ("d", "m", "beta", "alpha", "eps", "delta", "p", "a")


def cmd_zoo(args) -> int:
    params = {k: getattr(args, k) for k in _ZOO_PARAMS if getattr(args, k) is not None}
    try:
        fp = zoo.build(args.family, **params)
    except KeyError as exc:
        raise ParamOutOfRange(f"family {args.family} needs --{exc.args[0]}") from None
    meta = {"family": fp.family,
            "flags": {k: v for k, v in fp.flags.items() if isinstance(v, (bool, int, float))}}
    _write_text(args.out, matrix_to_json(fp.state.matrix, fp.state.dims, meta))
    return EXIT_OK


def _protocol_rows(args) -> list[tuple[str, float]]:
    name = args.name
    if name == "recurrence":
        y0 = 0.65 if args.y0 is None else args.y0
        traj = protocol.recurrence_iterate(y0, args.tol, args.steps)
        return [(f"Y[{i}]", float(y)) for i, y in enumerate(traj)]
    if name == "qpa":
        p = args.p or [0.7, 0.1, 0.1, 0.1]
        rows = protocol.qpa_iterate(p, args.steps if args.steps is not None else 10)
        labels = ("p00", "p01", "p10", "p11")
        return [(f"{labels[j]}[{i}]", float(r[j])) for i, r in enumerate(rows) for j in range(4)]
    if name == "breeding":
        y = protocol.breeding_yield(args.p or [0.25] * 4)
        return [("yield_raw", float(y.raw)), ("yield", float(y.clamped))]
    if name == "concentration":
        if not args.p:
            raise ParamOutOfRange("concentration needs --p (squared Schmidt coefficients)")
        probs, mean = protocol.optimal_concentration(args.p)
        rows = [(f"p[{j + 1}]", float(x)) for j, x in enumerate(probs)]
        return rows + [("mean_ebits", mean), ("e_det", protocol.e_det(args.p))]
    raise ParamOutOfRange(f"unknown protocol {name!r}")


def cmd_protocol(args) -> int:
    rows = _protocol_rows(args)
    _write_text(args.out, _csv(rows, ("parameter", "value")))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _threads_default() -> int:
    try:
        return max(1, int(os.environ.get("ENTGLKIT_THREADS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entglkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="PPT, realignment and reduction checks on a state file")
    c.add_argument("path")
    c.add_argument("--criteria", nargs="+", choices=("ppt", "realignment", "reduction"))
    c.add_argument("--witness-out", help="write a realignment witness here when one exists")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("distill", help="randomised distillability search")
    c.add_argument("path")
    c.add_argument("--copies", type=int, default=1)
    c.add_argument("--tests", type=int, default=10_000)
    c.add_argument("--opt-steps", type=int, default=0)
    c.add_argument("--seed", type=int)
    c.add_argument("--precision", type=float, default=distill.PRECISION)
    c.add_argument("--threads", type=int, default=_threads_default())
    c.add_argument("--out")
    c.set_defaults(func=cmd_distill)

    c = sub.add_parser("classify-permutations", help="independent permutation criteria")
    c.add_argument("--parties", type=int, required=True)
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("volume", help="volume of detectably distillable random states")
    c.add_argument("--dim", type=int, required=True)
    c.add_argument("--states", type=int, default=10_000)
    c.add_argument("--tests", type=int, default=1000)
    c.add_argument("--opt-steps", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--threads", type=int, default=_threads_default())
    c.add_argument("--out", help="CSV file for the detection curve")
    c.add_argument("--json", help="report destination (default stdout)")
    c.set_defaults(func=cmd_volume)

    c = sub.add_parser("zoo", help="emit a named state as a matrix file")
    c.add_argument("--family", required=True, choices=zoo.FAMILIES)
    c.add_argument("--d", type=int)
    c.add_argument("--m", type=int)
    for name in ("beta", "alpha", "eps", "delta"):
        c.add_argument(f"--{name}", type=float)
    c.add_argument("--p", type=float, nargs="+")
    c.add_argument("--a", type=float, nargs="+")
    c.add_argument("--out")
    c.set_defaults(func=cmd_zoo)

    c = sub.add_parser("protocol", help="distillation protocol formulas as CSV")
    c.add_argument("--name", required=True,
                   choices=("recurrence", "qpa", "breeding", "concentration"))
    c.add_argument("--y0", type=float)
    c.add_argument("--p", type=float, nargs="+")
    c.add_argument("--steps", type=int)
    c.add_argument("--tol", type=float, default=1e-6)
    c.add_argument("--out")
    c.set_defaults(func=cmd_protocol)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(name)s: %(message)s")
    if getattr(args, "opt_steps", 0) is None:
        args.opt_steps = 100 * args.dim
    if args.command == "protocol" and args.name == "recurrence" and args.steps is None:
        args.steps = 1000
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"entglkit: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParamOutOfRange as exc:
        print(f"entglkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, EntglError) as exc:
        print(f"entglkit: invariant failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
