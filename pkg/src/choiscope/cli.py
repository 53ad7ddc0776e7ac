"""Command-line front end.

Verbs: inspect, convert, bsa, gen, compose, tensor.  Reports are
canonical JSON (deterministic for a fixed seed); exit codes are a stable
contract: 0 success, 1 I/O or parse failure, 2 validation or
feasibility failure.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time

import numpy as np

from . import serialization as ser
from .bsa import bsa_operation, bsa_state, is_separable_operation
from .channels import Channel, compose, identity_channel, tensor_channels, validate
from .errors import (ChoiscopeError, NotAState, NotCompletelyPositive,
                     ParseError)
from .generators import (NAMED_CHANNELS, depolarizing_channel,
                         random_cp_channel, random_state)
from .numerics import DEFAULT_TOL, Tolerance, check_hermitian, min_eigenvalue
from .reshape import BipartiteShape

REPORT_SCHEMA = "1"

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2


def _tolerance(args) -> Tolerance:
    tol = getattr(args, "tol", None)
    if tol is None:
        env = os.environ.get("CHOISCOPE_TOL")
        tol = float(env) if env else DEFAULT_TOL.atol
    return Tolerance(atol=tol, rtol=tol)


def _digest(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _complex_pairs(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


def cmd_inspect(args) -> int:
    tol = _tolerance(args)
    cf = ser.load_path(args.path)
    report = {
        "schema": REPORT_SCHEMA,
        "command": "inspect",
        "input_digest": _digest(args.path),
        "kind": cf.kind,
        "dims": list(cf.dims),
    }
    if cf.kind == "state":
        rho = cf.to_state()
        ok = True
        try:
            check_hermitian(rho, tol)
        except ChoiscopeError:
            ok = False
        mn = float(min_eigenvalue(rho))
        report.update({
            "hermitian": ok,
            "min_eigenvalue": mn,
            "trace": float(np.trace(rho).real),
            "positive_semidefinite": bool(mn >= -tol.atol),
        })
        valid = ok and mn >= -tol.atol
    else:
        channel = cf.to_channel()
        rep = validate(channel, tol)
        report.update({
            "hermiticity_preserving": rep.hermiticity_preserving,
            "trace_preserving": rep.trace_preserving,
            "trace_nonincreasing": rep.trace_nonincreasing,
            "completely_positive": rep.completely_positive,
            "choi_trace": rep.choi_trace,
            "min_choi_eigenvalue": rep.min_choi_eigenvalue,
        })
        valid = rep.completely_positive
    _write(args, ser.canonical_dumps(report))
    return EXIT_OK if valid else EXIT_INVALID


def cmd_convert(args) -> int:
    cf = ser.load_path(args.path)
    channel = cf.to_channel()
    if args.target == "kraus":
        # raises NotCompletelyPositive on maps like the transpose
        channel.kraus_operators()
    _write(args, ser.dump_channel(channel, args.target))
    return EXIT_OK


def _bsa_state_report(args, cf, tol):
    rho = cf.to_state()
    shape = BipartiteShape(*cf.dims)
    dec = bsa_state(rho, shape, budget=args.budget, seed=args.seed, tol=tol)
    return {
        "lambda_total": float(dec.lambda_total),
        "term_count": len(dec.terms),
        "residual_min_eigenvalue": float(min_eigenvalue(dec.residual)),
        "candidate_set_size": dec.candidate_set_size,
        "terms": [{"lambda": float(lam),
                   "e": _complex_pairs(pv.e),
                   "f": _complex_pairs(pv.f)} for lam, pv in dec.terms],
    }


def _bsa_operation_report(args, cf, tol):
    channel = cf.to_channel()
    d = int(round(channel.d_in ** 0.5))
    if d * d != channel.d_in:
        raise NotAState("--operation requires a channel on an N x N bipartite system")
    result = bsa_operation(channel, d, budget=args.budget, seed=args.seed, tol=tol)
    verdict = is_separable_operation(channel, d, budget=args.budget,
                                     seed=args.seed, tol=tol)
    return {
        "lambda": float(result.lam),
        "term_count": len(result.terms),
        "ent_part_norm": float(np.linalg.norm(result.ent_part.choi)),
        "verdict": verdict.kind,
        "terms": [{"lambda": float(lam),
                   "e": _complex_pairs(pv.e),
                   "f": _complex_pairs(pv.f)} for lam, pv in result.terms],
    }


def cmd_bsa(args) -> int:
    if args.seed is None:
        raise ParseError("bsa requires an explicit --seed")
    tol = _tolerance(args)
    cf = ser.load_path(args.path)
    start = time.monotonic()
    body = (_bsa_operation_report(args, cf, tol) if args.operation
            else _bsa_state_report(args, cf, tol))
    elapsed = time.monotonic() - start
    report = {
        "schema": REPORT_SCHEMA,
        "command": "bsa",
        "input_digest": _digest(args.path),
        "seed": args.seed,
        "budget": args.budget,
    }
    report.update(body)
    # wall time goes to stderr so reports stay byte-identical per seed
    print(f"bsa wall time: {elapsed:.2f}s", file=sys.stderr)
    _write(args, ser.canonical_dumps(report))
    return EXIT_OK


def cmd_gen(args) -> int:
    name = args.name
    if name in NAMED_CHANNELS:
        channel = NAMED_CHANNELS[name](args.dims[0])
        text = ser.dump_channel(channel, "kraus" if name != "transpose" else "liouville")
    elif name == "depolarizing":
        channel = depolarizing_channel(args.dims[0], args.p)
        text = ser.dump_channel(channel, "kraus")
    elif name == "random-cp":
        if args.seed is None:
            raise ParseError("random-cp requires an explicit --seed")
        d_in = args.dims[0]
        d_out = args.dims[1] if len(args.dims) > 1 else d_in
        text = ser.dump_channel(random_cp_channel(d_in, d_out, args.seed), "kraus")
    elif name == "random-state":
        if args.seed is None:
            raise ParseError("random-state requires an explicit --seed")
        d_A = args.dims[0]
        d_B = args.dims[1] if len(args.dims) > 1 else d_A
        rho = random_state(d_A * d_B, args.seed)
        text = ser.dump_state(rho, (d_A, d_B))
    else:
        raise ParseError(f"unknown generator {name!r}")
    _write(args, text)
    return EXIT_OK


def _load_two_channels(args):
    return ser.load_path(args.path_a).to_channel(), ser.load_path(args.path_b).to_channel()


def cmd_compose(args) -> int:
    a, b = _load_two_channels(args)
    _write(args, ser.dump_channel(compose(a, b), "liouville"))
    return EXIT_OK


def cmd_tensor(args) -> int:
    a, b = _load_two_channels(args)
    _write(args, ser.dump_channel(tensor_channels(a, b), "liouville"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choiscope",
        description="Calculus of quantum operations as matrices.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, seed=False, budget=False):
        p.add_argument("--tol", type=float, default=None,
                       help="numerical tolerance (default: CHOISCOPE_TOL or 1e-9)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=["json"], default="json")
        if seed:
            p.add_argument("--seed", type=int, default=None)
        if budget:
            p.add_argument("--budget", type=int, default=500)

    p = sub.add_parser("inspect", help="validate a state or channel file")
    p.add_argument("path")
    common(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("convert", help="convert a channel representation")
    p.add_argument("path")
    p.add_argument("target", choices=["kraus", "liouville", "choi"])
    common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bsa", help="best separable approximation")
    p.add_argument("path")
    p.add_argument("--operation", action="store_true",
                   help="treat input as a channel on a bipartite system")
    common(p, seed=True, budget=True)
    p.set_defaults(func=cmd_bsa)

    p = sub.add_parser("gen", help="generate a fixture")
    p.add_argument("name", choices=["identity", "transpose", "depolarizing",
                                    "swap", "random-cp", "random-state"])
    p.add_argument("dims", type=int, nargs="+")
    p.add_argument("--p", type=float, default=0.5,
                   help="depolarizing strength")
    common(p, seed=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compose", help="compose two channels (first after second)")
    p.add_argument("path_a")
    p.add_argument("path_b")
    common(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("tensor", help="tensor product of two channels")
    p.add_argument("path_a")
    p.add_argument("path_b")
    common(p)
    p.set_defaults(func=cmd_tensor)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ChoiscopeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
