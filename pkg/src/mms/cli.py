"""Command-line interface.

Data goes to stdout or files, progress to stderr.  Exit codes: 0 success,
1 invalid input, 2 conjecture counterexample found, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .canon import canonical_key, generator_matrix, hnf, matrix_determinant
from .engine import compute_mms
from .enumeration import enumerate_simplices
from .geometry import SimplicialSet, parse_point
from .pipeline import check_conjecture, default_workers, replay, run_pipeline
from .sampler import SamplerConfig, sample_stream
from .sos import (
    CircuitSupport,
    HypothesisViolation,
    InnerTerm,
    Sign,
    SimplexSupportedPoly,
    circuit_is_sos,
    sonc_simplex_is_sos,
    sos_bound_is_exact,
)
from .store import StatsScope, Store, export, stats

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_COUNTEREXAMPLE = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for
    # conjecture counterexamples, so usage errors must exit 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="mms", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[], help="enumerate all simplices of bounded degree")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--deg", type=int, required=True, help="maximal degree 2d (even)")
    p.add_argument("--partition", type=int, default=None, help="restrict to one first-row index")
    p.add_argument("--out", default=None, help="output JSONL path (default stdout)")

    p = sub.add_parser("sample", help="sample random simplices (seeded, reproducible)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("mms", help="compute the maximal mediated set of simplices")
    p.add_argument("--delta", default=None, help='simplex as "x,y;x,y;..."')
    p.add_argument("--in", dest="infile", default=None, help="JSONL with a delta field per line")
    p.add_argument("--method", choices=["removal", "fixed-point"], default="removal")
    p.add_argument("--out", default=None)

    p = sub.add_parser("canon", help="canonical lattice key of a full-dimensional simplex")
    p.add_argument("--delta", required=True)

    p = sub.add_parser("stats", help="statistics of a merged store")
    p.add_argument("--store", required=True)
    p.add_argument("--scope", choices=["simplicial_sets", "lattices", "both"], default="both")

    p = sub.add_parser("export", help="dump a store as JSONL records or a stats CSV")
    p.add_argument("--store", required=True)
    p.add_argument("--format", choices=["jsonl", "csv"], required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("check-sos", help="combinatorial SOS decision via MMS membership")
    p.add_argument("--delta", required=True)
    p.add_argument("--beta", default=None, help="single interior exponent (circuit decision)")
    p.add_argument("--sign", choices=["NEG", "POS"], default="NEG", help="sign of inner terms given via --beta")
    p.add_argument("--terms", default=None, help='JSON file: [{"beta": "x,y", "sign": "NEG"}, ...]')
    p.add_argument("--exactness", action="store_true", help="decide bound exactness instead of SOS-ness")

    p = sub.add_parser("check-conjecture", help="exhaustive planar dichotomy check")
    p.add_argument("--deg", type=int, required=True)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None, help="keep the pipeline output directory here")

    p = sub.add_parser("pipeline", help="full enumerate/sample + MMS + canonicalize + merge run")
    p.add_argument("--dim", type=int)
    p.add_argument("--deg", type=int)
    p.add_argument("--mode", choices=["full", "sample"], default="full")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--replay", default=None, help="manifest.json of a recorded run to reproduce")
    return parser


def _open_out(path: str | None):
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def _cmd_enumerate(args) -> int:
    out = _open_out(args.out)
    try:
        for delta in enumerate_simplices(args.dim, args.deg, args.partition):
            out.write(json.dumps({"delta": str(delta)}, separators=(",", ":")))
            out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_sample(args) -> int:
    cfg = SamplerConfig(n=args.dim, two_d=args.deg, seed=args.seed, count=args.count)
    out = _open_out(args.out)
    try:
        for delta in sample_stream(cfg):
            out.write(json.dumps({"delta": str(delta)}, separators=(",", ":")))
            out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _iter_input_deltas(args):
    if (args.delta is None) == (args.infile is None):
        raise ValueError("provide exactly one of --delta or --in")
    if args.delta is not None:
        yield SimplicialSet.parse(args.delta)
        return
    with open(args.infile, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
                yield SimplicialSet.parse(payload["delta"])
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{args.infile}:{lineno}: bad input line: {exc}") from exc


def _cmd_mms(args) -> int:
    out = _open_out(args.out)
    try:
        for delta in _iter_input_deltas(args):
            result = compute_mms(delta, method=args.method)
            out.write(result.to_json_line())
            out.write("\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_canon(args) -> int:
    delta = SimplicialSet.parse(args.delta)
    key = canonical_key(delta)
    gen = generator_matrix(delta)
    payload = {
        "key": key.key_text,
        "hnf": [list(row) for row in key.hnf],
        "generator": [list(row) for row in gen],
        "lattice_index": abs(matrix_determinant(gen)),
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_stats(args) -> int:
    store = Store.open(args.store)
    scopes = {
        "simplicial_sets": [StatsScope.SIMPLICIAL_SETS],
        "lattices": [StatsScope.LATTICES],
        "both": [StatsScope.SIMPLICIAL_SETS, StatsScope.LATTICES],
    }[args.scope]
    payload = {scope.value: stats(store, scope).to_json_dict() for scope in scopes}
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_export(args) -> int:
    store = Store.open(args.store)
    export(store, args.format, args.out)
    return EXIT_OK


def _cmd_check_sos(args) -> int:
    delta = SimplicialSet.parse(args.delta)
    if (args.beta is None) == (args.terms is None):
        raise ValueError("provide exactly one of --beta or --terms")
    if args.beta is not None:
        terms = [InnerTerm.of(parse_point(args.beta), Sign(args.sign))]
    else:
        with open(args.terms, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, list):
            raise ValueError("--terms file must contain a JSON list")
        terms = [
            InnerTerm.of(parse_point(entry["beta"]), Sign(entry.get("sign", "NEG")))
            for entry in raw
        ]
    from .sos import _memo

    if args.exactness:
        poly = SimplexSupportedPoly(delta=delta, inner_terms=tuple(terms))
        verdict = sos_bound_is_exact(poly)
        question = "sos_bound_is_exact"
        mms = _memo.mms_of(delta)
    elif args.beta is not None and len(terms) == 1:
        support = CircuitSupport(delta=delta, beta=terms[0].beta)
        verdict = circuit_is_sos(support)
        question = "circuit_is_sos"
        mms = _memo.mms_of(delta)
    else:
        poly = SimplexSupportedPoly(delta=delta, inner_terms=tuple(terms))
        verdict = sonc_simplex_is_sos(poly)
        question = "sonc_simplex_is_sos"
        mms = _memo.mms_of(delta)
    payload = {
        "question": question,
        "delta": str(delta),
        "verdict": verdict,
        "witness": [
            {
                "beta": ",".join(str(c) for c in t.beta),
                "sign": t.coeff_sign.value,
                "parity": t.parity.value,
                "in_mms": tuple(t.beta) in mms,
            }
            for t in terms
        ],
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_check_conjecture(args) -> int:
    workers = args.workers if args.workers is not None else default_workers()
    report = check_conjecture(args.deg, workers=workers, out_dir=args.out)
    print(json.dumps(report.to_json_dict(), indent=2))
    if not report.passed:
        print(
            f"[mms] dichotomy FAILED at 2d={args.deg}: "
            f"{len(report.counterexamples)} intermediate class(es)",
            file=sys.stderr,
        )
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    workers = args.workers if args.workers is not None else default_workers()
    if args.replay is not None:
        sim, lat = replay(args.replay, args.out, workers=args.workers)
    else:
        if args.dim is None or args.deg is None:
            raise ValueError("pipeline requires --dim and --deg (or --replay)")
        sim, lat = run_pipeline(
            n=args.dim,
            two_d=args.deg,
            mode=args.mode,
            workers=workers,
            out_dir=args.out,
            seed=args.seed,
            count=args.count,
        )
    print(
        json.dumps(
            {"simplicial_sets": sim.to_json_dict(), "lattices": lat.to_json_dict()},
            indent=2,
        )
    )
    return EXIT_OK


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "sample": _cmd_sample,
    "mms": _cmd_mms,
    "canon": _cmd_canon,
    "stats": _cmd_stats,
    "export": _cmd_export,
    "check-sos": _cmd_check_sos,
    "check-conjecture": _cmd_check_conjecture,
    "pipeline": _cmd_pipeline,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return EXIT_OK
    except (HypothesisViolation, ValueError, KeyError) as exc:
        print(f"mms: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"mms: data integrity error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"mms: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
