"""Command line interface: ``tggmv <verb> ...``.

Exit status: 0 on success, 1 when verification fails (or a transformation
guard trips), 2 on invalid input.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional, Sequence

from . import serialize as ser
from .ast2cd import example_history, example_tgg
from .bench import MIN_SAMPLE_MS, bench_history
from .engine import transform_forward, transform_forward_mv, verify_equivalence
from .errors import InputError, TGGError, VerificationError
from .generate import BenchConfig, generate_history
from .mvm import MultiVersionModel, comb, proj, proj_bookkeeping
from .mvrules import adapt_all
from .tgg import derive_forward_rules


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tgg(args):
    return ser.tgg_from_json(ser.load(args.tgg)) if args.tgg else example_tgg()


def _rng(args):
    return random.Random(args.seed) if args.seed is not None else None


def _version_id(mvm: MultiVersionModel, raw: str):
    """Resolve a version given on the command line (string or integer)."""
    for v in mvm.version_graph.versions:
        if str(v) == raw:
            return v
    raise InputError(f"unknown version {raw!r}; known: {', '.join(map(str, mvm.version_graph.versions))}")


def _load_mvm(path: str) -> MultiVersionModel:
    doc = ser.load(path)
    if doc.get("format") == ser.fmt("history"):
        return comb(ser.history_from_json(doc))
    return ser.mvm_from_json(doc)


def cmd_derive(args) -> int:
    forward = derive_forward_rules(_tgg(args))
    if args.mv:
        rules = [ser.mv_rule_to_json(r) for r in adapt_all(forward)]
        doc = {"format": ser.fmt("mv-rules"), "rules": rules}
    else:
        doc = {"format": ser.fmt("forward-rules"), "rules": [ser.forward_rule_to_json(r) for r in forward]}
    _emit(ser.dumps(doc), args.output)
    return 0


def cmd_comb(args) -> int:
    mvm = comb(ser.history_from_json(ser.load(args.history)))
    _emit(ser.dumps(ser.mvm_to_json(mvm)), args.output)
    return 0


def cmd_project(args) -> int:
    mvm = _load_mvm(args.mvm)
    t = _version_id(mvm, args.version)
    g = proj_bookkeeping(mvm, t) if args.bookkeeping else proj(mvm, t)
    _emit(ser.dumps(ser.graph_to_json(g)), args.output)
    return 0


def cmd_transform(args) -> int:
    source = ser.graph_from_json(ser.load(args.graph))
    result = transform_forward(source, derive_forward_rules(_tgg(args)), max_apps=args.max_apps, rng=_rng(args))
    doc = {
        "format": ser.fmt("forward-result"),
        "complete": result.complete,
        "graph": ser.graph_to_json(result.graph),
        "log": result.log.to_json(),
    }
    _emit(ser.dumps(doc), args.output)
    if not result.complete:
        print("warning: some source elements stayed untranslated", file=sys.stderr)
    return 0


def cmd_mv_transform(args) -> int:
    mvm = _load_mvm(args.input)
    rules = adapt_all(derive_forward_rules(_tgg(args)))
    result = transform_forward_mv(mvm, rules, max_apps=args.max_apps, rng=_rng(args))
    doc = {
        "format": ser.fmt("mv-result"),
        "complete": [[ser.encode_id(t), ok] for t, ok in result.complete.items()],
        "mvm": ser.mvm_to_json(result.mvm),
        "log": result.log.to_json(),
    }
    _emit(ser.dumps(doc), args.output)
    missing = [str(t) for t, ok in result.complete.items() if not ok]
    if missing:
        print(f"warning: untranslated source elements remain in versions {', '.join(missing)}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    history = ser.history_from_json(ser.load(args.history))
    report = verify_equivalence(history, _tgg(args), parallel=args.parallel, max_apps=args.max_apps)
    print(report.to_text())
    if args.output:
        ser.save(report.to_json(), args.output)
    return 0 if report.ok else 1


def _config(args) -> BenchConfig:
    return BenchConfig(
        versions=args.versions,
        base_classes=args.base_classes,
        fields_per_class=args.fields_per_class,
        change_rate=args.change_rate,
        branch_probability=args.branch_probability,
        merge_probability=args.merge_probability,
        seed=args.seed if args.seed is not None else 0,
    )


def cmd_generate(args) -> int:
    history = example_history() if args.example else generate_history(_config(args))
    _emit(ser.dumps(ser.history_to_json(history)), args.output)
    return 0


def cmd_bench(args) -> int:
    history = ser.history_from_json(ser.load(args.history)) if args.history else generate_history(_config(args))
    result = bench_history(
        history, _tgg(args), repeat=args.repeat, parallel=args.parallel, min_sample_ms=args.min_sample_ms
    )
    _emit(result.to_csv(), args.output)
    print(result.summary(), file=sys.stderr)
    return 0


def _config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--versions", type=int, default=50)
    p.add_argument("--base-classes", type=int, default=20)
    p.add_argument("--fields-per-class", type=int, default=3)
    p.add_argument("--change-rate", type=float, default=0.02)
    p.add_argument("--branch-probability", type=float, default=0.0)
    p.add_argument("--merge-probability", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, help="seed for generation or for shuffling rule/match order")
    common.add_argument("--max-apps", type=int, help="bound on rule applications (default 10x element count)")
    common.add_argument("--repeat", type=int, default=10, help="timing repetitions (bench)")
    common.add_argument("--parallel", action="store_true", help="run independent per-version work in threads")
    common.add_argument("--tgg", help="grammar JSON (default: the built-in AST-to-class-diagram grammar)")

    parser = argparse.ArgumentParser(prog="tggmv", description="Multi-version forward transformation with TGGs.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("derive", parents=[common], help="derive forward rules (or mv-rules with --mv)")
    p.add_argument("--mv", action="store_true")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("comb", parents=[common], help="combine a version history into a multi-version model")
    p.add_argument("history")
    p.set_defaults(func=cmd_comb)

    p = sub.add_parser("project", parents=[common], help="extract one version from a multi-version model")
    p.add_argument("mvm", help="multi-version model or history JSON")
    p.add_argument("version")
    p.add_argument("--bookkeeping", action="store_true", help="mark elements untranslated in that version")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("transform", parents=[common], help="forward-translate a single graph")
    p.add_argument("graph")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("mv-transform", parents=[common], help="forward-translate all versions jointly")
    p.add_argument("input", help="multi-version model or history JSON")
    p.set_defaults(func=cmd_mv_transform)

    p = sub.add_parser("verify", parents=[common], help="check the joint result against per-version results")
    p.add_argument("history")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", parents=[common], help="generate a synthetic version history")
    _config_flags(p)
    p.add_argument("--example", action="store_true", help="emit the hand-built two-version example instead")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", parents=[common], help="time per-version against joint translation (CSV)")
    p.add_argument("history", nargs="?", help="history JSON (default: generate one from the flags)")
    p.add_argument(
        "--min-sample-ms", type=float, default=MIN_SAMPLE_MS, help="minimum duration of one timing sample"
    )
    _config_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(exc.report.to_text(), file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        # structurally broken JSON documents surface here
        print(f"error: malformed input ({exc.__class__.__name__}: {exc})", file=sys.stderr)
        return 2
    except TGGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
