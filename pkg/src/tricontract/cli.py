"""Command-line interface.

Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import completeness_probe as cp
from . import orbit_engine as oe
from .contraction_analysis import classify, report_items
from .fixtures_corpus import example1, example2_instance, example3, random_weak_instance
from .metric_core import FiniteMetricSpace, parse_rational, random_map, random_space, validate_metric
from .reporting import Items, items_json, render_items
from .tms import TMSDocument, TMSParseError, parse_tms, render_tms

SEED_ENV = "TRICONTRACT_SEED"

FIXTURES = {
    "ex1": example1,
    "ex2": example2_instance,
    "ex3": example3,
}


class InputError(Exception):
    """Bad user input; reported on stderr with exit code 2."""


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _load(path: str, need_map: bool = True) -> TMSDocument:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        doc = parse_tms(text)
    except TMSParseError as exc:
        raise InputError(f"{path}: {exc}") from None
    if need_map and doc.self_map is None:
        raise InputError(f"{path}: no map section")
    return doc


def _point(space: FiniteMetricSpace, label: str) -> int:
    try:
        return space.index_of(label)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None


class Output:
    def __init__(self, args):
        self.json = args.json
        self.approx = getattr(args, "approx", False)
        self.sections: list[tuple[str | None, Items]] = []

    def add(self, items: Items, section: str | None = None):
        self.sections.append((section, items))

    def emit(self, stream=None):
        stream = stream or sys.stdout
        if self.json:
            if len(self.sections) == 1 and self.sections[0][0] is None:
                data = items_json(self.sections[0][1])
            else:
                data = [dict(items_json(items), **({"section": s} if s else {})) for s, items in self.sections]
            stream.write(json.dumps(data, sort_keys=False) + "\n")
            return
        first = True
        for section, items in self.sections:
            if not first:
                stream.write("\n")
            first = False
            if section:
                stream.write(f"[{section}]\n")
            for line in render_items(items, self.approx):
                stream.write(line + "\n")


def cmd_validate(args) -> int:
    doc = _load(args.file, need_map=False)
    rep = validate_metric(doc.space, workers=args.threads)
    out = Output(args)
    labels = doc.space.labels
    items: Items = [("ok", rep.ok)]
    for v in rep.violations:
        items.append((f"violation.{v.axiom}", [labels[i] for i in v.witness]))
        items.append((f"violation.{v.axiom}.lhs", v.lhs))
        items.append((f"violation.{v.axiom}.rhs", v.rhs))
    out.add(items)
    out.emit()
    return 0 if rep.ok else 1


def cmd_classify(args) -> int:
    doc = _load(args.file)
    report = classify(doc.space, doc.self_map, workers=args.threads)
    out = Output(args)
    out.add(report_items(report, doc.space))
    out.emit()
    return 0 if report.is_weak else 1


def cmd_fixed_points(args) -> int:
    doc = _load(args.file)
    fps = oe.fixed_points(doc.space, doc.self_map)
    out = Output(args)
    out.add([("fixed_points", [doc.space.labels[i] for i in fps]), ("count", len(fps))])
    out.emit()
    return 0


def _trace_items(space: FiniteMetricSpace, tr: oe.OrbitTrace) -> Items:
    return [
        ("start", space.labels[tr.start]),
        ("orbit", [space.labels[i] for i in tr.points]),
        ("stabilized_at", tr.stabilized_at),
        ("cycle", None if tr.cycle is None else list(tr.cycle)),
    ]


def cmd_orbit(args) -> int:
    doc = _load(args.file)
    x0 = _point(doc.space, args.start)
    tr = oe.orbit(doc.space, doc.self_map, x0, args.max_steps)
    out = Output(args)
    out.add(_trace_items(doc.space, tr))
    out.emit()
    return 0


def cmd_iterate(args) -> int:
    doc = _load(args.file)
    space, smap = doc.space, doc.self_map
    starts = [_point(space, args.start)] if args.start else range(space.n)
    out = Output(args)
    code = 0
    for x0 in starts:
        items: Items = [("start", space.labels[x0])]
        try:
            res = oe.iterate(space, smap, x0, args.max_steps)
        except oe.CycleDetected as exc:
            items += [("error", "cycle"), ("cycle_entry", exc.entry), ("cycle_period", exc.period)]
            code = 1
        except oe.MaxStepsExceeded:
            items += [("error", "max-steps")]
            code = 1
        else:
            items += [("limit", space.labels[res.limit]), ("steps", res.steps),
                      ("unique_claim_applicable", res.unique_claim_applicable),
                      ("orbit", [space.labels[i] for i in res.trace.points])]
        out.add(items, None if args.start else f"start {space.labels[x0]}")
    out.emit()
    return code


def cmd_lemmas(args) -> int:
    doc = _load(args.file)
    space, smap = doc.space, doc.self_map
    x0 = _point(space, args.start)
    report = classify(space, smap, workers=args.threads)
    out = Output(args)
    if not report.is_weak:
        out.add([("is_weak", False), ("weak_sup", report.weak_sup)])
        out.emit()
        return 1
    k = report.weak_sup if args.k is None else args.k
    if not report.weak_sup <= k < 1:
        raise InputError(f"k={k} must satisfy weak_sup={report.weak_sup} <= k < 1")
    horizon = args.horizon
    if horizon is None:
        tr = oe.orbit(space, smap, x0)
        horizon = max(3, len(tr.points))
    l1 = oe.check_lemma1(space, smap, x0, horizon, k)
    l2 = oe.check_lemma2(space, smap, x0, horizon)
    l3 = oe.check_lemma3(space, smap, x0, k)
    prof = oe.cauchy_profile(space, smap, x0, k)

    def verdict(ok: bool) -> str:
        return "holds" if ok else "fails"

    items: Items = [
        ("start", space.labels[x0]),
        ("k", k),
        ("horizon", horizon),
        ("lemma1", verdict(l1.holds)),
        ("lemma1.bound", l1.bound),
        ("lemma1.violations", len(l1.violations)),
        ("lemma2", l2.status),
        ("lemma3", verdict(l3.holds)),
        ("lemma3.p_inf", l3.p_inf),
        ("lemma3.bound", l3.bound),
        ("cauchy", verdict(prof.ok)),
    ]
    out.add(items)
    if args.json:
        out.add([("rows", [{"n": r.n, "d": r.step, "envelope": r.envelope, "ok": r.within}
                           for r in prof.rows])], "profile")
        out.emit()
    else:
        out.emit()
        sys.stdout.write("\n")
        for line in oe.render_profile(prof, args.approx):
            sys.stdout.write(line + "\n")
    ok = l1.holds and l2.status != "fails" and l3.holds and prof.ok
    return 0 if ok else 1


def cmd_completeness(args) -> int:
    try:
        inst = cp.build_escape_map(args.k, args.depth, args.extras, seed=args.seed, n_random=args.random_extras)
    except cp.DepthExhausted as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    ver = cp.verify_escape_conditions(inst, workers=args.threads)
    labels = inst.space.labels
    out = Output(args)
    out.add([
        ("k", inst.k),
        ("depth", inst.depth),
        ("points", inst.space.n),
        ("domain", len(inst.domain)),
        ("frontier", [labels[i] for i in inst.frontier]),
        ("triples_checked", ver.triples_checked),
        ("violations_i", len(ver.period2_violations)),
        ("violations_ii", len(ver.contraction_violations)),
        ("fixed_points", [labels[i] for i in ver.fixed_points]),
        ("max_weak_ratio", ver.max_weak_ratio),
        ("max_weak_witness", [labels[i] for i in ver.max_weak_witness]),
        ("ok", ver.ok),
    ])
    if args.json:
        out.add([("certificate", [{"point": a.point, "kind": a.kind, "index": a.index,
                                   "lhs": a.lhs, "rhs": a.rhs} for a in inst.assignment_log])],
                "certificate")
        out.emit()
    else:
        out.emit()
        sys.stdout.write("\n[certificate]\n")
        for line in cp.render_certificate(inst):
            sys.stdout.write(line + "\n")
    if args.tms:
        comments = ["escape map over sqrt(2) truncations; frontier points are unmapped",
                    f"k={inst.k} depth={inst.depth}"]
        Path(args.tms).write_text(render_tms(inst.space, inst.image, comments))
    return 0 if ver.ok else 1


def cmd_examples(args) -> int:
    names = args.names or sorted(FIXTURES)
    for name in names:
        if name not in FIXTURES:
            raise InputError(f"unknown example {name!r}; choose from {', '.join(sorted(FIXTURES))}")
    if args.emit:
        dest = Path(args.emit)
        dest.mkdir(parents=True, exist_ok=True)
        for name in names:
            space, smap = FIXTURES[name]()
            path = dest / f"{name}.tms"
            path.write_text(render_tms(space, smap, [name]))
            sys.stdout.write(f"{path}\n")
        return 0
    if not args.names:
        for name in names:
            sys.stdout.write(name + "\n")
        return 0
    for name in names:
        space, smap = FIXTURES[name]()
        sys.stdout.write(render_tms(space, smap, [name]))
    return 0


def cmd_generate(args) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise InputError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if args.n < 3:
        raise InputError("--n must be >= 3")
    if args.weak:
        got = random_weak_instance(args.n, args.denom_bound, seed, args.max_tries)
        if got is None:
            sys.stderr.write(f"no weak instance within {args.max_tries} draws\n")
            return 1
        space, smap, _ = got
    else:
        space = random_space(args.n, args.denom_bound, seed)
        smap = random_map(space, seed + 1)
    text = render_tms(space, smap, [f"generated seed={seed} n={args.n} denom_bound={args.denom_bound}"])
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--approx", action="store_true", help="decimal approximations, suffixed ~")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for scans (output does not depend on it)")

    p = argparse.ArgumentParser(prog="tricontract", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check the metric axioms")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("classify", parents=[common], help="Petrov and weak contraction constants")
    s.add_argument("file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("fixed-points", parents=[common], help="list fixed points")
    s.add_argument("file")
    s.set_defaults(func=cmd_fixed_points)

    s = sub.add_parser("orbit", parents=[common], help="Picard orbit of one point")
    s.add_argument("file")
    s.add_argument("--start", required=True)
    s.add_argument("--max-steps", type=int, default=None)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("iterate", parents=[common], help="iterate to a fixed point")
    s.add_argument("file")
    s.add_argument("--start", default=None, help="start point (default: every point)")
    s.add_argument("--max-steps", type=int, default=None)
    s.set_defaults(func=cmd_iterate)

    s = sub.add_parser("lemmas", parents=[common], help="orbit lemma checks and Cauchy profile")
    s.add_argument("file")
    s.add_argument("--start", required=True)
    s.add_argument("--k", type=_rational, default=None, help="contraction constant (default: weak_sup)")
    s.add_argument("--horizon", type=int, default=None)
    s.set_defaults(func=cmd_lemmas)

    s = sub.add_parser("completeness-demo", parents=[common], help="fixed-point-free escape map")
    s.add_argument("--k", type=_rational, default=Fraction(1, 2))
    s.add_argument("--depth", type=int, default=30)
    s.add_argument("--extras", type=_rational_list, default=[Fraction(0), Fraction(1), Fraction(3, 2), Fraction(2)])
    s.add_argument("--random-extras", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tms", default=None, help="write the instance as a tms file")
    s.set_defaults(func=cmd_completeness)

    s = sub.add_parser("examples", parents=[common], help="built-in worked examples")
    s.add_argument("names", nargs="*")
    s.add_argument("--emit", default=None, metavar="DIR", help="write NAME.tms files into DIR")
    s.set_defaults(func=cmd_examples)

    s = sub.add_parser("generate", parents=[common], help="random instance as tms")
    s.add_argument("--n", type=int, default=5)
    s.add_argument("--denom-bound", type=int, default=10)
    s.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    s.add_argument("--weak", action="store_true", help="rejection-sample a weak contraction")
    s.add_argument("--max-tries", type=int, default=10_000)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_generate)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the command, return the exit code; argparse errors exit with 2."""
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        sys.stderr.write("error: --threads must be >= 1\n")
        return 2
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
