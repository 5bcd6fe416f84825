"""Command-line entry point: ``smsp <subcommand> ...``.

Exit status is 0 on success, 1 when an invariant or a verification fails,
and 2 on usage errors (bad flags, invalid configurations, unreadable input).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Sequence

from . import instances as gen
from . import invariants as inv
from . import linear as lin
from . import matroids as mat
from . import objectives as obj
from . import reduction as red
from .errors import InvalidConfig, SMSPError, TrialError, UnknownGenerator
from .harness import ExperimentConfig, fmt, log_record, round12, run_trials

USAGE_ERRORS = (InvalidConfig, UnknownGenerator, OSError, json.JSONDecodeError)


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _p_policy(s: str):
    if s == "auto":
        return s
    try:
        p = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--p takes 'auto' or a number, got {s!r}")
    if not 0 < p < 1:
        raise argparse.ArgumentTypeError(f"p must lie in (0, 1), got {p}")
    return p


def _emit_csv(rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerows(rows)


def _json(rec) -> str:
    return json.dumps(rec, sort_keys=True)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args, out) -> int:
    cfg = ExperimentConfig(
        instance=args.instance, algorithm=args.algorithm, linear=args.linear, trials=args.trials,
        seed=args.seed, variant=args.variant, p=args.p, alpha=args.alpha, q=args.q, emit=args.emit,
        workers=args.workers, instance_seed=args.instance_seed,
    )
    if cfg.emit == "jsonl":
        run_trials(cfg, on_log=lambda i, log: out.write(_json(log_record(i, log)) + "\n"))
    else:
        _emit_csv(run_trials(cfg).csv_rows(), out)
    return 0


def _bounds_table() -> list[list[str]]:
    e = math.e
    rows = [["setting", "variant", "alpha", "q", "p", "ratio"]]

    def add(setting, variant, alpha, q=None, k=None):
        p = red.choose_p(alpha, variant, q=q) if k is None else red.choose_p(alpha, variant.replace("-capped", ""))
        r = red.ratio_bound(alpha, variant, k=k, q=q)
        rows.append([setting, variant, fmt(alpha), "" if q is None else fmt(q), fmt(p), fmt(r)])

    add("unitary-partition", "nonmonotone-capped", e, 1 / e)
    add("unitary-partition", "monotone-capped", e, 1 / e)
    add("transversal", "nonmonotone-capped", 8.0, 0.5)
    add("transversal", "monotone-capped", 8.0, 0.5)
    for k in range(1, 6):
        add(f"{k}-sparse-linear", "nonmonotone-capped", k * e, 1 / e)
        add(f"{k}-sparse-linear", "monotone-capped", k * e, 1 / e)
    for variant in ("monotone", "nonmonotone"):
        p, r = red.optimal_laminar_p(variant)
        rows.append(["laminar", variant, "", "", fmt(round(p, 6)), fmt(red.laminar_ratio(round(p, 6), variant))])
    return rows


def cmd_bounds(args, out) -> int:
    if args.alpha is None:
        if args.laminar_p is not None:
            out.write(fmt(red.laminar_ratio(args.laminar_p, args.variant)) + "\n")
            return 0
        _emit_csv(_bounds_table(), out)
        return 0
    variant = args.variant
    if args.q is not None and variant in ("nonmonotone", "monotone"):
        variant += "-capped"  # a q without the capped bound would mix two settings
    p = red.choose_p(args.alpha, variant, q=args.q) if args.k is None else None
    r = red.ratio_bound(args.alpha, variant, k=args.k, q=args.q)
    _emit_csv([["variant", "alpha", "q", "k", "p", "ratio"],
               [variant, fmt(args.alpha), "" if args.q is None else fmt(args.q),
                "" if args.k is None else str(args.k), "" if p is None else fmt(p), fmt(r)]], out)
    return 0


def _report_out(report: inv.InvariantReport, emit: str, out):
    if emit == "jsonl":
        for e in report.entries:
            out.write(_json({"name": e.name, "status": e.status, "measured": round12(e.measured),
                             "threshold": round12(e.threshold), "anchor": e.anchor, "detail": e.detail}) + "\n")
    else:
        rows = [["name", "status", "measured", "threshold", "anchor"]]
        rows += [[e.name, e.status, "" if e.measured is None else fmt(e.measured),
                  "" if e.threshold is None else fmt(e.threshold), e.anchor] for e in report.entries]
        _emit_csv(rows, out)


def cmd_invariants(args, out) -> int:
    f = m = None
    if args.instance:
        inst = gen.resolve_instance(args.instance, args.instance_seed)
        f, m = inst.objective, inst.matroid
    cfg = inv.InvariantConfig(args.suite, args.seed, args.scale, args.seeds, f, m)
    report = inv.check_invariants(cfg)
    _report_out(report, args.emit, out)
    return 0 if report.ok else 1


def _load_doc(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def cmd_verify_matroid(args, out) -> int:
    doc = _load_doc(args.file)
    section = doc.get("matroid", doc)
    ground = doc.get("ground", section.get("ground"))
    if ground is None:
        raise InvalidConfig("matroid document needs 'ground'")
    m = mat.build_matroid(mat.matroid_spec_from_json(section), ground)
    rep = mat.verify_axioms(m)
    out.write(_json({"kind": m.kind, "n": rep.n, "ok": rep.ok, "independent_sets": rep.independent_sets,
                     "failure": rep.failure, "counterexample": _plain(rep.counterexample)}) + "\n")
    return 0 if rep.ok else 1


def _plain(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


def cmd_verify_function(args, out) -> int:
    doc = _load_doc(args.file)
    section = doc.get("objective", doc)
    ground = doc.get("ground", section.get("ground"))
    if ground is None:
        raise InvalidConfig("objective document needs 'ground'")
    f = obj.build_objective(obj.objective_spec_from_json(section), ground)
    rep = obj.check_submodular(f)
    out.write(_json({"check": "submodular", "ok": rep.ok, "n": rep.n, "nonnegative": rep.nonnegative,
                     "submodular": rep.submodular, "monotone": rep.monotone,
                     "counterexample": _plain(rep.counterexample)}) + "\n")
    ok = rep.ok
    if ok and len(f.ground) <= 8:
        for e in inv.inv_convolution_properties("supplied", f, seed=args.seed):
            out.write(_json({"check": e.name, "ok": e.ok, "measured": round12(e.measured), "anchor": e.anchor}) + "\n")
            ok &= e.ok
    return 0 if ok else 1


def cmd_generate(args, out) -> int:
    spec = gen.generate_spec(args.spec, args.seed, args.name)
    out.write(json.dumps(gen.spec_to_json(spec), indent=1, sort_keys=True) + "\n")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smsp", description="Submodular matroid secretary simulations.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run seeded trials of a reduction")
    s.add_argument("--instance", required=True, help="JSON document, shipped instance name or generator string")
    s.add_argument("--instance-seed", type=int, default=0, help="seed for generator strings")
    s.add_argument("--algorithm", choices=("online", "simulated"), default="online")
    s.add_argument("--linear", choices=lin.LINEAR_KEYS, default=None,
                   help="linear algorithm (default: the instance's registered one)")
    s.add_argument("--variant", choices=red.VARIANTS, default="nonmonotone")
    s.add_argument("--p", type=_p_policy, default="auto")
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--q", type=float, default=None)
    s.add_argument("--trials", type=_positive_int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--emit", choices=("jsonl", "csv"), default="csv")
    s.add_argument("--workers", type=_positive_int, default=1)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bounds", help="closed-form parameter choices and ratio bounds")
    b.add_argument("--alpha", type=float, default=None)
    b.add_argument("--q", type=float, default=None)
    b.add_argument("--k", type=int, default=None)
    b.add_argument("--variant", default="nonmonotone",
                   help=f"one of {', '.join(red.BOUND_VARIANTS)} (laminar: monotone or nonmonotone)")
    b.add_argument("--laminar-p", type=float, default=None, help="evaluate the laminar ratio at this p")
    b.set_defaults(func=cmd_bounds)

    i = sub.add_parser("invariants", help="run the invariant suite")
    i.add_argument("--suite", choices=inv.SUITES, default="all")
    i.add_argument("--seeds", type=_positive_int, default=None, help="number of coupling tuples")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--scale", type=float, default=1.0, help="multiplier for Monte Carlo trial counts")
    i.add_argument("--instance", default=None, help="also check this instance's matroid and objective")
    i.add_argument("--instance-seed", type=int, default=0)
    i.add_argument("--emit", choices=("jsonl", "csv"), default="csv")
    i.set_defaults(func=cmd_invariants)

    m = sub.add_parser("verify-matroid", help="check the matroid axioms of a JSON document")
    m.add_argument("file")
    m.set_defaults(func=cmd_verify_matroid)

    f = sub.add_parser("verify-function", help="check submodularity and convolution properties")
    f.add_argument("file")
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_verify_function)

    g = sub.add_parser("generate", help="write the JSON document of a generated instance")
    g.add_argument("spec")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--name", default=None)
    g.set_defaults(func=cmd_generate)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except TrialError as exc:
        print(f"smsp: {exc}", file=sys.stderr)
        return 1
    except (SMSPError, *USAGE_ERRORS) as exc:
        # malformed documents and invalid configurations are usage errors
        print(f"smsp: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
