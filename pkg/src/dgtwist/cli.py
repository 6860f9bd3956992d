"""
Command line interface.

Every command writes one JSON document (to --out, or stdout) and a short
human summary to stderr. ``interval``, ``tensor`` and ``twist`` write a
category file; the others write a report holding the configuration, the
verdict and the results. Exit status: 0 when every verdict passes, 1 when
a mathematical verdict fails, 2 for usage, file-format or precondition
errors.

Category arguments are either a path to a category file or one of the
built-in names ``interval:N`` and ``collapse``.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .dgcat import (DgCategoryError, NotDirectedError, collapse_fixture, ensure_directed, interval,
                    is_quasi_equivalence_on_homs, object_label, tensor, validate)
from .exactlinalg import ExactLinalgError, cohomology, field_from_name
from .io import CategoryFormatError, complex_report, dump_category, dumps, load_category
from .operad import (BasisGuardExceeded, Ordinal2, OperadError, check_contractible, sweep,
                     sweep_summary)

EXIT_OK, EXIT_VERDICT, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _dims(d):
    return {str(k): v for k, v in sorted(d.items()) if v}


def load_source(spec: str):
    if spec == "collapse":
        return collapse_fixture()[0]
    if spec.startswith("interval:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad built-in category {spec!r}") from None
        if n < 0:
            raise UsageError("interval length must be nonnegative")
        return interval(n)
    return load_category(spec)


def parse_field(values):
    if values is None:
        return field_from_name("q")
    if len(values) == 1:
        return field_from_name(values[0])
    if len(values) == 2 and values[0].lower() == "fp":
        if not values[1].isdigit():
            raise UsageError(f"--field fp expects a prime, got {values[1]!r}")
        return field_from_name(f"fp:{values[1]}")
    raise UsageError("--field expects 'q' or 'fp P'")


def _find_object(C, name):
    for x in C.objects:
        if object_label(x) == name or x == name:
            return x
    raise UsageError(f"unknown object {name!r}; objects are {[object_label(x) for x in C.objects]}")


# ---------------------------------------------------------------------------
# commands; each returns (report, verdict, summary lines)

def cmd_validate(args, field):
    C = load_source(args.category)
    rep = validate(C)
    try:
        order = ensure_directed(C)
        directed = {"directed": True, "order": [object_label(x) for x in order]}
    except NotDirectedError as e:
        directed = {"directed": False, "reason": str(e)}
    checks = {}
    for name, c in rep.checks.items():
        checks[name] = {"passed": c.passed, "checked": c.checked}
        if not c.passed:
            checks[name]["counterexample"] = [str(x) for x in c.counterexample]
            checks[name]["detail"] = c.detail
    report = {"category": C.name or args.category, "checks": checks, "directedness": directed}
    return report, rep.ok, rep.summary().splitlines()


def cmd_interval(args, field):
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    return dump_category(interval(args.n)), True, [f"interval({args.n})"]


def cmd_tensor(args, field):
    T = tensor(load_source(args.a), load_source(args.b))
    return dump_category(T), True, [f"tensor product with {len(T.basis_keys())} basis elements"]


def cmd_twist(args, field):
    from .twist import TwistedTensor
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    C = load_source(args.category)
    W = TwistedTensor(args.n, C)
    ok = True
    lines = [f"I_{args.n} twisted with {C.name or args.category}: {len(W.basis_keys())} words"]
    if args.check:
        rep = validate(W)
        ok = rep.ok
        lines += rep.summary().splitlines()
    return dump_category(W, omit_composition=args.omit_composition), ok, lines


def cmd_cohomology(args, field):
    C = load_source(args.category)
    x, y = _find_object(C, args.pair[0]), _find_object(C, args.pair[1])
    c = C.hom_complex(x, y, field)
    if c.check_d_squared() is not None:
        return {"pair": args.pair, "error": "d^2 != 0"}, False, ["d^2 != 0"]
    H = cohomology(c)
    report = {
        "pair": args.pair,
        "complex": complex_report(c),
        "labels": {str(d): v for d, v in sorted(c.labels.items())},
        "H": _dims({d: g.dim for d, g in H.items()}),
        "euler_characteristic": c.euler_characteristic(),
    }
    return report, True, [f"H = {report['H']}"]


def cmd_theorem3(args, field):
    from .twist import TwistedTensor, projection
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    C = load_source(args.category)
    ensure_directed(C)
    W = TwistedTensor(args.n, C)
    p = projection(W)
    cert = is_quasi_equivalence_on_homs(p, field)
    pairs = []
    for (x, y), v in sorted(cert.pairs.items(), key=lambda t: (object_label(t[0][0]), object_label(t[0][1]))):
        pairs.append({"source": object_label(x), "target": object_label(y),
                      "twisted_H": _dims(v["source_H"]), "classical_H": _dims(v["target_H"]),
                      "quasi_iso": v["quasi_iso"]})
    bad = [p_ for p_ in pairs if not p_["quasi_iso"]]
    lines = [f"{len(pairs)} hom pairs, {len(bad)} not quasi-isomorphic"]
    return {"n": args.n, "category": C.name or args.category, "pairs": pairs, "verdict": cert.ok}, cert.ok, lines


def cmd_bar_oracle(args, field):
    from .baroracle import _Base, compare_pair
    from .twist import TwistedTensor
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    C = load_source(args.category)
    ensure_directed(C)
    W = TwistedTensor(args.n, C)
    B = _Base(C)
    if args.pair:
        try:
            a, b = int(args.pair[0]), int(args.pair[1])
        except ValueError:
            raise UsageError("--pair expects integers a b then objects x y") from None
        if not (0 <= a <= args.n and 0 <= b <= args.n):
            raise UsageError(f"interval indices must lie in 0..{args.n}")
        todo = [(a, b, _find_object(C, args.pair[2]), _find_object(C, args.pair[3]))]
    else:
        todo = [(a, b, x, y) for a in range(args.n + 1) for b in range(args.n + 1)
                for x in C.objects for y in C.objects]
    rows = []
    for a, b, x, y in todo:
        r = compare_pair(W, a, b, x, y, field, B)
        rows.append({"a": a, "b": b, "x": object_label(x), "y": object_label(y),
                     "dims": _dims(r.dims), "H": _dims(r.h_dims),
                     "bijective": r.bijective, "degree_preserving": r.degree_preserving,
                     "intertwining": r.intertwining, "dims_agree": r.dims_agree, "H_agree": r.h_agree,
                     "acyclic_off_bar_degree_0": r.acyclicity.ok, "deviations": r.acyclicity.deviations,
                     "ok": r.ok})
    ok = all(r["ok"] for r in rows)
    return {"n": args.n, "category": C.name or args.category, "pairs": rows, "verdict": ok}, ok, \
        [f"{len(rows)} pairs compared, {sum(not r['ok'] for r in rows)} disagreements"]


def cmd_operad(args, field):
    try:
        o = Ordinal2.parse(args.ordinal)
    except OperadError as e:
        raise UsageError(str(e)) from None
    cert = check_contractible(o, field, guard=args.guard_basis, timings=args.timings)
    doc = cert.to_json()
    return doc, cert.verdict, [f"O({o}): dims {doc['dims']} H {doc['H']} verdict {cert.verdict}"]


def cmd_sweep(args, field):
    if args.k < 1 or args.sum < 0:
        raise UsageError("--k must be positive and --sum nonnegative")
    entries = sweep(args.k, args.sum, field, args.guard_basis, args.jobs, args.timings)
    summary = sweep_summary(entries)
    summary["certificates"] = [e.certificate.to_json() for e in entries if e.certificate is not None]
    lines = [f"{'ordinal':<12}{'basis':>7}  {'H':<12}verdict"]
    for row in summary["rows"]:
        o = ",".join(map(str, row["ordinal"]))
        if row["verdict"] is None:
            lines.append(f"{o:<12}{'-':>7}  {'-':<12}aborted ({row['aborted']})")
        else:
            lines.append(f"{o:<12}{row['basis_size']:>7}  {str(row['H']):<12}{row['verdict']}")
    lines.append(f"{summary['passed']}/{summary['ordinals']} passed, {summary['aborted']} aborted")
    ok = summary["passed"] == summary["ordinals"]
    return summary, ok, lines


COMMANDS = {
    "validate": cmd_validate, "interval": cmd_interval, "tensor": cmd_tensor, "twist": cmd_twist,
    "cohomology": cmd_cohomology, "theorem3": cmd_theorem3, "bar-oracle": cmd_bar_oracle,
    "operad": cmd_operad, "sweep": cmd_sweep,
}

# these emit a plain category file instead of a report
CATEGORY_COMMANDS = ("interval", "tensor", "twist")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", nargs="+", metavar="F", help="'q' (default) or 'fp P'")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--guard-basis", type=int, default=None, metavar="N",
                        help="refuse hom bases larger than N")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identity)")
    verb = common.add_mutually_exclusive_group()
    verb.add_argument("-v", "--verbose", action="store_true")
    verb.add_argument("-q", "--quiet", action="store_true")

    p = argparse.ArgumentParser(prog="dgtwist", description=__doc__.strip().splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="check the dg category axioms")
    s.add_argument("category")
    s = sub.add_parser("interval", parents=[common], help="emit the interval category I_n")
    s.add_argument("n", type=int)
    s = sub.add_parser("tensor", parents=[common], help="emit the classical tensor product")
    s.add_argument("a")
    s.add_argument("b")
    s = sub.add_parser("twist", parents=[common], help="emit I_n twisted with a category")
    s.add_argument("n", type=int)
    s.add_argument("category")
    s.add_argument("--omit-composition", action="store_true")
    s.add_argument("--check", action="store_true", help="validate the result exhaustively")
    s = sub.add_parser("cohomology", parents=[common], help="cohomology of one hom complex")
    s.add_argument("category")
    s.add_argument("--pair", nargs=2, required=True, metavar=("X", "Y"))
    s = sub.add_parser("theorem3", parents=[common], help="projection to the classical product, per hom pair")
    s.add_argument("n", type=int)
    s.add_argument("category")
    s = sub.add_parser("bar-oracle", parents=[common], help="compare with the bar-complex reconstruction")
    s.add_argument("n", type=int)
    s.add_argument("category")
    s.add_argument("--pair", nargs=4, metavar=("A", "B", "X", "Y"))
    s = sub.add_parser("operad", parents=[common], help="contractibility certificate for one 2-ordinal")
    s.add_argument("ordinal", help="comma separated, e.g. 1,1")
    s = sub.add_parser("sweep", parents=[common], help="certificates for all small 2-ordinals")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--sum", type=int, default=5)
    return p


def _config(args, field):
    cfg = {"command": args.command, "version": __version__, "field": field.name}
    for k, v in sorted(vars(args).items()):
        if k in ("command", "field", "out", "verbose", "quiet"):
            continue
        cfg[k] = v
    return cfg


def _emit(doc, out):
    text = dumps(doc)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"error (io): {e}", file=sys.stderr)
            return False
    else:
        sys.stdout.write(text)
    return True


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    kind = None
    try:
        field = parse_field(args.field)
        if args.jobs < 1:
            raise UsageError("--jobs must be positive")
        if args.guard_basis is not None and args.guard_basis < 1:
            raise UsageError("--guard-basis must be positive")
        report, ok, lines = COMMANDS[args.command](args, field)
    except UsageError as e:
        kind, msg = "usage", str(e)
    except CategoryFormatError as e:
        kind, msg = "format", str(e)
    except (NotDirectedError, BasisGuardExceeded) as e:
        kind, msg = "precondition", str(e)
    except (DgCategoryError, ExactLinalgError, OperadError) as e:
        kind, msg = "input", str(e)
    if kind is not None:
        print(f"error ({kind}): {msg}", file=sys.stderr)
        if args.out:
            _emit({"command": args.command, "error": {"kind": kind, "message": msg}}, args.out)
        return EXIT_ERROR
    if args.command in CATEGORY_COMMANDS:
        doc = report
    else:
        doc = {"config": _config(args, field), "verdict": ok, "report": report}
    if not _emit(doc, args.out):
        return EXIT_ERROR
    if not args.quiet:
        for line in (lines if args.verbose or len(lines) <= 1 or args.command == "sweep" else lines[-1:]):
            print(line, file=sys.stderr)
    return EXIT_OK if ok else EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
