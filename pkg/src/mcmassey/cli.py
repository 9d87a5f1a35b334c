"""Command line interface.

Every command reads a presentation document (file path, ``-`` for stdin, or
``--text``) and prints one JSON document with sorted keys.

Exit codes: 0 success, 2 usage or parse error, 3 undefined product,
4 budget exhausted, 5 invariant violation or rejected certificate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bar as barmod
from . import blowup as bl
from . import massey as ms
from .dga import cup, validate
from .linalg import Subspace
from .textio import (
    ParseError,
    class_matrix_from_text,
    class_matrix_to_text,
    load_certificate,
    parse_element,
    parse_presentation,
    render,
    render_matrix,
    system_to_json,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNDEFINED = 3
EXIT_BUDGET = 4
EXIT_INVARIANT = 5


class CommandFailure(Exception):
    def __init__(self, code: int, message: str, payload=None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _load(args):
    if args.text is not None:
        return parse_presentation(args.text.replace("\\n", "\n"))
    if args.document is None:
        raise CommandFailure(EXIT_USAGE, "a presentation document is required")
    text = sys.stdin.read() if args.document == "-" else Path(args.document).read_text(encoding="utf-8")
    return parse_presentation(text)


def _classes(p, texts):
    return [class_matrix_from_text(p, t) for t in texts]


def _cls_json(p, V):
    return {"matrix": V.to_json(), "text": class_matrix_to_text(p, V)}


def _degree_range(spec: str) -> range:
    a, sep, b = spec.partition("..")
    try:
        lo = int(a)
        hi = int(b) if sep else lo
    except ValueError:
        raise CommandFailure(EXIT_USAGE, f"bad degree range {spec!r}")
    if lo < 0 or hi < lo:
        raise CommandFailure(EXIT_USAGE, f"bad degree range {spec!r}")
    return range(lo, hi + 1)


# --- commands -------------------------------------------------------------

def cmd_validate(p, args):
    rep = validate(p, cap=args.cap)
    if not rep.ok:
        raise CommandFailure(EXIT_INVARIANT, "presentation fails validation", rep.to_json())
    return rep.to_json()


def cmd_cohomology(p, args):
    out = {}
    for d in _degree_range(args.deg):
        H = p.cohomology(d)
        out[str(d)] = {"dim": H.dim, "representatives": [str(r) for r in H.representatives]}
    return {"degrees": out}


def cmd_cup(p, args):
    if len(args.classes) != 2:
        raise CommandFailure(EXIT_USAGE, "cup takes exactly two classes")
    a, b = _classes(p, args.classes)
    if not (a.is_scalar() and b.is_scalar()):
        A, B = a.representative(p), b.representative(p)
        prod = A * B
        degs = ms.degree_star(a.degrees, b.degrees)
        val = ms.cocycle_classes(p, prod, degs)
        return {"value": _cls_json(p, val)}
    c = cup(p, a[0, 0], b[0, 0])
    return {"value": c.to_json(), "rep": str(p.rep(c)), "zero": c.is_zero()}


def cmd_triple(p, args):
    if len(args.classes) != 3:
        raise CommandFailure(EXIT_USAGE, "triple takes exactly three classes")
    cls = _classes(p, args.classes)
    tp = ms.matrix_triple_product(p, *cls)
    return {
        "value": _cls_json(p, tp.generalized_matrix),
        "classical_value": _cls_json(p, tp.classical_matrix),
        "indeterminacy_dim": tp.indeterminacy.dim,
        "indeterminacy_basis": [[str(x) for x in v] for v in tp.indeterminacy.subspace.basis],
        "trivial": tp.is_trivial,
        "strictly_irreducible": ms.is_strictly_irreducible(p, tp.generalized_matrix, tp.indeterminacy),
        "system": system_to_json(tp.system),
    }


def cmd_massey(p, args):
    cls = _classes(p, args.classes)
    res = ms.find_defining_system(p, cls, budget=args.budget)
    out = {"nodes": res.nodes, "budget": args.budget}
    if res.system is None:
        if res.budget_exhausted:
            raise CommandFailure(EXIT_BUDGET, "budget exhausted before a defining system was found", out)
        out["dead_ends"] = [list(x) for x in res.dead_ends]
        raise CommandFailure(EXIT_UNDEFINED, "no defining system exists on the search grid", out)
    val = ms.massey_value(p, cls, res.system)
    out["value"] = _cls_json(p, val.generalized)
    out["classical_value"] = _cls_json(p, val.classical)
    out["system"] = system_to_json(res.system)
    out["arity"] = len(cls)
    pv = ms.parametric_value(p, cls)
    if pv is not None:
        out["parametric"] = {
            "parameters": pv.nparams,
            "nontrivial_certified": pv.certifies_nontrivial(),
            "strictly_irreducible_certified": pv.certifies_strictly_irreducible(p),
            "only_zero": pv.contains_only_zero(),
        }
    return out


def cmd_verify(p_unused, args):
    if not args.certificate:
        raise CommandFailure(EXIT_USAGE, "verify needs --certificate")
    cert = load_certificate(Path(args.certificate).read_text(encoding="utf-8"))
    rep = ms.verify_membership(cert.presentation, cert.claimed, cert.classes, cert.system, cert.convention)
    out = {
        "accepted": rep.ok,
        "convention": cert.convention,
        "description": cert.description,
        "failures": [f.to_json() for f in rep.failures],
    }
    if rep.value is not None:
        out["value"] = _cls_json(cert.presentation, rep.value)
    if not rep.ok:
        raise CommandFailure(EXIT_INVARIANT, "certificate rejected", out)
    return out


def cmd_strictness(p, args):
    cls = _classes(p, args.classes)
    rep = ms.is_strictly_defined(p, cls, budget=args.budget)
    return rep.to_json()


def _chern(model_base, texts):
    return [None if t == "0" else parse_element(t, model_base) for t in texts or []]


def cmd_blowup(p, args):
    model = bl.build_neighborhood(p, args.m, _chern(p, args.chern))
    cap = args.cap if args.cap is not None else 2 * args.m
    dec = bl.module_decomposition(model, cap)
    return {
        "presentation": render(model.presentation),
        "x": model.x_name,
        "y": model.y_name,
        "top_relation": bl.top_relation_holds(model),
        "decomposition": dec.to_json(),
    }


def cmd_lift(p, args):
    model = bl.build_neighborhood(p, args.m, _chern(p, args.chern))
    cls = _classes(p, args.classes)
    lifted = bl.lift_classes(model, cls)
    out = {"lifted_classes": [class_matrix_to_text(model.presentation, V) for V in lifted]}
    res = ms.find_defining_system(p, cls, budget=args.budget)
    if res.system is None:
        code = EXIT_BUDGET if res.budget_exhausted else EXIT_UNDEFINED
        raise CommandFailure(code, "no base defining system found", out)
    lifted_sys = bl.lift_defining_system(model, res.system)
    out["lifted_system"] = system_to_json(lifted_sys)
    c = lifted_sys.cocycle()
    out["cocycle"] = render_matrix(c.entries)
    n = len(cls)
    verdicts = {}
    try:
        if n == 3:
            verdicts["C"] = bl.theorem_C_verifier(model, cls).to_json()
        elif n == 4:
            verdicts["D"] = bl.theorem_D_verifier(model, cls, lifted_sys).to_json()
    except bl.BlowupError as exc:
        verdicts["hypothesis_failure"] = str(exc)
    if all(d == 1 for V in cls for row in V.degrees for d in row):
        try:
            verdicts["B"] = bl.theorem_B_verifier(model, cls, lifted_sys).to_json()
        except bl.BlowupError as exc:
            verdicts["B_hypothesis_failure"] = str(exc)
    out["verdicts"] = verdicts
    return out


def cmd_bar(p, args):
    bs = barmod.BarSlice(p, args.len, args.deg)
    degrees = range(1, args.deg)
    e1 = barmod.page(p, bs, 1, lengths=range(1, args.len + 1), degrees=degrees)
    e2 = barmod.page(p, bs, 2, lengths=range(1, args.len), degrees=degrees)
    indec = barmod.indecomposable_dims(p, degrees)
    agree = all(e2.dims[(1, q)] == indec[q] for q in degrees)
    if not agree:
        raise CommandFailure(EXIT_INVARIANT, "E2^{-1,q} disagrees with H+/H+.H+",
                             {"E2": e2.to_json(), "indecomposables": indec})
    return {"E1": e1.to_json(), "E2": e2.to_json(),
            "indecomposables": {str(q): d for q, d in indec.items()}, "agree": agree}


def cmd_weight_bound(p, args):
    cls = _classes(p, args.classes)
    out = []
    search = ms.SystemSearch(p, cls, budget=args.budget)
    for s in search:
        wb = ms.strict_weight_bound(p, s)
        out.append({"bound": wb.bound, "actual": wb.actual})
        if len(out) >= args.limit:
            break
    if not out:
        code = EXIT_BUDGET if search.budget_exhausted else EXIT_UNDEFINED
        raise CommandFailure(code, "no defining system found")
    return {"arity": len(cls), "systems": len(out), "max_actual": max(o["actual"] for o in out),
            "bound": out[0]["bound"]}


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "cup": cmd_cup,
    "triple": cmd_triple,
    "massey": cmd_massey,
    "verify": cmd_verify,
    "strictness": cmd_strictness,
    "blowup": cmd_blowup,
    "lift": cmd_lift,
    "bar": cmd_bar,
    "weight-bound": cmd_weight_bound,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mcmassey", description="Massey products of free DGAs over Q.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_doc=True):
        sp = sub.add_parser(name, help=help_text)
        if needs_doc:
            sp.add_argument("document", nargs="?", help="presentation file, or - for stdin")
            sp.add_argument("--text", help="presentation given inline; \\n separates lines")
        return sp

    sp = add("validate", "check d^2 = 0, homogeneity and minimality")
    sp.add_argument("--cap", type=int, default=None)
    sp = add("cohomology", "dimensions and representatives")
    sp.add_argument("--deg", default="0..3")
    for name, help_text in (("cup", "cup product of two classes"), ("triple", "triple Massey product"),
                            ("strictness", "check that all proper sub-products vanish")):
        sp = add(name, help_text)
        sp.add_argument("--classes", nargs="+", required=True)
        sp.add_argument("--budget", type=int, default=10_000)
    sp = add("massey", "search for a defining system and report its value")
    sp.add_argument("--classes", nargs="+", required=True)
    sp.add_argument("--budget", type=int, default=10_000)
    sp = add("verify", "check a defining-system certificate", needs_doc=False)
    sp.add_argument("--certificate", required=True)
    sp = add("blowup", "neighborhood model and module decomposition")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--chern", nargs="*")
    sp.add_argument("--cap", type=int, default=None)
    sp = add("lift", "lift classes and a defining system into the neighborhood model")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--chern", nargs="*")
    sp.add_argument("--classes", nargs="+", required=True)
    sp.add_argument("--budget", type=int, default=10_000)
    sp = add("bar", "E1 and E2 dimensions of the bar construction")
    sp.add_argument("--len", type=int, default=3)
    sp.add_argument("--deg", type=int, default=5)
    sp = add("weight-bound", "filtration bound over enumerated systems on a Witt model")
    sp.add_argument("--classes", nargs="+", required=True)
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--limit", type=int, default=100)
    return ap


def run(argv=None) -> tuple[int, dict]:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_USAGE), {}
    doc = {"command": args.command}
    try:
        p = None if args.command == "verify" else _load(args)
        doc["result"] = COMMANDS[args.command](p, args)
        doc["status"] = "ok"
        return EXIT_OK, doc
    except CommandFailure as exc:
        doc["status"], doc["error"] = "error", str(exc)
        if exc.payload is not None:
            doc["result"] = exc.payload
        return exc.code, doc
    except (ParseError, OSError, json.JSONDecodeError) as exc:
        doc["status"], doc["error"] = "error", str(exc)
        return EXIT_USAGE, doc
    except ms.UndefinedProduct as exc:
        doc["status"], doc["error"] = "undefined", str(exc)
        return EXIT_UNDEFINED, doc
    except ms.BudgetExhausted as exc:
        doc["status"], doc["error"] = "budget", str(exc)
        return EXIT_BUDGET, doc
    except (ms.InvariantViolation, bl.BlowupError) as exc:
        doc["status"], doc["error"] = "invariant", str(exc)
        return EXIT_INVARIANT, doc
    except (ValueError, KeyError) as exc:
        doc["status"], doc["error"] = "error", str(exc)
        return EXIT_USAGE, doc


def main(argv=None) -> int:
    code, doc = run(argv)
    if doc:
        print(json.dumps(doc, indent=2, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
