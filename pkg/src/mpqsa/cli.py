"""Command line entry point ``mpqsa``.

Exit codes: 0 all checks pass, 1 some check fails, 2 configuration or input
error, 3 nothing fails but some degree-bounded checks are inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import linalg
from .cartan import CartanError, MultiparamMatrix, build_datum, check_cartan_type, generic_matrix, standard_matrix
from .deform_data import DeformError, TwistData, CocycleData, admissible_cocycle, cocycle_deform, solve_cocycle, solve_twist, symbolic_antisymmetric, twist_deform
from .hopf import HopfStructure
from .lie_semiclassical import LieError, _sym_str, semiclassical_limit
from .polmp import (
    PolyError,
    PolyMultiparam,
    build_poly,
    compose_multiparam,
    compose_via_cocycle,
    hopf_table_check,
    integrality_check,
    poly_realization,
    ring_relation_residues,
)
from .realization import FLAVORS, RealizationError, build_realization, classify
from .reporting import Report
from .scalars import ScalarError
from .serialization import ParseError, dumps, load, matrix_to_doc
from .suites import SUITES, ConfigError, SuiteConfig, run_suite, split_rank
from .superalg_engine import EngineError, QuantumAlgebra, relation_set

__all__ = ["main", "build_parser", "EXIT_PASS", "EXIT_FAIL", "EXIT_CONFIG", "EXIT_INCONCLUSIVE"]

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3

_INPUT_ERRORS = (ConfigError, ParseError, CartanError, DeformError, RealizationError, PolyError, EngineError, LieError, ScalarError)


def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the subcommand."""
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--type", dest="type_tag", default=d(None), help="A, B1, B2, C, D1, D2, F4 or G3")
    p.add_argument("--rank", type=int, default=d(None))
    p.add_argument("--epsilon", default=d(None), help="parity choice such as '+-+'")
    p.add_argument("--out", choices=("json", "text"), default=d("text"))
    p.add_argument("--seed", type=int, default=d(0))
    p.add_argument("--specializations", type=int, default=d(3))
    p.add_argument("--degree-bound", type=int, default=d(None))
    p.add_argument("--variant", choices=("covariant", "typeset"), default=d("covariant"))
    p.add_argument("--timing", action="store_true", default=d(False), help="include wall times in reports")
    return p


def _matrix_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--matrix", help="matrix document; defaults to the generic matrix of the datum")
    p.add_argument("--standard", action="store_true", help="use P = DA instead of the generic matrix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpqsa", allow_abbrev=False, description="Multiparameter quantum supergroups: exact constructions and checks.", parents=[_common(True)])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(False)

    sub.add_parser("datum", parents=[common], help="Cartan super-datum")

    p = sub.add_parser("matrix", parents=[common], help="multiparameter matrix of Cartan type")
    _matrix_source(p)

    p = sub.add_parser("realize", parents=[common], help="build a realization")
    _matrix_source(p)
    p.add_argument("--flavor", choices=FLAVORS, default="straight_split")
    p.add_argument("--t", type=int, help="realization rank; defaults to the smallest allowed")

    p = sub.add_parser("deform", parents=[common], help="toral twist or cocycle deformation of (P, R)")
    p.add_argument("kind", choices=("twist", "cocycle"))
    p.add_argument("--realization", help="realization document with its matrix")
    p.add_argument("--param", help="twist or cocycle document; defaults to a symbolic one")

    p = sub.add_parser("solve", parents=[common], help="find a twist or cocycle with P -> P'")
    p.add_argument("kind", choices=("twist", "cocycle"))
    p.add_argument("--target", required=True, help="matrix document for P'")
    p.add_argument("--realization", help="realization document with its matrix")

    p = sub.add_parser("relations", parents=[common], help="defining relations")
    p.add_argument("--family", help="only this family")
    p.add_argument("--elements", action="store_true", help="print the relation elements")

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))

    sub.add_parser("semiclassical", parents=[common], help="hbar-jets of the Hopf structure against the Lie tables")

    p = sub.add_parser("poly", parents=[common], help="polynomial multiparameter layer")
    psub = p.add_subparsers(dest="poly_command", required=True)
    b = psub.add_parser("build", parents=[common], help="presentation and Hopf tables")
    b.add_argument("--q", help="matrix document for the exponents; defaults to the generic matrix")
    c = psub.add_parser("check-integrality", parents=[common], help="integrality of a 2n x 2n twist")
    c.add_argument("--phi", required=True, help="matrix document for Phi on (K, L)")
    c.add_argument("--q", help="matrix document for the exponents; defaults to DA")
    m = psub.add_parser("compose", parents=[common], help="compose q with an antisymmetric qhat")
    m.add_argument("--qhat", required=True, help="matrix document for qhat")
    m.add_argument("--q", help="matrix document for the exponents")
    return parser


# helpers


def _config(args) -> SuiteConfig:
    if not args.type_tag:
        raise ConfigError("--type is required")
    return SuiteConfig(args.type_tag, args.rank, args.epsilon, args.seed, args.specializations, args.degree_bound, args.variant)


def _load_matrix(path: str) -> MultiparamMatrix:
    value = load(path)
    if isinstance(value, MultiparamMatrix):
        return value
    raise ParseError("expected a matrix document")


def _load_rows(path: str) -> list:
    value = load(path)
    if isinstance(value, (MultiparamMatrix, TwistData, CocycleData)):
        return value.rows()
    raise ParseError("expected a matrix, twist or cocycle document")


def _matrix(args, datum) -> MultiparamMatrix:
    if getattr(args, "matrix", None):
        P = _load_matrix(args.matrix)
        if not check_cartan_type(P, datum):
            raise ConfigError("the matrix is not of Cartan type for this datum")
        return P
    return standard_matrix(datum) if getattr(args, "standard", False) else generic_matrix(datum)


def _emit(payload: dict, text: str, args) -> None:
    if args.out == "json":
        sys.stdout.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _matrix_text(rows) -> str:
    cells = matrix_to_doc(rows)
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  " + "  ".join(c.rjust(width) for c in row) for row in cells)


def _report_exit(report) -> int:
    if report.failures():
        return EXIT_FAIL
    if report.inconclusive():
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _report_text(report: Report) -> str:
    lines = [f"{report.name}: {len(report.checks)} checks, {len(report.failures())} failed, {len(report.inconclusive())} inconclusive"]
    for c in sorted(report.checks, key=lambda c: c.name):
        lines.append(f"  {c.status:12s} {c.name}" + (f"  residue: {c.residue}" if c.residue else ""))
    return "\n".join(lines)


def _report_json(report: Report, timing: bool) -> dict:
    return {"name": report.name, "checks": [c.to_json(timing) for c in sorted(report.checks, key=lambda c: c.name)]}


def _realization(args, datum):
    if getattr(args, "realization", None):
        value = load(args.realization, "realization")
        if not isinstance(value, tuple):
            raise ParseError("the realization document must include its matrix", "$")
        return value
    P = _matrix(args, datum)
    if args.command == "deform" and args.kind == "cocycle" or args.command == "solve" and args.kind == "cocycle":
        return P, build_realization(P, datum, "split_minimal", 2 * datum.rank)
    return P, build_realization(P, datum, "straight_split", split_rank(P))


# subcommands


def _cmd_datum(args, datum) -> int:
    rows = [" ".join(f"{x:3d}" for x in row) for row in datum.cartan]
    text = "\n".join([
        f"type {datum.type_tag} rank {datum.rank}",
        "parity  " + " ".join(str(p) for p in datum.parity),
        "colours " + " ".join(datum.colours),
        "d       " + " ".join(str(x) for x in datum.d),
        "cartan",
        *("  " + r for r in rows),
    ])
    _emit(datum.to_json(), text, args)
    return EXIT_PASS


def _cmd_matrix(args, datum) -> int:
    P = _matrix(args, datum)
    payload = {
        "matrix": matrix_to_doc(P.rows()),
        "symmetric_part": matrix_to_doc(P.symmetric_part.rows()),
        "antisymmetric_part": matrix_to_doc(P.antisymmetric_part.rows()),
        "atoms": sorted(P.atoms()),
    }
    text = "P\n" + _matrix_text(P.rows()) + "\nP_s\n" + _matrix_text(P.symmetric_part.rows())
    _emit(payload, text, args)
    return EXIT_PASS


def _cmd_realize(args, datum) -> int:
    P = _matrix(args, datum)
    if args.t is not None:
        t = args.t
    elif args.flavor == "straight_split":
        t = split_rank(P)
    elif args.flavor == "split_minimal":
        t = 2 * datum.rank
    else:
        t = 2 * datum.rank - linalg.rank(linalg.mod_atoms(P.symmetric_part.rows()))
    R = build_realization(P, datum, args.flavor, t)
    R.validate(P)
    payload = json.loads(dumps((P, R)))
    payload["flags"] = sorted(classify(R))
    text = (
        f"realization of rank {R.rank}, flags: {', '.join(sorted(classify(R)))}\nroots\n{_matrix_text(R.root_rows())}"
        f"\ncoroots +\n{_matrix_text(R.plus_rows())}\ncoroots -\n{_matrix_text(R.minus_rows())}"
    )
    _emit(payload, text, args)
    return EXIT_PASS


def _cmd_deform(args, datum) -> int:
    P, R = _realization(args, datum)
    if args.kind == "twist":
        param = _load_rows(args.param) if args.param else symbolic_antisymmetric(R.rank, "f")
        P2, R2 = twist_deform(P, R, param)
    else:
        param = _load_rows(args.param) if args.param else admissible_cocycle(R).rows()
        P2, R2 = cocycle_deform(P, R, param)
    payload = json.loads(dumps((P2, R2)))
    payload["parameter"] = matrix_to_doc(param)
    _emit(payload, "deformed P\n" + _matrix_text(P2.rows()), args)
    return EXIT_PASS


def _cmd_solve(args, datum) -> int:
    P, R = _realization(args, datum)
    target = _load_matrix(args.target)
    sol = solve_twist(P, target, R) if args.kind == "twist" else solve_cocycle(P, target, R)
    check = (twist_deform if args.kind == "twist" else cocycle_deform)(P, R, sol)[0] == target
    payload = {"kind": args.kind, "solution": matrix_to_doc(sol.rows()), "reproduces_target": check}
    _emit(payload, f"{args.kind} solution\n{_matrix_text(sol.rows())}\nreproduces target: {check}", args)
    return EXIT_PASS if check else EXIT_FAIL


def _cmd_relations(args, datum) -> int:
    P = generic_matrix(datum)
    R = build_realization(P, datum, "straight_split", split_rank(P))
    rels = [r for r in relation_set(datum, P, R, variant=args.variant) if args.family in (None, r.family)]
    payload = {
        "variant": args.variant,
        "counts": dict(sorted({f: sum(1 for r in rels if r.family == f) for f in {r.family for r in rels}}.items())),
        "relations": [
            {"name": r.name, "family": r.family, "indices": [i + 1 for i in r.indices], **({"element": str(r.element)} if args.elements else {})}
            for r in rels
        ],
    }
    lines = [f"{len(rels)} relations ({args.variant})"]
    for r in rels:
        lines.append(f"  {r.family:14s} {r.name}" + (f"\n      {r.element}" if args.elements else ""))
    _emit(payload, "\n".join(lines), args)
    return EXIT_PASS


def _cmd_verify(args, datum) -> int:
    rep = run_suite(args.suite, _config(args))
    _emit(rep.to_json(args.timing), rep.to_text(), args)
    return rep.exit_code


def _cmd_semiclassical(args, datum) -> int:
    P = generic_matrix(datum)
    R = build_realization(P, datum, "straight_split", split_rank(P))
    report = Report("semiclassical")
    jets = semiclassical_limit(HopfStructure(QuantumAlgebra(datum, P, R)), report=report)
    table = {_sym_str(s): str(v) for s, v in sorted(jets.cobracket_table().items(), key=lambda kv: repr(kv[0]))}
    payload = {"cobracket": table, "report": _report_json(report, args.timing)}
    text = "\n".join([*(f"delta({k}) = {v}" for k, v in table.items()), _report_text(report)])
    _emit(payload, text, args)
    return _report_exit(report)


def _poly_q(args, datum) -> PolyMultiparam:
    if getattr(args, "q", None):
        return PolyMultiparam(datum, _load_matrix(args.q))
    if args.poly_command == "check-integrality":
        return PolyMultiparam.standard(datum)
    return PolyMultiparam.generic(datum)


def _cmd_poly(args, datum) -> int:
    q = _poly_q(args, datum)
    if args.poly_command == "build":
        pa = build_poly(datum, q)
        report = hopf_table_check(pa)
        residues = {f"{i + 1},{j + 1}": str(v) for (i, j), v in sorted(ring_relation_residues(q).items())}
        payload = {
            "exponents": matrix_to_doc(q.matrix().rows()),
            "presentation": [str(r) for r in pa.presentation()],
            "ring_relation_residues": residues,
            "report": _report_json(report, args.timing),
        }
        text = f"exponents\n{_matrix_text(q.matrix().rows())}\n{len(pa.presentation())} presentation relations\n" + _report_text(report)
        _emit(payload, text, args)
        return _report_exit(report)
    if args.poly_command == "check-integrality":
        phi = _load_rows(args.phi)
        res = integrality_check(phi, q, poly_realization(q.matrix()))
        _emit(res.to_json(), f"integral: {res.ok}" + (f"\nwitness: {res.witness}" if res.witness else ""), args)
        return EXIT_PASS if res.ok else EXIT_FAIL
    qhat = _load_rows(args.qhat)
    composed = compose_multiparam(q, qhat)
    via = compose_via_cocycle(q, qhat)
    agree = via == composed.matrix()
    payload = {"composed": matrix_to_doc(composed.matrix().rows()), "agrees_with_cocycle_route": agree}
    _emit(payload, f"q * qhat\n{_matrix_text(composed.matrix().rows())}\nagrees with cocycle route: {agree}", args)
    return EXIT_PASS if agree else EXIT_FAIL


_COMMANDS = {
    "datum": _cmd_datum,
    "matrix": _cmd_matrix,
    "realize": _cmd_realize,
    "deform": _cmd_deform,
    "solve": _cmd_solve,
    "relations": _cmd_relations,
    "verify": _cmd_verify,
    "semiclassical": _cmd_semiclassical,
    "poly": _cmd_poly,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if not args.type_tag:
            raise ConfigError("--type is required")
        try:
            datum = build_datum(args.type_tag, args.rank, args.epsilon)
        except CartanError as exc:
            raise ConfigError(str(exc)) from exc
        return _COMMANDS[args.command](args, datum)
    except _INPUT_ERRORS as exc:
        sys.stderr.write(f"mpqsa: error: {type(exc).__name__}: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
