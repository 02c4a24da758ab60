"""Command-line entry point.  Every subcommand reads JSON and writes one JSON report."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from .groups import GroupError, GroupModel, from_spec
from .linalg import ChainComplexError, Field, FieldMismatchError, homology as cx_homology
from .loops import (NotOrientableError, RelatorError, TruncationError, all_components, build_model,
                    bp_connes_composite, cyclic_homology, fundamental_class, hochschild_component,
                    klein_ext2_casestudy, obstruction, stabilization)
from .manifolds import BUILTINS, builtin
from .nccalc import (UnsupportedError, WitnessError, check_d_squared, exact_cy_witness, ginzburg_dga,
                     h0_presentation)
from .quiver import NCPoly, Potential, Quiver, QuiverError, jacobi_relations
from .simplicial import (AbstractSimplicialComplex, FiniteSimplicialSet, SimplicialError, compact_cohomology,
                         from_abstract, homology as s_homology)
from .tiling import (CHECK_LABEL, QuiverWithPotential, SurfaceTiling, TilingError, contract_tree_qp,
                     genus2_tiling, localize, tiling_to_qp, weight_assignment)

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


INPUT_ERRORS = (InputError, QuiverError, SimplicialError, TilingError, GroupError, UnsupportedError,
                RelatorError, TruncationError, FieldMismatchError, json.JSONDecodeError, OSError, KeyError)


def _load(path: str | None, what: str) -> Any:
    if path is None:
        raise InputError(f"missing --{what}")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: {path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _report(args, result: dict, flags: list[str], ok: bool = True) -> dict:
    return {
        "tool": "cywork",
        "version": __version__,
        "command": args.command,
        "field": getattr(args, "field_obj", None).label if getattr(args, "field_obj", None) else None,
        "cutoffs": {"radius": getattr(args, "radius", None), "degree": getattr(args, "degree", None)},
        "flags": sorted(set(flags)),
        "ok": ok,
        "result": _jsonable(result),
    }


# ---------------------------------------------------------------- inputs


def _simplicial(data) -> FiniteSimplicialSet:
    if not isinstance(data, dict):
        raise InputError("simplicial input must be a JSON object")
    if "simplices" in data:
        return FiniteSimplicialSet.from_json(data)
    if "vertices" in data:
        return from_abstract(AbstractSimplicialComplex.from_json(data))
    raise InputError("simplicial input needs 'simplices' (simplicial set) or 'vertices' (complex)")


def _qp(args) -> tuple[Quiver, Potential]:
    Q = Quiver.from_json(_load(args.quiver, "quiver"))
    W = Potential.from_json(_load(args.potential, "potential"), args.field_obj, Q)
    return Q, W


def parse_element(G: GroupModel, text: str):
    text = str(text).strip()
    if text in ("1", "e", ""):
        return G.identity()
    parse_label = getattr(G, "parse_label", None)
    if parse_label is not None and text.startswith("("):
        return parse_label(text)
    try:
        return G.parse_word(text)
    except (GroupError, KeyError, ValueError):
        if parse_label is None:
            raise
        return parse_label(text)


def _model(args):
    F = args.field_obj
    if args.model:
        return build_model(builtin(args.model), F)
    if not (args.simplicial and args.group and args.edges):
        raise InputError("give --model NAME or all of --simplicial, --group, --edges")
    S = _simplicial(_load(args.simplicial, "simplicial"))
    G = from_spec(_load(args.group, "group"))
    emap = {str(k): parse_element(G, v) for k, v in _load(args.edges, "edges").items()}
    return build_model((S, G, emap), F)


# ---------------------------------------------------------------- commands


def cmd_homology(args):
    S = _simplicial(_load(args.input, "input"))
    return _report(args, {"betti": list(s_homology(S, args.field_obj)), "euler": S.euler_characteristic(),
                          "nondegenerate_counts": [S.count(n) for n in range(S.dim + 1)]}, ["EXACT"])


def cmd_cohomology(args):
    S = _simplicial(_load(args.input, "input"))
    if args.compact:
        betti = compact_cohomology(S, args.field_obj)
    else:
        h = cx_homology(S.chain_complex(args.field_obj).dual())
        betti = tuple(h[-n].betti for n in range(S.dim + 1))
    return _report(args, {"betti": list(betti), "compact": args.compact}, ["EXACT"])


def cmd_jacobi(args):
    Q, W = _qp(args)
    rels = jacobi_relations(Q, W)
    return _report(args, {"relations": [str(r) for r in rels], "json": [r.to_json() for r in rels]}, ["EXACT"])


def _dga(args):
    Q, W = _qp(args)
    return ginzburg_dga(Q, W, args.c)


def cmd_ginzburg(args):
    G = _dga(args)
    _, rels = h0_presentation(G)
    return _report(args, {"dga": G.to_json(), "h0_relations": [str(r) for r in rels]}, ["EXACT"])


def cmd_dsq(args):
    G = _dga(args)
    if args.dga:
        data = _load(args.dga, "dga")
        try:
            for g in data["generators"]:
                G = G.with_d(str(g["name"]), NCPoly.from_json(g["d"], G.field))
        except (KeyError, TypeError) as exc:
            raise InputError(f"dga: malformed generator entry: {exc!r}") from exc
    v = check_d_squared(G)
    return _report(args, v.to_json(), ["EXACT"], v.ok)


def cmd_witness(args):
    G = _dga(args)
    try:
        rep = exact_cy_witness(G)
    except WitnessError as exc:
        return _report(args, {"error": str(exc)}, ["EXACT"], False)
    return _report(args, rep.to_json(), ["EXACT"], rep.ok)


def cmd_hochschild(args):
    m = _model(args)
    R = args.radius
    if args.cls == "all":
        comps = all_components(m, R)
        res = {"manifold": m.name, "components": [c.to_json() for c in comps]}
        flags = [c.flag for c in comps]
    else:
        c = parse_element(m.group, args.cls)
        comp = hochschild_component(m, c, R)
        res = comp.to_json()
        res["manifold"] = m.name
        res.update(stabilization(m, c, R))
        flags = [comp.flag]
    if args.cls in ("1", "all"):
        fc = fundamental_class(m)
        res["fundamental_class"] = {"degree": fc.degree, "is_cycle": fc.is_cycle, "generates_top": fc.generates_top}
    return _report(args, res, flags)


def cmd_cyclic(args):
    m = _model(args)
    c = parse_element(m.group, args.cls)
    res = cyclic_homology(m, c, args.degree, args.radius)
    if c == m.group.identity():
        cc = bp_connes_composite(m.group, c, m.dim, max(args.radius, 3), m.field)
        res["bp_connes_identity"] = cc.to_json()
    return _report(args, res, [res["flag"]])


def cmd_obstruction(args):
    m = _model(args)
    rep = obstruction(m, args.radius)
    flags = ["EXACT"] if rep.verdict == "EXACTNESS_POSSIBLE" else [f"TRUNCATED({args.radius})"]
    return _report(args, rep.to_json(), flags)


def cmd_klein(args):
    rep = klein_ext2_casestudy(args.char, args.radius)
    args.field_obj = Field(args.char)
    return _report(args, rep.to_json(), [f"TRUNCATED({args.radius})"], rep.ok)


def _tiling(args) -> SurfaceTiling:
    if args.tiling in (None, "genus2"):
        return genus2_tiling()
    return SurfaceTiling.from_json(_load(args.tiling, "tiling"))


def cmd_tiling(args):
    t = _tiling(args)
    qp = tiling_to_qp(t)
    res = {"tiling": t.to_json(), "euler_characteristic": t.euler_characteristic(), "qp": qp.to_json()}
    if args.contract:
        res["contracted_localized"] = localize(contract_tree_qp(qp)).to_json()
    return _report(args, res, [CHECK_LABEL])


def cmd_weights(args):
    if args.qp:
        data = _load(args.qp, "qp")
        try:
            Q = Quiver.from_json(data["quiver"])
            W = Potential.from_json(data["potential"], args.field_obj, Q)
        except KeyError as exc:
            raise InputError(f"qp: missing key {exc}") from exc
        qp = QuiverWithPotential(Q, W)
    else:
        qp = tiling_to_qp(_tiling(args))
    wr = weight_assignment(qp)
    return _report(args, wr.to_json(), [CHECK_LABEL], wr.feasible and wr.verified)


# ---------------------------------------------------------------- parser


def _field(text: str) -> Field:
    try:
        return Field.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field, default=Field.parse("q"), dest="field_obj",
                        help="q, f2 or fp:<p> (default q)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write the report here instead of stdout")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", help=f"built-in manifold: {', '.join(sorted(BUILTINS))} or tN")
    model.add_argument("--simplicial")
    model.add_argument("--group")
    model.add_argument("--edges")
    model.add_argument("--radius", type=int, default=3)

    qp = argparse.ArgumentParser(add_help=False)
    qp.add_argument("--quiver")
    qp.add_argument("--potential")
    qp.add_argument("--c", type=int, default=-1, help="degree of the dual arrows")

    p = argparse.ArgumentParser(prog="cywork", description=__doc__)
    p.add_argument("--version", action="version", version=f"cywork {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("homology", parents=[common])
    s.add_argument("--input")
    s.set_defaults(func=cmd_homology)
    s = sub.add_parser("cohomology", parents=[common])
    s.add_argument("--input")
    s.add_argument("--compact", action="store_true")
    s.set_defaults(func=cmd_cohomology)

    for name, func in (("jacobi", cmd_jacobi), ("ginzburg", cmd_ginzburg), ("witness", cmd_witness)):
        sub.add_parser(name, parents=[common, qp]).set_defaults(func=func)
    s = sub.add_parser("dsq-check", parents=[common, qp])
    s.add_argument("--dga", help="ginzburg output whose d-values replace the computed ones")
    s.set_defaults(func=cmd_dsq)

    s = sub.add_parser("hochschild", parents=[common, model])
    s.add_argument("--class", dest="cls", default="1", help="element label, or 'all'")
    s.set_defaults(func=cmd_hochschild)
    s = sub.add_parser("cyclic", parents=[common, model])
    s.add_argument("--class", dest="cls", default="1")
    s.add_argument("--degree", type=int, default=2)
    s.set_defaults(func=cmd_cyclic)
    s = sub.add_parser("obstruction", parents=[common, model])
    s.set_defaults(func=cmd_obstruction)

    s = sub.add_parser("klein", parents=[common])
    s.add_argument("--char", type=int, choices=(0, 2), default=0)
    s.add_argument("--radius", type=int, default=4)
    s.set_defaults(func=cmd_klein)

    s = sub.add_parser("tiling", parents=[common])
    s.add_argument("action", choices=("to-qp",))
    s.add_argument("--tiling", help="tiling JSON (default: the shipped genus-2 tiling)")
    s.add_argument("--contract", action="store_true", help="also contract a maximal tree and localize")
    s.set_defaults(func=cmd_tiling)
    s = sub.add_parser("weights", parents=[common])
    s.add_argument("--qp", help='{"quiver": ..., "potential": ...}')
    s.add_argument("--tiling")
    s.set_defaults(func=cmd_weights)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except NotOrientableError as exc:
        report = _report(args, {"error": exc.code, "message": str(exc)}, [], False)
    except INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"cywork {args.command}: input error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    except ChainComplexError as exc:
        report = _report(args, {"error": str(exc)}, [], False)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["ok"] else EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
