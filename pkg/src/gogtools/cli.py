"""Command-line interface: ``gog <command> ...``.

Every command prints (or writes with ``--out``) one JSON report. Exit status
is 0 on success, 1 when a verification finds counterexamples, 2 on bad input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import random
import shlex
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import instances
from .basserre import TreeEdgeVertex, TreeVertex, barycenters, candidate_centres, geodesic
from .groups import GroupError
from .presentations import GraphError, GraphOfGroups, NormalForm
from .seminorm.complexes import ComplexError, format_rational, parse_rational

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


# -- parsing helpers -------------------------------------------------------------------


def rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ComplexError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def theta_arg(text: str):
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    return rational(text)


def read_text(arg: str) -> str:
    path = Path(arg)
    if path.is_file():
        return path.read_text(encoding="utf-8")
    try:
        return instances.data_text(arg)
    except (FileNotFoundError, ModuleNotFoundError, OSError):
        raise InputError(f"no such file or bundled instance: {arg!r}") from None


def read_json(arg: str):
    try:
        return json.loads(read_text(arg))
    except json.JSONDecodeError as exc:
        raise InputError(f"{arg}: malformed JSON ({exc})") from exc


def load_graph_arg(arg: str) -> GraphOfGroups:
    return GraphOfGroups.from_dict(read_json(arg))


def parse_letters(text: str) -> list[tuple[str, int]]:
    """``"a b^-1 c^2"`` (or ``"1"`` for the identity) to ``[(name, exp), ...]``."""
    out = []
    for tok in text.replace("*", " ").split():
        if tok == "1":
            continue
        name, _, exp = tok.partition("^")
        try:
            k = int(exp) if exp else 1
        except ValueError:
            raise InputError(f"bad exponent in {tok!r}") from None
        if not name:
            raise InputError(f"bad letter {tok!r}")
        out.append((name, k))
    return out


def parse_element(graph: GraphOfGroups, spec) -> NormalForm:
    if isinstance(spec, str):
        return graph.word(parse_letters(spec))
    return graph.parse_word(spec)


def parse_site_literal(graph: GraphOfGroups, spec):
    """``"WORD @ SITE"`` or ``{"word": [[g, k], ...], "site": SITE}`` to ``(g, site)``."""
    if isinstance(spec, str):
        word, sep, site = spec.rpartition("@")
        if not sep:
            raise InputError(f"point {spec!r} needs the form 'WORD @ SITE'")
        g = parse_element(graph, word)
        site = site.strip()
    elif isinstance(spec, dict) and "site" in spec:
        g = parse_element(graph, spec.get("word", []))
        site = spec["site"]
    else:
        raise InputError(f"malformed point literal {spec!r}")
    if site not in graph.vertices and site not in graph.edges:
        raise InputError(f"unknown site {site!r}")
    return g, site


def parse_spoint(graph: GraphOfGroups, spec):
    from .quasimorphism import s_point

    g, site = parse_site_literal(graph, spec)
    if site in graph.edges:
        site = graph.geometric(site)
    return s_point(graph, g, site)


def parse_tree_node(graph: GraphOfGroups, spec):
    g, site = parse_site_literal(graph, spec)
    if site in graph.vertices:
        return TreeVertex.from_coset(g, site)
    return TreeEdgeVertex.from_coset(g, graph.geometric(site))


def parse_sv_point(graph: GraphOfGroups, vertex: str, spec):
    from .transplant import SvElement, sv_coset

    G = graph.groups[vertex]

    def local(word):
        return G.parse(parse_letters(word) if isinstance(word, str) else word)

    try:
        if "element" in spec:
            return SvElement(vertex, local(spec["element"]))
        if "coset" in spec:
            edge = spec["edge"]
            if graph.edges[edge].target != vertex:
                raise InputError(f"edge {edge!r} does not end at {vertex!r}")
            return sv_coset(graph, edge, local(spec["coset"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed S_{vertex} point {spec!r}") from exc
    raise InputError(f"S_{vertex} point needs 'element' or 'coset': {spec!r}")


def load_family(graph: GraphOfGroups, doc, seed: int, degree: int):
    """Per-vertex cochains from a document, or pseudo-random ones from the seed."""
    from .transplant import HashedCochain, TabulatedCochain

    if doc is None:
        return {v: HashedCochain(graph, v, degree, seed) for v in graph.vertices}, degree
    degree = int(doc.get("degree", degree))
    fams = {}
    spec = doc.get("families", {})
    for v in graph.vertices:
        entry = spec.get(v, {})
        invariant = bool(entry.get("invariant", True))
        if "hashed_seed" in entry:
            fams[v] = HashedCochain(graph, v, degree, int(entry["hashed_seed"]), invariant=invariant)
            continue
        tab = TabulatedCochain(graph, v, degree, invariant=invariant)
        for row in entry.get("values", []):
            pts = [parse_sv_point(graph, v, p) for p in row["points"]]
            if len(pts) != degree + 1:
                raise InputError(f"tuple of length {len(pts)} in a degree-{degree} family")
            tab.set(pts, parse_rational(row["value"]))
        fams[v] = tab
    unknown = set(spec) - set(graph.vertices)
    if unknown:
        raise InputError(f"families for unknown vertices {sorted(unknown)}")
    return fams, degree


def odd_family(graph: GraphOfGroups, spec: str):
    from .quasimorphism import clamp_function, parity_window, sign_function, zero_function

    out = {}
    parts = spec.split(",")
    for v in graph.vertices:
        out[v] = sign_function(graph, v)
    for part in parts:
        target, _, kind = part.rpartition("=")
        vertices = [target] if target else list(graph.vertices)
        for v in vertices:
            if v not in graph.vertices:
                raise InputError(f"unknown vertex {v!r} in family spec")
            name, _, arg = kind.partition(":")
            if name == "sgn":
                out[v] = sign_function(graph, v)
            elif name == "clamp":
                out[v] = clamp_function(graph, v, int(arg or 1))
            elif name == "parity":
                n, _, p = arg.partition(":")
                out[v] = parity_window(graph, v, int(n or 1), int(p or 1))
            elif name == "zero":
                out[v] = zero_function(v)
            else:
                raise InputError(f"unknown odd function {name!r}; use sgn, clamp:N, parity:N[:P] or zero")
    return out


# -- output ------------------------------------------------------------------------------


def jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, float):
        return "inf" if math.isinf(x) else x
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, dict):
        return {(k if isinstance(k, str) else ":".join(map(str, k)) if isinstance(k, tuple) else str(k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, NormalForm):
        return repr(x)
    return repr(x)


def write_atomic(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def node_record(node) -> dict:
    if isinstance(node, TreeVertex):
        return {"kind": "vertex", "site": node.site, "rep": repr(node.rep)}
    return {"kind": "edge", "site": node.edge, "rep": repr(node.rep)}


def lp_certificate(res) -> dict:
    return jsonable(res.certificate()) if res is not None else None


# -- commands ------------------------------------------------------------------------------


def cmd_check(a):
    text = read_text(a.graph)
    G = GraphOfGroups.from_dict(json.loads(text))
    again = GraphOfGroups.loads(G.dumps())
    return EXIT_OK, {
        "vertices": list(G.vertices),
        "geometric_edges": G.geometric_edges,
        "spanning_tree": sorted(G.tree_edges),
        "base_vertex": G.base,
        "free_product": G.is_free_product,
        "alphabet": list(G.display_alphabet),
        "round_trip": again.dumps() == G.dumps(),
        "canonical_text": text == G.dumps(),
    }


def cmd_reduce(a):
    G = load_graph_arg(a.graph)
    g = parse_element(G, " ".join(a.word))
    return EXIT_OK, {"input": " ".join(a.word), "normal_form": repr(g), "word": g.word(), "identity": g.is_identity}


def cmd_enumerate(a):
    G = load_graph_arg(a.graph)
    els = G.enumerate_elements(a.syllables, a.exponent)
    return EXIT_OK, {"count": len(els), "elements": [repr(g) for g in els]}


def cmd_tree_geodesic(a):
    G = load_graph_arg(a.graph)
    u = parse_tree_node(G, a.source)
    v = parse_tree_node(G, a.target)
    path = geodesic(u, v)
    return EXIT_OK, {"length": len(path) - 1, "path": [node_record(n) for n in path]}


def cmd_tree_barycenter(a):
    G = load_graph_arg(a.graph)
    nodes = [parse_tree_node(G, p) for p in a.points]
    if len(nodes) < 3:
        raise InputError("a barycenter needs at least three points")
    found = barycenters(nodes)
    return EXIT_OK, {
        "barycenter": node_record(found[0]) if found else None,
        "count": len(found),
        "candidates": len(candidate_centres(nodes)),
    }


def cmd_transplant_eval(a):
    from .transplant import psi_locate, psi_eval

    G = load_graph_arg(a.graph)
    doc = read_json(a.cochain) if a.cochain else None
    fam, degree = load_family(G, doc, a.seed, a.degree)
    pts = [parse_spoint(G, p) for p in a.points]
    if len(pts) != degree + 1:
        raise InputError(f"degree {degree} needs {degree + 1} points, got {len(pts)}")
    loc = psi_locate(pts)
    value = psi_eval(fam, tuple(pts))
    centre = None
    if loc is not None:
        centre = node_record(loc[0])
    return EXIT_OK, {"degree": degree, "value": value, "barycenter": centre, "points": [repr(p) for p in pts]}


def cmd_transplant_verify(a):
    from .acceptance import chain_map_pool
    from .transplant import family_bound, retraction_identity, sv_points, verify_chain_map

    G = load_graph_arg(a.graph)
    doc = read_json(a.cochain) if a.cochain else None
    fam, degree = load_family(G, doc, a.seed, a.degree)
    pool = chain_map_pool(G)
    rng = random.Random(f"verify|{a.seed}")
    tuples = [tuple(rng.choice(pool) for _ in range(degree + 2)) for _ in range(a.samples)]
    report = verify_chain_map(fam, degree, tuples, family_bound(fam))
    retraction = {}
    for v in G.vertices:
        pts = sv_points(G, v, 1, a.exponent)
        fails = retraction_identity(G, v, itertools.product(pts, repeat=degree + 1))
        retraction[v] = [repr(f[0]) for f in fails[:20]] + ([f"... {len(fails) - 20} more"] if len(fails) > 20 else [])
    bad = report.counterexamples
    ok = report.ok and not any(retraction.values())
    return (EXIT_OK if ok else EXIT_FAIL), {
        "degree": degree,
        "checked": report.checked,
        "max_abs": report.max_abs,
        "bound": family_bound(fam),
        "counterexamples": [[[repr(p) for p in x], lhs, rhs] for x, lhs, rhs in bad[:50]],
        "counterexample_count": len(bad),
        "bound_violations": len(report.bound_violations),
        "retraction_failures": retraction,
    }


def cmd_qm_defect(a):
    from .quasimorphism import defect

    G = load_graph_arg(a.graph)
    fam = odd_family(G, a.family)
    return EXIT_OK, {"family": a.family, "defect": defect(G, fam, a.syllables, a.exponent)}


def cmd_qm_diagram(a):
    from .quasimorphism import diagram_check

    G = load_graph_arg(a.graph)
    fam = odd_family(G, a.family)
    els = G.enumerate_elements(a.syllables, a.exponent)
    one = G.identity()
    rep = diagram_check(G, fam, [(one, x, y) for x in els for y in els])
    return (EXIT_OK if rep.ok else EXIT_FAIL), {
        "family": a.family,
        "elements": len(els),
        "checked": rep.checked,
        "barycenters_checked": rep.barycenter_checked,
        "failure_count": len(rep.failures),
        "failures": [jsonable(f) for f in rep.failures[:50]],
    }


def _class(a):
    from .seminorm import class_from_dict

    return class_from_dict(read_json(a.complex))


def cmd_norm_seminorm(a):
    from .seminorm import homology_seminorm

    cls = _class(a)
    res = homology_seminorm(cls, a.theta)
    return EXIT_OK, {
        "theta": res.theta,
        "value": res.value,
        "representative": res.representative,
        "notes": res.notes,
        "certificate": lp_certificate(res.certificate),
    }


def cmd_norm_cone(a):
    from .seminorm import cone_class_from_dict, cone_seminorm, homology_seminorm
    from .seminorm.norms import beta_map

    doc = read_json(a.complex)
    cc = cone_class_from_dict(doc)
    rel = beta_map(cc.cone.pair, "forward", (cc.u, cc.v))
    x = cone_seminorm(cc, a.theta)
    y = homology_seminorm(rel, a.theta)
    return (EXIT_OK if x.value == y.value else EXIT_FAIL), {
        "theta": a.theta,
        "cone_value": x.value,
        "relative_value": y.value,
        "equal": x.value == y.value,
        "notes": x.notes,
        "cone_certificate": lp_certificate(x.certificate),
        "relative_certificate": lp_certificate(y.certificate),
    }


def cmd_norm_duality(a):
    from .seminorm import duality_max, homology_seminorm

    cls = _class(a)
    d = duality_max(cls, a.theta)
    p = homology_seminorm(cls, a.theta)
    f = {c: v for (k, c), v in d.witness.items() if k == "X"}
    g = {c: v for (k, c), v in d.witness.items() if k == "Y"}
    return (EXIT_OK if d.value == p.value else EXIT_FAIL), {
        "theta": a.theta,
        "dual_value": d.value,
        "primal_value": p.value,
        "equal": d.value == p.value,
        "witness": {"f": f, "g": g},
        "notes": d.notes,
        "certificate": lp_certificate(d.certificate),
    }


def cmd_norm_thurston(a):
    from .seminorm import thurston_representative

    t = thurston_representative(_class(a), a.epsilon)
    return EXIT_OK, {
        "status": t.status,
        "epsilon": t.epsilon,
        "theta": t.theta,
        "class_norm": t.class_norm,
        "chain": t.chain,
        "chain_norm": t.chain_norm,
        "boundary_norm": t.boundary_norm,
        "theta_value": t.theta_value,
    }


def cmd_glue(a):
    from .seminorm.glue import glue_assemble, load_glue

    pieces, faces, degree = load_glue(read_json(a.gluing))
    res = glue_assemble(pieces, faces, degree)
    total = sum((p.pair.X.norm(p.cycle) for p in pieces), Fraction(0))
    ok = res.cycle_norm <= total + res.correction_norm and res.pair.is_relative_cycle(res.cycle)
    return (EXIT_OK if ok else EXIT_FAIL), {
        "degree": res.degree,
        "correction": res.correction,
        "correction_norm": res.correction_norm,
        "cycle": res.cycle,
        "cycle_norm": res.cycle_norm,
        "pieces_norm": total,
        "inequality_holds": ok,
        "exterior": sorted(res.pair.sub),
        "certificate": lp_certificate(res.certificate),
    }


def cmd_selftest(a):
    from .acceptance import format_line, run_criteria

    only = {int(x) for x in a.only.split(",")} if a.only else None

    def show(r):
        print(format_line(r, a.timing), file=sys.stderr, flush=True)

    if a.mutate:
        from .mutations import mutation

        with mutation(a.mutate):
            results = run_criteria(a.level, only, a.seed, show)
    else:
        results = run_criteria(a.level, only, a.seed, show)
    ok = all(r.passed for r in results)
    out = {
        "level": a.level,
        "mutation": a.mutate,
        "passed": ok,
        "criteria": [
            {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
            | ({"seconds": round(r.seconds, 3)} if a.timing else {})
            for r in results
        ],
    }
    return (EXIT_OK if ok else EXIT_FAIL), out


def cmd_run(a):
    doc = read_json(a.manifest)
    if not isinstance(doc, dict) or "command" not in doc:
        raise InputError("manifest needs a 'command' field")
    argv = shlex.split(doc["command"]) if isinstance(doc["command"], str) else list(doc["command"])
    argv += [str(x) for x in doc.get("inputs", [])]
    for key, value in doc.get("params", {}).items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif value is not False and value is not None:
            argv += [flag, str(value)]
    if doc.get("out"):
        argv += ["--out", str(doc["out"])]
    if argv and argv[0] == "run":
        raise InputError("a manifest cannot run another manifest")
    return main(argv)


# -- parser ----------------------------------------------------------------------------------


def _common(p, *, seed=False, syllables=None, exponent=None, samples=None, theta=False, epsilon=False):
    p.add_argument("--out", metavar="PATH", help="write the JSON report here (atomically) instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if syllables is not None:
        p.add_argument("--syllables", type=int, default=syllables, metavar="N")
    if exponent is not None:
        p.add_argument("--exponent", type=int, default=exponent, metavar="N")
    if samples is not None:
        p.add_argument("--samples", type=int, default=samples, metavar="N")
    if theta:
        p.add_argument("--theta", type=theta_arg, default=Fraction(0), metavar="P/Q")
    if epsilon:
        p.add_argument("--epsilon", type=rational, required=True, metavar="P/Q")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gog", description="Graphs of groups, transplanted cocycles and exact seminorms.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("check", help="validate a graph-of-groups file")
    p.add_argument("graph")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="normal form of a word")
    p.add_argument("graph")
    p.add_argument("word", nargs="+", help="letters like a b^-1 c^2, or 1")
    _common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("enumerate", help="list elements up to a syllable bound")
    p.add_argument("graph")
    _common(p, syllables=2, exponent=1)
    p.set_defaults(func=cmd_enumerate)

    tree = sub.add_parser("tree", help="Bass-Serre tree queries").add_subparsers(dest="sub", required=True, metavar="SUB")
    p = tree.add_parser("geodesic", help="path between two tree vertices, literals 'WORD @ SITE'")
    p.add_argument("graph")
    p.add_argument("source")
    p.add_argument("target")
    _common(p)
    p.set_defaults(func=cmd_tree_geodesic)
    p = tree.add_parser("barycenter", help="barycenter of three or more tree vertices")
    p.add_argument("graph")
    p.add_argument("points", nargs="+")
    _common(p)
    p.set_defaults(func=cmd_tree_barycenter)

    tr = sub.add_parser("transplant", help="the barycentric transplant of vertex cochains").add_subparsers(
        dest="sub", required=True, metavar="SUB"
    )
    p = tr.add_parser("eval", help="evaluate on points 'WORD @ SITE'")
    p.add_argument("graph")
    p.add_argument("points", nargs="+")
    p.add_argument("--cochain", help="tabulated family JSON (default: seeded pseudo-random family)")
    p.add_argument("--degree", type=int, default=2)
    _common(p, seed=True)
    p.set_defaults(func=cmd_transplant_eval)
    p = tr.add_parser("verify", help="chain-map, norm and retraction checks")
    p.add_argument("graph")
    p.add_argument("--cochain")
    p.add_argument("--degree", type=int, default=2)
    _common(p, seed=True, samples=2000, exponent=2)
    p.set_defaults(func=cmd_transplant_verify)

    qm = sub.add_parser("qm", help="Rolli quasimorphisms on free products").add_subparsers(dest="sub", required=True, metavar="SUB")
    fam_help = "odd functions: sgn, clamp:N, parity:N[:P], zero; per vertex as v=clamp:2,w=sgn"
    p = qm.add_parser("defect", help="sup |R| over junction syllables")
    p.add_argument("graph")
    p.add_argument("--family", default="sgn", help=fam_help)
    _common(p, syllables=1, exponent=6)
    p.set_defaults(func=cmd_qm_defect)
    p = qm.add_parser("diagram-check", help="compare R with the transplanted vertex coboundaries")
    p.add_argument("graph")
    p.add_argument("--family", default="sgn", help=fam_help)
    _common(p, syllables=3, exponent=1)
    p.set_defaults(func=cmd_qm_diagram)

    norm = sub.add_parser("norm", help="seminorms on finite complexes").add_subparsers(dest="sub", required=True, metavar="SUB")
    for name, func, extra in (
        ("seminorm", cmd_norm_seminorm, {"theta": True}),
        ("cone-compare", cmd_norm_cone, {"theta": True}),
        ("duality", cmd_norm_duality, {"theta": True}),
        ("thurston", cmd_norm_thurston, {"epsilon": True}),
    ):
        p = norm.add_parser(name)
        p.add_argument("complex", help="class JSON: complex, subcomplex, cycle")
        _common(p, **extra)
        p.set_defaults(func=func)

    p = sub.add_parser("glue", help="glue pieces and assemble a relative cycle")
    p.add_argument("gluing")
    _common(p)
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("level", choices=["quick", "full"], nargs="?", default="quick")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--mutate", choices=["barycenter", "alternation", "cone-sign"], help="run with a seeded fault")
    _common(p, seed=True)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("run", help="execute a JSON run manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_run, out=None, timing=False)
    return ap


def _params(a) -> dict:
    skip = {"func", "command", "sub", "out", "timing"}
    return {k: jsonable(v) for k, v in vars(a).items() if k not in skip}


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    if a.func is cmd_run:
        try:
            return cmd_run(a)
        except (InputError, OSError) as exc:
            print(f"gog: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    start = time.perf_counter()
    try:
        code, results = a.func(a)
    except (InputError, GraphError, GroupError, ComplexError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"gog: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_INPUT
    command = " ".join(x for x in (a.command, getattr(a, "sub", None)) if x)
    report = {"command": command, "params": _params(a), "results": jsonable(results)}
    if a.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if a.out:
        write_atomic(a.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
