"""Acceptance suite shared by ``gog selftest`` and the test-suite.

Each criterion is a function ``(scale) -> CriterionResult``; the scale
object fixes every sweep bound and sample size, so a run is reproducible
from its level name and seed.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import instances
from .basserre import GroupPoint, ball, barycenters
from .presentations import GraphOfGroups
from .quasimorphism import (
    alpha,
    clamp_function,
    defect,
    defect_bruteforce,
    diagram_check,
    inhomogeneous_coboundary,
    rolli_R,
    rolli_R_oracle,
    sign_function,
)
from .seminorm import (
    NOT_GUARANTEED,
    SUCCESS,
    FiniteChainComplex,
    HomClass,
    PairComplex,
    beta_map,
    class_from_dict,
    cone_seminorm,
    duality_max,
    homology_seminorm,
    simplicial_complex,
    thurston_representative,
)
from .seminorm.complexes import closure
from .seminorm.glue import glue_assemble, load_glue
from .linalg import nullspace
from .transplant import (
    HashedCochain,
    edge_point,
    family_bound,
    phi_pullback,
    psi,
    retraction_identity,
    sv_points,
    verify_chain_map,
)

__all__ = ["Scale", "SCALES", "CriterionResult", "CRITERIA", "run_criteria", "format_line", "random_pair_instances"]


@dataclass(frozen=True)
class Scale:
    name: str
    nf_syllables: int
    nf_exponent: int
    retraction_exponent: int
    chain_tuples: int
    ball_radius: int  # in the subdivided tree
    rolli_triples: int
    rolli_pairs: int
    diagram_syllables: int
    random_pairs: int
    thetas: tuple = (Fraction(1, 2), Fraction(1), Fraction(3))
    seed: int = 0


SCALES = {
    "quick": Scale("quick", 4, 3, 3, 1000, 3, 3, 4, 2, 12),
    "full": Scale("full", 6, 3, 3, 10000, 6, 4, 6, 3, 100),
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)


def format_line(r: CriterionResult, timing: bool = False) -> str:
    status = "PASS" if r.passed else "FAIL"
    tail = f" ({r.seconds:.1f}s)" if timing else ""
    return f"[{status}] {r.number:2d}. {r.title}: {r.detail}{tail}"


# -- 1: normal forms against faithful matrix representations ----------------------------


def _mat_mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


def _mat_inv(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if det in (1, -1):
        return ((a[1][1] * det, -a[0][1] * det), (-a[1][0] * det, a[0][0] * det))
    det = Fraction(det)
    return ((a[1][1] / det, -a[0][1] / det), (-a[1][0] / det, a[0][0] / det))


_I2 = ((1, 0), (0, 1))


class MatrixOracle:
    """A faithful representation into 2x2 matrices (times Z, for a central shift).

    Free product Z*Z: Sanov's matrices. Trefoil amalgam x^2 = y^3: an element
    of order four and one of order six in SL(2, Z), paired with the
    abelianization Z, which detects the kernel generated by x^4. BS(1,2): the
    affine group of the dyadic rationals.
    """

    identity = (_I2, 0)

    def __init__(self, images: dict, shifts: dict | None = None):
        self.images = images
        self.shifts = shifts or {}
        self._powers: dict = {}

    def power(self, letter: str, k: int):
        key = (letter, k)
        if key not in self._powers:
            m = self.images[letter] if k > 0 else _mat_inv(self.images[letter])
            out = _I2
            for _ in range(abs(k)):
                out = _mat_mul(out, m)
            self._powers[key] = (out, self.shifts.get(letter, 0) * k)
        return self._powers[key]

    def extend(self, image, letter: str, k: int):
        p, s = self.power(letter, k)
        return (_mat_mul(image[0], p), image[1] + s)

    def __call__(self, runs) -> tuple:
        image = self.identity
        for letter, k in runs:
            image = self.extend(image, letter, k)
        return image


ORACLES: dict[str, Callable[[], MatrixOracle]] = {
    "zz": lambda: MatrixOracle({"a": ((1, 2), (0, 1)), "b": ((1, 0), (2, 1))}),
    "trefoil": lambda: MatrixOracle({"x": ((0, -1), (1, 0)), "y": ((1, -1), (1, 0))}, {"x": 3, "y": 2}),
    "bs12": lambda: MatrixOracle({"a": ((1, 1), (0, 1)), "e": ((2, 0), (0, 1))}),
}

RELATIONS = {
    "zz": [],
    "trefoil": [([("x", 2)], [("y", 3)])],
    "bs12": [([("e", -1), ("a", 2), ("e", 1)], [("a", 1)])],
}


def run_words(alphabet, max_syllables: int, max_exponent: int, oracle: MatrixOracle | None = None):
    """Words as runs (letter, exponent), adjacent letters distinct, with their
    oracle images built up one syllable at a time."""
    exps = [k for k in range(-max_exponent, max_exponent + 1) if k]
    start = ((), oracle.identity if oracle else None)
    yield start
    frontier = [start]
    for _ in range(max_syllables):
        nxt = []
        for w, image in frontier:
            for letter in alphabet:
                if w and w[-1][0] == letter:
                    continue
                for k in exps:
                    item = (w + ((letter, k),), oracle.extend(image, letter, k) if oracle else None)
                    nxt.append(item)
                    yield item
        frontier = nxt


def normal_form_check(name: str, max_syllables: int, max_exponent: int) -> dict:
    G = instances.graph(name)
    oracle = ORACLES[name]()
    for lhs, rhs in RELATIONS[name]:
        if oracle(lhs) != oracle(rhs):
            raise AssertionError(f"oracle for {name} does not respect {lhs} = {rhs}")
    nf_to_oracle: dict = {}
    oracle_to_nf: dict = {}
    discrepancies = []
    words = 0
    for w, key in run_words(G.display_alphabet, max_syllables, max_exponent, oracle):
        words += 1
        nf = G.word(list(w))
        prev = nf_to_oracle.setdefault(nf, key)
        if prev != key:
            discrepancies.append(("same normal form, different images", w, nf))
        prev_nf = oracle_to_nf.setdefault(key, nf)
        if prev_nf != nf:
            discrepancies.append(("same image, different normal forms", w, nf, prev_nf))
    return {"words": words, "classes": len(nf_to_oracle), "discrepancies": discrepancies}


def criterion_1(scale: Scale) -> CriterionResult:
    parts, bad = [], 0
    for name in instances.GRAPHS:
        out = normal_form_check(name, scale.nf_syllables, scale.nf_exponent)
        bad += len(out["discrepancies"])
        parts.append(f"{name} {out['words']} words/{out['classes']} elements")
    return CriterionResult(
        1,
        f"normal forms vs matrix oracle (<= {scale.nf_syllables} syllables, |exp| <= {scale.nf_exponent})",
        bad == 0,
        f"{bad} discrepancies; " + ", ".join(parts),
    )


# -- 2: retraction identity ------------------------------------------------------------------


def criterion_2(scale: Scale) -> CriterionResult:
    failures = 0
    checked = 0
    value_checks = 0
    for name in instances.GRAPHS:
        G = instances.graph(name)
        for v in G.vertices:
            pts = sv_points(G, v, 1, scale.retraction_exponent)
            for n in (2, 3):
                tuples = list(itertools.product(pts, repeat=n + 1))
                checked += len(tuples)
                failures += len(retraction_identity(G, v, tuples))
            # evaluate on concrete tabulated families too
            for n in (2, 3):
                fam = {u: HashedCochain(G, u, n, seed=scale.seed + 17 * n) for u in G.vertices}
                back = phi_pullback(G, v, psi(fam, n))
                for tup in itertools.combinations(pts, n + 1):
                    value_checks += 1
                    if back(*tup) != fam[v](*tup):
                        failures += 1
    return CriterionResult(
        2,
        "retraction identity on S_v tuples, n in {2, 3}",
        failures == 0,
        f"{failures} failures; {checked} located tuples, {value_checks} family evaluations",
    )


# -- 3: chain map and norm bound ------------------------------------------------------------------


def chain_map_pool(G: GraphOfGroups) -> list:
    els = G.enumerate_elements(2, 2)
    pool = [GroupPoint(g, v) for g in els for v in G.vertices]
    pool += [edge_point(g, e) for g in els for e in G.geometric_edges]
    return list(dict.fromkeys(pool))


def criterion_3(scale: Scale) -> CriterionResult:
    bad = over = 0
    parts = []
    for name in instances.GRAPHS:
        G = instances.graph(name)
        fam = {v: HashedCochain(G, v, 2, seed=scale.seed + 1) for v in G.vertices}
        pool = chain_map_pool(G)
        rng = random.Random(f"chain-map|{name}|{scale.seed}")
        tuples = [tuple(rng.choice(pool) for _ in range(4)) for _ in range(scale.chain_tuples)]
        report = verify_chain_map(fam, 2, tuples, family_bound(fam))
        bad += len(report.counterexamples)
        over += len(report.bound_violations)
        parts.append(f"{name} {report.checked} (max |psi| {report.max_abs})")
    return CriterionResult(
        3,
        "transplant commutes with coboundary, bounded by sup of the family",
        bad == 0 and over == 0,
        f"{bad} counterexamples, {over} bound violations; " + ", ".join(parts),
    )


# -- 4: barycenter uniqueness --------------------------------------------------------------------


def criterion_4(scale: Scale) -> CriterionResult:
    violations = 0
    parts = []
    for name in instances.GRAPHS:
        G = instances.graph(name)
        nodes = ball(G, scale.ball_radius, 1, 1)
        count = 0
        for tup in itertools.combinations_with_replacement(nodes, 4):
            count += 1
            if len(barycenters(tup)) > 1:
                violations += 1
        parts.append(f"{name} {len(nodes)} nodes/{count} tuples")
    return CriterionResult(
        4,
        f"at most one barycenter for 4-tuples in the radius-{scale.ball_radius} ball of T'",
        violations == 0,
        f"{violations} violations; " + ", ".join(parts),
    )


# -- 5: Rolli quasimorphisms ----------------------------------------------------------------


def rolli_families(G: GraphOfGroups) -> dict:
    return {
        "sgn": {v: sign_function(G, v) for v in G.vertices},
        "clamp2": {v: clamp_function(G, v, 2) for v in G.vertices},
    }


def criterion_5(scale: Scale) -> CriterionResult:
    G = instances.graph("zz")
    fams = rolli_families(G)
    mul = lambda a, b: a * b  # noqa: E731
    problems = []
    triples = G.enumerate_elements(scale.rolli_triples, 1)
    pairs = G.enumerate_elements(scale.rolli_pairs, 1)
    for label, fam in fams.items():
        dR = inhomogeneous_coboundary(lambda x, y: rolli_R(fam, x, y), 2, mul)
        nz = sum(1 for x in triples for y in triples for z in triples if dR(x, y, z) != 0)
        if nz:
            problems.append(f"{label}: coboundary of R nonzero on {nz} triples")
        mism = sum(1 for x in pairs for y in pairs if rolli_R(fam, x, y) != rolli_R_oracle(fam, x, y))
        if mism:
            problems.append(f"{label}: R differs from the coboundary of alpha on {mism} pairs")
        if any(alpha(fam, x) != -alpha(fam, x.inverse()) for x in pairs):
            problems.append(f"{label}: alpha is not odd")
    sgn = fams["sgn"]
    d = defect(G, sgn, 1, 6)
    d_brute = defect_bruteforce(G, sgn, 2, 2)
    if d != 1 or d_brute != 1:
        problems.append(f"defect of sgn is {d} (brute force {d_brute}), expected 1")
    els = G.enumerate_elements(scale.diagram_syllables, 1)
    one = G.identity()
    report = diagram_check(G, sgn, [(one, x, y) for x in els for y in els])
    if not report.ok:
        problems.append(f"diagram: {len(report.failures)} failures")
    detail = (
        f"{len(triples) ** 3} triples, {len(pairs) ** 2} pairs per family; defect {d}; "
        f"diagram {report.checked} evaluations, {report.barycenter_checked} barycenters"
    )
    return CriterionResult(5, "Rolli cocycle, formula, defect and diagram on Z*Z", not problems, "; ".join(problems) or detail)


# -- 6, 7: cone and duality on random pairs ---------------------------------------------------------


def _random_pair(rng: random.Random, max_cells: int = 30):
    while True:
        nv = rng.randint(3, 5)
        verts = list(range(nv))
        tris = {tuple(sorted(rng.sample(verts, 3))) for _ in range(rng.randint(1, 4))}
        edges = {tuple(sorted(rng.sample(verts, 2))) for _ in range(rng.randint(0, 3))}
        tops = [list(t) for t in sorted(tris)] + [list(e) for e in sorted(edges)]
        for t in tops:
            if rng.random() < 0.5:
                rng.shuffle(t)
        weights_pool = [Fraction(1), Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 2)]
        X0 = simplicial_complex(tops)
        weights = {c: rng.choice(weights_pool) for c in X0.degree_of}
        X = FiniteChainComplex(X0.bases, X0.boundary, weights)
        if len(X.degree_of) > max_cells:
            continue
        cells = [c for c in X.degree_of if X.degree_of[c] >= 1]
        sub = closure(X, [c for c in cells if rng.random() < 0.3])
        pair = PairComplex(X, sub)
        n = rng.choice([1, 2]) if X.dim(2) else 1
        # relative cycles: kernel of the boundary into C_{n-1}(X)/C_{n-1}(Y)
        basis = X.basis(n)
        rows = [f for f in X.basis(n - 1) if f not in sub]
        M = [[X.d(c).get(f, 0) for c in basis] for f in rows]
        kernel = nullspace(M, len(basis)) if rows else [[Fraction(int(i == j)) for j in range(len(basis))] for i in range(len(basis))]
        if not kernel:
            continue
        z = [Fraction(0)] * len(basis)
        for vec in kernel:
            k = rng.randint(-2, 2)
            z = [a + k * b for a, b in zip(z, vec)]
        if not any(z):
            z = list(kernel[0])
        chain = {c: v for c, v in zip(basis, z) if v}
        return HomClass.of(pair, chain, n)


def random_pair_instances(count: int, seed: int) -> list:
    rng = random.Random(f"pairs|{seed}")
    return [_random_pair(rng) for _ in range(count)]


def criterion_6(scale: Scale) -> CriterionResult:
    classes = random_pair_instances(scale.random_pairs, scale.seed)
    bad = []
    for i, cls in enumerate(classes):
        cone = beta_map(cls.pair, "inverse", cls)
        for theta in scale.thetas:
            a = cone_seminorm(cone, theta).value
            b = homology_seminorm(cls, theta).value
            if a != b:
                bad.append((i, theta, a, b))
    return CriterionResult(
        6,
        "cone seminorm equals relative theta-seminorm",
        not bad,
        f"{len(bad)} mismatches on {len(classes)} pairs x theta in {{{', '.join(map(str, scale.thetas))}}}",
        data={"mismatches": bad},
    )


def criterion_7(scale: Scale) -> CriterionResult:
    classes = random_pair_instances(scale.random_pairs, scale.seed)
    bad = []
    for i, cls in enumerate(classes):
        for theta in scale.thetas:
            a = duality_max(cls, theta).value
            b = homology_seminorm(cls, theta).value
            if a != b:
                bad.append((i, theta, a, b))
    return CriterionResult(
        7,
        "dual maximum equals relative theta-seminorm",
        not bad,
        f"{len(bad)} mismatches on {len(classes)} pairs x {len(scale.thetas)} thetas",
        data={"mismatches": bad},
    )


# -- 8, 9, 10: fixed instances -------------------------------------------------------------------


def criterion_8(scale: Scale) -> CriterionResult:
    ok = class_from_dict(instances.data_json("uw_weighted"))
    t1 = thurston_representative(ok, Fraction(1, 2))
    rigid = class_from_dict(instances.data_json("simplex2"))
    t2 = thurston_representative(rigid, 1)
    good1 = (
        t1.status == SUCCESS
        and t1.theta == 3
        and t1.chain_norm == Fraction(7, 5)
        and t1.chain_norm <= t1.class_norm + t1.epsilon
        and t1.boundary_norm == 0
    )
    good2 = t2.status == NOT_GUARANTEED and t2.boundary_norm == 3
    return CriterionResult(
        8,
        "small-boundary representative procedure",
        good1 and good2,
        f"u/w: {t1.status}, |c| = {t1.chain_norm}, |dc| = {t1.boundary_norm}; "
        f"2-simplex: {t2.status}, |dc| = {t2.boundary_norm}",
    )


def criterion_9(scale: Scale) -> CriterionResult:
    expected = {"circle": 3, "simplex2": 1, "torus7": 14}
    got = {}
    for name in expected:
        cls = class_from_dict(instances.data_json(name))
        got[name] = homology_seminorm(cls, 0).value
    # independent check for the torus: no 3-cells, and the 2-cycles form a line
    torus = class_from_dict(instances.data_json("torus7"))
    X = torus.X
    kernel = nullspace(X.matrix(2), X.dim(2))
    rank_ok = not X.dim(3) and len(kernel) == 1
    ok = all(got[k] == v for k, v in expected.items()) and rank_ok
    return CriterionResult(
        9,
        "fixed seminorm values",
        ok,
        ", ".join(f"{k} = {v}" for k, v in got.items()) + ("" if rank_ok else "; torus kernel check failed"),
    )


def criterion_10(scale: Scale) -> CriterionResult:
    pieces, faces, degree = load_glue(instances.data_json("annulus_glue"))
    res = glue_assemble(pieces, faces, degree)
    X = res.pair.X
    total = sum((p.pair.X.norm(p.cycle) for p in pieces), Fraction(0))
    relative = res.pair.is_relative_cycle(res.cycle)
    bound_ok = res.cycle_norm <= total + res.correction_norm
    # the correction is forced: no interface chain has boundary only on the exterior
    cols = res.interface
    rows = [f for f in X.basis(degree - 1) if f not in res.pair.sub]
    M = [[X.d(c).get(f, 0) for c in cols] for f in rows]
    unique = not nullspace(M, len(cols)) if cols else True
    ok = relative and bound_ok and res.correction_norm == 6 and unique
    return CriterionResult(
        10,
        "annulus gluing",
        ok,
        f"|c'| = {res.correction_norm}, |c''| = {res.cycle_norm} <= {total} + {res.correction_norm}; "
        f"relative cycle {relative}; correction unique {unique}",
    )


def criterion_11(scale: Scale) -> CriterionResult:
    from .mutations import MUTATIONS, TARGETS, mutation

    quick = Scale(**{**SCALES["quick"].__dict__, "seed": scale.seed})
    caught = {}
    for name in MUTATIONS:
        with mutation(name):
            failed = []
            for number in TARGETS[name]:
                try:
                    r = CRITERIA[number](quick)
                    ok = r.passed
                except Exception:
                    ok = False
                if not ok:
                    failed.append(number)
        caught[name] = failed
    missed = [name for name, failed in caught.items() if not failed]
    detail = "; ".join(f"{name} -> fails {failed or 'nothing'}" for name, failed in caught.items())
    return CriterionResult(11, "seeded faults are detected", not missed, detail)


CRITERIA: dict[int, Callable[[Scale], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_criteria(level: str = "quick", only=None, seed: int = 0, on_result=None) -> list[CriterionResult]:
    base = SCALES[level]
    scale = Scale(**{**base.__dict__, "seed": seed})
    results = []
    for number, fn in CRITERIA.items():
        if only and number not in only:
            continue
        start = time.perf_counter()
        try:
            r = fn(scale)
        except Exception as exc:  # a crash is a failure of that criterion, not of the run
            r = CriterionResult(number, fn.__name__, False, f"raised {type(exc).__name__}: {exc}")
        r.seconds = time.perf_counter() - start
        results.append(r)
        if on_result:
            on_result(r)
    return results
