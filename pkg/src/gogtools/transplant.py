"""Cochains on the amenable Gamma-set and the barycentric transplant map.

Points of ``S_v`` are either elements of ``Gamma_v`` (:class:`SvElement`) or
cosets ``c h_e(Gamma_e)`` for edges ``e`` with ``t(e) = v``
(:class:`SvCoset`). Under the inclusion into the global set, the element
``c`` goes to the group point ``(tau_v c tau_v^-1, v)`` and the coset goes to
the subdivision vertex between ``Gamma_v`` and ``c ebar Gamma_{o(e)}``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Iterable, Mapping, Sequence, Union

from .basserre import (
    EdgePoint,
    GroupPoint,
    SPoint,
    TreeEdgeVertex,
    TreeVertex,
    barycenters,
    candidate_centres,
    in_star,
    locate,
    project,
    retract_point,
    translate,
)
from .presentations import GraphError, GraphOfGroups, NormalForm

__all__ = [
    "SvElement",
    "SvCoset",
    "Cochain",
    "TabulatedCochain",
    "HashedCochain",
    "DegreeTooLow",
    "NotFreeProduct",
    "alternate",
    "coboundary",
    "phi_point",
    "phi_pullback",
    "to_vertex_frame",
    "psi_locate",
    "psi_eval",
    "psi",
    "psi_terms",
    "mu_free_pullback",
    "group_coordinate",
    "verify_chain_map",
    "retraction_identity",
    "sv_points",
    "sv_act",
    "sv_coset",
    "edge_point",
    "family_bound",
    "family_coboundary",
    "check_invariance",
    "canonical_key",
    "zero_cochain",
]


class DegreeTooLow(ValueError):
    pass


class NotFreeProduct(GraphError):
    pass


# -- points of S_v ------------------------------------------------------------


@dataclass(frozen=True)
class SvElement:
    vertex: str
    c: Any

    def sort_key(self, graph: GraphOfGroups) -> tuple:
        return (0, "", graph.groups[self.vertex].key(self.c))


@dataclass(frozen=True)
class SvCoset:
    """The coset ``c h_edge(Gamma_edge)`` in ``Gamma_v``, ``v = t(edge)``."""

    vertex: str
    edge: str
    c: Any

    def sort_key(self, graph: GraphOfGroups) -> tuple:
        return (1, self.edge, graph.groups[self.vertex].key(self.c))


SvPoint = Union[SvElement, SvCoset]


def sv_coset(graph: GraphOfGroups, edge: str, c) -> SvCoset:
    e = graph.edges[edge]
    return SvCoset(e.target, edge, e.image.coset_rep(c)[0])


def sv_act(graph: GraphOfGroups, gamma, x: SvPoint) -> SvPoint:
    """Left multiplication by ``gamma`` in ``Gamma_v``."""
    G = graph.groups[x.vertex]
    if isinstance(x, SvElement):
        return SvElement(x.vertex, G.mul(gamma, x.c))
    return sv_coset(graph, x.edge, G.mul(gamma, x.c))


def sv_points(graph: GraphOfGroups, v: str, max_syllables: int, max_exponent: int) -> list[SvPoint]:
    """Points of S_v whose group label lies within the bounds."""
    G = graph.groups[v]
    elems = list(G.elements(max_syllables, max_exponent))
    out: list[SvPoint] = [SvElement(v, c) for c in elems]
    for name in graph.edge_order:
        if graph.edges[name].target != v:
            continue
        seen = set()
        for c in elems:
            x = sv_coset(graph, name, c)
            if x not in seen:
                seen.add(x)
                out.append(x)
    return out


# -- cochains -----------------------------------------------------------------


class Cochain:
    """Exact rational function of ``degree + 1`` points with a declared sup bound."""

    def __init__(
        self,
        degree: int,
        evaluator: Callable[..., Any],
        bound: Fraction | None = None,
        alternating: bool = False,
        name: str = "",
    ):
        self.degree = degree
        self._evaluator = evaluator
        self.bound = None if bound is None else Fraction(bound)
        self.alternating = alternating
        self.name = name

    def __call__(self, *points) -> Fraction:
        if len(points) != self.degree + 1:
            raise ValueError(f"degree-{self.degree} cochain takes {self.degree + 1} points, got {len(points)}")
        return Fraction(self._evaluator(*points))

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, name={self.name!r})"


def zero_cochain(degree: int) -> Cochain:
    return Cochain(degree, lambda *p: 0, Fraction(0), True, "zero")


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def alternate(f: Cochain) -> Cochain:
    """Signed average of f over all permutations of its arguments."""
    n = f.degree + 1
    perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(n))]
    scale = Fraction(1, factorial(n))

    def ev(*pts):
        total = Fraction(0)
        for p, s in perms:
            total += s * f(*(pts[i] for i in p))
        return total * scale

    return Cochain(f.degree, ev, f.bound, True, f"alt({f.name})")


def coboundary(f: Cochain) -> Cochain:
    """Simplicial coboundary: drop each point in turn with alternating signs."""

    def ev(*pts):
        total = Fraction(0)
        for i in range(len(pts)):
            v = f(*(pts[:i] + pts[i + 1 :]))
            total += -v if i % 2 else v
        return total

    bound = None if f.bound is None else f.bound * (f.degree + 2)
    return Cochain(f.degree + 1, ev, bound, f.alternating, f"d({f.name})")


# -- tabulated and hashed families ----------------------------------------------


def _sorted_with_sign(graph: GraphOfGroups, pts: Sequence[SvPoint]) -> tuple[tuple, int]:
    keys = [p.sort_key(graph) for p in pts]
    order = sorted(range(len(pts)), key=lambda i: keys[i])
    return tuple(pts[i] for i in order), _perm_sign(order)


def canonical_key(graph: GraphOfGroups, pts: Sequence[SvPoint], invariant: bool):
    """Canonical (key, sign) of a tuple of S_v points, or None if every
    alternating (and, if ``invariant``, Gamma_v-invariant) cochain of the
    tabulated kind vanishes on it.

    Invariant keys are orbit representatives: each group point in turn is
    moved to the identity and the smallest sorted tuple wins. Tuples
    without a group point are not tabulated.
    """
    if len(set(pts)) != len(pts):
        return None
    if not invariant:
        return _sorted_with_sign(graph, pts)
    v = pts[0].vertex
    G = graph.groups[v]
    best = None
    signs = set()
    for x in pts:
        if not isinstance(x, SvElement):
            continue
        g = G.inv(x.c)
        moved = [sv_act(graph, g, y) for y in pts]
        key, sign = _sorted_with_sign(graph, moved)
        sk = tuple(p.sort_key(graph) for p in key)
        if best is None or sk < best[0]:
            best = (sk, key)
            signs = {sign}
        elif sk == best[0]:
            signs.add(sign)
    if best is None or len(signs) != 1:
        return None
    return best[1], signs.pop()


class TabulatedCochain(Cochain):
    """Finitely supported alternating cochain on S_v tuples, default value 0."""

    def __init__(self, graph: GraphOfGroups, vertex: str, degree: int, table: Mapping | None = None, invariant: bool = True):
        self.graph = graph
        self.vertex = vertex
        self.invariant = invariant
        self.table: dict[tuple, Fraction] = {}
        super().__init__(degree, self._value, Fraction(0), True, f"tab[{vertex}]")
        for pts, val in (table or {}).items():
            self.set(pts, val)

    def set(self, pts: Sequence[SvPoint], value) -> None:
        ck = canonical_key(self.graph, tuple(pts), self.invariant)
        value = Fraction(value)
        if ck is None:
            if value:
                raise ValueError(f"tuple {pts} is forced to be zero")
            return
        key, sign = ck
        self.table[key] = sign * value
        self.bound = max(self.bound, abs(value))

    def _value(self, *pts) -> Fraction:
        ck = canonical_key(self.graph, pts, self.invariant)
        if ck is None:
            return Fraction(0)
        key, sign = ck
        return sign * self.table.get(key, Fraction(0))


class HashedCochain(Cochain):
    """Pseudo-random alternating cochain: value of each canonical key is
    drawn from a generator seeded by ``(seed, key)``."""

    def __init__(self, graph: GraphOfGroups, vertex: str, degree: int, seed: int, denominator: int = 7, invariant: bool = True):
        self.graph = graph
        self.vertex = vertex
        self.seed = seed
        self.denominator = denominator
        self.invariant = invariant
        super().__init__(degree, self._value, Fraction(1), True, f"hash[{vertex},{seed}]")

    def key_value(self, key: tuple) -> Fraction:
        rng = random.Random(f"{self.seed}|{self.vertex}|{key!r}")
        q = self.denominator
        return Fraction(rng.randint(-q, q), q)

    def _value(self, *pts) -> Fraction:
        ck = canonical_key(self.graph, pts, self.invariant)
        if ck is None:
            return Fraction(0)
        key, sign = ck
        return sign * self.key_value(key)


# -- phi, psi, mu -----------------------------------------------------------------


def phi_point(graph: GraphOfGroups, x: SvPoint) -> SPoint:
    """Inclusion of S_v into the global set."""
    v = x.vertex
    if isinstance(x, SvElement):
        return GroupPoint(graph.embed(v, x.c), v)
    home = TreeVertex.from_coset(graph.identity(), v)
    return EdgePoint(home.child_edge(x.c, graph.reverse(x.edge)))


def phi_pullback(graph: GraphOfGroups, v: str, f: Cochain) -> Cochain:
    def ev(*pts):
        for p in pts:
            if p.vertex != v:
                raise GraphError(f"point {p} is not in S_{v}")
        return f(*(phi_point(graph, p) for p in pts))

    return Cochain(f.degree, ev, f.bound, f.alternating, f"phi_{v}({f.name})")


def to_vertex_frame(w: TreeVertex, x: SPoint) -> SvPoint:
    """Translate a point over the star of w by sigma(w)^-1 and read it in S_v."""
    G = w.graph
    v = w.site
    if isinstance(x, GroupPoint):
        full = locate(x.g, x.vertex)
        if x.vertex != v or full[:-1] != w.steps:
            raise GraphError(f"{x} does not lie over {w}")
        return SvElement(v, full[-1])
    node = x.node
    if node.steps == w.steps:
        return SvCoset(v, w.steps[-1], G.groups[v].identity)
    if node.steps[:-2] == w.steps:
        s, e = node.steps[-2:]
        return SvCoset(v, G.reverse(e), s)
    raise GraphError(f"{x} does not lie over the star of {w}")


def psi_locate(points: Sequence[SPoint]):
    """Barycenter vertex and the retracted tuple read in S_v, or None."""
    ys = [project(x) for x in points]
    found = barycenters(ys)
    if not found:
        return None
    if len(found) > 1:
        raise AssertionError(f"several barycenters for {ys}")
    w = found[0]
    return w, tuple(to_vertex_frame(w, retract_point(w, x)) for x in points)


def _family_value(family: Mapping[str, Cochain], v: str, pts: tuple) -> Fraction:
    f = family.get(v)
    if f is None:
        return Fraction(0)
    return f(*pts)


def psi_eval(family: Mapping[str, Cochain], points: Sequence[SPoint]) -> Fraction:
    n = len(points) - 1
    if n < 2:
        raise DegreeTooLow(f"the transplant map is defined in degrees >= 2, got {n}")
    loc = psi_locate(points)
    if loc is None:
        return Fraction(0)
    w, pts = loc
    return _family_value(family, w.site, pts)


def psi(family: Mapping[str, Cochain], degree: int) -> Cochain:
    if degree < 2:
        raise DegreeTooLow(f"the transplant map is defined in degrees >= 2, got {degree}")
    bounds = [f.bound for f in family.values() if f.bound is not None]
    bound = max(bounds, default=Fraction(0)) if len(bounds) == len(family) else None
    return Cochain(degree, lambda *pts: psi_eval(family, pts), bound, True, "psi")


def family_coboundary(family: Mapping[str, Cochain]) -> dict[str, Cochain]:
    return {v: coboundary(f) for v, f in family.items()}


def psi_terms(family: Mapping[str, Cochain], points: Sequence[SPoint], centres: Iterable[TreeVertex] | None = None) -> dict:
    """Literal per-vertex terms of the transplant sum over the given centres.

    Defaults to every tree vertex on a geodesic between two projections plus
    the neighbours of those vertices one subdivision edge away.
    """
    ys = [project(x) for x in points]
    if centres is None:
        centres = set(candidate_centres(ys))
        for y in ys:
            if y.is_edge:
                centres.update(y.endpoints())
    terms = {}
    for w in centres:
        pts = tuple(to_vertex_frame(w, retract_point(w, x)) for x in points)
        val = _family_value(family, w.site, pts)
        if val:
            terms[w] = val
    return terms


def group_coordinate(x: SPoint) -> NormalForm:
    """The group element carried by a point of a free product's S-set."""
    if isinstance(x, GroupPoint):
        return x.g
    return x.node.rep


def mu_free_pullback(graph: GraphOfGroups, f: Cochain) -> Cochain:
    if not graph.is_free_product:
        raise NotFreeProduct("the projection to Gamma is only defined for free products")

    def ev(*pts):
        return f(*(group_coordinate(x) for x in pts))

    return Cochain(f.degree, ev, f.bound, f.alternating, f"mu({f.name})")


# -- verification harnesses ---------------------------------------------------


@dataclass
class ChainMapReport:
    degree: int
    checked: int
    counterexamples: list
    bound_violations: list
    max_abs: Fraction

    @property
    def ok(self) -> bool:
        return not self.counterexamples and not self.bound_violations


def verify_chain_map(
    family: Mapping[str, Cochain], degree: int, tuples: Iterable[Sequence[SPoint]], bound: Fraction | None = None
) -> ChainMapReport:
    """Check ``d(psi f) = psi(d f)`` on (degree + 2)-tuples and the sup bound."""
    if degree < 2:
        raise DegreeTooLow(f"the transplant map is defined in degrees >= 2, got {degree}")
    if bound is None:
        bound = max((f.bound for f in family.values() if f.bound is not None), default=Fraction(0))
    dfam = family_coboundary(family)
    cache: dict = {}

    def psi_n(pts):
        hit = cache.get(pts)
        if hit is None:
            hit = cache[pts] = psi_eval(family, pts)
        return hit

    bad, over = [], []
    checked = 0
    max_abs = Fraction(0)
    for x in tuples:
        x = tuple(x)
        if len(x) != degree + 2:
            raise ValueError(f"expected {degree + 2} points, got {len(x)}")
        lhs = Fraction(0)
        for i in range(len(x)):
            val = psi_n(x[:i] + x[i + 1 :])
            if abs(val) > bound:
                over.append((x[:i] + x[i + 1 :], val))
            max_abs = max(max_abs, abs(val))
            lhs += -val if i % 2 else val
        rhs = psi_eval(dfam, x)
        if lhs != rhs:
            bad.append((x, lhs, rhs))
        checked += 1
    return ChainMapReport(degree, checked, bad, over, max_abs)


def retraction_identity(graph: GraphOfGroups, v: str, tuples: Iterable[Sequence[SvPoint]]) -> list:
    """Tuples of S_v on which composing the transplant with the inclusion
    does not reproduce the argument.

    Since the transplant evaluates the family at the located tuple, an empty
    result means the identity holds for every family whatsoever.
    """
    failures = []
    for pts in tuples:
        pts = tuple(pts)
        loc = psi_locate([phi_point(graph, p) for p in pts])
        if len(set(pts)) != len(pts):
            # every alternating family vanishes on both sides
            if loc is not None and len(set(loc[1])) == len(loc[1]):
                failures.append((pts, loc))
            continue
        if loc is None or loc[0].site != v or loc[1] != pts:
            failures.append((pts, loc))
    return failures


def check_invariance(family: Mapping[str, Cochain], degree: int, samples: Iterable[tuple[NormalForm, Sequence[SPoint]]]) -> list:
    """Pairs (gamma, tuple) where the transplanted cochain is not Gamma-invariant."""
    bad = []
    for gamma, x in samples:
        a = psi_eval(family, tuple(x))
        b = psi_eval(family, tuple(translate(gamma, p) for p in x))
        if a != b:
            bad.append((gamma, tuple(x), a, b))
    return bad


def family_bound(family: Mapping[str, Cochain]) -> Fraction:
    return max((f.bound for f in family.values() if f.bound is not None), default=Fraction(0))


def edge_point(g: NormalForm, edge: str) -> EdgePoint:
    return EdgePoint(TreeEdgeVertex.from_coset(g, edge))


def in_local_star(w: TreeVertex, x: SPoint) -> bool:
    return in_star(w, project(x))
