"""Rolli's bounded cocycles on free products.

An odd bounded function on each factor is summed over the syllables of the
reduced expression (``alpha``); its inhomogeneous coboundary ``R`` only sees
the two syllables that meet after maximal cancellation in ``x * y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .basserre import GroupPoint, TreeVertex, barycenter, project
from .presentations import GraphOfGroups, NormalForm
from .transplant import (
    Cochain,
    NotFreeProduct,
    SPoint,
    SvCoset,
    SvElement,
    edge_point,
    group_coordinate,
    psi_eval,
)

__all__ = [
    "OddBoundedFunction",
    "NotOdd",
    "sign_function",
    "clamp_function",
    "parity_window",
    "tabulated_odd",
    "zero_function",
    "alpha",
    "rolli_R",
    "rolli_R_oracle",
    "homogenize",
    "inhomogeneous_coboundary",
    "defect",
    "defect_bruteforce",
    "diagram_check",
    "DiagramReport",
]


class NotOdd(ValueError):
    pass


def _sgn(k: int) -> int:
    return (k > 0) - (k < 0)


@dataclass
class OddBoundedFunction:
    """Odd bounded function on one vertex group."""

    vertex: str
    evaluator: Callable[[Any], Any]
    bound: Fraction
    name: str = ""

    def __call__(self, g) -> Fraction:
        return Fraction(self.evaluator(g))

    def check(self, group, samples: Iterable) -> None:
        """Spot-check oddness and the sup bound; violations are errors."""
        for g in samples:
            a, b = self(g), self(group.inv(g))
            if a != -b:
                raise NotOdd(f"{self.name}: f({g}) = {a} but f(inverse) = {b}")
            if abs(a) > self.bound:
                raise NotOdd(f"{self.name}: |f({g})| = {abs(a)} exceeds the declared bound {self.bound}")


def _exponent_sum(graph: GraphOfGroups, v: str) -> Callable[[Any], int]:
    return graph.groups[v].exponent_sum


def sign_function(graph: GraphOfGroups, v: str) -> OddBoundedFunction:
    """Sign of the exponent sum."""
    es = _exponent_sum(graph, v)
    return OddBoundedFunction(v, lambda g: _sgn(es(g)), Fraction(1), f"sign[{v}]")


def clamp_function(graph: GraphOfGroups, v: str, n: int) -> OddBoundedFunction:
    """Exponent sum clamped to [-n, n] and divided by n."""
    if n <= 0:
        raise ValueError("clamp width must be positive")
    es = _exponent_sum(graph, v)
    return OddBoundedFunction(v, lambda g: Fraction(max(-n, min(n, es(g))), n), Fraction(1), f"clamp{n}[{v}]")


def parity_window(graph: GraphOfGroups, v: str, n: int, parity: int = 1) -> OddBoundedFunction:
    """sgn(k) when the exponent sum k has the given parity and |k| <= n, else 0."""
    es = _exponent_sum(graph, v)

    def ev(g):
        k = es(g)
        return _sgn(k) if abs(k) <= n and k % 2 == parity % 2 and k else 0

    return OddBoundedFunction(v, ev, Fraction(1), f"parity{parity}w{n}[{v}]")


def tabulated_odd(graph: GraphOfGroups, v: str, values: Mapping) -> OddBoundedFunction:
    """Odd function with the given values (and their negatives on inverses), 0 elsewhere."""
    G = graph.groups[v]
    table: dict = {}
    for g, val in values.items():
        g = G.canonical(g)
        val = Fraction(val)
        for key, x in ((g, val), (G.inv(g), -val)):
            if key in table and table[key] != x:
                raise NotOdd(f"inconsistent values at {G.words(key)}")
            table[key] = x
    bound = max((abs(x) for x in table.values()), default=Fraction(0))
    return OddBoundedFunction(v, lambda g: table.get(g, Fraction(0)), bound, f"table[{v}]")


def zero_function(v: str) -> OddBoundedFunction:
    return OddBoundedFunction(v, lambda g: 0, Fraction(0), f"zero[{v}]")


# -- alpha and R ----------------------------------------------------------------


def _require_free_product(graph: GraphOfGroups) -> None:
    if not graph.is_free_product:
        raise NotFreeProduct("this construction needs a free product (tree graph, trivial edge groups)")


def reduced_syllables(x: NormalForm) -> list[tuple[str, Any]]:
    """Maximal vertex-group syllables of x, in order."""
    G = x.graph
    return [(v, g) for v, g in x.syllables() if g != G.groups[v].identity]


def _value(family: Mapping[str, OddBoundedFunction], v: str, g) -> Fraction:
    f = family.get(v)
    return Fraction(0) if f is None else f(g)


def alpha(family: Mapping[str, OddBoundedFunction], x: NormalForm) -> Fraction:
    _require_free_product(x.graph)
    return sum((_value(family, v, g) for v, g in reduced_syllables(x)), Fraction(0))


def junction(x: NormalForm, y: NormalForm):
    """Syllables meeting in x*y after maximal cancellation, as (v, g1, g2) or None."""
    G = x.graph
    X = reduced_syllables(x)
    Y = reduced_syllables(y)
    k = 0
    while k < len(X) and k < len(Y):
        (v, g), (w, h) = X[-1 - k], Y[k]
        if v != w or G.groups[v].mul(g, h) != G.groups[v].identity:
            break
        k += 1
    if k == len(X) or k == len(Y):
        return None
    (v, g1), (w, g2) = X[-1 - k], Y[k]
    if v != w:
        return None
    return v, g1, g2, k


def rolli_R_oracle(family: Mapping[str, OddBoundedFunction], x: NormalForm, y: NormalForm) -> Fraction:
    """The inhomogeneous coboundary of alpha: alpha(y) - alpha(xy) + alpha(x)."""
    return alpha(family, y) - alpha(family, x * y) + alpha(family, x)


def rolli_R(family: Mapping[str, OddBoundedFunction], x: NormalForm, y: NormalForm) -> Fraction:
    """R(x, y) from the two syllables meeting at the junction of x and y."""
    G = x.graph
    _require_free_product(G)
    j = junction(x, y)
    if j is None:
        return Fraction(0)
    v, g1, g2, _ = j
    prod = G.groups[v].mul(g1, g2)
    if prod == G.groups[v].identity:
        # cannot happen after maximal cancellation; the definition still applies
        return rolli_R_oracle(family, x, y)
    return _value(family, v, g2) - _value(family, v, prod) + _value(family, v, g1)


def inhomogeneous_coboundary(f: Callable[..., Fraction], n: int, mul: Callable) -> Callable[..., Fraction]:
    """Bar-resolution coboundary of an n-cochain given as a function of n elements."""

    def df(*g):
        if len(g) != n + 1:
            raise ValueError(f"expected {n + 1} arguments")
        total = f(*g[1:])
        for i in range(n):
            merged = g[:i] + (mul(g[i], g[i + 1]),) + g[i + 2 :]
            total += (-1) ** (i + 1) * f(*merged)
        total += (-1) ** (n + 1) * f(*g[:-1])
        return total

    return df


def homogenize(f: Callable[..., Fraction], n: int, inverse: Callable, mul: Callable, bound=None) -> Cochain:
    """Homogeneous cochain (x0..xn) -> f(x0^-1 x1, ..., x_{n-1}^-1 x_n)."""

    def ev(*xs):
        return f(*(mul(inverse(xs[i]), xs[i + 1]) for i in range(n)))

    return Cochain(n, ev, bound, False, "h")


def _nf_mul(a, b):
    return a * b


def _nf_inv(a):
    return a.inverse()


# -- defect -------------------------------------------------------------------------


def family_bound(family: Mapping[str, OddBoundedFunction]) -> Fraction:
    return max((f.bound for f in family.values()), default=Fraction(0))


def defect(graph: GraphOfGroups, family: Mapping[str, OddBoundedFunction], max_syllables: int, max_exponent: int) -> Fraction:
    """Largest |R(x, y)| over pairs of words within the bounds.

    R only depends on the junction syllables, and every pair of nontrivial
    syllables of one factor occurs as a junction of two one-syllable elements
    (or longer words for higher rank factors), so the sweep runs over pairs
    of vertex-group elements within the bounds.
    """
    _require_free_product(graph)
    if max_syllables < 1 or max_exponent < 1:
        raise ValueError("bounds must be >= 1")
    best = Fraction(0)
    for v in graph.vertices:
        G = graph.groups[v]
        elems = [g for g in G.elements(max_syllables, max_exponent) if g != G.identity]
        for g1 in elems:
            for g2 in elems:
                prod = G.mul(g1, g2)
                if prod == G.identity:
                    continue
                r = _value(family, v, g2) - _value(family, v, prod) + _value(family, v, g1)
                best = max(best, abs(r))
    return best


def defect_bruteforce(graph: GraphOfGroups, family, max_syllables: int, max_exponent: int) -> Fraction:
    """Same maximum by evaluating the coboundary of alpha on all pairs of elements."""
    elems = graph.enumerate_elements(max_syllables, max_exponent)
    return max((abs(rolli_R_oracle(family, x, y)) for x in elems for y in elems), default=Fraction(0))


# -- commutative diagram ----------------------------------------------------------------


@dataclass
class DiagramReport:
    checked: int = 0
    barycenter_checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def vertex_family(graph: GraphOfGroups, family: Mapping[str, OddBoundedFunction]) -> dict[str, Cochain]:
    """Per-vertex cochains on S_v triples: homogeneous coboundary of f_v read on group labels."""
    out = {}
    for v in graph.vertices:
        G = graph.groups[v]
        f = family.get(v)
        if f is None:
            continue

        def ev(s0, s1, s2, G=G, f=f):
            c0, c1, c2 = (s.c for s in (s0, s1, s2))
            x = G.mul(G.inv(c0), c1)
            y = G.mul(G.inv(c1), c2)
            return f(y) - f(G.mul(x, y)) + f(x)

        out[v] = Cochain(2, ev, 3 * f.bound, True, f"h2d[{v}]")
    return out


def s_point(graph: GraphOfGroups, g: NormalForm, site: str) -> SPoint:
    if site in graph.groups:
        return GroupPoint(g, site)
    return edge_point(g, site)


def expected_barycenter(x0: NormalForm, x: NormalForm, y: NormalForm):
    """The tree vertex ``x0 a Gamma_v`` read from x = a g1 b, y = b^-1 g2 c."""
    G = x0.graph
    j = junction(x, y)
    if j is None:
        return None
    v, g1, g2, k = j
    X = reduced_syllables(x)
    prefix = X[: len(X) - 1 - k]
    a = G.identity()
    for u, g in prefix:
        a = a * G.embed(u, g)
    return TreeVertex.from_coset(x0 * a, v)


def diagram_check(
    graph: GraphOfGroups,
    family: Mapping[str, OddBoundedFunction],
    triples: Iterable[Sequence[NormalForm]],
    sites: Sequence[str] | None = None,
) -> DiagramReport:
    """Compare the two ways around the square for every triple and site choice.

    Top: Rolli's R, homogenized and pulled back along the projection to Gamma.
    Bottom: the per-vertex coboundaries of the f_v, pulled back to S_v and
    transplanted by the barycentric map. Also checks that the barycenter is
    the vertex read off the junction, whenever a junction exists.
    """
    _require_free_product(graph)
    if sites is None:
        sites = list(graph.vertices) + graph.geometric_edges
    vfam = vertex_family(graph, family)
    report = DiagramReport()
    for triple in triples:
        g0, g1, g2 = triple
        x = g0.inverse() * g1
        y = g1.inverse() * g2
        top = rolli_R(family, x, y)
        expect = expected_barycenter(g0, x, y)
        for combo in itertools.product(sites, repeat=3):
            pts = tuple(s_point(graph, g, s) for g, s in zip(triple, combo))
            coords = tuple(group_coordinate(p) for p in pts)
            if coords != tuple(triple):
                report.failures.append(("coordinate", triple, combo))
                continue
            bottom = psi_eval(vfam, pts)
            report.checked += 1
            if bottom != top:
                report.failures.append(("value", triple, combo, top, bottom))
            if expect is not None:
                report.barycenter_checked += 1
                got = barycenter([project(p) for p in pts])
                if got != expect:
                    report.failures.append(("barycenter", triple, combo, expect, got))
    return report
