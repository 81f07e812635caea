"""The Bass-Serre tree and its barycentric subdivision, built lazily.

A vertex ``g Gamma_v`` of the tree is stored as the canonical open path
obtained by normalizing ``g tau_v`` and dropping its final vertex-group
element. Such a path ``(s0, e1, s1, ..., s_{k-1}, e_k)`` is called the
*steps* of the vertex; dropping the last ``(s, e)`` pair gives its parent, so
the tree is rooted at the base vertex group ``Gamma_base`` (steps ``()``).

A subdivision vertex (an edge coset) is identified with the steps of the
endpoint farther from the root. Ancestor chains therefore read off
geodesics, and a subtree test is a prefix test on steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

from .presentations import GraphMismatch, GraphOfGroups, NormalForm

__all__ = [
    "TreeVertex",
    "TreeEdgeVertex",
    "GroupPoint",
    "EdgePoint",
    "project",
    "geodesic",
    "distance",
    "in_star",
    "star",
    "barycenters",
    "barycenter",
    "retract_point",
    "translate",
    "ball",
]


def _same_graph(*nodes) -> GraphOfGroups:
    g = nodes[0].graph
    for n in nodes[1:]:
        if n.graph is not g:
            raise GraphMismatch("points belong to different graphs of groups")
    return g


@dataclass(frozen=True, eq=False, slots=True)
class TreeVertex:
    """A vertex ``g Gamma_v`` of the Bass-Serre tree."""

    graph: GraphOfGroups
    site: str
    steps: tuple

    is_edge = False

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TreeVertex)
            and self.graph is other.graph
            and self.steps == other.steps
            and self.site == other.site
        )

    def __hash__(self) -> int:
        return hash((0, self.site, self.steps))

    @classmethod
    def root(cls, graph: GraphOfGroups) -> "TreeVertex":
        return cls(graph, graph.base, ())

    @classmethod
    def from_steps(cls, graph: GraphOfGroups, steps: tuple) -> "TreeVertex":
        site = graph.edges[steps[-1]].target if steps else graph.base
        return cls(graph, site, tuple(steps))

    @classmethod
    def from_coset(cls, g: NormalForm, v: str) -> "TreeVertex":
        return cls(g.graph, v, locate(g, v)[:-1])

    @property
    def rep(self) -> NormalForm:
        """Canonical coset representative of this vertex."""
        G = self.graph
        return NormalForm(G, G.close(self.steps + (G.groups[self.site].identity,)))

    @property
    def depth(self) -> int:
        return len(self.steps)

    def parent(self) -> "TreeEdgeVertex | None":
        if not self.steps:
            return None
        G = self.graph
        return TreeEdgeVertex(G, G.geometric(self.steps[-1]), self.steps)

    def child_edge(self, s, edge: str) -> "TreeEdgeVertex | None":
        """The subdivision vertex reached by leaving along ``edge`` from label ``s``.

        ``s`` is reduced to its transversal representative first. Returns the
        parent edge when the move backtracks.
        """
        G = self.graph
        e = G.edges[edge]
        if e.origin != self.site:
            raise GraphMismatch(f"edge {edge!r} does not leave vertex group {self.site!r}")
        s, _ = G.edges[e.reverse].image.coset_rep(s)
        if self.steps and edge == G.reverse(self.steps[-1]) and s == G.groups[self.site].identity:
            return self.parent()
        return TreeEdgeVertex(G, G.geometric(edge), self.steps + (s, edge))

    def __repr__(self) -> str:
        return f"{self.rep!r}.Gamma_{self.site}"

    def label(self) -> str:
        return repr(self)

    def _up(self):
        return self.parent()


@dataclass(frozen=True, eq=False, slots=True)
class TreeEdgeVertex:
    """A subdivision vertex ``g Gamma_e`` for a geometric edge ``e``.

    ``steps`` are the steps of the endpoint farther from the root.
    """

    graph: GraphOfGroups
    edge: str
    steps: tuple

    is_edge = True

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeEdgeVertex) and self.graph is other.graph and self.steps == other.steps

    def __hash__(self) -> int:
        return hash((1, self.steps))

    @classmethod
    def from_coset(cls, g: NormalForm, edge: str) -> "TreeEdgeVertex":
        """The edge ``g Gamma_e`` joining ``g Gamma_{o(e)}`` and ``g e Gamma_{t(e)}``."""
        G = g.graph
        e = G.geometric(edge)
        origin = G.edges[e].origin
        a = TreeVertex.from_coset(g, origin).steps
        items = list(g.seq)
        G._append_edges(items, G.tau[origin] + (e,))
        b = G.normalize(items)[:-1]
        return cls(G, e, a if len(a) > len(b) else b)

    @property
    def child(self) -> TreeVertex:
        return TreeVertex.from_steps(self.graph, self.steps)

    @property
    def parent_vertex(self) -> TreeVertex:
        return TreeVertex.from_steps(self.graph, self.steps[:-2])

    def endpoints(self) -> tuple[TreeVertex, TreeVertex]:
        return self.parent_vertex, self.child

    @property
    def depth(self) -> int:
        return len(self.steps) - 1

    @property
    def rep(self) -> NormalForm:
        G = self.graph
        last = self.steps[-1]
        if G.positive[last]:
            seq = self.steps[:-1]
        else:
            seq = self.steps + (G.groups[G.edges[last].target].identity,)
        return NormalForm(G, G.close(seq))

    def __repr__(self) -> str:
        return f"{self.rep!r}.Gamma_{self.edge}"

    def label(self) -> str:
        return repr(self)

    def _up(self):
        return self.parent_vertex


TPrimeVertex = Union[TreeVertex, TreeEdgeVertex]


@lru_cache(maxsize=1 << 16)
def locate(g: NormalForm, v: str) -> tuple:
    """Normal form of the open path ``g tau_v``.

    Dropping the last entry gives the steps of ``g Gamma_v``; the last entry
    is the element ``c`` of ``Gamma_v`` with ``g = sigma tau_v c tau_v^-1``.
    """
    G = g.graph
    items = list(g.seq)
    G._append_edges(items, G.tau[v])
    return G.normalize(items)


# -- points of the amenable Gamma-set ----------------------------------------


@dataclass(frozen=True, eq=False, slots=True)
class GroupPoint:
    """The point ``(g, v)`` of ``Gamma x V(G)``."""

    g: NormalForm
    vertex: str

    @property
    def graph(self) -> GraphOfGroups:
        return self.g.graph

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupPoint) and self.vertex == other.vertex and self.g == other.g

    def __hash__(self) -> int:
        return hash((self.g, self.vertex))

    def __repr__(self) -> str:
        return f"({self.g!r}, {self.vertex})"


@dataclass(frozen=True, eq=False, slots=True)
class EdgePoint:
    """An edge coset ``g Gamma_e``, stored as its subdivision vertex."""

    node: TreeEdgeVertex

    @property
    def graph(self) -> GraphOfGroups:
        return self.node.graph

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgePoint) and self.node == other.node

    def __hash__(self) -> int:
        return hash(self.node)

    def __repr__(self) -> str:
        return repr(self.node)


SPoint = Union[GroupPoint, EdgePoint]


def project(x: SPoint) -> TPrimeVertex:
    if isinstance(x, GroupPoint):
        return TreeVertex.from_coset(x.g, x.vertex)
    return x.node


# -- group action -------------------------------------------------------------


def translate(gamma: NormalForm, x):
    """Left action of gamma on tree vertices, subdivision vertices and S-points."""
    G = _same_graph(gamma, x)
    if isinstance(x, GroupPoint):
        return GroupPoint(gamma * x.g, x.vertex)
    if isinstance(x, EdgePoint):
        return EdgePoint(translate(gamma, x.node))
    if isinstance(x, TreeVertex):
        seq = G.concat(gamma.seq, x.steps + (G.groups[x.site].identity,), G.base)
        return TreeVertex(G, x.site, G.normalize(seq)[:-1])
    if isinstance(x, TreeEdgeVertex):
        return TreeEdgeVertex.from_coset(gamma * x.rep, x.edge)
    raise TypeError(f"cannot translate {x!r}")


# -- geodesics ------------------------------------------------------------------


def _chain(x: TPrimeVertex) -> list:
    out = [x]
    while True:
        up = out[-1]._up()
        if up is None:
            return out
        out.append(up)


def geodesic(u: TPrimeVertex, v: TPrimeVertex) -> list:
    """The path of T' from u to v, endpoints included."""
    _same_graph(u, v)
    cu = _chain(u)[::-1]
    cv = _chain(v)[::-1]
    m = 0
    while m < min(len(cu), len(cv)) and cu[m] == cv[m]:
        m += 1
    return cu[m - 1 :][::-1] + cv[m:]


def distance(u: TPrimeVertex, v: TPrimeVertex) -> int:
    return len(geodesic(u, v)) - 1


# -- stars ------------------------------------------------------------------


def in_star(w: TreeVertex, x: TPrimeVertex) -> bool:
    """Whether x lies within T'-distance one of the tree vertex w."""
    _same_graph(w, x)
    if not x.is_edge:
        return x == w
    return x.steps == w.steps or x.steps[:-2] == w.steps


class star:
    """The star of a tree vertex: itself and its adjacent subdivision vertices.

    Supports membership; iteration enumerates the (possibly infinite)
    neighbours using vertex-group elements within the given bounds.
    """

    def __init__(self, w: TreeVertex, max_syllables: int = 1, max_exponent: int = 1):
        self.w = w
        self.max_syllables = max_syllables
        self.max_exponent = max_exponent

    def __contains__(self, x) -> bool:
        return in_star(self.w, x)

    def __iter__(self) -> Iterator[TPrimeVertex]:
        yield self.w
        yield from neighbours(self.w, self.max_syllables, self.max_exponent)


def neighbours(w: TreeVertex, max_syllables: int = 1, max_exponent: int = 1) -> Iterator[TreeEdgeVertex]:
    G = w.graph
    seen = set()
    p = w.parent()
    if p is not None:
        seen.add(p)
        yield p
    grp = G.groups[w.site]
    elems = list(grp.elements(max_syllables, max_exponent))
    for name in G.edge_order:
        if G.edges[name].origin != w.site:
            continue
        for s in elems:
            e = w.child_edge(s, name)
            if e not in seen:
                seen.add(e)
                yield e


def tprime_neighbours(x: TPrimeVertex, max_syllables: int = 1, max_exponent: int = 1) -> Iterator[TPrimeVertex]:
    if x.is_edge:
        yield x.parent_vertex
        yield x.child
    else:
        yield from neighbours(x, max_syllables, max_exponent)


def ball(graph: GraphOfGroups, radius: int, max_syllables: int = 1, max_exponent: int = 1) -> list:
    """Vertices of T' within ``radius`` of the root, neighbours truncated by the bounds."""
    root = TreeVertex.root(graph)
    seen = {root: 0}
    order = [root]
    frontier = [root]
    for r in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for y in tprime_neighbours(x, max_syllables, max_exponent):
                if y not in seen:
                    seen[y] = r
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    return order


# -- barycenters ------------------------------------------------------------


def branch(y: TreeVertex, x: TPrimeVertex):
    """Label of the component of T' minus y containing x (x != y)."""
    ys = y.steps
    xs = x.steps
    n = len(ys)
    if len(xs) > n and xs[:n] == ys:
        return xs[: n + 2]
    return None


def separates(y: TreeVertex, points: Sequence[TPrimeVertex]) -> bool:
    """Every two entries other than y lie in different components of T' minus y."""
    seen = set()
    for x in points:
        if x == y:
            continue
        b = branch(y, x)
        if b in seen:
            return False
        seen.add(b)
    return True


def candidate_centres(points: Sequence[TPrimeVertex]) -> set:
    """Tree vertices lying on some geodesic between two of the points."""
    out = set()
    pts = list(dict.fromkeys(points))
    for i, a in enumerate(pts):
        if not a.is_edge:
            out.add(a)
        for b in pts[i + 1 :]:
            out.update(n for n in geodesic(a, b) if not n.is_edge)
    return out


def barycenters(points: Sequence[TPrimeVertex]) -> list[TreeVertex]:
    """All tree vertices satisfying the separation condition for ``points``."""
    if len(points) < 3:
        raise ValueError("barycenters are defined for tuples of length >= 3")
    _same_graph(*points)
    found = [y for y in candidate_centres(points) if separates(y, points)]
    found.sort(key=lambda y: (len(y.steps), repr(y.steps)))
    return found


def barycenter(points: Sequence[TPrimeVertex]) -> TreeVertex | None:
    found = barycenters(points)
    return found[0] if found else None


# -- retraction -------------------------------------------------------------


def retract_point(w: TreeVertex, x: SPoint) -> SPoint:
    """Fix points over the star of w; send the rest to the first edge towards them."""
    _same_graph(w, x)
    px = project(x)
    if in_star(w, px):
        return x
    return EdgePoint(geodesic(w, px)[1])


def retract(w: TreeVertex, points: Iterable[SPoint]) -> tuple:
    return tuple(retract_point(w, x) for x in points)
