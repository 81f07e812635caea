"""Graphs of groups and normal forms in their fundamental groups.

Conventions (fixed once, relied on everywhere):

* ``h_e`` maps the edge group into the vertex group at ``t(e)``;
* the defining relation is ``h_ebar(x) . e = e . h_e(x)``, so the stable
  letter of a non-tree edge conjugates the ``h_ebar`` image to the ``h_e``
  image: ``e^-1 h_ebar(x) e = h_e(x)``;
* elements of Gamma are closed path words ``g0 e1 g1 ... ek gk`` based at the
  base vertex. Tree edges are kept in the path (they are trivial in Gamma,
  the path records the vertex group a letter lives in);
* a normal form is a reduced path word in which every ``g_i`` with ``i < k``
  is the shortlex-minimal representative of ``g_i h_ebar(Gamma_e)`` for the
  next edge ``e = e_{i+1}``. Equal elements have identical normal forms.

For every geometric edge the orientation listed first in the input is the
*positive* one. The edge subgroup ``Gamma_e`` of Gamma used for edge cosets
is ``h_ebar(Gamma_e)`` inside ``Gamma_{o(e)}`` for the positive ``e``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Sequence

from .groups import (
    EdgeGroup,
    EdgeImage,
    GroupError,
    UnknownGenerator,
    VertexGroup,
    make_edge_image,
    make_vertex_group,
    shortlex_key,
)

__all__ = [
    "GraphOfGroups",
    "NormalForm",
    "GraphError",
    "GraphMismatch",
    "VertexMismatch",
    "UnknownGenerator",
]


class GraphError(ValueError):
    pass


class GraphMismatch(GraphError):
    pass


class VertexMismatch(GraphError):
    pass


@dataclass(frozen=True)
class Edge:
    name: str
    reverse: str
    origin: str
    target: str
    edge_group: EdgeGroup
    image_words: dict
    image: EdgeImage = field(repr=False, compare=False)


class GraphOfGroups:
    def __init__(
        self,
        vertices: dict[str, VertexGroup],
        edges: Sequence[Edge],
        spanning_tree: Sequence[str],
        base_vertex: str,
    ):
        self.groups = dict(vertices)
        self.vertices = tuple(self.groups)
        self.edges = {e.name: e for e in edges}
        self.edge_order = tuple(e.name for e in edges)
        self.base = base_vertex
        self.spanning_tree = tuple(spanning_tree)
        self._validate()
        self._build_letters()
        self._build_tree_paths()
        self._identity = NormalForm(self, (self.groups[self.base].identity,))

    # -- construction ------------------------------------------------------

    def _validate(self) -> None:
        if not self.vertices:
            raise GraphError("graph has no vertices")
        if self.base not in self.groups:
            raise GraphError(f"base vertex {self.base!r} is not a vertex")
        if len(self.edges) != len(self.edge_order):
            raise GraphError("duplicate edge names")
        for e in self.edges.values():
            if e.origin not in self.groups or e.target not in self.groups:
                raise GraphError(f"edge {e.name!r} has an unknown endpoint")
            if e.reverse == e.name:
                raise GraphError(f"edge {e.name!r} is its own reverse")
            r = self.edges.get(e.reverse)
            if r is None or r.reverse != e.name:
                raise GraphError(f"edge {e.name!r}: reverse {e.reverse!r} is missing or not an involution")
            if r.origin != e.target or r.target != e.origin:
                raise GraphError(f"edge {e.name!r}: o(e) != t(ebar)")
            if r.edge_group != e.edge_group:
                raise GraphError(f"edge {e.name!r}: Gamma_e != Gamma_ebar")
        self.positive: dict[str, bool] = {}
        for name in self.edge_order:
            if name not in self.positive:
                self.positive[name] = True
                self.positive[self.edges[name].reverse] = False
        for t in self.spanning_tree:
            if t not in self.edges:
                raise GraphError(f"spanning tree edge {t!r} is not an edge")
        self.tree_edges = {self.geometric(t) for t in self.spanning_tree}
        if len(self.tree_edges) != len(self.vertices) - 1:
            raise GraphError("spanning tree must have |V| - 1 geometric edges")
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for name, e in self.edges.items():
            adj[e.origin].append(name)
        seen = {self.base}
        queue = deque([self.base])
        while queue:
            v = queue.popleft()
            for name in adj[v]:
                t = self.edges[name].target
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        if len(seen) != len(self.vertices):
            raise GraphError("graph is not connected")

    def _build_letters(self) -> None:
        self.letter_map: dict[str, tuple] = {}
        self.letter_index: dict[tuple, int] = {}
        idx = 0
        self.vertex_offset: dict[str, int] = {}
        for v in self.vertices:
            self.vertex_offset[v] = idx
            for i, name in enumerate(self.groups[v].names):
                if name in self.letter_map:
                    raise GraphError(f"generator name {name!r} is used twice")
                self.letter_map[name] = ("v", v, i)
                idx += 1
        self.edge_letter_index: dict[str, int] = {}
        for name in self.edge_order:
            if name in self.letter_map:
                raise GraphError(f"edge name {name!r} clashes with a generator")
            self.letter_map[name] = ("e", name)
            if self.positive[name]:
                self.edge_letter_index[name] = idx
                idx += 1
        self._letter_names = [""] * idx
        for n, info in self.letter_map.items():
            if info[0] == "v":
                self._letter_names[self.vertex_offset[info[1]] + info[2]] = n
        for n, i in self.edge_letter_index.items():
            self._letter_names[i] = n
        self.display_alphabet = [n for n in self.letter_map if self.letter_map[n][0] == "v"] + [
            n for n in self.edge_order if self.positive[n] and self.geometric(n) not in self.tree_edges
        ]

    def _build_tree_paths(self) -> None:
        # tau_v: directed tree edges from the base to v
        self.tau: dict[str, tuple[str, ...]] = {self.base: ()}
        queue = deque([self.base])
        tree_dir = [n for n in self.edge_order if self.geometric(n) in self.tree_edges]
        while queue:
            v = queue.popleft()
            for n in tree_dir:
                e = self.edges[n]
                if e.origin == v and e.target not in self.tau:
                    self.tau[e.target] = self.tau[v] + (n,)
                    queue.append(e.target)
        self._routes: dict[tuple[str, str], tuple[str, ...]] = {}
        for a in self.vertices:
            for b in self.vertices:
                ta, tb = self.tau[a], self.tau[b]
                k = 0
                while k < min(len(ta), len(tb)) and ta[k] == tb[k]:
                    k += 1
                back = tuple(self.edges[n].reverse for n in reversed(ta[k:]))
                self._routes[a, b] = back + tb[k:]

    # -- basic queries -----------------------------------------------------

    def geometric(self, edge: str) -> str:
        """Name of the positive orientation of ``edge``."""
        return edge if self.positive[edge] else self.edges[edge].reverse

    def reverse(self, edge: str) -> str:
        return self.edges[edge].reverse

    @property
    def geometric_edges(self) -> list[str]:
        return [n for n in self.edge_order if self.positive[n]]

    @property
    def is_free_product(self) -> bool:
        return not any(self.geometric(n) not in self.tree_edges for n in self.edges) and all(
            e.edge_group.trivial for e in self.edges.values()
        )

    def vertex_identity(self, v: str):
        return self.groups[v].identity

    def identity(self) -> "NormalForm":
        return self._identity

    # -- path words ----------------------------------------------------------

    def route(self, a: str, b: str) -> tuple[str, ...]:
        return self._routes[a, b]

    def _append_edges(self, items: list, edges: Iterable[str]) -> None:
        for n in edges:
            items.append(n)
            items.append(self.groups[self.edges[n].target].identity)

    def normalize(self, seq: Sequence) -> tuple:
        """Reduce and canonicalize a (valid) path word; returns a tuple."""
        groups = self.groups
        edges = self.edges
        stack = [seq[0]]
        for i in range(1, len(seq), 2):
            e = seq[i]
            g = seq[i + 1]
            if len(stack) >= 3:
                ep = stack[-2]
                if edges[ep].reverse == e:
                    x = edges[ep].image.preimage(stack[-1])
                    if x is not None:
                        stack.pop()
                        stack.pop()
                        G = groups[edges[e].target]
                        if any(x):
                            g = G.mul(edges[e].image.h(x), g)
                        stack[-1] = G.mul(stack[-1], g)
                        continue
            stack.append(e)
            stack.append(g)
        for i in range(0, len(stack) - 1, 2):
            e = stack[i + 1]
            ed = edges[e]
            s, x = edges[ed.reverse].image.coset_rep(stack[i])
            stack[i] = s
            if any(x):
                G2 = groups[ed.target]
                stack[i + 2] = G2.mul(ed.image.h(x), stack[i + 2])
        return tuple(stack)

    def end_vertex(self, seq: Sequence, start: str | None = None) -> str:
        if len(seq) == 1:
            return self.base if start is None else start
        return self.edges[seq[-2]].target

    def concat(self, a: Sequence, b: Sequence, vertex: str) -> list:
        G = self.groups[vertex]
        return list(a[:-1]) + [G.mul(a[-1], b[0])] + list(b[1:])

    def path(self, items: Sequence, start: str | None = None, closed: bool = True) -> tuple:
        """Validate an explicit alternating path word and return its normal form seq.

        ``items`` alternates vertex-group words (lists of ``[gen, exp]``)
        and directed edge names, starting and ending with a word.
        """
        start = self.base if start is None else start
        if len(items) % 2 != 1:
            raise VertexMismatch("a path word alternates words and edges and starts/ends with a word")
        cur = start
        seq = []
        for i, it in enumerate(items):
            if i % 2:
                if it not in self.edges:
                    raise UnknownGenerator(it)
                if self.edges[it].origin != cur:
                    raise VertexMismatch(f"edge {it!r} does not start at {cur!r}")
                seq.append(it)
                cur = self.edges[it].target
            else:
                G = self.groups[cur]
                letters = []
                for gen, e in it:
                    info = self.letter_map.get(gen)
                    if info is None:
                        raise UnknownGenerator(gen)
                    if info[0] != "v" or info[1] != cur:
                        raise VertexMismatch(f"generator {gen!r} does not belong to vertex {cur!r}")
                    letters.append((info[2], int(e)))
                seq.append(G.from_letters(letters))
        if closed and cur != start:
            raise VertexMismatch(f"path ends at {cur!r}, not at the base vertex {start!r}")
        return self.normalize(seq)

    def word(self, letters: Iterable[Sequence]) -> "NormalForm":
        """Element of Gamma from generator letters ``[(name, exp), ...]``.

        Vertex-group generators and edge names may be mixed freely; tree
        routes between vertex groups are inserted automatically.
        """
        cur = self.base
        items: list = [self.groups[cur].identity]
        for name, exp in letters:
            exp = int(exp)
            info = self.letter_map.get(name)
            if info is None:
                raise UnknownGenerator(name)
            if not exp:
                continue
            if info[0] == "v":
                v = info[1]
                if v != cur:
                    self._append_edges(items, self.route(cur, v))
                    cur = v
                G = self.groups[v]
                items[-1] = G.mul(items[-1], G.generator(info[2], exp))
            else:
                d = info[1] if exp > 0 else self.edges[info[1]].reverse
                for _ in range(abs(exp)):
                    self._append_edges(items, self.route(cur, self.edges[d].origin))
                    self._append_edges(items, (d,))
                    cur = self.edges[d].target
        self._append_edges(items, self.route(cur, self.base))
        return NormalForm(self, self.normalize(items))

    def parse_word(self, word: Sequence[Sequence]) -> "NormalForm":
        for item in word:
            if not (isinstance(item, (list, tuple)) and len(item) == 2 and isinstance(item[0], str)):
                raise GraphError(f"malformed letter {item!r}; expected [generator, exponent]")
        return self.word(word)

    def close(self, seq: Sequence) -> tuple:
        """Normalize an open path from the base by routing back through the tree."""
        v = self.end_vertex(seq)
        items = list(seq)
        self._append_edges(items, self.route(v, self.base))
        return self.normalize(items)

    # -- vertex group embeddings ---------------------------------------------

    def embed(self, v: str, c) -> "NormalForm":
        """The element tau_v c tau_v^-1 of Gamma for c in Gamma_v."""
        items: list = [self.groups[self.base].identity]
        self._append_edges(items, self.tau[v])
        items[-1] = c
        self._append_edges(items, self.route(v, self.base))
        return NormalForm(self, self.normalize(items))

    def vertex_element(self, g: "NormalForm", v: str):
        """c in Gamma_v with embed(v, c) == g, or None if g is not in Gamma_v."""
        items = [self.groups[self.base].identity]
        self._append_edges(items, self.tau[v])
        inv_tau = self.normalize(items)  # open path base -> v, trivial labels
        # tau_v^-1 g tau_v as a path v -> v
        back = [self.groups[v].identity]
        self._append_edges(back, self.route(v, self.base))
        seq = self.concat(self.concat(back, g.seq, self.base), list(inv_tau), self.base)
        red = self.normalize(seq)
        if len(red) != 1:
            return None
        return red[0]

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        verts = []
        for v in self.vertices:
            G = self.groups[v]
            if G.kind == "free":
                verts.append({"name": v, "kind": "free", "rank": len(G.names), "generators": list(G.names)})
            else:
                verts.append(
                    {"name": v, "kind": "abelian", "generators": list(G.names), "invariant_factors": list(G.factors)}
                )
        edges = []
        for n in self.edge_order:
            e = self.edges[n]
            edges.append(
                {
                    "name": e.name,
                    "reverse": e.reverse,
                    "origin": e.origin,
                    "target": e.target,
                    "edge_group": {
                        "generators": list(e.edge_group.names),
                        "invariant_factors": list(e.edge_group.factors),
                    },
                    "image": {k: [list(x) for x in w] for k, w in e.image_words.items()},
                }
            )
        return {
            "vertices": verts,
            "edges": edges,
            "spanning_tree": list(self.spanning_tree),
            "base_vertex": self.base,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "GraphOfGroups":
        try:
            vertices: dict[str, VertexGroup] = {}
            for vd in doc["vertices"]:
                kind = vd["kind"]
                names = vd.get("generators")
                if kind == "free":
                    rank = int(vd.get("rank", len(names or [])))
                    if names is None:
                        names = [f"{vd['name']}{i}" for i in range(rank)]
                    if rank != len(names):
                        raise GraphError(f"vertex {vd['name']!r}: rank {rank} != {len(names)} generators")
                    vertices[vd["name"]] = make_vertex_group("free", names)
                else:
                    factors = vd["invariant_factors"]
                    if names is None:
                        names = [f"{vd['name']}{i}" for i in range(len(factors))]
                    vertices[vd["name"]] = make_vertex_group(kind, names, factors)
            edges = []
            for ed in doc["edges"]:
                eg = EdgeGroup(ed["edge_group"]["generators"], ed["edge_group"]["invariant_factors"])
                target = vertices[ed["target"]]
                image_words = {k: [list(x) for x in w] for k, w in ed.get("image", {}).items()}
                for k in image_words:
                    if k not in eg.names:
                        raise UnknownGenerator(k)
                imgs = [target.parse(image_words.get(k, [])) for k in eg.names]
                edges.append(
                    Edge(
                        ed["name"],
                        ed["reverse"],
                        ed["origin"],
                        ed["target"],
                        eg,
                        image_words,
                        make_edge_image(target, eg, imgs),
                    )
                )
            return cls(vertices, edges, doc.get("spanning_tree", []), doc["base_vertex"])
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph-of-groups document: {exc!r}") from exc

    @classmethod
    def loads(cls, text: str) -> "GraphOfGroups":
        return cls.from_dict(json.loads(text))

    # -- element enumeration -------------------------------------------------

    def letter_words(self, max_syllables: int, max_exponent: int) -> Iterator[tuple]:
        """All words over the display alphabet, adjacent letters distinct."""
        exps = [e for e in range(-max_exponent, max_exponent + 1) if e]
        alphabet = self.display_alphabet
        yield ()
        frontier: list[tuple] = [()]
        for _ in range(max_syllables):
            nxt = []
            for w in frontier:
                last = w[-1][0] if w else None
                for a in alphabet:
                    if a == last:
                        continue
                    for e in exps:
                        nxt.append(w + ((a, e),))
            yield from nxt
            frontier = nxt

    def enumerate_elements(self, max_syllables: int, max_exponent: int) -> list["NormalForm"]:
        """Distinct elements represented by words within the bounds, shortlex sorted."""
        if max_syllables < 0 or max_exponent < 0:
            raise ValueError("bounds must be >= 0")
        seen: dict[tuple, NormalForm] = {}
        for w in self.letter_words(max_syllables, max(max_exponent, 0) if max_syllables else 0):
            nf = self.word(w)
            seen.setdefault(nf.seq, nf)
        return sorted(seen.values(), key=NormalForm.key)


@dataclass(frozen=True, eq=False, slots=True)
class NormalForm:
    """Canonical reduced closed path word representing an element of Gamma."""

    graph: GraphOfGroups
    seq: tuple

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormalForm):
            return NotImplemented
        return self.graph is other.graph and self.seq == other.seq

    def __hash__(self) -> int:
        return hash(self.seq)

    def _check(self, other: "NormalForm") -> None:
        if not isinstance(other, NormalForm) or other.graph is not self.graph:
            raise GraphMismatch("elements belong to different graphs of groups")

    def __mul__(self, other: "NormalForm") -> "NormalForm":
        self._check(other)
        G = self.graph
        return NormalForm(G, G.normalize(G.concat(self.seq, other.seq, G.base)))

    def inverse(self) -> "NormalForm":
        G = self.graph
        seq = self.seq
        out = []
        # walk backwards: vertex of element i is end of edge i-1
        verts = [G.base]
        for i in range(1, len(seq), 2):
            verts.append(G.edges[seq[i]].target)
        k = len(seq) // 2
        for i in range(k, -1, -1):
            out.append(G.groups[verts[i]].inv(seq[2 * i]))
            if i:
                out.append(G.edges[seq[2 * i - 1]].reverse)
        return NormalForm(G, G.normalize(out))

    def __invert__(self) -> "NormalForm":
        return self.inverse()

    @property
    def is_identity(self) -> bool:
        return len(self.seq) == 1 and self.seq[0] == self.graph.groups[self.graph.base].identity

    @property
    def num_edges(self) -> int:
        return len(self.seq) // 2

    def vertices(self) -> list[str]:
        G = self.graph
        out = [G.base]
        for i in range(1, len(self.seq), 2):
            out.append(G.edges[self.seq[i]].target)
        return out

    def syllables(self) -> list[tuple[str, Any]]:
        """(vertex, element) pieces of the path, in order."""
        return list(zip(self.vertices(), self.seq[0::2]))

    def letters(self) -> list[tuple[int, int]]:
        """Display word as (global letter index, exponent) syllables, merged."""
        G = self.graph
        out: list[list[int]] = []

        def push(idx: int, e: int) -> None:
            if out and out[-1][0] == idx:
                out[-1][1] += e
                if not out[-1][1]:
                    out.pop()
            else:
                out.append([idx, e])

        verts = self.vertices()
        for i, g in enumerate(self.seq[0::2]):
            v = verts[i]
            off = G.vertex_offset[v]
            for gi, e in G.groups[v].syllables(g):
                push(off + gi, e)
            if 2 * i + 1 < len(self.seq):
                n = self.seq[2 * i + 1]
                geo = G.geometric(n)
                if geo not in G.tree_edges:
                    push(G.edge_letter_index[geo], 1 if G.positive[n] else -1)
        return [tuple(x) for x in out]

    def word(self) -> list[list]:
        names = self.graph._letter_names
        return [[names[i], e] for i, e in self.letters()]

    def key(self) -> tuple:
        return (shortlex_key([(2 * i + (e < 0), abs(e)) for i, e in self.letters()]), self.seq_key())

    def seq_key(self) -> tuple:
        # tie-break for distinct elements with the same display word (never
        # happens for normal forms of a fixed graph, kept for total order)
        return (len(self.seq), repr(self.seq))

    def __repr__(self) -> str:
        w = self.word()
        if not w:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in w)

    def __lt__(self, other: "NormalForm") -> bool:
        return self.key() < other.key()


def normal_form(graph: GraphOfGroups, path: Sequence) -> NormalForm:
    """Normal form of an explicit alternating path word based at the base vertex."""
    return NormalForm(graph, graph.path(path))


def multiply(x: NormalForm, y: NormalForm) -> NormalForm:
    return x * y


def coset_rep(g: NormalForm, site: str) -> NormalForm:
    """Canonical representative of g Gamma_site (a vertex name or an edge name)."""
    from .basserre import TreeEdgeVertex, TreeVertex

    G = g.graph
    if site in G.groups:
        return TreeVertex.from_coset(g, site).rep
    if site in G.edges:
        return TreeEdgeVertex.from_coset(g, G.geometric(site)).rep
    raise GraphError(f"unknown site {site!r}")


def in_site_group(g: NormalForm, site: str) -> bool:
    """Membership of g in Gamma_v (vertex site) or Gamma_e (edge site)."""
    G = g.graph
    if site in G.groups:
        return G.vertex_element(g, site) is not None
    e = G.edges[G.geometric(site)]
    c = G.vertex_element(g, e.origin)
    if c is None:
        return False
    return G.edges[e.reverse].image.contains(c)


def load_graph(path: str) -> GraphOfGroups:
    with open(path) as fh:
        return GraphOfGroups.loads(fh.read())


__all__ += ["normal_form", "multiply", "coset_rep", "in_site_group", "load_graph", "GroupError"]
