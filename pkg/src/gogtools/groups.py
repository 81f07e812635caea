"""Vertex groups (free or finitely generated abelian) and edge-group images.

Group elements are plain hashable tuples so they can be used as dictionary
keys and compared cheaply:

* free group elements are reduced syllable tuples ``((gen_index, exp), ...)``
  with adjacent generators distinct and nonzero exponents;
* abelian group elements are integer tuples, one entry per generator, with
  torsion coordinates in the balanced range ``(-d/2, d/2]``.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from .linalg import IntLattice, kernel_lattice

Syllables = tuple[tuple[int, int], ...]


class GroupError(ValueError):
    pass


class UnknownGenerator(GroupError):
    pass


class NotInjective(GroupError):
    pass


def shortlex_key(runs: Sequence[tuple[int, int]]) -> tuple:
    """Sort key equal to shortlex order on the expanded letter sequence.

    ``runs`` is a sequence of ``(letter_code, count)`` with adjacent codes
    distinct. Comparing expanded sequences lexicographically only needs, per
    run, its code, its length and whether the following code is smaller.
    """
    total = 0
    out = []
    n = len(runs)
    for i, (code, count) in enumerate(runs):
        total += count
        nxt = runs[i + 1][0] if i + 1 < n else -1
        out.append((code, 0, count) if nxt < code else (code, 1, -count))
    return (total, tuple(out))


def syllable_runs(syllables: Syllables, offset: int = 0) -> list[tuple[int, int]]:
    return [(2 * (g + offset) + (e < 0), abs(e)) for g, e in syllables]


class VertexGroup:
    """Common interface; see :class:`FreeGroup` and :class:`AbelianGroup`."""

    kind: str
    names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownGenerator(name) from None

    def key(self, a) -> tuple:
        return shortlex_key(syllable_runs(self.syllables(a)))

    def length(self, a) -> int:
        return sum(abs(e) for _, e in self.syllables(a))

    def from_letters(self, letters: Sequence[tuple[int, int]]):
        out = self.identity
        for g, e in letters:
            out = self.mul(out, self.generator(g, e))
        return out

    def words(self, a) -> list[list]:
        return [[self.names[g], e] for g, e in self.syllables(a)]

    def parse(self, word: Sequence[Sequence]) -> tuple:
        return self.from_letters([(self.index(g), int(e)) for g, e in word])


class FreeGroup(VertexGroup):
    kind = "free"

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise GroupError(f"duplicate generator names {self.names}")
        self.identity: Syllables = ()

    def __repr__(self) -> str:
        return f"FreeGroup({list(self.names)})"

    def generator(self, g: int, e: int = 1) -> Syllables:
        if not 0 <= g < len(self.names):
            raise UnknownGenerator(g)
        return ((g, e),) if e else ()

    @staticmethod
    def mul(a: Syllables, b: Syllables) -> Syllables:
        if not a:
            return b
        if not b:
            return a
        a = list(a)
        i = 0
        nb = len(b)
        while a and i < nb:
            g, e = a[-1]
            h, f = b[i]
            if g != h:
                break
            a.pop()
            i += 1
            if e + f:
                a.append((g, e + f))
                break
        return tuple(a) + tuple(b[i:])

    @staticmethod
    def inv(a: Syllables) -> Syllables:
        return tuple((g, -e) for g, e in reversed(a))

    @staticmethod
    def syllables(a: Syllables) -> Syllables:
        return a

    def canonical(self, a) -> Syllables:
        return self.from_letters(a)

    def exponent_sum(self, a: Syllables) -> int:
        return sum(e for _, e in a)

    def elements(self, max_syllables: int, max_exponent: int) -> Iterator[Syllables]:
        exps = [e for e in range(-max_exponent, max_exponent + 1) if e]
        yield ()
        frontier: list[Syllables] = [()]
        for _ in range(max_syllables):
            nxt = []
            for w in frontier:
                last = w[-1][0] if w else None
                for g in range(len(self.names)):
                    if g == last:
                        continue
                    for e in exps:
                        nxt.append(w + ((g, e),))
            yield from nxt
            frontier = nxt


class AbelianGroup(VertexGroup):
    kind = "abelian"

    def __init__(self, names: Sequence[str], invariant_factors: Sequence[int]):
        self.names = tuple(names)
        self.factors = tuple(int(d) for d in invariant_factors)
        if len(self.factors) != len(self.names):
            raise GroupError("one invariant factor per generator is required")
        if any(d < 0 for d in self.factors):
            raise GroupError(f"invariant factors must be >= 0, got {self.factors}")
        if len(set(self.names)) != len(self.names):
            raise GroupError(f"duplicate generator names {self.names}")
        self.identity = (0,) * len(self.names)
        self.torsion_rows = [
            tuple(d if j == i else 0 for j in range(len(self.factors)))
            for i, d in enumerate(self.factors)
            if d > 0
        ]

    def __repr__(self) -> str:
        return f"AbelianGroup({list(self.names)}, {list(self.factors)})"

    def canonical(self, y: Sequence[int]) -> tuple[int, ...]:
        out = []
        for v, d in zip(y, self.factors):
            if d:
                v %= d
                if 2 * v > d:
                    v -= d
            out.append(v)
        return tuple(out)

    def generator(self, g: int, e: int = 1) -> tuple[int, ...]:
        if not 0 <= g < len(self.names):
            raise UnknownGenerator(g)
        return self.canonical([e if i == g else 0 for i in range(len(self.names))])

    def mul(self, a, b):
        return self.canonical([x + y for x, y in zip(a, b)])

    def inv(self, a):
        return self.canonical([-x for x in a])

    @staticmethod
    def syllables(a) -> Syllables:
        return tuple((i, v) for i, v in enumerate(a) if v)

    def exponent_sum(self, a) -> int:
        return sum(a)

    def elements(self, max_syllables: int, max_exponent: int) -> Iterator[tuple[int, ...]]:
        seen = set()
        m = len(self.names)
        exps = [e for e in range(-max_exponent, max_exponent + 1) if e]
        for k in range(0, min(max_syllables, m) + 1):
            for coords in itertools.combinations(range(m), k):
                for vals in itertools.product(exps, repeat=k):
                    y = [0] * m
                    for c, v in zip(coords, vals):
                        y[c] = v
                    y = self.canonical(y)
                    if y not in seen:
                        seen.add(y)
                        yield y


def make_vertex_group(kind: str, names: Sequence[str], invariant_factors: Sequence[int] | None = None) -> VertexGroup:
    if kind == "free":
        return FreeGroup(names)
    if kind == "abelian":
        if invariant_factors is None:
            raise GroupError("abelian vertex groups need invariant_factors")
        return AbelianGroup(names, invariant_factors)
    raise GroupError(f"unknown vertex group kind {kind!r}")


# -- edge groups and their images ------------------------------------------


class EdgeGroup:
    """Finitely generated abelian edge group Z^k / (invariant factors)."""

    def __init__(self, names: Sequence[str], invariant_factors: Sequence[int]):
        self.names = tuple(names)
        self.factors = tuple(int(d) for d in invariant_factors)
        if len(self.names) != len(self.factors):
            raise GroupError("edge group: one invariant factor per generator is required")
        if any(d < 0 for d in self.factors):
            raise GroupError("edge group invariant factors must be >= 0")

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeGroup) and (self.names, self.factors) == (other.names, other.factors)

    def __hash__(self) -> int:
        return hash((self.names, self.factors))

    @property
    def trivial(self) -> bool:
        return all(d == 1 for d in self.factors)

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(v % d if d else v for v, d in zip(x, self.factors))

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * len(self.names)


class EdgeImage:
    """Image h_e(Gamma_e) inside a vertex group.

    ``coset_rep(g)`` returns ``(s, x)`` with ``g = s * h(x)`` and ``s`` the
    shortlex-minimal element of the coset ``g h(Gamma_e)``;
    ``preimage(g)`` returns ``x`` with ``h(x) = g`` or None.
    """

    group: VertexGroup
    edge_group: EdgeGroup

    def __init__(self, group: VertexGroup, edge_group: EdgeGroup, images: Sequence):
        self.group = group
        self.edge_group = edge_group
        self.images = [group.canonical(w) for w in images]
        if len(self.images) != len(edge_group.names):
            raise GroupError("one image per edge-group generator is required")
        self._cache: dict = {}

    def h(self, x: Sequence[int]):
        G = self.group
        out = G.identity
        for img, v in zip(self.images, x):
            if v:
                out = G.mul(out, self._power(img, v))
        return out

    def _power(self, w, n: int):
        G = self.group
        if isinstance(G, AbelianGroup):
            return G.canonical([n * c for c in w])
        base = w if n > 0 else G.inv(w)
        out = G.identity
        for _ in range(abs(n)):
            out = G.mul(out, base)
        return out

    def coset_rep(self, g):
        hit = self._cache.get(g)
        if hit is None:
            hit = self._cache[g] = self._coset_rep(g)
        return hit

    def contains(self, g) -> bool:
        return self.preimage(g) is not None


class TrivialImage(EdgeImage):
    def __init__(self, group: VertexGroup, edge_group: EdgeGroup, images: Sequence = ()):
        super().__init__(group, edge_group, images or [group.identity] * len(edge_group.names))
        if any(img != group.identity for img in self.images):
            raise NotInjective("trivial edge group must map to the identity")

    def h(self, x):
        return self.group.identity

    def coset_rep(self, g):
        return g, self.edge_group.zero

    def preimage(self, g):
        return self.edge_group.zero if g == self.group.identity else None


class CyclicFreeImage(EdgeImage):
    """Infinite cyclic edge group mapped into a free vertex group."""

    def __init__(self, group: FreeGroup, edge_group: EdgeGroup, images: Sequence):
        super().__init__(group, edge_group, images)
        if len(self.images) != 1 or edge_group.factors != (0,):
            raise NotInjective("only Z edge groups embed in a free group")
        w = self.images[0]
        if not w:
            raise NotInjective("edge monomorphism sends the generator to the identity")
        conj: list = []
        core = list(w)
        while len(core) >= 2 and core[0][0] == core[-1][0]:
            (g, e), (_, f) = core[0], core[-1]
            conj.append((g, e))
            if e + f == 0:
                core = core[1:-1]
            else:
                core = core[1:-1] + [(g, e + f)]
                break
        self.conj: Syllables = FreeGroup.mul((), tuple(conj))
        self.core: Syllables = tuple(core)

    def _core_power(self, m: int) -> Syllables:
        c = self.core
        if len(c) == 1:
            g, k = c[0]
            return ((g, k * m),) if m else ()
        if m >= 0:
            return c * m
        return FreeGroup.inv(c) * (-m)

    def _power(self, w, n: int):
        u = self.conj
        return FreeGroup.mul(FreeGroup.mul(u, self._core_power(n)), FreeGroup.inv(u))

    def h(self, x):
        return self._power(None, x[0])

    def preimage(self, g):
        u = self.conj
        inner = FreeGroup.mul(FreeGroup.mul(FreeGroup.inv(u), g), u)
        c = self.core
        if not inner:
            return (0,)
        if len(c) == 1:
            gen, k = c[0]
            if len(inner) == 1 and inner[0][0] == gen and inner[0][1] % k == 0:
                return (inner[0][1] // k,)
            return None
        s = len(c)
        if len(inner) % s:
            return None
        m = len(inner) // s
        if inner == c * m:
            return (m,)
        if inner == FreeGroup.inv(c) * m:
            return (-m,)
        return None

    def _coset_rep(self, g):
        G = self.group
        u, c = self.conj, self.core
        A = FreeGroup.mul(g, u)
        if len(c) == 1:
            gen, k = c[0]
            cands = {0}
            if A and A[-1][0] == gen:
                j = A[-1][1]
                lo = (-j) // k
                cands |= {lo - 1, lo, lo + 1}
        else:
            bound = (len(A) + 2) // len(c) + 2
            cands = set(range(-bound, bound + 1))
        best = None
        for m in sorted(cands):
            s = FreeGroup.mul(g, self._power(None, m))
            k_ = G.key(s)
            if best is None or k_ < best[0]:
                best = (k_, s, m)
        _, s, m = best
        return s, (-m,)


class LatticeImage(EdgeImage):
    """Edge group image inside a finitely generated abelian vertex group."""

    def __init__(self, group: AbelianGroup, edge_group: EdgeGroup, images: Sequence):
        super().__init__(group, edge_group, images)
        G = group
        k = len(self.images)
        self.lattice = IntLattice(len(G.names), list(self.images) + G.torsion_rows)
        # well-defined: torsion relations of the edge group must map to zero
        for i, d in enumerate(edge_group.factors):
            if d and G.canonical([d * c for c in self.images[i]]) != G.identity:
                raise NotInjective(f"edge relation {d}*{edge_group.names[i]} does not map to the identity")
        # injective: kernel of Z^k -> G equals the edge-group relation lattice
        ker = kernel_lattice([list(r) for r in self.images], G.torsion_rows) if k else IntLattice(0)
        rel = IntLattice(k, [[d if j == i else 0 for j in range(k)] for i, d in enumerate(edge_group.factors) if d])
        if not ker.same_as(rel):
            raise NotInjective(f"edge monomorphism {self.images} is not injective on {edge_group.names}")

    def preimage(self, g):
        coeffs = self.lattice.coefficients(g)
        if coeffs is None:
            return None
        return self.edge_group.reduce(coeffs[: len(self.images)])

    def _coset_rep(self, g):
        G = self.group
        m = len(G.names)
        if self.lattice.rank == 0:
            return g, self.edge_group.zero
        if m == 1:
            d = self.lattice.rows[0][0]
            v = g[0] % d
            if 2 * v > d:
                v -= d
            s = (v,)
        else:
            s = None
            bound = G.length(g)
            for total in range(bound + 1):
                cands = sorted(_l1_sphere(m, total), key=G.key)
                for y in cands:
                    if tuple(a - b for a, b in zip(g, y)) in self.lattice:
                        s = y
                        break
                if s is not None:
                    break
            s = G.canonical(s)
        x = self.preimage(G.mul(G.inv(s), g))
        return s, x


def _l1_sphere(m: int, total: int) -> Iterator[tuple[int, ...]]:
    if m == 1:
        yield (total,)
        if total:
            yield (-total,)
        return
    for first in range(-total, total + 1):
        for rest in _l1_sphere(m - 1, total - abs(first)):
            yield (first,) + rest


def make_edge_image(group: VertexGroup, edge_group: EdgeGroup, images: Sequence) -> EdgeImage:
    if edge_group.trivial:
        return TrivialImage(group, edge_group, images)
    if isinstance(group, FreeGroup):
        return CyclicFreeImage(group, edge_group, images)
    return LatticeImage(group, edge_group, images)
