"""Finite chain complexes over the rationals with weighted l1 norms."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "ComplexError",
    "FiniteChainComplex",
    "PairComplex",
    "MappingCone",
    "DualCone",
    "simplicial_complex",
    "closure",
    "parse_rational",
    "format_rational",
]


class ComplexError(ValueError):
    pass


def parse_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ComplexError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ComplexError(f"not a rational: {x!r}") from exc
    raise ComplexError(f"not a rational: {x!r} (use an integer or a 'p/q' string)")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


Chain = dict  # cell name -> Fraction, zero entries omitted


class FiniteChainComplex:
    """Graded complex with named bases, sparse boundary columns and cell weights.

    ``boundary[n][cell]`` is the chain ``d(cell)`` in degree ``n - 1``.
    """

    def __init__(
        self,
        bases: Mapping[int, Sequence[str]],
        boundary: Mapping[int, Mapping[str, Mapping[str, Fraction]]] | None = None,
        weights: Mapping[str, Fraction] | None = None,
    ):
        self.bases = {int(n): list(names) for n, names in bases.items() if names}
        self.degree_of: dict[str, int] = {}
        for n, names in self.bases.items():
            for name in names:
                if name in self.degree_of:
                    raise ComplexError(f"cell name {name!r} used twice")
                self.degree_of[name] = n
        self.index = {n: {c: i for i, c in enumerate(names)} for n, names in self.bases.items()}
        self.boundary: dict[int, dict[str, dict[str, Fraction]]] = {}
        for n, cols in (boundary or {}).items():
            n = int(n)
            for cell, col in cols.items():
                if self.degree_of.get(cell) != n:
                    raise ComplexError(f"boundary of {cell!r} given in degree {n}")
                clean = {}
                for face, v in col.items():
                    v = parse_rational(v)
                    if self.degree_of.get(face) != n - 1:
                        raise ComplexError(f"face {face!r} of {cell!r} is not a cell of degree {n - 1}")
                    if v:
                        clean[face] = v
                if clean:
                    self.boundary.setdefault(n, {})[cell] = clean
        self.weights = {c: Fraction(1) for c in self.degree_of}
        for c, w in (weights or {}).items():
            if c not in self.degree_of:
                raise ComplexError(f"weight for unknown cell {c!r}")
            w = parse_rational(w)
            if w <= 0:
                raise ComplexError(f"weight of {c!r} must be positive, got {w}")
            self.weights[c] = w
        self.check_square_zero()

    # -- structure --------------------------------------------------------------

    def basis(self, n: int) -> list[str]:
        return self.bases.get(n, [])

    def dim(self, n: int) -> int:
        return len(self.basis(n))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.bases)

    def d(self, cell: str) -> Chain:
        return self.boundary.get(self.degree_of[cell], {}).get(cell, {})

    def check_square_zero(self) -> None:
        for n, cols in self.boundary.items():
            for cell in cols:
                dd = self.boundary_of(self.boundary_of({cell: Fraction(1)}))
                if dd:
                    raise ComplexError(f"boundary of boundary of {cell!r} is {dd}, not zero")

    def boundary_of(self, chain: Mapping[str, Fraction]) -> Chain:
        out: dict[str, Fraction] = {}
        for cell, a in chain.items():
            if not a:
                continue
            for face, v in self.d(cell).items():
                nv = out.get(face, 0) + a * v
                if nv:
                    out[face] = nv
                else:
                    out.pop(face, None)
        return out

    def chain(self, data: Mapping[str, object]) -> Chain:
        out = {}
        degs = set()
        for cell, v in data.items():
            if cell not in self.degree_of:
                raise ComplexError(f"unknown cell {cell!r}")
            v = parse_rational(v)
            if v:
                out[cell] = v
                degs.add(self.degree_of[cell])
        if len(degs) > 1:
            raise ComplexError(f"chain mixes degrees {sorted(degs)}")
        return out

    def chain_degree(self, chain: Mapping[str, Fraction], default: int | None = None) -> int:
        degs = {self.degree_of[c] for c in chain}
        if len(degs) > 1:
            raise ComplexError(f"chain mixes degrees {sorted(degs)}")
        if not degs:
            if default is None:
                raise ComplexError("the degree of the zero chain must be given")
            return default
        return degs.pop()

    def norm(self, chain: Mapping[str, Fraction]) -> Fraction:
        return sum((self.weights[c] * abs(v) for c, v in chain.items()), Fraction(0))

    def theta_norm(self, chain: Mapping[str, Fraction], theta) -> Fraction:
        theta = Fraction(theta)
        if theta < 0:
            from .norms import NegativeTheta

            raise NegativeTheta(f"theta must be >= 0, got {theta}")
        return self.norm(chain) + theta * self.norm(self.boundary_of(chain))

    def matrix(self, n: int) -> list[list[Fraction]]:
        """Dense matrix of the boundary C_n -> C_{n-1} (rows indexed by C_{n-1})."""
        rows = self.basis(n - 1)
        idx = self.index.get(n - 1, {})
        M = [[Fraction(0)] * self.dim(n) for _ in rows]
        for j, cell in enumerate(self.basis(n)):
            for face, v in self.d(cell).items():
                M[idx[face]][j] = v
        return M

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        out = {
            "bases": {str(n): list(self.bases[n]) for n in self.degrees},
            "boundary": [
                [cell, face, format_rational(v)]
                for n in self.degrees
                for cell in self.basis(n)
                for face, v in self.d(cell).items()
            ],
        }
        w = {c: format_rational(x) for c, x in self.weights.items() if x != 1}
        if w:
            out["weights"] = w
        return out

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FiniteChainComplex":
        if "simplices" in doc:
            return simplicial_complex(doc["simplices"], doc.get("weights"))
        try:
            bases = {int(n): names for n, names in doc["bases"].items()}
            degree = {c: n for n, names in bases.items() for c in names}
            boundary: dict[int, dict[str, dict[str, Fraction]]] = {}
            for cell, face, v in doc.get("boundary", []):
                if cell not in degree:
                    raise ComplexError(f"unknown cell {cell!r} in boundary data")
                col = boundary.setdefault(degree[cell], {}).setdefault(cell, {})
                col[face] = col.get(face, 0) + parse_rational(v)
            return cls(bases, boundary, doc.get("weights"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ComplexError):
                raise
            raise ComplexError(f"malformed complex document: {exc!r}") from exc


def _perm_parity(seq: Sequence, ref: Sequence) -> int:
    pos = [ref.index(x) for x in seq]
    sign = 1
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            if pos[i] > pos[j]:
                sign = -sign
    return sign


def _cell_name(vertices: Sequence) -> str:
    return "[" + ",".join(str(v) for v in vertices) + "]"


def simplicial_complex(top: Iterable[Sequence], weights: Mapping | None = None) -> FiniteChainComplex:
    """Ordered simplicial chain complex generated by the given simplices.

    Each face takes the vertex order in which it is first met; a face met
    later with a different order is the same cell with a sign.
    """
    oriented: dict[frozenset, tuple] = {}
    order: list[frozenset] = []

    def register(simplex: tuple) -> None:
        key = frozenset(simplex)
        if len(key) != len(simplex):
            raise ComplexError(f"simplex {simplex} repeats a vertex")
        if key not in oriented:
            oriented[key] = simplex
            order.append(key)
            for i in range(len(simplex)):
                if len(simplex) > 1:
                    register(simplex[:i] + simplex[i + 1 :])

    for s in top:
        register(tuple(s))
    bases: dict[int, list[str]] = {}
    for key in sorted(order, key=lambda k: (len(k), _cell_name(oriented[k]))):
        bases.setdefault(len(key) - 1, []).append(_cell_name(oriented[key]))
    boundary: dict[int, dict[str, dict[str, Fraction]]] = {}
    for key in order:
        s = oriented[key]
        if len(s) < 2:
            continue
        col = {}
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            canon = oriented[frozenset(face)]
            sign = (-1) ** i * _perm_parity(face, canon)
            col[_cell_name(canon)] = Fraction(sign)
        boundary.setdefault(len(s) - 1, {})[_cell_name(s)] = col
    return FiniteChainComplex(bases, boundary, weights)


class PairComplex:
    """A complex X with a subcomplex Y spanned by a subset of the cells."""

    def __init__(self, X: FiniteChainComplex, sub: Iterable[str]):
        self.X = X
        self.sub = set(sub)
        for c in self.sub:
            if c not in X.degree_of:
                raise ComplexError(f"subcomplex cell {c!r} is not a cell of the complex")
            for face in X.d(c):
                if face not in self.sub:
                    raise ComplexError(f"subcomplex is not closed: {face!r} is a face of {c!r}")

    def sub_basis(self, n: int) -> list[str]:
        return [c for c in self.X.basis(n) if c in self.sub]

    def is_relative_cycle(self, chain: Mapping[str, Fraction]) -> bool:
        return all(c in self.sub for c in self.X.boundary_of(chain))

    def cone(self) -> "MappingCone":
        return MappingCone(self)

    def to_dict(self) -> dict:
        return {"complex": self.X.to_dict(), "subcomplex": sorted(self.sub, key=lambda c: (self.X.degree_of[c], c))}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "PairComplex":
        X = FiniteChainComplex.from_dict(doc["complex"])
        sub = doc.get("subcomplex", [])
        if doc.get("close_subcomplex"):
            sub = closure(X, sub)
        return cls(X, sub)


def closure(X: FiniteChainComplex, cells: Iterable[str]) -> set:
    out = set()
    stack = list(cells)
    while stack:
        c = stack.pop()
        if c in out:
            continue
        out.add(c)
        stack.extend(X.d(c))
    return out


class MappingCone:
    """The homology mapping cone of a pair, with basis ``("X", cell)`` in
    degree n from ``C_n(X)`` and ``("Y", cell)`` from ``C_{n-1}(Y)``.

    The differential sends ``(u, v)`` to ``(du + v, -dv)``.
    """

    def __init__(self, pair: PairComplex):
        self.pair = pair
        X = pair.X
        degs = set(X.degrees) | {n + 1 for n in X.degrees}
        self.bases = {n: [("X", c) for c in X.basis(n)] + [("Y", c) for c in pair.sub_basis(n - 1)] for n in sorted(degs)}
        self.check_square_zero()

    def basis(self, n: int) -> list:
        return self.bases.get(n, [])

    def d_cell(self, cell) -> dict:
        kind, c = cell
        X = self.pair.X
        out = {}
        if kind == "X":
            for f, v in X.d(c).items():
                out[("X", f)] = v
        else:
            out[("X", c)] = Fraction(1)
            for f, v in X.d(c).items():
                out[("Y", f)] = -v
        return out

    def differential(self, chain: Mapping) -> dict:
        out: dict = {}
        for cell, a in chain.items():
            for f, v in self.d_cell(cell).items():
                nv = out.get(f, 0) + a * v
                if nv:
                    out[f] = nv
                else:
                    out.pop(f, None)
        return out

    def check_square_zero(self) -> None:
        for n, cells in self.bases.items():
            for cell in cells:
                if self.differential(self.differential({cell: Fraction(1)})):
                    raise ComplexError(f"cone differential does not square to zero at {cell}")

    def weight(self, cell, theta: Fraction) -> Fraction:
        w = self.pair.X.weights[cell[1]]
        return w if cell[0] == "X" else theta * w

    def norm(self, chain: Mapping, theta) -> Fraction:
        theta = Fraction(theta)
        return sum((self.weight(c, theta) * abs(v) for c, v in chain.items()), Fraction(0))

    @staticmethod
    def split(chain: Mapping) -> tuple[dict, dict]:
        u = {c: v for (k, c), v in chain.items() if k == "X" and v}
        v = {c: x for (k, c), x in chain.items() if k == "Y" and x}
        return u, v

    @staticmethod
    def join(u: Mapping, v: Mapping) -> dict:
        out = {("X", c): Fraction(a) for c, a in u.items() if a}
        out.update({("Y", c): Fraction(a) for c, a in v.items() if a})
        return out

    def is_cycle(self, u: Mapping, v: Mapping) -> bool:
        return not self.differential(self.join(u, v))


class DualCone:
    """The cone for relative cochains: pairs (f, g) with f on C_n(X) and g
    on C_{n-1}(Y), differential ``(f, g) -> (f o d, -f|_Y - g o d)``, norm
    ``max(|f|_inf, |g|_inf / theta)`` (weighted), paired with cone chains by
    ``<(f, g), (u, v)> = f(u) - g(v)``.
    """

    def __init__(self, cone: MappingCone, theta):
        theta = Fraction(theta)
        if theta < 0:
            raise ComplexError("the dual cone norm needs theta >= 0")
        self.cone = cone
        self.theta = theta

    def basis(self, n: int) -> list:
        return self.cone.basis(n)

    def differential(self, cochain: Mapping) -> dict:
        """Coboundary: a cochain of degree n to degree n + 1."""
        X = self.cone.pair.X
        sub = self.cone.pair.sub
        out: dict = {}

        def add(key, val):
            nv = out.get(key, 0) + val
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)

        # (df)(sigma) = f(d sigma) for sigma in C_{n+1}(X); -f|_Y - (dg) on C_n(Y)
        for (kind, c), a in cochain.items():
            if not a:
                continue
            n = X.degree_of[c]
            if kind == "X":
                for cell in X.basis(n + 1):
                    v = X.d(cell).get(c)
                    if v:
                        add(("X", cell), a * v)
                if c in sub:
                    add(("Y", c), -a)
            else:
                for cell in X.basis(n + 1):
                    if cell in sub:
                        v = X.d(cell).get(c)
                        if v:
                            add(("Y", cell), -a * v)
        return out

    def pair(self, cochain: Mapping, chain: Mapping) -> Fraction:
        total = Fraction(0)
        for cell, a in chain.items():
            b = cochain.get(cell, 0)
            if b:
                total += a * b if cell[0] == "X" else -a * b
        return total

    def norm(self, cochain: Mapping) -> Fraction:
        best = Fraction(0)
        X = self.cone.pair.X
        for (kind, c), a in cochain.items():
            if not a:
                continue
            if kind == "Y" and not self.theta:
                return float("inf")
            w = X.weights[c] if kind == "X" else self.theta * X.weights[c]
            best = max(best, abs(a) / w)
        return best
