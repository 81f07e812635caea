"""Glue pairs along identified pieces of their subcomplexes and assemble a cycle.

Each piece is a pair ``(X_i, Y_i)`` with a relative cycle ``c_i``. An
interface identifies cells of ``Y_i`` with cells of ``Y_j`` (with signs) and
must commute with the boundary. After gluing, the sum of the ``c_i`` has
boundary on the exterior (the part of the ``Y_i`` not touched by any
interface) plus a leftover on the interfaces. A correction ``c'`` supported
on interface cells cancels the leftover; it is chosen with least norm by LP.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .complexes import ComplexError, FiniteChainComplex, PairComplex, closure, parse_rational
from .lp import INFEASIBLE, OPTIMAL, LPProblem, LPResult, lp_solve

__all__ = ["InterfaceMismatch", "Unfillable", "Piece", "Interface", "GlueResult", "glue_assemble", "load_glue"]


class InterfaceMismatch(ValueError):
    pass


class Unfillable(ArithmeticError):
    pass


@dataclass
class Piece:
    pair: PairComplex
    cycle: dict


@dataclass
class Interface:
    source: int
    target: int
    cells: dict  # source cell -> (target cell, sign)


@dataclass
class GlueResult:
    pair: PairComplex
    chain: dict  # the naive sum of the piece cycles
    correction: dict
    cycle: dict
    certificate: LPResult
    degree: int
    interface: list  # glued n-cells the correction may use

    @property
    def correction_norm(self) -> Fraction:
        return self.pair.X.norm(self.correction)

    @property
    def cycle_norm(self) -> Fraction:
        return self.pair.X.norm(self.cycle)


def _name(i: int, cell: str) -> str:
    return f"{i}.{cell}"


def _check_interface(pieces: Sequence[Piece], face: Interface) -> None:
    for k in (face.source, face.target):
        if not 0 <= k < len(pieces):
            raise InterfaceMismatch(f"interface refers to piece {k}, which does not exist")
    A = pieces[face.source].pair
    B = pieces[face.target].pair
    targets = [t for t, _ in face.cells.values()]
    if len(set(targets)) != len(targets):
        raise InterfaceMismatch("identification is not injective")
    for a, (b, s) in face.cells.items():
        if a not in A.sub:
            raise InterfaceMismatch(f"{a!r} is not a subcomplex cell of piece {face.source}")
        if b not in B.sub:
            raise InterfaceMismatch(f"{b!r} is not a subcomplex cell of piece {face.target}")
        if s not in (1, -1):
            raise InterfaceMismatch(f"sign for {a!r} must be +1 or -1")
        if A.X.degree_of[a] != B.X.degree_of[b]:
            raise InterfaceMismatch(f"{a!r} and {b!r} have different degrees")
        if A.X.weights[a] != B.X.weights[b]:
            raise InterfaceMismatch(f"{a!r} and {b!r} have different weights")
        # chain map: d(s b) == phi(d a)
        image = {}
        for f, v in A.X.d(a).items():
            if f not in face.cells:
                raise InterfaceMismatch(f"face {f!r} of {a!r} is not identified")
            g, t = face.cells[f]
            image[g] = image.get(g, 0) + v * t
        image = {g: v for g, v in image.items() if v}
        expected = {g: s * v for g, v in B.X.d(b).items()}
        if image != expected:
            raise InterfaceMismatch(f"identification does not commute with the boundary at {a!r}")


def glue_assemble(pieces: Sequence[Piece], interfaces: Sequence[Interface], degree: int | None = None) -> GlueResult:
    if not pieces:
        raise ComplexError("nothing to glue")
    for face in interfaces:
        _check_interface(pieces, face)
    cycles = []
    for i, p in enumerate(pieces):
        c = p.pair.X.chain(p.cycle)
        if not p.pair.is_relative_cycle(c):
            raise ComplexError(f"the cycle of piece {i} is not a relative cycle")
        cycles.append(c)
    degs = {p.pair.X.chain_degree(c) for p, c in zip(pieces, cycles) if c}
    if degree is None:
        if len(degs) != 1:
            raise ComplexError("piece cycles must share one degree")
        degree = degs.pop()
    elif degs - {degree}:
        raise ComplexError(f"piece cycles are not all of degree {degree}")

    # union of identifications, resolved to a representative cell with a sign
    link: dict[str, tuple[str, int]] = {}
    for face in interfaces:
        for a, (b, s) in face.cells.items():
            src, tgt = _name(face.source, a), _name(face.target, b)
            if tgt in link:
                raise InterfaceMismatch(f"{tgt!r} is identified twice")
            link[tgt] = (src, s)

    def resolve(cell: str) -> tuple[str, int]:
        sign, seen = 1, set()
        while cell in link:
            if cell in seen:
                raise InterfaceMismatch("identifications form a loop")
            seen.add(cell)
            cell, s = link[cell]
            sign *= s
        return cell, sign

    touched = set(link) | {v[0] for v in link.values()}
    bases: dict[int, list[str]] = {}
    boundary: dict[int, dict[str, dict[str, Fraction]]] = {}
    weights = {}
    exterior = []
    interface_cells = set()
    for i, p in enumerate(pieces):
        X = p.pair.X
        for n in X.degrees:
            for c in X.basis(n):
                name = _name(i, c)
                if name in touched:
                    interface_cells.add(resolve(name)[0])
                if name in link:
                    continue
                bases.setdefault(n, []).append(name)
                weights[name] = X.weights[c]
                col: dict[str, Fraction] = {}
                for f, v in X.d(c).items():
                    g, s = resolve(_name(i, f))
                    col[g] = col.get(g, 0) + s * v
                boundary.setdefault(n, {})[name] = col
                if c in p.pair.sub and name not in touched:
                    exterior.append(name)
    glued = FiniteChainComplex(bases, boundary, weights)
    pair = PairComplex(glued, closure(glued, exterior))

    chain: dict[str, Fraction] = {}
    for i, c in enumerate(cycles):
        for cell, v in c.items():
            g, s = resolve(_name(i, cell))
            chain[g] = chain.get(g, 0) + s * v
    chain = {c: v for c, v in chain.items() if v}

    # correction: c' on interface n-cells with d c' = d c away from the exterior
    leftover = {f: v for f, v in glued.boundary_of(chain).items() if f not in pair.sub}
    cols = [c for c in glued.basis(degree) if c in interface_cells]
    rows_of = [f for f in glued.basis(degree - 1) if f not in pair.sub]
    index = {f: k for k, f in enumerate(rows_of)}
    m = len(cols)
    obj = [glued.weights[c] for c in cols] * 2
    rows = [dict() for _ in rows_of]
    for j, c in enumerate(cols):
        for f, v in glued.d(c).items():
            if f in index:
                rows[index[f]][j] = v
                rows[index[f]][m + j] = -v
    rhs = [leftover.get(f, Fraction(0)) for f in rows_of]
    res = lp_solve(LPProblem(obj, rows, ["="] * len(rows), rhs))
    if res.status == INFEASIBLE:
        raise Unfillable("no chain on the interfaces cancels the interior boundary")
    if res.status != OPTIMAL:
        raise ArithmeticError(f"correction LP returned {res.status}")
    correction = {c: res.x[j] - res.x[m + j] for j, c in enumerate(cols) if res.x[j] != res.x[m + j]}
    cycle = dict(chain)
    for c, v in correction.items():
        nv = cycle.get(c, 0) - v
        if nv:
            cycle[c] = nv
        else:
            cycle.pop(c, None)
    if not pair.is_relative_cycle(cycle):
        raise ArithmeticError("assembled chain is not a relative cycle")
    return GlueResult(pair, chain, correction, cycle, res, degree, cols)


def load_glue(doc: Mapping) -> tuple[list[Piece], list[Interface], int | None]:
    """Read ``{"pieces": [{"pair": ..., "cycle": ...}], "interfaces": [...]}``.

    An interface is ``{"from": i, "to": j, "cells": [[a, b, sign], ...]}``.
    """
    try:
        pieces = [Piece(PairComplex.from_dict(p["pair"]), {c: parse_rational(v) for c, v in p["cycle"].items()}) for p in doc["pieces"]]
        faces = []
        for f in doc.get("interfaces", []):
            cells = {}
            for a, b, s in f["cells"]:
                if a in cells:
                    raise InterfaceMismatch(f"{a!r} is identified twice")
                cells[a] = (b, int(s))
            faces.append(Interface(int(f["from"]), int(f["to"]), cells))
        return pieces, faces, doc.get("degree")
    except (KeyError, TypeError) as exc:
        raise ComplexError(f"malformed gluing document: {exc!r}") from exc
