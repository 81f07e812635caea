"""Exact integer and rational linear algebra helpers.

Only what the rest of the package needs: an integer row-echelon lattice with
solvable membership, and rational row reduction for ranks and kernels.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Vector = tuple[int, ...]


class IntLattice:
    """Sublattice of Z^m spanned by integer generator rows.

    The echelon basis is stored together with the unimodular transform so
    that membership tests can also return coefficients with respect to the
    original generators.
    """

    __slots__ = ("dim", "generators", "rows", "transform", "pivots")

    def __init__(self, dim: int, generators: Sequence[Sequence[int]] = ()):
        self.dim = dim
        self.generators = [tuple(int(x) for x in g) for g in generators]
        for g in self.generators:
            if len(g) != dim:
                raise ValueError(f"generator {g} has wrong length (expected {dim})")
        self._echelonize()

    def _echelonize(self) -> None:
        k = len(self.generators)
        rows = [list(g) for g in self.generators]
        trans = [[int(i == j) for j in range(k)] for i in range(k)]
        pivots: list[int] = []
        r = 0
        for col in range(self.dim):
            # gcd-reduce column `col` among rows r..k-1
            while True:
                nz = [i for i in range(r, k) if rows[i][col] != 0]
                if not nz:
                    break
                piv = min(nz, key=lambda i: abs(rows[i][col]))
                rows[r], rows[piv] = rows[piv], rows[r]
                trans[r], trans[piv] = trans[piv], trans[r]
                done = True
                for i in range(r + 1, k):
                    if rows[i][col]:
                        q = rows[i][col] // rows[r][col]
                        rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                        trans[i] = [a - q * b for a, b in zip(trans[i], trans[r])]
                        if rows[i][col]:
                            done = False
                if done:
                    break
            if r < k and rows[r][col] != 0:
                if rows[r][col] < 0:
                    rows[r] = [-a for a in rows[r]]
                    trans[r] = [-a for a in trans[r]]
                # Hermite reduction of the entries above the pivot
                for i in range(r):
                    q = rows[i][col] // rows[r][col]
                    if q:
                        rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                        trans[i] = [a - q * b for a, b in zip(trans[i], trans[r])]
                pivots.append(col)
                r += 1
        self.rows = [tuple(x) for x in rows[:r]]
        self.transform = [tuple(x) for x in trans[:r]]
        self.pivots = tuple(pivots)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def coefficients(self, vec: Sequence[int]) -> tuple[int, ...] | None:
        """Integer coefficients c with sum c_i * generator_i == vec, or None."""
        v = list(vec)
        z = [0] * len(self.rows)
        for i, col in enumerate(self.pivots):
            q, rem = divmod(v[col], self.rows[i][col])
            if rem:
                return None
            z[i] = q
            if q:
                row = self.rows[i]
                v = [a - q * b for a, b in zip(v, row)]
        if any(v):
            return None
        coeffs = [0] * len(self.generators)
        for zi, trow in zip(z, self.transform):
            if zi:
                for j, t in enumerate(trow):
                    coeffs[j] += zi * t
        return tuple(coeffs)

    def __contains__(self, vec: Sequence[int]) -> bool:
        return self.coefficients(vec) is not None

    def same_as(self, other: "IntLattice") -> bool:
        return self.dim == other.dim and self.rows == other.rows


def kernel_lattice(matrix: Sequence[Sequence[int]], modulus_rows: Sequence[Sequence[int]] = ()) -> IntLattice:
    """Lattice of integer x with x @ matrix in the span of ``modulus_rows``."""
    k = len(matrix)
    m = len(matrix[0]) if k else len(modulus_rows[0]) if modulus_rows else 0
    gens = [list(row) + [int(i == j) for j in range(k)] for i, row in enumerate(matrix)]
    gens += [list(row) + [0] * k for row in modulus_rows]
    lat = IntLattice(m + k, gens)
    ker = [row[m:] for row in lat.rows if not any(row[:m])]
    return IntLattice(k, ker)


# -- rational matrices ------------------------------------------------------

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if not a or not b:
        cols = len(b[0]) if b else 0
        return [[Fraction(0)] * cols for _ in a]
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col) if x and y), Fraction(0)) for col in bt] for row in a]


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    m = to_fractions(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    red, pivots = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """One exact solution of rows @ x = rhs (free variables set to zero)."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x
