"""Exact rational linear programming: two-phase simplex with Bland's rule.

Problems are given in a general form

    minimize (or maximize)  c . x
    subject to              row_i . x  (<= | = | >=)  b_i
                            x_j >= 0 unless j is declared free

and every answer carries a certificate that is re-verified with exact
arithmetic before it is returned:

* ``OPTIMAL``: a primal point and dual multipliers ``y`` with the sign
  pattern of the constraint senses, nonnegative reduced costs on bounded
  variables, zero reduced costs on free ones, and ``b . y == c . x``;
* ``INFEASIBLE``: multipliers ``y`` (same sign pattern) with ``y A <= 0``
  on bounded columns, ``y A == 0`` on free columns and ``y . b > 0``;
* ``UNBOUNDED``: a feasible point and a ray along which the objective
  decreases without bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["LPProblem", "LPResult", "MalformedProblem", "CertificateError", "lp_solve", "OPTIMAL", "INFEASIBLE", "UNBOUNDED"]

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"

_SENSES = ("<=", "=", ">=")


class MalformedProblem(ValueError):
    pass


class CertificateError(AssertionError):
    pass


@dataclass
class LPProblem:
    objective: list
    rows: list  # each row: dict {column: coefficient} or a dense list
    senses: list
    rhs: list
    free: set = field(default_factory=set)
    maximize: bool = False
    names: list | None = None

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def sparse_rows(self) -> list[dict[int, Fraction]]:
        out = []
        for r in self.rows:
            if isinstance(r, dict):
                out.append({int(j): Fraction(v) for j, v in r.items() if v})
            else:
                out.append({j: Fraction(v) for j, v in enumerate(r) if v})
        return out

    def validate(self) -> None:
        n = self.num_vars
        if not (len(self.rows) == len(self.senses) == len(self.rhs)):
            raise MalformedProblem("rows, senses and rhs must have equal length")
        for s in self.senses:
            if s not in _SENSES:
                raise MalformedProblem(f"unknown constraint sense {s!r}")
        for r in self.sparse_rows():
            for j in r:
                if not 0 <= j < n:
                    raise MalformedProblem(f"column {j} out of range (n={n})")
        for j in self.free:
            if not 0 <= j < n:
                raise MalformedProblem(f"free column {j} out of range")
        try:
            [Fraction(v) for v in self.objective]
            [Fraction(v) for v in self.rhs]
        except (TypeError, ValueError) as exc:
            raise MalformedProblem(f"non-rational data: {exc}") from exc


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list | None = None
    y: list | None = None
    ray: list | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    def certificate(self) -> dict:
        out = {"status": self.status}
        if self.value is not None:
            out["value"] = self.value
        if self.x is not None:
            out["primal"] = self.x
        if self.y is not None:
            out["dual"] = self.y
        if self.ray is not None:
            out["ray"] = self.ray
        return out


# -- tableau --------------------------------------------------------------------


class _Tableau:
    """Dense-row tableau over Fractions; rows hold only nonzero entries."""

    def __init__(self, rows: list[dict[int, Fraction]], rhs: list[Fraction], basis: list[int], ncols: int):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, col: int, obj: dict[int, Fraction] | None = None, obj_val: list | None = None) -> None:
        row = self.rows[r]
        p = row[col]
        if p != 1:
            inv = 1 / p
            row = {j: v * inv for j, v in row.items()}
            self.rhs[r] *= inv
            self.rows[r] = row
        b = self.rhs[r]
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other.get(col)
            if not f:
                continue
            for j, v in row.items():
                nv = other.get(j, 0) - f * v
                if nv:
                    other[j] = nv
                else:
                    other.pop(j, None)
            self.rhs[k] -= f * b
        if obj is not None:
            f = obj.get(col)
            if f:
                for j, v in row.items():
                    nv = obj.get(j, 0) - f * v
                    if nv:
                        obj[j] = nv
                    else:
                        obj.pop(j, None)
                obj_val[0] -= f * b
        self.basis[r] = col
        self.pivots += 1

    def reduced_costs(self, cost: dict[int, Fraction]) -> tuple[dict[int, Fraction], list]:
        obj = dict(cost)
        val = [Fraction(0)]
        for r, bcol in enumerate(self.basis):
            cb = cost.get(bcol)
            if not cb:
                continue
            for j, v in self.rows[r].items():
                nv = obj.get(j, 0) - cb * v
                if nv:
                    obj[j] = nv
                else:
                    obj.pop(j, None)
            val[0] -= cb * self.rhs[r]
        return obj, val

    def run(self, cost: dict[int, Fraction], allowed: int) -> tuple[str, int | None]:
        """Minimize cost over the current basis; columns >= allowed never enter."""
        obj, val = self.reduced_costs(cost)
        while True:
            enter = None
            for j in sorted(obj):
                if j < allowed and obj[j] < 0:
                    enter = j
                    break
            if enter is None:
                return OPTIMAL, None
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(enter)
                if a is not None and a > 0:
                    ratio = self.rhs[r] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED, enter
            self.pivot(best[1], enter, obj, val)


# -- driver ---------------------------------------------------------------------


def lp_solve(problem: LPProblem, verify: bool = True) -> LPResult:
    problem.validate()
    n = problem.num_vars
    sign = -1 if problem.maximize else 1
    c = [sign * Fraction(v) for v in problem.objective]
    A = problem.sparse_rows()
    b = [Fraction(v) for v in problem.rhs]
    m = len(A)

    # standard form columns: x+ for every variable, x- for free ones, slacks
    col_of: list[tuple[int, int]] = []  # (original var, +1/-1) for structural columns
    pos = {}
    neg = {}
    for j in range(n):
        pos[j] = len(col_of)
        col_of.append((j, 1))
        if j in problem.free:
            neg[j] = len(col_of)
            col_of.append((j, -1))
    nstruct = len(col_of)
    rows: list[dict[int, Fraction]] = []
    slack_of = {}
    ncols = nstruct
    for i, r in enumerate(A):
        row: dict[int, Fraction] = {}
        for j, v in r.items():
            row[pos[j]] = v
            if j in neg:
                row[neg[j]] = -v
        s = problem.senses[i]
        if s != "=":
            row[ncols] = Fraction(1 if s == "<=" else -1)
            slack_of[i] = ncols
            ncols += 1
        rows.append(row)
    rhs = list(b)
    flip = [1] * m
    for i in range(m):
        if rhs[i] < 0:
            flip[i] = -1
            rhs[i] = -rhs[i]
            rows[i] = {j: -v for j, v in rows[i].items()}
    art0 = ncols
    for i in range(m):
        rows[i][art0 + i] = Fraction(1)
    total = art0 + m
    tab = _Tableau(rows, rhs, [art0 + i for i in range(m)], total)

    # phase I
    phase1 = {art0 + i: Fraction(1) for i in range(m)}
    tab.run(phase1, art0)
    infeas = sum((tab.rhs[r] for r, bc in enumerate(tab.basis) if bc >= art0), Fraction(0))
    if infeas > 0:
        y = _duals(tab, phase1, art0, m, flip)
        # phase I duals satisfy y.A <= 0 on every column and y.b = infeas > 0
        res = LPResult(INFEASIBLE, y=y, pivots=tab.pivots)
        if verify:
            _verify_infeasible(problem, A, b, res.y)
        return res

    # drive artificial columns out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= art0:
            col = next((j for j in sorted(tab.rows[r]) if j < art0), None)
            if col is not None:
                tab.pivot(r, col)
            r += 1
        else:
            r += 1

    cost = {pos[j]: c[j] for j in range(n) if c[j]}
    for j in neg:
        if c[j]:
            cost[neg[j]] = -c[j]
    status, enter = tab.run(cost, art0)

    x = _primal(tab, col_of, n, nstruct)
    if status == UNBOUNDED:
        d = [Fraction(0)] * total
        d[enter] = Fraction(1)
        for r2, bc in enumerate(tab.basis):
            a = tab.rows[r2].get(enter)
            if a:
                d[bc] = -a
        ray = [Fraction(0)] * n
        for k, (j, s) in enumerate(col_of):
            if d[k]:
                ray[j] += s * d[k]
        res = LPResult(UNBOUNDED, x=x, ray=ray, pivots=tab.pivots)
        if verify:
            _verify_unbounded(problem, A, b, c, res)
        return res

    y = _duals(tab, cost, art0, m, flip)
    value = sum((c[j] * x[j] for j in range(n)), Fraction(0))
    res = LPResult(OPTIMAL, value=sign * value, x=x, y=[sign * v for v in y], pivots=tab.pivots)
    if verify:
        _verify_optimal(problem, A, b, res)
    return res


def _primal(tab: _Tableau, col_of, n: int, nstruct: int) -> list[Fraction]:
    x = [Fraction(0)] * n
    for r, bc in enumerate(tab.basis):
        if bc < nstruct:
            j, s = col_of[bc]
            x[j] += s * tab.rhs[r]
    return x


def _duals(tab: _Tableau, cost: dict[int, Fraction], art0: int, m: int, flip: list[int]) -> list[Fraction]:
    """y = c_B B^-1, read from the artificial columns (initially the identity)."""
    y = [Fraction(0)] * m
    for r, bc in enumerate(tab.basis):
        cb = cost.get(bc)
        if not cb:
            continue
        for j, v in tab.rows[r].items():
            if j >= art0:
                y[j - art0] += cb * v
    return [y[i] * flip[i] for i in range(m)]


# -- certificate checks ----------------------------------------------------------


def _row_dot(r: dict[int, Fraction], x: Sequence[Fraction]) -> Fraction:
    return sum((v * x[j] for j, v in r.items()), Fraction(0))


def _sense_ok(s: str, lhs: Fraction, rhs: Fraction) -> bool:
    return lhs <= rhs if s == "<=" else lhs >= rhs if s == ">=" else lhs == rhs


def _dual_sign_ok(s: str, yi: Fraction) -> bool:
    # minimization convention: >= rows carry y >= 0, <= rows y <= 0
    return yi >= 0 if s == ">=" else yi <= 0 if s == "<=" else True


def _columns(A: list[dict[int, Fraction]], y: Sequence[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, r in enumerate(A):
        yi = y[i]
        if yi:
            for j, v in r.items():
                out[j] += yi * v
    return out


def _verify_primal(problem: LPProblem, A, b, x) -> None:
    for j, v in enumerate(x):
        if j not in problem.free and v < 0:
            raise CertificateError(f"primal variable {j} is negative")
    for i, r in enumerate(A):
        if not _sense_ok(problem.senses[i], _row_dot(r, x), b[i]):
            raise CertificateError(f"primal row {i} violated")


def _verify_optimal(problem: LPProblem, A, b, res: LPResult) -> None:
    n = problem.num_vars
    sign = -1 if problem.maximize else 1
    c = [sign * Fraction(v) for v in problem.objective]
    y = [sign * v for v in res.y]
    _verify_primal(problem, A, b, res.x)
    for i, s in enumerate(problem.senses):
        if not _dual_sign_ok(s, y[i]):
            raise CertificateError(f"dual multiplier {i} has the wrong sign")
    yA = _columns(A, y, n)
    for j in range(n):
        red = c[j] - yA[j]
        if (j in problem.free and red != 0) or red < 0:
            raise CertificateError(f"reduced cost of column {j} is {red}")
    dual_obj = sum((bi * yi for bi, yi in zip(b, y)), Fraction(0))
    primal_obj = sum((cj * xj for cj, xj in zip(c, res.x)), Fraction(0))
    if dual_obj != primal_obj:
        raise CertificateError(f"duality gap {primal_obj} != {dual_obj}")
    if res.value is not None and sign * res.value != primal_obj:
        raise CertificateError(f"reported value {res.value} is not the objective at the primal point")


def _verify_infeasible(problem: LPProblem, A, b, y) -> None:
    n = problem.num_vars
    for i, s in enumerate(problem.senses):
        if not _dual_sign_ok(s, y[i]):
            raise CertificateError(f"Farkas multiplier {i} has the wrong sign")
    yA = _columns(A, y, n)
    for j in range(n):
        if (j in problem.free and yA[j] != 0) or yA[j] > 0:
            raise CertificateError(f"Farkas column {j} has y.A = {yA[j]}")
    if sum((bi * yi for bi, yi in zip(b, y)), Fraction(0)) <= 0:
        raise CertificateError("Farkas certificate has y.b <= 0")


def _verify_unbounded(problem: LPProblem, A, b, c, res: LPResult) -> None:
    _verify_primal(problem, A, b, res.x)
    d = res.ray
    for j, v in enumerate(d):
        if j not in problem.free and v < 0:
            raise CertificateError("ray leaves the nonnegative orthant")
    for i, r in enumerate(A):
        lhs = _row_dot(r, d)
        s = problem.senses[i]
        if (s == "=" and lhs != 0) or (s == "<=" and lhs > 0) or (s == ">=" and lhs < 0):
            raise CertificateError(f"ray violates row {i}")
    if sum((cj * dj for cj, dj in zip(c, d)), Fraction(0)) >= 0:
        raise CertificateError("ray does not improve the objective")


def verify_result(problem: LPProblem, res: LPResult) -> None:
    """Re-check a returned certificate against the problem data."""
    A = problem.sparse_rows()
    b = [Fraction(v) for v in problem.rhs]
    if res.status == OPTIMAL:
        _verify_optimal(problem, A, b, res)
    elif res.status == INFEASIBLE:
        _verify_infeasible(problem, A, b, res.y)
    elif res.status == UNBOUNDED:
        sign = -1 if problem.maximize else 1
        _verify_unbounded(problem, A, b, [sign * Fraction(v) for v in problem.objective], res)
    else:
        raise CertificateError(f"unknown status {res.status}")
