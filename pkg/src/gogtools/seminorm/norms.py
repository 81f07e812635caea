"""Quotient seminorms on (relative) homology of finite normed complexes.

Everything here is a finite-dimensional analogue: the infima over
representatives are linear programs, solved exactly by
:func:`gogtools.seminorm.lp.lp_solve`, and every optimum comes with a
verified dual certificate.

A class is a :class:`HomClass`: a pair ``(X, Y)`` (with ``Y`` possibly
empty, which gives absolute homology) and a representative chain whose
boundary lies in ``Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .complexes import ComplexError, DualCone, FiniteChainComplex, MappingCone, PairComplex, parse_rational
from .lp import OPTIMAL, LPProblem, LPResult, lp_solve

__all__ = [
    "NegativeTheta",
    "NotACycle",
    "NotAConeCycle",
    "NonpositiveEpsilon",
    "INFINITY",
    "HomClass",
    "ConeClass",
    "SeminormResult",
    "DualityResult",
    "ThurstonResult",
    "parse_theta",
    "theta_norm",
    "homology_seminorm",
    "cone_seminorm",
    "beta_map",
    "is_cone_boundary",
    "duality_max",
    "thurston_representative",
    "SUCCESS",
    "NOT_GUARANTEED",
    "class_from_dict",
    "cone_class_from_dict",
]

INFINITY = math.inf
SUCCESS = "SUCCESS"
NOT_GUARANTEED = "NOT_GUARANTEED"


class NegativeTheta(ValueError):
    pass


class NotACycle(ValueError):
    pass


class NotAConeCycle(ValueError):
    pass


class NonpositiveEpsilon(ValueError):
    pass


def parse_theta(theta) -> Fraction | float:
    """Rational theta >= 0, or ``math.inf`` for the limit norm."""
    if isinstance(theta, float) and math.isinf(theta) and theta > 0:
        return INFINITY
    if isinstance(theta, str) and theta.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    if isinstance(theta, float):
        theta = Fraction(theta)
    try:
        value = parse_rational(theta)
    except ComplexError as exc:
        raise NegativeTheta(str(exc)) from exc
    if value < 0:
        raise NegativeTheta(f"theta must be >= 0, got {value}")
    return value


def theta_norm(X: FiniteChainComplex, chain: Mapping[str, Fraction], theta) -> Fraction | float:
    theta = parse_theta(theta)
    base = X.norm(chain)
    bd = X.norm(X.boundary_of(chain))
    if theta == INFINITY:
        return base if not bd else INFINITY
    return base + theta * bd


@dataclass(frozen=True)
class HomClass:
    pair: PairComplex
    chain: dict
    degree: int

    @classmethod
    def of(cls, pair: PairComplex | FiniteChainComplex, chain: Mapping, degree: int | None = None) -> "HomClass":
        if isinstance(pair, FiniteChainComplex):
            pair = PairComplex(pair, ())
        X = pair.X
        chain = X.chain(chain)
        n = X.chain_degree(chain, degree)
        if degree is not None and degree != n:
            raise ComplexError(f"chain has degree {n}, not {degree}")
        stray = [c for c in X.boundary_of(chain) if c not in pair.sub]
        if stray:
            where = "the subcomplex" if pair.sub else "zero"
            raise NotACycle(f"boundary is not in {where}: nonzero on {sorted(stray)}")
        return cls(pair, chain, n)

    @property
    def X(self) -> FiniteChainComplex:
        return self.pair.X


@dataclass(frozen=True)
class ConeClass:
    cone: MappingCone
    u: dict
    v: dict
    degree: int

    @classmethod
    def of(cls, pair: PairComplex, u: Mapping, v: Mapping, degree: int | None = None) -> "ConeClass":
        X = pair.X
        u = X.chain(u)
        v = X.chain(v)
        if any(c not in pair.sub for c in v):
            raise NotAConeCycle("the second component must be a chain of the subcomplex")
        if degree is not None:
            n = degree
        elif u:
            n = X.chain_degree(u)
        elif v:
            n = X.chain_degree(v) + 1
        else:
            raise ComplexError("the degree of the zero class must be given")
        if u and X.chain_degree(u) != n or v and X.chain_degree(v) != n - 1:
            raise NotAConeCycle("components have incompatible degrees")
        cone = pair.cone()
        if not cone.is_cycle(u, v):
            raise NotAConeCycle("not a cone cycle: the boundary of u must equal minus v")
        return cls(cone, u, v, n)


@dataclass
class SeminormResult:
    value: Fraction | float
    theta: Fraction | float
    representative: dict | None
    certificate: LPResult | None
    notes: list = field(default_factory=list)
    stages: list = field(default_factory=list)


def _check_theta_range(theta, notes: list) -> None:
    if theta != INFINITY and 0 < theta < 1:
        notes.append("theta < 1: outside the range theta >= 1 covered by the classical relative cone theory")


# -- direct route: chains c = z + db + y ------------------------------------------


def _relative_problem(cls: HomClass, boundary_weight, value_weight=1):
    """LP for min value_weight*|c| + boundary_weight*|dc| over representatives.

    Columns: c+ and c- on C_n(X), s on C_{n-1}(X) bounding |dc|, b (free) on
    C_{n+1}(X), y (free) on C_n(Y).
    """
    X, n = cls.X, cls.degree
    cells = X.basis(n)
    faces = X.basis(n - 1)
    fillers = X.basis(n + 1)
    ycells = cls.pair.sub_basis(n)
    col = {}
    names = []

    def add(name):
        col[name] = len(names)
        names.append(name)

    for c in cells:
        add(("c+", c))
        add(("c-", c))
    for f in faces:
        add(("s", f))
    for b in fillers:
        add(("b", b))
    for y in ycells:
        add(("y", y))
    free = {col[("b", b)] for b in fillers} | {col[("y", y)] for y in ycells}
    obj = [Fraction(0)] * len(names)
    for c in cells:
        obj[col[("c+", c)]] = obj[col[("c-", c)]] = value_weight * X.weights[c]
    for f in faces:
        obj[col[("s", f)]] = boundary_weight * X.weights[f]
    rows, senses, rhs = [], [], []
    # c+ - c- - db - y = z
    for c in cells:
        row = {col[("c+", c)]: Fraction(1), col[("c-", c)]: Fraction(-1)}
        if c in cls.pair.sub:
            row[col[("y", c)]] = Fraction(-1)
        rows.append(row)
        senses.append("=")
        rhs.append(cls.chain.get(c, Fraction(0)))
    for b in fillers:
        for c, v in X.d(b).items():
            rows[X.index[n][c]][col[("b", b)]] = -v
    # s >= +-(dc)
    bd_rows: dict[str, dict[int, Fraction]] = {f: {} for f in faces}
    for c in cells:
        for f, v in X.d(c).items():
            bd_rows[f][col[("c+", c)]] = v
            bd_rows[f][col[("c-", c)]] = -v
    for f in faces:
        for sgn in (1, -1):
            row = {k: sgn * v for k, v in bd_rows[f].items()}
            row[col[("s", f)]] = Fraction(1)
            rows.append(row)
            senses.append(">=")
            rhs.append(Fraction(0))
    return LPProblem(obj, rows, senses, rhs, free=free, names=names), col


def _read_chain(cls: HomClass, x, col) -> dict:
    out = {}
    for c in cls.X.basis(cls.degree):
        v = x[col[("c+", c)]] - x[col[("c-", c)]]
        if v:
            out[c] = v
    return out


def _solve(problem: LPProblem) -> LPResult:
    res = lp_solve(problem)
    if res.status != OPTIMAL:
        raise ArithmeticError(f"seminorm LP returned {res.status}; the objective is bounded below by 0")
    return res


def homology_seminorm(cls: HomClass, theta) -> SeminormResult:
    """Infimum of ``|c| + theta |dc|`` over the representatives ``c`` of ``cls``.

    With ``theta = inf`` the limit is computed lexicographically: first the
    least boundary mass, which must vanish for the limit to be finite, then
    the least norm among representatives of that boundary mass.
    """
    theta = parse_theta(theta)
    notes: list = []
    _check_theta_range(theta, notes)
    if theta != INFINITY:
        problem, col = _relative_problem(cls, theta)
        res = _solve(problem)
        rep = _read_chain(cls, res.x, col)
        value = res.value
        if value != theta_norm(cls.X, rep, theta):
            raise ArithmeticError("LP optimum disagrees with the recomputed norm of its representative")
        return SeminormResult(value, theta, rep, res, notes)

    first_problem, col = _relative_problem(cls, Fraction(1), value_weight=0)
    first = _solve(first_problem)
    if first.value > 0:
        notes.append(f"least boundary mass of a representative is {first.value}")
        return SeminormResult(INFINITY, theta, _read_chain(cls, first.x, col), first, notes, [first])
    problem, col = _relative_problem(cls, Fraction(0))
    for f in cls.X.basis(cls.degree - 1):
        problem.rows.append({col[("s", f)]: Fraction(1)})
        problem.senses.append("<=")
        problem.rhs.append(Fraction(0))
    res = _solve(problem)
    rep = _read_chain(cls, res.x, col)
    return SeminormResult(res.value, theta, rep, res, notes, [first, res])


# -- cone route: generic class LP on the mapping cone -------------------------------


def _class_lp(weights: list, rep: list, D: list[dict[int, Fraction]], nfill: int):
    """min sum w_k |x_k| with x = rep + D b; D given by columns (one dict per filler)."""
    m = len(rep)
    obj = [w for w in weights] + [w for w in weights] + [Fraction(0)] * nfill
    rows = [{k: Fraction(1), m + k: Fraction(-1)} for k in range(m)]
    for j, colmap in enumerate(D):
        for k, v in colmap.items():
            rows[k][2 * m + j] = -v
    free = set(range(2 * m, 2 * m + nfill))
    return LPProblem(obj, rows, ["="] * m, list(rep), free=free)


def cone_seminorm(cls: ConeClass, theta) -> SeminormResult:
    """Infimum of ``|u| + theta |v|`` over the cone class of ``(u, v)``."""
    theta = parse_theta(theta)
    if theta == INFINITY:
        raise NegativeTheta("the cone norm needs a finite theta")
    notes: list = []
    _check_theta_range(theta, notes)
    cone, n = cls.cone, cls.degree
    basis = cone.basis(n)
    index = {cell: k for k, cell in enumerate(basis)}
    fillers = cone.basis(n + 1)
    D = []
    for cell in fillers:
        D.append({index[f]: v for f, v in cone.d_cell(cell).items()})
    chain = cone.join(cls.u, cls.v)
    rep = [chain.get(cell, Fraction(0)) for cell in basis]
    weights = [cone.weight(cell, theta) for cell in basis]
    problem = _class_lp(weights, rep, D, len(fillers))
    res = _solve(problem)
    m = len(basis)
    best = {basis[k]: res.x[k] - res.x[m + k] for k in range(m) if res.x[k] - res.x[m + k]}
    if res.value != cone.norm(best, theta):
        raise ArithmeticError("LP optimum disagrees with the recomputed cone norm")
    return SeminormResult(res.value, theta, best, res, notes)


def beta_map(pair: PairComplex, direction: str, data):
    """``forward``: a cone cycle ``(u, v)`` to the relative class of ``u``.
    ``inverse``: a relative cycle ``u`` to the cone cycle ``(u, -du)``.
    """
    if direction == "forward":
        u, v = data
        try:
            cc = ConeClass.of(pair, u, v)
        except NotAConeCycle as exc:
            raise NotACycle(str(exc)) from exc
        return HomClass.of(pair, cc.u, cc.degree)
    if direction == "inverse":
        cls = data if isinstance(data, HomClass) else HomClass.of(pair, data)
        X = cls.X
        v = {c: -a for c, a in X.boundary_of(cls.chain).items()}
        return ConeClass.of(cls.pair, cls.chain, v, cls.degree)
    raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")


def is_cone_boundary(cone: MappingCone, chain: Mapping, degree: int) -> LPResult:
    """Feasibility LP: is ``chain`` in the image of the cone differential?"""
    basis = cone.basis(degree)
    index = {cell: k for k, cell in enumerate(basis)}
    fillers = cone.basis(degree + 1)
    rows = [dict() for _ in basis]
    for j, cell in enumerate(fillers):
        for f, v in cone.d_cell(cell).items():
            rows[index[f]][j] = v
    rhs = [Fraction(chain.get(cell, 0)) for cell in basis]
    if any(cell not in index for cell in chain if chain[cell]):
        raise ComplexError("chain has cells outside the given degree")
    problem = LPProblem([Fraction(0)] * len(fillers), rows, ["="] * len(basis), rhs, free=set(range(len(fillers))))
    return lp_solve(problem)


# -- dual route ---------------------------------------------------------------------------


@dataclass
class DualityResult:
    value: Fraction
    theta: Fraction
    witness: dict  # ("X", cell) -> f value, ("Y", cell) -> g value
    certificate: LPResult
    notes: list = field(default_factory=list)


def duality_max(cls: HomClass, theta) -> DualityResult:
    """Maximize the pairing with ``(z, -dz)`` over dual-cone cocycles of norm <= 1.

    Variables are ``f`` on ``C_n(X)`` with ``|f| <= w`` and ``g`` on
    ``C_{n-1}(Y)`` with ``|g| <= theta w``; cocycle conditions are
    ``f o d = 0`` on ``C_{n+1}(X)`` and ``f|_Y + g o d = 0`` on ``C_n(Y)``.
    """
    theta = parse_theta(theta)
    if theta == INFINITY:
        raise NegativeTheta("the dual norm needs a finite theta")
    notes: list = []
    _check_theta_range(theta, notes)
    X, n, pair = cls.X, cls.degree, cls.pair
    fcells = X.basis(n)
    gcells = pair.sub_basis(n - 1)
    col = {("X", c): k for k, c in enumerate(fcells)}
    col.update({("Y", c): len(fcells) + k for k, c in enumerate(gcells)})
    nv = len(col)
    bd = X.boundary_of(cls.chain)
    obj = [Fraction(0)] * nv
    for c, a in cls.chain.items():
        obj[col[("X", c)]] = a
    # pairing f(u) - g(v) with v = -dz
    for c, a in bd.items():
        obj[col[("Y", c)]] += a
    rows, senses, rhs = [], [], []
    for c in fcells:
        for sgn in (1, -1):
            rows.append({col[("X", c)]: Fraction(sgn)})
            senses.append("<=")
            rhs.append(X.weights[c])
    for c in gcells:
        for sgn in (1, -1):
            rows.append({col[("Y", c)]: Fraction(sgn)})
            senses.append("<=")
            rhs.append(theta * X.weights[c])
    for b in X.basis(n + 1):
        row = {col[("X", c)]: v for c, v in X.d(b).items()}
        if row:
            rows.append(row)
            senses.append("=")
            rhs.append(Fraction(0))
    for y in pair.sub_basis(n):
        row = {col[("X", y)]: Fraction(1)}
        for c, v in X.d(y).items():
            row[col[("Y", c)]] = row.get(col[("Y", c)], 0) + v
        rows.append(row)
        senses.append("=")
        rhs.append(Fraction(0))
    problem = LPProblem(obj, rows, senses, rhs, free=set(range(nv)), maximize=True)
    res = _solve(problem)
    witness = {key: res.x[k] for key, k in col.items() if res.x[k]}
    dual = DualCone(pair.cone(), theta)
    if dual.differential(witness):
        raise ArithmeticError("witness is not a cocycle")
    if dual.norm(witness) > 1:
        raise ArithmeticError("witness has norm above one")
    if dual.pair(witness, MappingCone.join(cls.chain, {c: -a for c, a in bd.items()})) != res.value:
        raise ArithmeticError("witness pairing disagrees with the LP value")
    return DualityResult(res.value, theta, witness, res, notes)


# -- representatives with small boundary ------------------------------------------------------


@dataclass
class ThurstonResult:
    status: str
    chain: dict
    epsilon: Fraction
    theta: Fraction
    class_norm: Fraction
    chain_norm: Fraction
    boundary_norm: Fraction
    theta_value: Fraction

    @property
    def ok(self) -> bool:
        return self.status == SUCCESS


def thurston_representative(cls: HomClass, epsilon) -> ThurstonResult:
    """Pick a representative with norm close to the class norm and small boundary.

    With ``a`` the theta = 0 seminorm, minimizes the ``(a + eps) / eps``
    norm. Success means ``|c| <= a + eps`` and ``|dc| <= eps``; otherwise the
    minimizer is returned with status ``NOT_GUARANTEED``.
    """
    try:
        eps = parse_rational(epsilon)
    except ComplexError as exc:
        raise NonpositiveEpsilon(str(exc)) from exc
    if eps <= 0:
        raise NonpositiveEpsilon(f"epsilon must be positive, got {eps}")
    base = homology_seminorm(cls, 0).value
    theta = (base + eps) / eps
    res = homology_seminorm(cls, theta)
    c = res.representative
    cn = cls.X.norm(c)
    bn = cls.X.norm(cls.X.boundary_of(c))
    status = SUCCESS if cn <= base + eps and bn <= eps else NOT_GUARANTEED
    return ThurstonResult(status, c, eps, theta, base, cn, bn, res.value)


def class_from_dict(doc: Mapping) -> HomClass:
    """``{"complex": ..., "subcomplex": [...], "cycle": {cell: "p/q"}}``."""
    pair = PairComplex.from_dict(doc)
    if "cycle" not in doc:
        raise ComplexError("document has no 'cycle'")
    return HomClass.of(pair, {c: parse_rational(v) for c, v in doc["cycle"].items()}, doc.get("degree"))


def cone_class_from_dict(doc: Mapping) -> ConeClass:
    """Reads ``"cone_cycle": {"u": ..., "v": ...}``, or builds ``(z, -dz)`` from ``"cycle"``."""
    pair = PairComplex.from_dict(doc)
    if "cone_cycle" in doc:
        cc = doc["cone_cycle"]
        u = {c: parse_rational(v) for c, v in cc.get("u", {}).items()}
        v = {c: parse_rational(x) for c, x in cc.get("v", {}).items()}
        return ConeClass.of(pair, u, v, doc.get("degree"))
    return beta_map(pair, "inverse", class_from_dict(doc))
