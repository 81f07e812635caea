import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gogtools import instances
from gogtools.acceptance import _random_pair
from gogtools.linalg import nullspace
from gogtools.seminorm import (
    NOT_GUARANTEED,
    SUCCESS,
    ConeClass,
    DualCone,
    HomClass,
    NonpositiveEpsilon,
    NotAConeCycle,
    NotACycle,
    PairComplex,
    beta_map,
    class_from_dict,
    cone_class_from_dict,
    cone_seminorm,
    duality_max,
    homology_seminorm,
    is_cone_boundary,
    simplicial_complex,
    thurston_representative,
)
from gogtools.seminorm.lp import INFEASIBLE, OPTIMAL


def load(name):
    return class_from_dict(instances.data_json(name))


def test_fixed_values():
    assert homology_seminorm(load("circle"), 0).value == 3
    assert homology_seminorm(load("simplex2"), 0).value == 1
    assert homology_seminorm(load("torus7"), 0).value == 14


def test_torus_has_one_dimensional_cycles():
    X = load("torus7").X
    assert X.dim(3) == 0
    assert len(nullspace(X.matrix(2), X.dim(2))) == 1
    assert X.dim(2) == 14


def test_certificate_and_representative_agree():
    for name in instances.COMPLEXES:
        cls = load(name)
        for theta in (0, Fraction(1, 2), 3):
            res = homology_seminorm(cls, theta)
            assert res.certificate.status == OPTIMAL
            assert res.certificate.value == res.value
            rep = res.representative
            assert cls.pair.is_relative_cycle(rep)
            assert cls.X.theta_norm(rep, theta) == res.value


def _uw_by_hand(theta, w_weight):
    # representatives are u + lam w; the class norm is a minimum over a fine grid of lam
    grid = [Fraction(k, 8) for k in range(-24, 25)]
    return min(1 + w_weight * abs(lam) + theta * abs(1 + lam) for lam in grid)


@pytest.mark.parametrize("theta", [Fraction(0), Fraction(1, 3), Fraction(1), Fraction(3), Fraction(7, 2)])
def test_uw_against_hand_enumeration(theta):
    cls = load("uw")
    assert homology_seminorm(cls, theta).value == _uw_by_hand(theta, 1)
    cone = cone_class_from_dict(instances.data_json("uw"))
    if theta:
        assert cone_seminorm(cone, theta).value == _uw_by_hand(theta, 1)
    weighted = load("uw_weighted")
    assert homology_seminorm(weighted, theta).value == _uw_by_hand(theta, Fraction(2, 5))


def test_cone_examples():
    cone = cone_class_from_dict(instances.data_json("uw"))
    assert cone_seminorm(cone, 3).value == 2
    simplex = load("simplex2")
    cc = beta_map(simplex.pair, "inverse", simplex)
    assert cone_seminorm(cc, 1).value == homology_seminorm(simplex, 1).value == 4
    zero = ConeClass.of(simplex.pair, {}, {}, 2)
    assert cone_seminorm(zero, 1).value == 0


def test_not_a_cone_cycle():
    pair = PairComplex.from_dict(instances.data_json("uw"))
    with pytest.raises(NotAConeCycle):
        ConeClass.of(pair, {"u": 1}, {})
    with pytest.raises(NotAConeCycle):
        ConeClass.of(pair, {"u": 1}, {"y": 1})


def test_not_a_cycle():
    X = simplicial_complex([[0, 1, 2]])
    (top,) = X.basis(2)
    with pytest.raises(NotACycle):
        HomClass.of(X, {top: 1})


def test_theta_below_one_is_flagged():
    res = homology_seminorm(load("uw"), Fraction(1, 2))
    assert res.notes and "theta < 1" in res.notes[0]
    assert not homology_seminorm(load("uw"), 1).notes


def test_infinite_theta():
    assert homology_seminorm(load("uw"), "inf").value == 2
    assert homology_seminorm(load("simplex2"), "inf").value == math.inf
    assert homology_seminorm(load("circle"), "inf").value == 3


def test_beta_map_round_trip():
    pair = PairComplex.from_dict(instances.data_json("uw"))
    cls = HomClass.of(pair, {"u": 1})
    cc = beta_map(pair, "inverse", cls)
    assert (cc.u, cc.v) == ({"u": 1}, {"y": -1})
    back = beta_map(pair, "forward", (cc.u, cc.v))
    assert back.chain == cls.chain
    # a different representative of the same cone class: (u - w, 0)
    other = beta_map(pair, "inverse", HomClass.of(pair, {"u": 1, "w": -1}))
    assert other.v == {}
    diff = {("X", "u"): 0, ("X", "w"): 1, ("Y", "y"): -1}
    diff = {k: v for k, v in diff.items() if v}
    assert is_cone_boundary(pair.cone(), diff, 2).status == OPTIMAL
    assert is_cone_boundary(pair.cone(), {("X", "u"): 1}, 2).status == INFEASIBLE


def test_beta_inverse_of_absolute_cycle():
    circle = load("circle")
    cc = beta_map(circle.pair, "inverse", circle)
    assert cc.u == circle.chain and cc.v == {}


def test_duality_examples():
    circle = load("circle")
    d = duality_max(circle, 0)
    assert d.value == 3
    # one unit per oriented edge of the loop
    assert all(d.witness[("X", c)] * a == 1 for c, a in circle.chain.items())
    torus = load("torus7")
    d = duality_max(torus, 0)
    assert d.value == 14
    assert all(abs(d.witness[("X", c)]) == 1 for c in torus.chain)
    zero = HomClass.of(circle.pair, {}, 1)
    assert duality_max(zero, 0).value == 0
    assert homology_seminorm(zero, 2).value == 0


def test_duality_witness_is_a_unit_cocycle():
    cls = load("uw_weighted")
    for theta in (Fraction(1, 2), Fraction(3)):
        d = duality_max(cls, theta)
        dual = DualCone(cls.pair.cone(), theta)
        assert not any(dual.differential(d.witness).values())
        assert dual.norm(d.witness) <= 1
        assert d.value == homology_seminorm(cls, theta).value


def test_thurston_examples():
    t = thurston_representative(load("uw_weighted"), Fraction(1, 2))
    assert t.status == SUCCESS and t.theta == 3
    assert t.chain == {"u": 1, "w": -1}
    assert t.chain_norm == Fraction(7, 5) and t.boundary_norm == 0
    rigid = thurston_representative(load("simplex2"), 1)
    assert rigid.status == NOT_GUARANTEED and rigid.boundary_norm == 3 and rigid.chain_norm == 1
    circle = thurston_representative(load("circle"), Fraction(1, 10))
    assert circle.ok and circle.boundary_norm == 0 and circle.chain == load("circle").chain
    with pytest.raises(NonpositiveEpsilon):
        thurston_representative(load("circle"), 0)


random_class = st.integers(0, 10**6).map(lambda s: _random_pair(random.Random(s)))


@settings(max_examples=25)
@given(random_class, st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3)]))
def test_cone_equals_relative(cls, theta):
    cone = beta_map(cls.pair, "inverse", cls)
    assert cone_seminorm(cone, theta).value == homology_seminorm(cls, theta).value


@settings(max_examples=25)
@given(random_class, st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3)]))
def test_duality_equals_relative(cls, theta):
    assert duality_max(cls, theta).value == homology_seminorm(cls, theta).value


@settings(max_examples=25)
@given(random_class)
def test_monotone_in_theta(cls):
    thetas = [Fraction(0), Fraction(1, 4), Fraction(1), Fraction(2), Fraction(5)]
    values = [homology_seminorm(cls, t).value for t in thetas]
    assert values == sorted(values)
    top = homology_seminorm(cls, "inf").value
    assert values[-1] <= top
    # the value at 0 is the plain quotient norm: no representative beats it
    assert values[0] <= cls.X.norm(cls.chain)
