from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gogtools.basserre import GroupPoint, TreeVertex, barycenter, project
from gogtools.quasimorphism import (
    NotOdd,
    OddBoundedFunction,
    alpha,
    clamp_function,
    defect,
    defect_bruteforce,
    diagram_check,
    homogenize,
    inhomogeneous_coboundary,
    parity_window,
    rolli_R,
    rolli_R_oracle,
    sign_function,
    tabulated_odd,
    zero_function,
)
from gogtools.transplant import NotFreeProduct


@pytest.fixture(scope="module")
def sgn_a(zz):
    return {"v": sign_function(zz, "v"), "w": zero_function("w")}


def W(G, *letters):
    return G.word(list(letters))


def test_alpha_examples(zz, sgn_a):
    assert alpha(sgn_a, zz.identity()) == 0
    assert alpha(sgn_a, W(zz, ("a", 1), ("b", 1), ("a", -2))) == 0
    assert alpha(sgn_a, W(zz, ("a", 1), ("b", 1))) == 1


def test_rolli_examples(zz, sgn_a):
    a = W(zz, ("a", 1))
    assert rolli_R(sgn_a, a, a.inverse()) == 0
    assert rolli_R(sgn_a, a, a) == 1
    x, y = W(zz, ("a", 1), ("b", 1)), W(zz, ("b", -1), ("a", 1))
    assert x * y == W(zz, ("a", 2))
    assert rolli_R(sgn_a, x, y) == 1


def test_rejects_amalgams(trefoil):
    fam = {v: sign_function(trefoil, v) for v in trefoil.vertices}
    with pytest.raises(NotFreeProduct):
        defect(trefoil, fam, 1, 1)
    with pytest.raises(NotFreeProduct):
        diagram_check(trefoil, fam, [])


def test_oddness_is_enforced(zz):
    with pytest.raises(NotOdd):
        tabulated_odd(zz, "v", {((0, 1),): 1, ((0, -1),): 1})
    even = OddBoundedFunction("v", lambda g: 1, Fraction(1), "even")
    G = zz.groups["v"]
    with pytest.raises(NotOdd):
        even.check(G, list(G.elements(1, 2)))
    for f in (sign_function(zz, "v"), clamp_function(zz, "v", 2), parity_window(zz, "v", 3)):
        f.check(G, list(G.elements(1, 4)))
        assert f(G.identity) == 0


def test_homogenize(zz, sgn_a):
    mul = lambda x, y: x * y  # noqa: E731
    inv = lambda x: x.inverse()  # noqa: E731
    a = W(zz, ("a", 1))
    h1 = homogenize(lambda x: alpha(sgn_a, x), 1, inv, mul)
    assert h1(zz.identity(), a) == alpha(sgn_a, a)
    R = lambda x, y: rolli_R(sgn_a, x, y)  # noqa: E731
    h2 = homogenize(R, 2, inv, mul)
    els = zz.enumerate_elements(2, 1)
    g = W(zz, ("b", 2), ("a", -1))
    for x in els[:12]:
        for y in els[:12]:
            assert h2(zz.identity(), x, x * y) == R(x, y)
            assert h2(g, g * x, g * x * y) == R(x, y)


def test_defect_values(zz, sgn_a):
    zero = {"v": zero_function("v"), "w": zero_function("w")}
    assert defect(zz, zero, 2, 2) == 0
    assert defect(zz, sgn_a, 6, 3) == 1
    both = {v: sign_function(zz, v) for v in zz.vertices}
    assert defect(zz, both, 6, 3) == 1
    assert defect_bruteforce(zz, both, 2, 3) == 1


def test_defect_monotone_and_bounded(zz):
    fam = {v: clamp_function(zz, v, 2) for v in zz.vertices}
    values = [defect(zz, fam, 1, e) for e in range(1, 6)]
    assert values == sorted(values)
    assert values[-1] <= 3
    assert defect_bruteforce(zz, fam, 2, 3) == defect(zz, fam, 1, 3)


def test_diagram_examples(zz, sgn_a):
    one, a = zz.identity(), W(zz, ("a", 1))
    assert barycenter([project(GroupPoint(g, "v")) for g in (one, a, a * a)]) == TreeVertex.root(zz)
    assert rolli_R(sgn_a, a, a) == 1
    report = diagram_check(zz, sgn_a, [(one, a, a * a), (one, a, a * W(zz, ("b", 1))), (one, a, a), (a, a, one)])
    assert report.ok, report.failures
    assert report.barycenter_checked > 0
    assert rolli_R(sgn_a, a, one) == 0


def test_diagram_exhaustive_small(zz):
    fam = {v: clamp_function(zz, v, 2) for v in zz.vertices}
    els = zz.enumerate_elements(2, 1)
    one = zz.identity()
    report = diagram_check(zz, fam, [(one, x, y) for x in els for y in els], sites=["v", "w"])
    assert report.ok


def _element(zz):
    letter = st.tuples(st.sampled_from(["a", "b"]), st.integers(-3, 3).filter(bool))
    return st.lists(letter, max_size=5).map(zz.word)


@given(st.data())
def test_rolli_cocycle_and_formula(zz, data):
    fam = {"v": clamp_function(zz, "v", 2), "w": sign_function(zz, "w")}
    x, y, z = (data.draw(_element(zz)) for _ in range(3))
    R = lambda p, q: rolli_R(fam, p, q)  # noqa: E731
    dR = inhomogeneous_coboundary(R, 2, lambda p, q: p * q)
    assert dR(x, y, z) == 0
    assert R(x, y) == rolli_R_oracle(fam, x, y)
    assert abs(R(x, y)) <= 3
    assert alpha(fam, x.inverse()) == -alpha(fam, x)
