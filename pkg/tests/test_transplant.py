import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gogtools import instances
from gogtools.acceptance import chain_map_pool
from gogtools.basserre import GroupPoint, TreeVertex, ball, translate
from gogtools.transplant import (
    Cochain,
    DegreeTooLow,
    HashedCochain,
    NotFreeProduct,
    SvElement,
    TabulatedCochain,
    alternate,
    check_invariance,
    coboundary,
    edge_point,
    family_bound,
    mu_free_pullback,
    phi_pullback,
    psi,
    psi_eval,
    psi_locate,
    psi_terms,
    retraction_identity,
    sv_coset,
    sv_points,
    verify_chain_map,
    zero_cochain,
)


def elem(G, word, v):
    return G.vertex_element(G.word(word), v)


def test_alternate_examples():
    one = Cochain(2, lambda *p: 1, 1)
    alt = alternate(one)
    assert all(alt(*t) == 0 for t in itertools.product(range(3), repeat=3))
    g = {0: Fraction(1), 1: Fraction(5), 2: Fraction(-2)}
    f = Cochain(1, lambda x, y: g[x], 5)
    af = alternate(f)
    for x, y in itertools.product(range(3), repeat=2):
        assert af(x, y) == (g[x] - g[y]) / 2
    again = alternate(af)
    for t in itertools.product(range(3), repeat=2):
        assert again(*t) == af(*t)
    assert af.bound <= f.bound


@given(st.lists(st.integers(-5, 5), min_size=27, max_size=27))
def test_alternation_is_alternating(values):
    table = dict(zip(itertools.product(range(3), repeat=3), values))
    af = alternate(Cochain(2, lambda *p: table[p], 5))
    for t in itertools.product(range(3), repeat=3):
        assert af(t[1], t[0], t[2]) == -af(*t)
        if len(set(t)) < 3:
            assert af(*t) == 0


def test_coboundary_squares_to_zero():
    table = {t: Fraction(random.Random(str(t)).randint(-3, 3)) for t in itertools.product(range(4), repeat=2)}
    f = Cochain(1, lambda *p: table[p], 3)
    ddf = coboundary(coboundary(f))
    assert all(ddf(*t) == 0 for t in itertools.product(range(4), repeat=4))


def test_tabulated_cochain_alternates(zz):
    pts = sv_points(zz, "v", 1, 2)
    f = TabulatedCochain(zz, "v", 2)
    x, y, z = pts[1], pts[2], pts[5]
    f.set((x, y, z), Fraction(3, 7))
    assert f(x, y, z) == Fraction(3, 7)
    assert f(y, x, z) == Fraction(-3, 7)
    assert f(z, x, y) == Fraction(3, 7)
    assert f(x, x, z) == 0
    assert f.bound == Fraction(3, 7)


def test_tabulated_cochain_is_invariant(zz):
    f = TabulatedCochain(zz, "v", 2)
    pts = sv_points(zz, "v", 1, 3)
    f.set(pts[:3], 2)
    a = elem(zz, [("a", 1)], "v")
    from gogtools.transplant import sv_act

    for tup in itertools.permutations(pts[:4], 3):
        assert f(*(sv_act(zz, a, p) for p in tup)) == f(*tup)


def test_phi_pullback_of_zero(zz):
    z = phi_pullback(zz, "v", zero_cochain(2))
    pts = sv_points(zz, "v", 1, 2)
    assert all(z(*t) == 0 for t in itertools.combinations(pts, 3))


def test_psi_inside_one_vertex_group(zz):
    words = [[], [("a", 2)], [("a", -1)]]
    gs = [zz.word(w) for w in words]
    local = [SvElement("v", zz.vertex_element(g, "v")) for g in gs]
    fam = {v: TabulatedCochain(zz, v, 2) for v in zz.vertices}
    fam["v"].set(local, Fraction(-2, 3))
    pts = tuple(GroupPoint(g, "v") for g in gs)
    direct = fam["v"](*local)
    assert direct == Fraction(-2, 3)
    assert psi_eval(fam, pts) == direct


def test_psi_no_barycenter_is_zero(zz):
    fam = {v: HashedCochain(zz, v, 2, seed=5) for v in zz.vertices}
    one = zz.identity()
    e = edge_point(one, "e")
    assert psi_locate((GroupPoint(one, "v"), e, e)) is None
    assert psi_eval(fam, (GroupPoint(one, "v"), e, e)) == 0


def test_psi_retracts_to_edge_coset(zz):
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    one = zz.identity()
    pts = (GroupPoint(one, "v"), GroupPoint(a, "v"), GroupPoint(a * b, "w"))
    w, located = psi_locate(pts)
    a_v = zz.vertex_element(a, "v")
    coset = sv_coset(zz, "E", a_v)
    assert w == TreeVertex.root(zz)
    assert located == (SvElement("v", zz.vertex_element(one, "v")), SvElement("v", a_v), coset)
    fam = {v: HashedCochain(zz, v, 2, seed=9) for v in zz.vertices}
    assert psi_eval(fam, pts) == fam["v"](*located)


def test_degree_too_low(zz):
    fam = {v: HashedCochain(zz, v, 1, seed=0) for v in zz.vertices}
    one = zz.identity()
    with pytest.raises(DegreeTooLow):
        psi_eval(fam, (GroupPoint(one, "v"), GroupPoint(one, "w")))
    with pytest.raises(DegreeTooLow):
        psi(fam, 1)
    with pytest.raises(DegreeTooLow):
        verify_chain_map(fam, 1, [])


def test_mu_free_pullback(zz, trefoil):
    const = mu_free_pullback(zz, Cochain(0, lambda g: 1, 1))
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    assert const(GroupPoint(a, "w")) == 1
    eq = mu_free_pullback(zz, Cochain(1, lambda x, y: int(x == y), 1))
    assert eq(GroupPoint(a, "v"), GroupPoint(a, "w")) == 1
    assert eq(GroupPoint(a, "v"), edge_point(a, "e")) == 1
    assert eq(GroupPoint(a, "v"), GroupPoint(b, "v")) == 0
    with pytest.raises(NotFreeProduct):
        mu_free_pullback(trefoil, Cochain(0, lambda g: 1, 1))


def test_verify_zero_family(zz):
    fam = {v: zero_cochain(2) for v in zz.vertices}
    pool = chain_map_pool(zz)[:8]
    report = verify_chain_map(fam, 2, itertools.combinations(pool, 4))
    assert report.ok and report.checked == 70


def test_verify_tabulated_family_exhaustive(zz):
    fam = {}
    rng = random.Random(3)
    for v in zz.vertices:
        f = TabulatedCochain(zz, v, 2)
        pts = sv_points(zz, v, 1, 2)
        for tup in itertools.combinations(pts, 3):
            try:
                f.set(tup, Fraction(rng.randint(-4, 4), 4))
            except ValueError:
                pass
        fam[v] = f
    one = zz.identity()
    els = zz.enumerate_elements(1, 1)
    pool = [GroupPoint(g, v) for g in els for v in zz.vertices] + [edge_point(one, "e")]
    report = verify_chain_map(fam, 2, itertools.combinations(pool, 4), family_bound(fam))
    assert report.ok, report.counterexamples[:3]
    assert report.checked == 330


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_chain_map_on_samples(name):
    G = instances.graph(name)
    fam = {v: HashedCochain(G, v, 2, seed=11) for v in G.vertices}
    pool = chain_map_pool(G)
    rng = random.Random(name)
    tuples = [tuple(rng.choice(pool) for _ in range(4)) for _ in range(300)]
    report = verify_chain_map(fam, 2, tuples)
    assert report.ok
    assert report.max_abs <= 1


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_psi_is_equivariant(name):
    G = instances.graph(name)
    fam = {v: HashedCochain(G, v, 2, seed=2) for v in G.vertices}
    pool = chain_map_pool(G)
    rng = random.Random(f"inv{name}")
    samples = [(rng.choice(G.enumerate_elements(2, 2)), tuple(rng.choice(pool) for _ in range(3))) for _ in range(200)]
    assert check_invariance(fam, 2, samples) == []


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_retraction_identity_small(name):
    G = instances.graph(name)
    for v in G.vertices:
        pts = sv_points(G, v, 1, 2)
        assert retraction_identity(G, v, itertools.product(pts, repeat=3)) == []
        fam = {u: HashedCochain(G, u, 2, seed=4) for u in G.vertices}
        back = phi_pullback(G, v, psi(fam, 2))
        for tup in itertools.permutations(pts, 3):
            assert back(*tup) == fam[v](*tup)


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_at_most_one_term(name):
    G = instances.graph(name)
    fam = {v: HashedCochain(G, v, 3, seed=8) for v in G.vertices}
    from gogtools.basserre import EdgePoint

    nodes = ball(G, 3)
    pts = [EdgePoint(n) if n.is_edge else GroupPoint(n.rep, n.site) for n in nodes]
    for tup in itertools.combinations_with_replacement(pts, 4):
        terms = psi_terms(fam, tup)
        assert len(terms) <= 1
        assert sum(terms.values(), Fraction(0)) == psi_eval(fam, tup)


def test_translate_moves_points(zz):
    a = zz.word([("a", 1)])
    assert translate(a, GroupPoint(zz.identity(), "w")) == GroupPoint(a, "w")
