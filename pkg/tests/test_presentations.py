import itertools

import pytest
from hypothesis import given, strategies as st

from gogtools import instances
from gogtools.groups import UnknownGenerator
from gogtools.presentations import GraphMismatch, GraphOfGroups, coset_rep, in_site_group, multiply


def test_free_reduction_to_identity(zz):
    assert zz.word([("a", 1), ("b", 1), ("b", -1), ("a", -1)]).is_identity


def test_trefoil_relation(trefoil):
    assert trefoil.word([("x", 2)]) == trefoil.word([("y", 3)])
    assert trefoil.word([("x", 1)]) * trefoil.word([("x", 1)]) == trefoil.word([("y", 3)])


def test_bs12_conjugation_convention(bs12):
    a = bs12.word([("a", 1)])
    e = bs12.word([("e", 1)])
    assert e * a * e.inverse() == bs12.word([("a", 2)])
    assert e.inverse() * bs12.word([("a", 2)]) * e == a
    assert e.inverse() * a * e != bs12.word([("a", 2)])


def test_multiply_examples(zz):
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    assert (a * a.inverse()).is_identity
    assert multiply(a * b, b.inverse() * a) == zz.word([("a", 2)])


def test_multiply_rejects_other_graph(zz, trefoil):
    with pytest.raises(GraphMismatch):
        multiply(zz.word([("a", 1)]), trefoil.word([("x", 1)]))


def test_unknown_generator(zz):
    with pytest.raises(UnknownGenerator):
        zz.word([("q", 1)])


def test_coset_rep_examples(zz):
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    assert coset_rep(zz.identity(), "v").is_identity
    assert coset_rep(a * b, "w") == a
    assert coset_rep(a * a * a, "v").is_identity


def test_coset_rep_is_shortlex_minimal_in_coset(zz):
    # brute force: members g*h for h in Gamma_w within bounds
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    g = a * b
    members = [g * zz.word([("b", k)]) for k in range(-4, 5)]
    best = min(members, key=lambda x: x.key())
    assert coset_rep(g, "w") == best


def test_enumerate_small(zz, trefoil):
    assert [str(x) for x in zz.enumerate_elements(0, 3)] == ["1"]
    assert {str(x) for x in zz.enumerate_elements(1, 1)} == {"1", "a", "a^-1", "b", "b^-1"}
    els = trefoil.enumerate_elements(1, 2)
    assert len(set(els)) == len(els)
    assert len(els) == 9


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_enumeration_is_distinct_and_shortlex(name):
    G = instances.graph(name)
    els = G.enumerate_elements(2, 2)
    assert len(set(els)) == len(els)
    keys = [x.key() for x in els]
    assert keys == sorted(keys)


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_group_laws_and_cosets(name):
    G = instances.graph(name)
    els = G.enumerate_elements(2, 1)[:25]
    one = G.identity()
    for x in els:
        assert x * one == x == one * x
        assert (x * x.inverse()).is_identity
        for site in list(G.vertices) + G.geometric_edges:
            rep = coset_rep(x, site)
            assert coset_rep(rep, site) == rep
            assert in_site_group(rep.inverse() * x, site)
    for x, y, z in itertools.islice(itertools.product(els, repeat=3), 2000):
        assert (x * y) * z == x * (y * z)


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_json_round_trip_is_bit_exact(name):
    text = instances.data_text(name)
    G = GraphOfGroups.loads(text)
    assert G.dumps() == GraphOfGroups.loads(G.dumps()).dumps()
    assert GraphOfGroups.loads(G.dumps()).to_dict() == G.to_dict()


def _words(alphabet):
    letter = st.tuples(st.sampled_from(alphabet), st.integers(-3, 3).filter(bool))
    return st.lists(letter, max_size=6)


@pytest.mark.parametrize("name", instances.GRAPHS)
@given(data=st.data())
def test_normal_form_idempotent_and_inverse(name, data):
    G = instances.graph(name)
    w = data.draw(_words(G.display_alphabet))
    g = G.word(w)
    assert G.word(g.word()) == g
    assert (g * g.inverse()).is_identity
    inv = [(x, -k) for x, k in reversed(w)]
    assert G.word(w + inv).is_identity


def test_path_words(zz):
    from gogtools.presentations import VertexMismatch, normal_form

    g = normal_form(zz, [[["a", 1]], "e", [["b", 2]], "E", [["a", -1]]])
    assert g == zz.word([("a", 1), ("b", 2), ("a", -1)])
    assert normal_form(zz, [[["a", 1]], "e", [], "E", [["a", -1]]]).is_identity
    with pytest.raises(VertexMismatch):
        normal_form(zz, [[["b", 1]]])
    with pytest.raises(VertexMismatch):
        normal_form(zz, [[], "e", []])
