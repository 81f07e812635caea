import copy
from fractions import Fraction

import pytest

from gogtools import instances
from gogtools.linalg import nullspace
from gogtools.seminorm import FiniteChainComplex, PairComplex, simplicial_complex
from gogtools.seminorm.complexes import closure
from gogtools.seminorm.glue import InterfaceMismatch, Interface, Piece, Unfillable, glue_assemble, load_glue


def glue(name):
    return glue_assemble(*load_glue(instances.data_json(name)))


def test_segments():
    res = glue("segments_glue")
    assert res.correction == {}
    assert res.cycle == {"0.[a,b]": 1, "1.[b,c]": 1}
    assert res.pair.is_relative_cycle(res.cycle)
    assert res.cycle_norm == 2


def test_square():
    res = glue("square_glue")
    assert res.correction == {}
    assert res.cycle == {"0.[0,1,2]": 1, "1.[0,2,3]": 1}
    assert res.pair.is_relative_cycle(res.cycle)
    # the shared edge is interior after gluing, the other four are exterior
    assert "0.[0,2]" not in res.pair.sub
    assert len(res.pair.sub_basis(1)) == 4


def test_annulus():
    pieces, faces, degree = load_glue(instances.data_json("annulus_glue"))
    res = glue_assemble(pieces, faces, degree)
    assert res.correction and res.correction_norm == 6
    assert res.pair.is_relative_cycle(res.cycle)
    total = sum((p.pair.X.norm(p.cycle) for p in pieces), Fraction(0))
    assert res.cycle_norm <= total + res.correction_norm
    cert = res.certificate
    assert cert.status == "OPTIMAL" and cert.value == res.correction_norm
    X = res.pair.X
    dc = X.boundary_of(res.correction)
    dchain = X.boundary_of(res.chain)
    for f in X.basis(degree - 1):
        if f not in res.pair.sub:
            assert dc.get(f, 0) == dchain.get(f, 0)


def test_annulus_correction_is_forced():
    res = glue("annulus_glue")
    X = res.pair.X
    rows = [f for f in X.basis(res.degree - 1) if f not in res.pair.sub]
    M = [[X.d(c).get(f, 0) for c in res.interface] for f in rows]
    assert nullspace(M, len(res.interface)) == []


def _segment():
    X = simplicial_complex([["a", "b"]])
    return Piece(PairComplex(X, closure(X, ["[a]", "[b]"])), {"[a,b]": Fraction(1)})


def test_unfillable():
    # two segments glued at both ends: the boundaries add up instead of cancelling
    faces = [Interface(0, 1, {"[a]": ("[a]", 1), "[b]": ("[b]", 1)})]
    with pytest.raises(Unfillable):
        glue_assemble([_segment(), _segment()], faces)


def test_opposite_segments_close_up():
    # reversing one segment through the cycle turns the same gluing into a circle
    flipped = _segment()
    flipped.cycle = {"[a,b]": Fraction(-1)}
    faces = [Interface(0, 1, {"[a]": ("[a]", 1), "[b]": ("[b]", 1)})]
    res = glue_assemble([_segment(), flipped], faces)
    assert res.correction == {} and res.pair.X.boundary_of(res.cycle) == {}


def test_interface_must_commute_with_boundary():
    doc = copy.deepcopy(instances.data_json("square_glue"))
    doc["interfaces"][0]["cells"][0][2] = -1
    with pytest.raises(InterfaceMismatch):
        glue_assemble(*load_glue(doc))


def test_interface_must_be_injective():
    doc = copy.deepcopy(instances.data_json("square_glue"))
    doc["interfaces"][0]["cells"][2][1] = "[0]"
    with pytest.raises(InterfaceMismatch):
        glue_assemble(*load_glue(doc))


def test_interface_degrees_and_faces():
    seg = _segment()
    with pytest.raises(InterfaceMismatch):
        glue_assemble([seg, seg], [Interface(0, 1, {"[a]": ("[b]", 1), "[b]": ("[a]", 1), "[a,b]": ("[a]", 1)})])
    with pytest.raises(InterfaceMismatch):
        glue_assemble([seg, seg], [Interface(0, 1, {"[a,b]": ("[a,b]", 1)})])
    with pytest.raises(InterfaceMismatch):
        glue_assemble([seg, seg], [Interface(0, 2, {"[a]": ("[a]", 1)})])


def test_interface_weights_must_agree():
    X = simplicial_complex([["a", "b"]])
    heavy = FiniteChainComplex(X.bases, X.boundary, {"[a]": 2})
    other = Piece(PairComplex(heavy, closure(heavy, ["[a]", "[b]"])), {"[a,b]": Fraction(1)})
    with pytest.raises(InterfaceMismatch):
        glue_assemble([_segment(), other], [Interface(0, 1, {"[a]": ("[a]", 1)})])
