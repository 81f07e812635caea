import itertools

import networkx as nx
import pytest

from gogtools import instances
from gogtools.basserre import (
    EdgePoint,
    GroupPoint,
    TreeEdgeVertex,
    TreeVertex,
    ball,
    barycenter,
    barycenters,
    distance,
    geodesic,
    in_star,
    project,
    retract_point,
    star,
    tprime_neighbours,
    translate,
)
from gogtools.presentations import GraphMismatch


def ball_graph(G, radius, syl=1, exp=1):
    nodes = ball(G, radius, syl, exp)
    inside = set(nodes)
    T = nx.Graph()
    T.add_nodes_from(nodes)
    for x in nodes:
        for y in tprime_neighbours(x, syl, exp):
            if y in inside:
                T.add_edge(x, y)
    return T


def brute_barycenters(T, points):
    out = []
    for y in T.nodes:
        if y.is_edge:
            continue
        rest = T.copy()
        rest.remove_node(y)
        comp = {}
        for k, c in enumerate(nx.connected_components(rest)):
            for x in c:
                comp[x] = k
        others = [comp[p] for p in points if p != y]
        if len(set(others)) == len(others):
            out.append(y)
    return out


@pytest.fixture(scope="module")
def zz_ball():
    return ball_graph(instances.graph("zz"), 5, 1, 2)


def V(g, site):
    return TreeVertex.from_coset(g, site)


def test_distances(zz):
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    one = zz.identity()
    path = geodesic(V(one, "v"), V(one, "w"))
    assert len(path) - 1 == 2
    assert path[1] == TreeEdgeVertex.from_coset(one, "e")
    assert distance(V(one, "v"), V(b, "v")) == 4
    assert distance(V(one, "v"), V(b * a, "w")) == 6
    assert geodesic(V(b, "v"), V(b, "v")) == [V(b, "v")]


def test_distances_against_bfs(zz, zz_ball):
    root = TreeVertex.root(zz)
    bfs = nx.single_source_shortest_path_length(zz_ball, root)
    for x, d in bfs.items():
        assert distance(root, x) == d
        assert distance(x, root) == d
    nodes = list(zz_ball.nodes)[:40]
    for x, y in itertools.combinations(nodes, 2):
        assert geodesic(x, y) == nx.shortest_path(zz_ball, x, y)


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_ball_is_a_tree(name):
    T = ball_graph(instances.graph(name), 5)
    assert nx.is_tree(T)


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_geodesic_equivariance(name):
    G = instances.graph(name)
    nodes = ball(G, 4)
    for gamma in G.enumerate_elements(1, 2):
        for u, v in itertools.islice(itertools.combinations(nodes, 2), 60):
            moved = geodesic(translate(gamma, u), translate(gamma, v))
            assert moved == [translate(gamma, x) for x in geodesic(u, v)]


def test_star_membership(zz):
    a = zz.word([("a", 1)])
    one = zz.identity()
    root = TreeVertex.root(zz)
    assert in_star(root, TreeEdgeVertex.from_coset(one, "e"))
    assert not in_star(root, V(one, "w"))
    assert in_star(root, TreeEdgeVertex.from_coset(a * a * a, "e"))
    assert TreeEdgeVertex.from_coset(a * a * a, "e") in star(root)
    near = list(itertools.islice(iter(star(root)), 5))
    assert near[0] == root and all(distance(root, x) == 1 for x in near[1:])


def test_barycenter_examples(zz, zz_ball):
    b = zz.word([("b", 1)])
    one = zz.identity()
    y = V(b, "v")
    assert barycenter([y, y, y]) == y
    pts = [V(one, "v"), V(b, "v"), V(b * b, "v")]
    assert barycenter(pts) == V(one, "w")
    assert brute_barycenters(zz_ball, pts) == [V(one, "w")]
    e1 = TreeEdgeVertex.from_coset(one, "e")
    assert barycenter([V(one, "v"), e1, e1]) is None
    assert brute_barycenters(zz_ball, [V(one, "v"), e1, e1]) == []


def test_barycenter_needs_three_points(zz):
    with pytest.raises(ValueError):
        barycenters([TreeVertex.root(zz)] * 2)


def test_barycenter_matches_exhaustive_separation(zz):
    T = ball_graph(zz, 6)
    small = ball(zz, 3)
    for tup in itertools.combinations_with_replacement(small, 3):
        assert set(barycenters(tup)) == set(brute_barycenters(T, tup))


def test_retract_point_examples(zz):
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    one = zz.identity()
    root = TreeVertex.root(zz)
    e1 = EdgePoint(TreeEdgeVertex.from_coset(one, "e"))
    inside = GroupPoint(a, "v")
    assert retract_point(root, inside) == inside
    assert retract_point(root, GroupPoint(b, "w")) == e1
    assert retract_point(root, GroupPoint(b * a, "v")) == e1


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_retraction_idempotent_and_lands_in_star(name):
    G = instances.graph(name)
    els = G.enumerate_elements(2, 2)
    centres = [n for n in ball(G, 4) if not n.is_edge]
    pts = [GroupPoint(g, v) for g in els for v in G.vertices]
    for w in centres:
        for x in pts:
            r = retract_point(w, x)
            assert retract_point(w, r) == r
            assert in_star(w, project(r))


def test_project_examples(zz):
    a, b = zz.word([("a", 1)]), zz.word([("b", 1)])
    one = zz.identity()
    assert project(GroupPoint(one, "v")) == TreeVertex.root(zz)
    assert project(GroupPoint(a * b, "w")) == V(a, "w")
    e = TreeEdgeVertex.from_coset(one, "e")
    assert project(EdgePoint(e)) == e


@pytest.mark.parametrize("name", instances.GRAPHS)
def test_projection_equivariance(name):
    G = instances.graph(name)
    els = G.enumerate_elements(2, 1)
    for gamma in els[:10]:
        for g in els:
            for v in G.vertices:
                x = GroupPoint(g, v)
                assert project(translate(gamma, x)) == translate(gamma, project(x))


def test_mixing_graphs_is_an_error(zz, trefoil):
    with pytest.raises(GraphMismatch):
        geodesic(TreeVertex.root(zz), TreeVertex.root(trefoil))
