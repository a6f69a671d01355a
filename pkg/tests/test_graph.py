from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compact_routing import (
    Graph, GraphError, ShortestPaths, generate_graph, load_graph, normalized_diameter, parse_graph,
    save_graph, shortest_path_subgraph, shortest_paths_from, vicinity,
)
from compact_routing.oracle import VicinityIndex


def bellman_ford(g: Graph, s: int) -> list[float]:
    dist = [float("inf")] * g.n
    dist[s] = 0
    for _ in range(g.n - 1):
        changed = False
        for u, v, w in g.edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            break
    return dist


@st.composite
def connected_graphs(draw, max_n=14, weighted=True):
    n = draw(st.integers(2, max_n))
    edges = {}
    for v in range(1, n):
        edges[(draw(st.integers(0, v - 1)), v)] = 1
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for a, b in extra:
        if a != b:
            edges[(min(a, b), max(a, b))] = 1
    hi = 6 if weighted else 1
    return Graph(n, [(a, b, draw(st.integers(1, hi))) for a, b in sorted(edges)])


# --- construction and ports -----------------------------------------------------

def test_ports_follow_neighbor_order():
    g = Graph(4, [(2, 0, 1), (0, 3, 1), (0, 1, 1)])
    assert [g.neighbor(0, p) for p in range(g.degree(0))] == [1, 2, 3]
    assert g.port(0, 3) == 2 and g.port(3, 0) == 0


@pytest.mark.parametrize("edges, msg", [
    ([(0, 0, 1)], "self-loop"),
    ([(0, 1, 1), (1, 0, 2)], "parallel"),
    ([(0, 1, 0)], "nonpositive"),
    ([(0, 5, 1)], "outside"),
])
def test_invalid_edges_rejected(edges, msg):
    with pytest.raises(GraphError, match=msg):
        Graph(3 if msg != "self-loop" else 1, edges)


def test_disconnected_rejected():
    with pytest.raises(GraphError, match="not connected"):
        Graph(4, [(0, 1, 1), (2, 3, 1)])


# --- shortest paths -------------------------------------------------------------

def test_path_distances():
    g = generate_graph("path", {"n": 3})
    assert shortest_paths_from(g, 0).dist == (0, 1, 2)


def test_dijkstra_matches_bellman_ford_and_apsp():
    g = generate_graph("random-weighted", {"n": 50, "m": 120, "w_max": 9}, seed=11)
    sp = ShortestPaths(g)
    for s in range(g.n):
        df = shortest_paths_from(g, s)
        assert df.dist[s] == 0
        assert list(df.dist) == bellman_ford(g, s)
        assert list(df.dist) == sp.dist[s].tolist()


def test_canonical_parent_smallest_distance_then_id():
    # 0-1, 0-2, 1-3, 2-3: both 1 and 2 are predecessors of 3
    g = Graph(4, [(0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 1)])
    df = shortest_paths_from(g, 0)
    assert df.parent[3] == 1
    assert df.path_to(3) == [0, 1, 3]


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_oracle_symmetric_and_triangle(g):
    d = ShortestPaths(g).dist
    assert (d == d.T).all()
    assert (np.diag(d) == 0).all()
    # d[u, w] <= d[u, v] + d[v, w] for every triple
    assert (d[:, None, :] <= d[:, :, None] + d[None, :, :]).all()
    for u, v, w in g.edges:
        assert d[u, v] <= w


@settings(max_examples=60, deadline=None)
@given(connected_graphs())
def test_next_hop_paths_are_shortest(g):
    sp = ShortestPaths(g)
    for x in range(g.n):
        for t in range(g.n):
            p = sp.path(x, t)
            assert sum(g.weight(a, b) for a, b in zip(p, p[1:])) == sp.dist[x, t]
            # next hop from x toward t equals the canonical parent in t's tree
            if x != t:
                assert p[1] == shortest_paths_from(g, t).parent[x]


# --- vicinities -----------------------------------------------------------------

def test_vicinity_of_size_one():
    g = generate_graph("gnm-random", {"n": 20, "m": 40}, seed=1)
    for u in range(g.n):
        vic = vicinity(g, u, 1)
        assert vic.members == (u,) and vic.radius == 0


def test_vicinity_star():
    g = generate_graph("star", {"n": 6})
    vic = vicinity(g, 0, 3)
    assert set(vic.members) == {0, 1, 2}
    assert vic.radius == 0


def test_vicinity_path():
    g = generate_graph("path", {"n": 5})
    vic = vicinity(g, 2, 3)
    assert set(vic.members) == {1, 2, 3}
    assert vic.radius == 1
    assert vic.first_port[1] == g.port(2, 1)


def test_vicinity_clamps_to_n():
    g = generate_graph("path", {"n": 4})
    vic = vicinity(g, 0, 10)
    assert len(vic.members) == 4 and vic.ell == 4


def test_vicinity_closure_exhaustive():
    for kind, seed in [("gnm-random", 5), ("random-weighted", 6)]:
        sp = ShortestPaths(generate_graph(kind, {"n": 200, "m": 500}, seed))
        for ell in (5, 17):
            vic = VicinityIndex(sp, ell)
            for u in range(sp.n):
                for v in vic.members[u].tolist():
                    for w in sp.path(u, v):
                        assert vic.mask[w, v], (u, v, w)


@settings(max_examples=60, deadline=None)
@given(connected_graphs(weighted=True), st.integers(1, 10))
def test_vicinity_order_and_radius(g, ell):
    sp = ShortestPaths(g)
    vic = VicinityIndex(sp, ell)
    for u in range(g.n):
        expected = sorted(range(g.n), key=lambda w: (sp.dist[u, w], w))[: min(ell, g.n)]
        assert vic.members[u].tolist() == expected
        r = vic.radius[u]
        assert all(vic.mask[u, w] for w in range(g.n) if sp.dist[u, w] <= r)


@settings(max_examples=60, deadline=None)
@given(connected_graphs(weighted=False), st.integers(1, 10))
def test_unweighted_radius_plus_one(g, ell):
    sp = ShortestPaths(g)
    vic = VicinityIndex(sp, ell)
    for u in range(g.n):
        assert sp.dist[u, vic.members[u]].max() <= vic.radius[u] + 1


# --- diameter and E' ---------------------------------------------------------------

def test_normalized_diameter_examples():
    assert normalized_diameter(generate_graph("path", {"n": 5})) == 4
    assert normalized_diameter(generate_graph("complete", {"n": 6})) == 1
    tri = Graph(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)])
    # distances: 1, 2, 3 -> D = 3
    assert normalized_diameter(tri) == 3
    with pytest.raises(GraphError, match="diameter undefined"):
        normalized_diameter(Graph(1, []))


def test_shortest_path_subgraph_drops_long_edge():
    g = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)])
    sub, w_min = shortest_path_subgraph(g)
    assert not sub.has_edge(0, 2) and sub.m == 2
    assert w_min == 1


def test_shortest_path_subgraph_unit_identity():
    g = generate_graph("gnm-random", {"n": 30, "m": 70}, seed=2)
    sub, w_min = shortest_path_subgraph(g)
    assert sub == g and w_min == 1


def test_shortest_path_subgraph_distances_scale():
    g = generate_graph("random-weighted", {"n": 60, "m": 180, "w_min": 2, "w_max": 9}, seed=3)
    sub, w_min = shortest_path_subgraph(g)
    d, ds = ShortestPaths(g).dist, ShortestPaths(sub).dist
    assert all(w * sub.unit >= 1 for *_, w in sub.edges)
    M = max(w for *_, w in sub.edges) * sub.unit
    assert M <= normalized_diameter(g)
    assert (np.vectorize(lambda x: x * sub.unit * w_min)(ds) == d).all()


# --- generators and files -------------------------------------------------------------

def test_generators():
    assert generate_graph("path", {"n": 5}) == Graph(5, [(i, i + 1, 1) for i in range(4)])
    grid = generate_graph("grid", {"rows": 8, "cols": 8})
    assert (grid.n, grid.m) == (64, 112)
    a = generate_graph("gnm-random", {"n": 100, "m": 300}, seed=7)
    b = generate_graph("gnm-random", {"n": 100, "m": 300}, seed=7)
    assert a == b and a.m == 300
    with pytest.raises(GraphError, match="could not generate connected graph"):
        generate_graph("gnm-random", {"n": 50, "m": 49}, seed=0, max_attempts=3)
    with pytest.raises(GraphError, match="unknown graph kind"):
        generate_graph("hypercube", {"n": 8})


def test_parse_graph_text():
    g = parse_graph("3 2\n0 1 1\n1 2 1\n")
    assert g == generate_graph("path", {"n": 3})


@pytest.mark.parametrize("text, msg", [
    ("3 2\n0 1 0\n1 2 1\n", "weight must be positive"),
    ("3 2\n0 1 x\n1 2 1\n", "malformed"),
    ("3 2\n0 1 1\n", "declares 2 edges"),
    ("4 2\n0 1\n2 3\n", "not connected"),
    ("", "empty"),
])
def test_parse_graph_errors(text, msg):
    with pytest.raises(GraphError, match=msg):
        parse_graph(text)


def test_file_round_trip(tmp_path):
    for kind in ("gnm-random", "random-weighted"):
        g = generate_graph(kind, {"n": 40, "m": 100}, seed=9)
        save_graph(g, tmp_path / "g.txt")
        assert load_graph(tmp_path / "g.txt") == g


def test_rational_weights_round_trip(tmp_path):
    g = parse_graph("3 3\n0 1 1/2\n1 2 3/4\n0 2 2\n")
    assert g.unit == Fraction(1, 4)
    assert [w * g.unit for *_, w in g.edges] == [Fraction(1, 2), Fraction(2), Fraction(3, 4)]
    save_graph(g, tmp_path / "r.txt")
    assert load_graph(tmp_path / "r.txt") == g
