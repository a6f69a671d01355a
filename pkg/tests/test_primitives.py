import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compact_routing import Graph, ShortestPaths, generate_graph
from compact_routing.bits import BitWidths
from compact_routing.centers import build_cluster_trees, centers_from_set, expected_center_bound, tz_centers
from compact_routing.coloring import ColoringError, compute_coloring, representatives
from compact_routing.hitting import greedy_bound, greedy_hitting_set
from compact_routing.local import (
    LocalRoutingTable, NotInVicinity, build_local_table, build_local_tables, local_next_hop, local_route,
)
from compact_routing.oracle import VicinityIndex
from compact_routing.treerouting import (
    ARRIVED, TreeError, build_tree_routing, label_bits, node_bits, tree_next_hop,
)

from helpers import cached_sp


def tree_graph(n, seed):
    return generate_graph("tree", {"n": n, "w_max": 3}, seed)


# --- local routing ----------------------------------------------------------------

def test_local_table_keys_and_ports():
    sp = cached_sp("random-weighted", 80, 200, 1)
    g = sp.g
    vic = VicinityIndex(sp, 12)
    for u in range(g.n):
        tab = build_local_table(sp, u, 12)
        assert set(tab.entries) == set(vic.members[u].tolist()) - {u}
        for v, port in tab.entries.items():
            x = g.neighbor(u, port)
            assert g.weight(u, x) + sp.dist[x, v] == sp.dist[u, v]


def test_local_next_hop_errors_and_arrival():
    g = generate_graph("path", {"n": 6})
    tab = build_local_table(g, 0, 3)
    assert local_next_hop(tab, 0) is None
    assert local_next_hop(tab, 2) == 0
    with pytest.raises(NotInVicinity, match="not in vicinity"):
        local_next_hop(tab, 5)


def test_local_route_exact():
    sp = cached_sp("random-weighted", 100, 260, 2)
    g = sp.g
    tables = build_local_tables(sp, 15)
    for u in range(g.n):
        for v in tables[u].entries:
            path = local_route(g, tables, u, v)
            assert path[-1] == v
            assert sum(g.weight(a, b) for a, b in zip(path, path[1:])) == sp.dist[u, v]


def test_local_table_bits_formula():
    bw = BitWidths.for_graph(100, 7, 50)
    assert LocalRoutingTable(0, 1, {}).bits(bw, 5) == 0
    tab = LocalRoutingTable(0, 4, {1: 0, 2: 1, 3: 2})
    assert tab.bits(bw, 5) == 3 * (math.ceil(math.log2(100)) + math.ceil(math.log2(5)))


# --- tree routing ---------------------------------------------------------------------

def test_tree_routing_path():
    g = generate_graph("path", {"n": 3})
    t = build_tree_routing(g, [(0, 1), (1, 2)], root=0)
    assert t.route(g, 0, 2) == [1, 2]
    assert t.route(g, 2, 2) == []
    assert tree_next_hop(t.nodes[1], t.labels[1]) == ARRIVED


def test_tree_routing_exhaustive_random_tree():
    g = tree_graph(200, 5)
    t = build_tree_routing(g, [(u, v) for u, v, _ in g.edges], root=0)
    for u in range(g.n):
        for v in range(g.n):
            assert [u] + t.route(g, u, v) == t.tree_path(u, v)


def test_tree_routing_subtree_of_graph():
    sp = cached_sp("gnm-random", 120, 300, 7)
    from compact_routing.centers import global_tree

    t = global_tree(sp, 17)
    for u in range(0, sp.n, 7):
        for v in range(sp.n):
            hops = t.route(sp.g, u, v)
            assert ([u] + hops)[-1] == v


def test_tree_routing_rejects_cycle_and_foreign_label():
    g = generate_graph("complete", {"n": 3})
    with pytest.raises(TreeError):
        build_tree_routing(g, [(0, 1), (1, 2), (0, 2)], root=0)
    a = build_tree_routing(g, [(0, 1), (1, 2)], root=0, tree_id="a")
    b = build_tree_routing(g, [(0, 1), (0, 2)], root=0, tree_id="b")
    with pytest.raises(TreeError, match="foreign label"):
        tree_next_hop(a.nodes[0], b.labels[2])
    with pytest.raises(TreeError, match="not an edge"):
        build_tree_routing(generate_graph("path", {"n": 3}), [(0, 2)], root=0)


TREE_BITS_C = 6  # node and label bits <= 6 * ceil(log2 n)^2 for every n >= 2


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 300), st.integers(0, 10_000))
def test_tree_bits_polylog(n, seed):
    g = tree_graph(n, seed)
    t = build_tree_routing(g, [(u, v) for u, v, _ in g.edges], root=0)
    bw = BitWidths.for_graph(n, g.max_degree, 1)
    lg = max(1, math.ceil(math.log2(n)))
    for v in range(n):
        assert node_bits(t.nodes[v], bw, g.degree(v)) <= TREE_BITS_C * lg * lg
        assert label_bits(t.labels[v], bw) <= TREE_BITS_C * lg * lg
        assert len(t.labels[v].light_ports) <= math.log2(n)


# --- hitting sets -----------------------------------------------------------------------

def test_hitting_common_vertex():
    assert greedy_hitting_set([[0, 1], [0, 2], [3, 0]], 4) == [0]


def test_hitting_disjoint_singletons():
    assert greedy_hitting_set([[0], [1], [2]], 3) == [0, 1, 2]


def test_hitting_empty_set_rejected():
    with pytest.raises(ValueError, match="empty"):
        greedy_hitting_set([[0], []], 3)


def test_hitting_random_bound():
    rng = np.random.default_rng(0)
    sets = [rng.choice(200, 20, replace=False).tolist() for _ in range(100)]
    h = set(greedy_hitting_set(sets, 200))
    assert all(h & set(S) for S in sets)
    assert len(h) <= greedy_bound(sets, 200)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(0, 29), min_size=1, max_size=8), min_size=1, max_size=30))
def test_hitting_property(sets):
    h = set(greedy_hitting_set(sets, 30))
    assert all(h & set(S) for S in sets)
    assert len(h) <= greedy_bound(sets, 30)


# --- coloring ----------------------------------------------------------------------------

def test_coloring_single_color():
    col = compute_coloring([list(range(10))], 10, 1, seed=3)
    assert (col.color == 0).all() and len(col.classes) == 1 and col.attempts == 1


def test_coloring_two_colors_balanced():
    n = 100
    col = compute_coloring([list(range(n))] * 5, n, 2, seed=1, beta=1.5)
    assert set(col.color.tolist()) == {0, 1}
    assert max(len(c) for c in col.classes) <= 1.5 * n / 2


def test_coloring_small_set_rejected():
    with pytest.raises(ValueError, match="at least q"):
        compute_coloring([[0, 1]], 10, 3)


def test_coloring_failure_message():
    # q colors on sets of exactly q vertices, with a tiny retry budget
    sets = [list(range(i, i + 6)) for i in range(0, 60, 6)]
    with pytest.raises(ColoringError, match="coloring failed — increase α or β"):
        compute_coloring(sets, 60, 6, seed=0, max_tries=2)


def test_coloring_vicinities_and_representatives():
    sp = cached_sp("gnm-random", 150, 400, 8)
    q = 5
    vic = VicinityIndex(sp, math.ceil(q * math.log2(150)))
    col = compute_coloring(vic.members, 150, q, seed=2)
    reps = representatives(vic.members, col)
    for u in range(150):
        assert set(col.color[vic.members[u]].tolist()) == set(range(q))
        for j in range(q):
            r = reps[u, j]
            assert col.color[r] == j and vic.mask[u, r]
            closer = [w for w in vic.members[u].tolist() if col.color[w] == j]
            assert r == closer[0]


def test_coloring_deterministic():
    sets = [list(range(i, i + 20)) for i in range(0, 80, 10)]
    a = compute_coloring(sets, 100, 4, seed=9)
    b = compute_coloring(sets, 100, 4, seed=9)
    assert (a.color == b.color).all() and a.attempts == b.attempts


# --- centers, bunches, clusters -------------------------------------------------------------

def test_centers_s_equals_n():
    sp = cached_sp("gnm-random", 40, 90, 1)
    cs = tz_centers(sp, 40, seed=0)
    assert len(cs.centers) == 40
    assert cs.cluster_sizes().max() == 0


def test_centers_path_bound():
    sp = ShortestPaths(generate_graph("path", {"n": 50}))
    cs = tz_centers(sp, 5, seed=4)
    assert cs.cluster_sizes().max() <= 40


@pytest.mark.parametrize("kind, seed", [("gnm-random", 1), ("random-weighted", 2)])
def test_center_definitions(kind, seed):
    sp = cached_sp(kind, 120, 300, seed)
    cs = tz_centers(sp, 20, seed=seed)
    d = sp.dist
    assert len(cs.centers) <= 3 * expected_center_bound(120, 20)
    for v in range(sp.n):
        dA = d[v, cs.centers].min()
        assert cs.dist_to_centers[v] == dA
        # pivot ties go to the smallest id
        assert cs.pivot[v] == min(int(a) for a in cs.centers if d[v, a] == dA)
        for w in range(sp.n):
            assert cs.in_cluster[w, v] == (d[w, v] < dA)
            assert (w in cs.bunch(v).tolist()) == (v in cs.cluster(w).tolist())


def test_cluster_trees_realize_distances():
    sp = cached_sp("random-weighted", 100, 260, 3)
    cs = build_cluster_trees(sp, tz_centers(sp, 10, seed=1))
    g = sp.g
    for w, tree in cs.trees.items():
        assert set(tree.nodes) == set(cs.cluster(w).tolist())
        for v in tree.nodes:
            path = tree.tree_path(w, v)
            assert sum(g.weight(a, b) for a, b in zip(path, path[1:])) == sp.dist[w, v]
    # clusters with only their root are single-node trees
    singles = [t for t in cs.trees.values() if len(t) == 1]
    assert all(t.route(g, t.root, t.root) == [] for t in singles)


def test_centers_from_fixed_set():
    sp = ShortestPaths(generate_graph("path", {"n": 7}))
    cs = centers_from_set(sp, [0, 6])
    assert cs.pivot.tolist() == [0, 0, 0, 0, 6, 6, 6]
    # v in C(w) iff d(w, v) < d(v, A)
    assert cs.cluster(3).tolist() == [2, 3, 4]
    assert cs.cluster(2).tolist() == [2, 3]
    assert cs.cluster(0).tolist() == []


@settings(max_examples=25, deadline=None)
@given(st.integers(10, 60), st.integers(0, 1000), st.integers(1, 6))
def test_centers_cluster_bound_property(n, seed, div):
    sp = ShortestPaths(generate_graph("gnm-random", {"n": n, "m": 2 * n}, seed))
    s = max(1, n // div)
    cs = tz_centers(sp, s, seed=seed)
    assert cs.cluster_sizes().max() <= 4 * n / s
    assert (cs.in_cluster.sum(axis=1) == cs.cluster_sizes()).all()


def _ancestors(t, x):
    out = [x]
    while out[-1] != t.root:
        out.append(t.parent[out[-1]])
    return out


def test_tree_root_to_leaf_is_depth():
    g = tree_graph(150, 8)
    t = build_tree_routing(g, [(u, v) for u, v, _ in g.edges], root=0)
    leaves = [x for x in range(1, g.n) if g.degree(x) == 1]
    assert leaves
    for leaf in leaves:
        assert len(t.route(g, 0, leaf)) == len(_ancestors(t, leaf)) - 1


def test_tree_first_hop_leaves_subtree_through_parent():
    g = tree_graph(100, 9)
    t = build_tree_routing(g, [(u, v) for u, v, _ in g.edges], root=0)
    anc = {x: set(_ancestors(t, x)) for x in range(g.n)}
    for u in range(g.n):
        for v in range(g.n):
            if u not in anc[v]:  # v outside the subtree of u
                assert tree_next_hop(t.nodes[u], t.labels[v]) == g.port(u, t.parent[u])
