"""Center sets with their pivots, bunches and clusters.

For a center set ``A`` the cluster of ``w`` is ``C_A(w) = {v : d(w, v) < d(v, A)}``
and the bunch of ``v`` is ``B_A(v) = {w : v in C_A(w)}``.  Both are read off
one boolean matrix ``in_cluster[w, v]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import Graph
from .oracle import ShortestPaths
from .treerouting import TreeRoutingScheme, build_tree_from_parents

INF = np.iinfo(np.int64).max


@dataclass(frozen=True, eq=False)
class CenterStructure:
    centers: np.ndarray  # sorted ids
    is_center: np.ndarray
    pivot: np.ndarray  # -1 when there are no centers
    dist_to_centers: np.ndarray  # INF when there are no centers
    in_cluster: np.ndarray  # [w, v] -> v in C_A(w)
    s: int | None = None
    rounds: int = 0
    trees: dict = field(default_factory=dict)  # w -> TreeRoutingScheme of T_C(w)

    @property
    def n(self) -> int:
        return len(self.is_center)

    def cluster(self, w: int) -> np.ndarray:
        return np.flatnonzero(self.in_cluster[w])

    def bunch(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.in_cluster[:, v])

    def cluster_sizes(self) -> np.ndarray:
        return self.in_cluster.sum(axis=1)

    def bunch_sizes(self) -> np.ndarray:
        return self.in_cluster.sum(axis=0)


def _pivots(dist: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = dist.shape[0]
    if len(centers) == 0:
        return np.full(n, -1, dtype=np.int64), np.full(n, INF, dtype=np.int64)
    sub = dist[:, centers]
    # centers are sorted, so argmin breaks ties toward the smallest id
    idx = np.argmin(sub, axis=1)
    return centers[idx], sub[np.arange(n), idx]


def cluster_matrix(dist: np.ndarray, bound: np.ndarray) -> np.ndarray:
    """``[w, v] -> d(w, v) < bound[v]`` for a per-vertex bound."""
    return dist < bound[None, :]


def centers_from_set(sp: ShortestPaths, centers, s: int | None = None, rounds: int = 0) -> CenterStructure:
    n = sp.n
    centers = np.unique(np.asarray(list(centers), dtype=np.int64))
    is_center = np.zeros(n, dtype=bool)
    is_center[centers] = True
    pivot, dA = _pivots(sp.dist, centers)
    return CenterStructure(centers, is_center, pivot, dA, cluster_matrix(sp.dist, dA), s, rounds)


def tz_centers(g: Graph | ShortestPaths, s: int, seed: int = 0, max_rounds: int = 200) -> CenterStructure:
    """Grow a center set until every cluster has at most ``4n/s`` vertices.

    Each round samples every still-overloaded vertex with probability
    ``s / |W|`` and adds the sample to the centers; ``W`` is then recomputed
    as the set of vertices whose cluster exceeds the bound.
    """
    sp = g if isinstance(g, ShortestPaths) else ShortestPaths(g)
    n = sp.n
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}")
    rng = np.random.default_rng(seed)
    limit = 4 * n / s
    is_center = np.zeros(n, dtype=bool)
    overloaded = np.arange(n)
    for rounds in range(1, max_rounds + 1):
        p = min(1.0, s / len(overloaded))
        picked = overloaded[rng.random(len(overloaded)) < p]
        is_center[picked] = True
        _, dA = _pivots(sp.dist, np.flatnonzero(is_center))
        sizes = cluster_matrix(sp.dist, dA).sum(axis=1)
        overloaded = np.flatnonzero(sizes > limit)
        if len(overloaded) == 0:
            return centers_from_set(sp, np.flatnonzero(is_center), s, rounds)
    raise RuntimeError(f"center construction did not converge in {max_rounds} rounds")


def expected_center_bound(n: int, s: int) -> float:
    """The ``2 s log n`` expected-size figure, reported next to realized sizes."""
    return 2 * s * math.log2(max(n, 2))


def spt_parents(sp: ShortestPaths, root: int, members) -> dict[int, int]:
    """Parent map of the canonical shortest-path tree of ``root`` on ``members``."""
    nh = sp.next_hop[root]
    parent = {int(v): int(nh[v]) for v in members}
    parent[root] = root
    return parent


def build_cluster_trees(g: Graph | ShortestPaths, cs: CenterStructure, tag="C") -> CenterStructure:
    """Attach a routed shortest-path tree ``T_C(w)`` to every nonempty cluster.

    Clusters are closed under shortest paths toward their root, so the
    canonical parent of a member is again a member.
    """
    sp = g if isinstance(g, ShortestPaths) else ShortestPaths(g)
    trees = {}
    for w in np.flatnonzero(cs.in_cluster.any(axis=1)).tolist():
        members = cs.cluster(w)
        parent = spt_parents(sp, w, members)
        for v, p in parent.items():
            if not cs.in_cluster[w, p]:
                raise AssertionError(f"cluster of {w} not closed at {v}")
        trees[w] = build_tree_from_parents(sp.g, w, parent, (tag, w))
    return replace(cs, trees=trees)


def global_tree(sp: ShortestPaths, root: int, tag="G") -> TreeRoutingScheme:
    """Shortest-path tree of ``root`` spanning the whole graph."""
    return build_tree_from_parents(sp.g, root, spt_parents(sp, root, range(sp.n)), (tag, root))
