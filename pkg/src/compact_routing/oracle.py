"""All-pairs shortest-path tables and vertex vicinities ``B(u, l)``.

``ShortestPaths`` is the centralized view used during preprocessing and for
verification.  Paths are canonical: the next hop from ``x`` toward ``t`` is
the parent of ``x`` in the shortest-path tree rooted at ``t``, chosen with the
same ``(distance, id)`` rule as :func:`~compact_routing.graph.shortest_paths_from`.
Because every suffix of a canonical path toward ``t`` is again the canonical
path toward ``t``, hop-by-hop forwarding reproduces these paths exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import Graph


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Exact ``n x n`` integer distance matrix (in units of ``g.unit``)."""
    src, dst, w = g.edge_arrays()
    mat = csr_matrix((w.astype(np.float64), (src, dst)), shape=(g.n, g.n))
    d = shortest_path(mat, method="D", directed=False, unweighted=g.is_unweighted)
    if g.is_unweighted:
        return d.astype(np.int64)
    # integer weights well below 2**53: float sums are exact
    return np.rint(d).astype(np.int64)


def _next_hop_matrix(g: Graph, dist: np.ndarray) -> np.ndarray:
    src, dst, w = g.edge_arrays()
    n = g.n
    nh = np.empty((n, n), dtype=np.int64)
    for t in range(n):
        row = dist[t]
        tight = row[src] == row[dst] + w
        s, d = src[tight], dst[tight]
        order = np.lexsort((d, row[d], s))
        s, d = s[order], d[order]
        first = np.ones(len(s), dtype=bool)
        first[1:] = s[1:] != s[:-1]
        nh[t, s[first]] = d[first]
        nh[t, t] = t
    return nh


@dataclass(frozen=True)
class Vicinity:
    """``B(center, ell)`` with per-member distance and first-hop port."""

    center: int
    ell: int
    members: tuple[int, ...]  # in (distance, id) order
    dist: dict[int, int]
    first_port: dict[int, int]  # absent for the center itself
    radius: int

    def __contains__(self, v: int) -> bool:
        return v in self.dist


class ShortestPaths:
    """Exact distances and canonical next hops for every ordered pair."""

    def __init__(self, g: Graph):
        self.g = g
        self.n = g.n
        self.dist = all_pairs_distances(g)
        self.dist.setflags(write=False)

    @cached_property
    def next_hop(self) -> np.ndarray:
        """``next_hop[t, x]``: neighbor of ``x`` on the canonical path to ``t``."""
        nh = _next_hop_matrix(self.g, self.dist)
        nh.setflags(write=False)
        return nh

    @cached_property
    def order(self) -> np.ndarray:
        """Row ``u`` lists all vertices sorted by ``(d(u, .), id)``."""
        o = np.argsort(self.dist, axis=1, kind="stable")
        o.setflags(write=False)
        return o

    @cached_property
    def rank(self) -> np.ndarray:
        """``rank[u, v]``: position of ``v`` in ``order[u]``."""
        r = np.empty_like(self.order)
        rows = np.arange(self.n)[:, None]
        r[rows, self.order] = np.arange(self.n)[None, :]
        r.setflags(write=False)
        return r

    def path(self, x: int, t: int) -> list[int]:
        """Canonical shortest path ``x -> t`` (both endpoints included)."""
        nh = self.next_hop[t]
        p = [x]
        while p[-1] != t:
            p.append(int(nh[p[-1]]))
        return p

    def first_port(self, u: int, t: int) -> int:
        return self.g.port(u, int(self.next_hop[t, u]))

    def vicinity(self, u: int, ell: int) -> Vicinity:
        idx = VicinityIndex(self, ell)
        members = tuple(int(v) for v in idx.members[u])
        dist = {v: int(self.dist[u, v]) for v in members}
        ports = {v: self.first_port(u, v) for v in members if v != u}
        return Vicinity(u, idx.ell, members, dist, ports, int(idx.radius[u]))


def vicinity(g: Graph | ShortestPaths, u: int, ell: int) -> Vicinity:
    """The ``ell`` closest vertices of ``u`` under the ``(distance, id)`` order."""
    sp = g if isinstance(g, ShortestPaths) else ShortestPaths(g)
    return sp.vicinity(u, ell)


class VicinityIndex:
    """``B(u, ell)`` for every ``u`` at once.

    ``radius[u]`` is the largest distance value ``r`` attained inside the
    vicinity such that every vertex at distance ``<= r`` from ``u`` is a
    member.
    """

    def __init__(self, sp: ShortestPaths, ell: int):
        if ell < 1:
            raise ValueError("vicinity size must be positive")
        n = sp.n
        self.sp = sp
        self.ell = min(int(ell), n)
        self.members = sp.order[:, : self.ell]
        self.mask = sp.rank < self.ell
        rows = np.arange(n)
        d_members = sp.dist[rows[:, None], self.members]
        if self.ell < n:
            d_out = sp.dist[rows, sp.order[:, self.ell]]
            fully = d_members < d_out[:, None]
            # members are sorted by distance, so the covered ones form a prefix
            last = fully.sum(axis=1) - 1
            self.radius = d_members[rows, last]
        else:
            self.radius = d_members[:, -1]

    def contains(self, u: int, v: int) -> bool:
        return bool(self.mask[u, v])

    def first_in(self, subset_mask: np.ndarray) -> np.ndarray:
        """Smallest-id member of ``B(u, ell) & subset`` per ``u`` (-1 if none)."""
        hit = self.mask & subset_mask[None, :]
        out = np.argmax(hit, axis=1)
        out[~hit.any(axis=1)] = -1
        return out

    def boundary_edge(self, x: int, t: int) -> tuple[int, int]:
        """Edge ``(y, z)`` of the canonical path ``x -> t`` leaving ``B(x, ell)``.

        Requires ``t`` outside the vicinity.
        """
        nh = self.sp.next_hop[t]
        inside = self.mask[x]
        y = x
        z = int(nh[x])
        while inside[z]:
            y = z
            z = int(nh[z])
        return y, z
