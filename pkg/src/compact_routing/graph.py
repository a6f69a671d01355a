"""Port-numbered undirected graphs, generators and the edge-list file format.

Weights are stored as positive integers together with a rational ``unit``;
the true weight of an edge is ``weight * unit``.  Every distance computed in
this package is therefore an exact integer multiple of ``unit``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

import numpy as np


class GraphError(ValueError):
    """Raised for malformed, disconnected or otherwise invalid graphs."""


class Graph:
    """Immutable connected undirected graph in the fixed-port model.

    The ports of vertex ``u`` are ``0 .. deg(u) - 1`` and are assigned in
    increasing neighbor-id order when the graph is constructed.
    """

    __slots__ = ("n", "m", "unit", "_adj", "_port_of", "_edges")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]], unit=Fraction(1)):
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        nbrs: list[dict[int, int]] = [{} for _ in range(n)]
        for u, v, w in edges:
            u, v, w = int(u), int(v), int(w)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if w <= 0:
                raise GraphError(f"nonpositive weight {w} on edge ({u}, {v})")
            if v in nbrs[u]:
                raise GraphError(f"parallel edge ({u}, {v})")
            nbrs[u][v] = w
            nbrs[v][u] = w
        self.n = n
        self.unit = Fraction(unit)
        self._adj = tuple(tuple(sorted(d.items())) for d in nbrs)
        self._port_of = tuple({v: p for p, (v, _) in enumerate(a)} for a in self._adj)
        self._edges = tuple(
            (u, v, w) for u in range(n) for v, w in self._adj[u] if u < v
        )
        self.m = len(self._edges)
        if not self._connected():
            raise GraphError("graph is not connected")

    def _connected(self) -> bool:
        seen = [False] * self.n
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v, _ in self._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return all(seen)

    # -- fixed-port interface -------------------------------------------------

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def neighbor(self, u: int, port: int) -> int:
        return self._adj[u][port][0]

    def port(self, u: int, v: int) -> int:
        """Port at ``u`` of the edge ``(u, v)``."""
        try:
            return self._port_of[u][v]
        except KeyError:
            raise GraphError(f"({u}, {v}) is not an edge") from None

    def weight(self, u: int, v: int) -> int:
        return self._adj[u][self.port(u, v)][1]

    def port_weight(self, u: int, port: int) -> int:
        return self._adj[u][port][1]

    def adjacency(self, u: int) -> tuple[tuple[int, int], ...]:
        """``(neighbor, weight)`` pairs of ``u``, indexed by port."""
        return self._adj[u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._port_of[u]

    @property
    def edges(self) -> tuple[tuple[int, int, int], ...]:
        return self._edges

    @property
    def max_degree(self) -> int:
        return max(len(a) for a in self._adj)

    @property
    def is_unweighted(self) -> bool:
        return self.unit == 1 and all(w == 1 for _, _, w in self._edges)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed edge arrays ``(src, dst, weight)``, both orientations."""
        e = np.array(self._edges, dtype=np.int64).reshape(-1, 3)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        w = np.concatenate([e[:, 2], e[:, 2]])
        return src, dst, w

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.unit, self._edges) == (other.n, other.unit, other._edges)

    def __hash__(self):
        return hash((self.n, self.unit, self._edges))

    def __repr__(self):
        kind = "unweighted" if self.is_unweighted else "weighted"
        return f"Graph(n={self.n}, m={self.m}, {kind})"


@dataclass(frozen=True)
class DistanceField:
    """Single-source exact distances with canonical parents."""

    source: int
    dist: tuple[int, ...]
    parent: tuple[int, ...]  # parent[source] == source

    def path_to(self, v: int) -> list[int]:
        """Canonical path from ``source`` to ``v``."""
        path = [v]
        while path[-1] != self.source:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path


def shortest_paths_from(g: Graph, u: int) -> DistanceField:
    """Dijkstra from ``u``.

    The parent of ``x`` is the predecessor ``y`` with
    ``dist[y] + w(y, x) == dist[x]`` minimizing ``(dist[y], y)``.
    """
    n = g.n
    dist = [math.inf] * n
    dist[u] = 0
    heap = [(0, u)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > dist[x]:
            continue
        for y, w in g.adjacency(x):
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    parent = [u] * n
    for x in range(n):
        if x == u:
            continue
        parent[x] = min(
            (dist[y], y) for y, w in g.adjacency(x) if dist[y] + w == dist[x]
        )[1]
    return DistanceField(u, tuple(int(d) for d in dist), tuple(parent))


def normalized_diameter(g: Graph, dist: np.ndarray | None = None) -> Fraction:
    """Largest pairwise distance divided by the smallest positive one."""
    if g.n < 2:
        raise GraphError("diameter undefined for a single-vertex graph")
    if dist is None:
        from .oracle import all_pairs_distances

        dist = all_pairs_distances(g)
    off = dist[~np.eye(g.n, dtype=bool)]
    return Fraction(int(off.max()), int(off.min()))


def shortest_path_subgraph(g: Graph, dist: np.ndarray | None = None) -> tuple[Graph, Fraction]:
    """Keep the edges whose weight equals the distance of their endpoints.

    Returns ``(g', w_min)``: ``g'`` has the kept edges with true weights
    divided by ``w_min``, the smallest kept true weight, so every weight of
    ``g'`` lies in ``[1, M]`` and ``d_g = w_min * d_g'``.
    """
    if dist is None:
        from .oracle import all_pairs_distances

        dist = all_pairs_distances(g)
    kept = [(u, v, w) for u, v, w in g.edges if dist[u, v] == w]
    w_min = min(w for _, _, w in kept)
    # rescaled weights are rational; bring them to a common integer grid
    scaled = [(u, v, Fraction(w, w_min)) for u, v, w in kept]
    den = math.lcm(*(w.denominator for _, _, w in scaled))
    edges = [(u, v, int(w * den)) for u, v, w in scaled]
    return Graph(g.n, edges, unit=Fraction(1, den)), w_min * g.unit


# -- generators ---------------------------------------------------------------

GRAPH_KINDS = ("gnm-random", "random-weighted", "grid", "path", "star", "complete", "tree")


def _gnm_edges(n: int, m: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    max_m = n * (n - 1) // 2
    if not n - 1 <= m <= max_m:
        raise GraphError(f"m={m} impossible for a connected graph on {n} vertices")
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        need = m - len(chosen)
        us = rng.integers(0, n, size=2 * need + 8)
        vs = rng.integers(0, n, size=2 * need + 8)
        for a, b in zip(us.tolist(), vs.tolist()):
            if a == b:
                continue
            e = (a, b) if a < b else (b, a)
            if e not in chosen:
                chosen.add(e)
                if len(chosen) == m:
                    break
    return sorted(chosen)


def generate_graph(kind: str, params: dict | None = None, seed: int = 0, max_attempts: int = 100) -> Graph:
    """Build a graph of the given kind.

    kinds and their params:
      ``path`` (n), ``star`` (n leaves plus a center, vertex 0), ``complete`` (n),
      ``grid`` (rows, cols), ``tree`` (n; uniform random recursive tree,
      optional w_max), ``gnm-random`` (n, m), ``random-weighted`` (n, m,
      w_min=1, w_max=10; integer weights drawn uniformly).

    Random kinds retry with ``seed + 1, seed + 2, ...`` until the result is
    connected.
    """
    params = dict(params or {})
    if kind == "path":
        n = int(params["n"])
        return Graph(n, [(i, i + 1, 1) for i in range(n - 1)])
    if kind == "star":
        leaves = int(params["n"])
        return Graph(leaves + 1, [(0, i, 1) for i in range(1, leaves + 1)])
    if kind == "complete":
        n = int(params["n"])
        return Graph(n, [(i, j, 1) for i in range(n) for j in range(i + 1, n)])
    if kind == "grid":
        rows, cols = int(params["rows"]), int(params.get("cols", params["rows"]))
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1, 1))
                if r + 1 < rows:
                    edges.append((v, v + cols, 1))
        return Graph(rows * cols, edges)
    if kind == "tree":
        n = int(params["n"])
        rng = np.random.default_rng(seed)
        w_max = int(params.get("w_max", 1))
        edges = []
        for v in range(1, n):
            p = int(rng.integers(0, v))
            edges.append((p, v, int(rng.integers(1, w_max + 1))))
        return Graph(n, edges)
    if kind in ("gnm-random", "random-weighted"):
        n, m = int(params["n"]), int(params["m"])
        lo, hi = int(params.get("w_min", 1)), int(params.get("w_max", 10))
        for attempt in range(max_attempts):
            rng = np.random.default_rng(seed + attempt)
            pairs = _gnm_edges(n, m, rng)
            if kind == "random-weighted":
                ws = rng.integers(lo, hi + 1, size=len(pairs)).tolist()
            else:
                ws = [1] * len(pairs)
            try:
                return Graph(n, [(a, b, w) for (a, b), w in zip(pairs, ws)])
            except GraphError as exc:
                if "not connected" not in str(exc):
                    raise
        raise GraphError("could not generate connected graph")
    raise GraphError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")


# -- edge-list files ----------------------------------------------------------

def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_graph(g: Graph) -> str:
    """``"n m"`` then one ``"u v w"`` line per edge (w dropped if unweighted)."""
    lines = [f"{g.n} {g.m}"]
    plain = g.is_unweighted
    for u, v, w in g.edges:
        lines.append(f"{u} {v}" if plain else f"{u} {v} {_fmt(w * g.unit)}")
    return "\n".join(lines) + "\n"


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def parse_graph(text: str) -> Graph:
    rows = [(i + 1, line.split()) for i, line in enumerate(text.splitlines())]
    rows = [(i, toks) for i, toks in rows if toks and not toks[0].startswith("#")]
    if not rows:
        raise GraphError("empty graph file")
    lineno, head = rows[0]
    if len(head) != 2:
        raise GraphError(f"line {lineno}: expected header 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise GraphError(f"line {lineno}: header must be two integers") from None
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges but file has {len(body)}")
    raw = []
    for lineno, toks in body:
        if len(toks) not in (2, 3):
            raise GraphError(f"line {lineno}: expected 'u v' or 'u v w'")
        try:
            u, v = int(toks[0]), int(toks[1])
            w = Fraction(toks[2]) if len(toks) == 3 else Fraction(1)
        except (ValueError, ZeroDivisionError):
            raise GraphError(f"line {lineno}: malformed edge {' '.join(toks)!r}") from None
        if w <= 0:
            raise GraphError(f"line {lineno}: weight must be positive, got {toks[2]}")
        raw.append((u, v, w))
    den = math.lcm(*(w.denominator for *_, w in raw)) if raw else 1
    edges = [(u, v, int(w * den)) for u, v, w in raw]
    return Graph(n, edges, unit=Fraction(1, den))


def load_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text())
