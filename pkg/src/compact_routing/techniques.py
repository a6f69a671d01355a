"""Waypoint-sequence routing between predefined vertex sets.

Technique 1 routes between vertices of the same partition class.  For each
pair it stores a short list of waypoints on the canonical shortest path; a
new waypoint is added only when the jump out of the current vicinity makes
progress of at least ``d(u, v) / b``, otherwise the message is handed to a
nearby hitting-set vertex whose global tree finishes the job.

Technique 2 routes from a class ``U_j`` of a vicinity-hitting partition to
a target class ``W_j``.  Sequences start with two direct edges and then
chain subsequences whose progress threshold doubles; a sequence that stalls
ends at a nearby member of ``U_j`` (a relay) which holds its own sequence.

Both work on the original graph.  Technique 2 measures thresholds in units
of the smallest edge weight, which is the same as running it on the
shortest-path subgraph rescaled to weights in ``[1, M]``: that subgraph has
the same distances, vicinities and canonical paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bits import BitWidths
from .centers import global_tree
from .coloring import ColoringError
from .graph import Graph
from .hitting import greedy_hitting_set
from .local import local_entries
from .oracle import ShortestPaths, VicinityIndex
from .routing import Edge, Header, Local, Seq1, Seq2, TreeLeg, VertexTable, advance, legs_bits
from .treerouting import TreeRoutingScheme, node_bits


class SequenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class WaypointSequence:
    """Waypoints ``x_1 .. x_b'`` with how each is reached from its predecessor.

    ``modes[i]`` is ``"vicinity"`` (local routing), ``"edge"`` (one direct
    link) or ``"tree"`` (global tree of the final hitting vertex, entered at
    the previous waypoint).  ``terminal`` is ``"destination"``,
    ``"hitting"``, ``"partition"`` or, for an unfinished subsequence,
    ``"full"``.
    """

    source: int
    dest: int
    waypoints: tuple[int, ...]
    modes: tuple[str, ...]
    terminal: str

    def __len__(self):
        return len(self.waypoints)


@dataclass(frozen=True)
class DoublingSequence:
    source: int
    dest: int
    prefix: tuple[int, ...]
    subsequences: tuple[WaypointSequence, ...]
    thresholds: tuple[Fraction, ...]

    @property
    def waypoints(self) -> tuple[int, ...]:
        out = list(self.prefix)
        for sub in self.subsequences:
            out.extend(sub.waypoints)
        return tuple(out)

    @property
    def modes(self) -> tuple[str, ...]:
        out = ["edge"] * len(self.prefix)
        for sub in self.subsequences:
            out.extend(sub.modes)
        return tuple(out)

    @property
    def terminal(self) -> str:
        return self.subsequences[-1].terminal if self.subsequences else "destination"

    def __len__(self):
        return len(self.waypoints)


def eps_b(eps) -> int:
    """``ceil(2 / eps)`` computed exactly."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    return math.ceil(Fraction(2) / eps)


def to_legs(g: Graph, start: int, waypoints, modes, tree_label=None) -> tuple:
    """Header legs that visit ``waypoints`` from ``start``."""
    legs = []
    prev = start
    for x, mode in zip(waypoints, modes):
        if mode == "vicinity":
            legs.append(Local(x))
        elif mode == "edge":
            legs.append(Edge(prev, g.port(prev, x)))
        elif mode == "tree":
            legs.append(TreeLeg(tree_label))
            continue  # the hitting vertex itself is never visited
        else:
            raise ValueError(mode)
        prev = x
    return tuple(legs)


def legs_vertices(g: Graph, start: int, legs) -> list[int]:
    """Waypoint vertices named by ``Local``/``Edge`` legs, in order."""
    out = []
    prev = start
    for leg in legs:
        if isinstance(leg, Local):
            prev = leg.target
        elif isinstance(leg, Edge):
            prev = g.neighbor(leg.at, leg.port)
        else:
            continue
        out.append(prev)
    return out


# --- technique 1 ----------------------------------------------------------

def build_sequence_t1(sp: ShortestPaths, vic: VicinityIndex, u: int, v: int, b: int, hitting_first: np.ndarray) -> WaypointSequence:
    """Run the three-case waypoint loop for the pair ``(u, v)``.

    ``hitting_first[x]`` is the smallest-id hitting-set vertex in
    ``B(x, q~)``.
    """
    if u == v:
        raise ValueError("source equals destination")
    d = sp.dist
    duv = int(d[u, v])
    cap = 2 * b + 1
    x = u
    wp, modes = [], []
    while True:
        if vic.mask[x, v]:
            wp.append(v)
            modes.append("vicinity")
            terminal = "destination"
            break
        y, z = vic.boundary_edge(x, v)
        if z == v:
            wp += [y, v]
            modes += ["vicinity", "edge"]
            terminal = "destination"
            break
        if int(d[x, z]) * b < duv:
            h = int(hitting_first[x])
            if h < 0:
                raise SequenceError(f"hitting set misses the vicinity of {x}")
            wp.append(h)
            modes.append("tree")
            terminal = "hitting"
            break
        wp += [y, z]
        modes += ["vicinity", "edge"]
        x = z
        if len(wp) > cap:
            break
    if len(wp) > cap:
        raise SequenceError(f"sequence {u}->{v} has {len(wp)} > {cap} waypoints")
    return WaypointSequence(u, v, tuple(wp), tuple(modes), terminal)


@dataclass
class Technique1Tables:
    classes: np.ndarray  # class id per vertex
    eps: Fraction
    b: int
    ell: int
    vic: VicinityIndex
    hitting: list[int]
    trees: dict[int, TreeRoutingScheme]  # h -> T(h)
    legs: list[dict[int, tuple]]  # per source: dest -> header legs
    sequences: list[dict[int, WaypointSequence]] | None = None

    def max_waypoints(self) -> int:
        if self.sequences is None:
            raise ValueError("sequences were not kept")
        return max((len(s) for row in self.sequences for s in row.values()), default=0)


def t1_preprocess(sp: ShortestPaths, classes, eps, ell: int, keep_sequences: bool = False,
                  trees: dict | None = None) -> Technique1Tables:
    """Hitting set, global trees and every intra-class waypoint sequence.

    ``trees`` may hold already-built global trees keyed by root; missing
    ones are built and added to it.
    """
    classes = np.asarray(classes)
    n = sp.n
    if len(classes) != n:
        raise ValueError("partition must assign a class to every vertex")
    eps = Fraction(eps)
    b = eps_b(eps)
    vic = VicinityIndex(sp, ell)
    hitting = greedy_hitting_set(vic.members, n)
    h_mask = np.zeros(n, dtype=bool)
    h_mask[hitting] = True
    h_first = vic.first_in(h_mask)
    trees = {} if trees is None else trees
    for h in hitting:
        if h not in trees:
            trees[h] = global_tree(sp, h)
    g = sp.g
    members = {c: np.flatnonzero(classes == c).tolist() for c in np.unique(classes).tolist()}
    all_legs = []
    all_seqs = [] if keep_sequences else None
    for u in range(n):
        row, srow = {}, {}
        for v in members[classes[u]]:
            if v == u:
                continue
            seq = build_sequence_t1(sp, vic, u, v, b, h_first)
            label = trees[seq.waypoints[-1]].labels[v] if seq.terminal == "hitting" else None
            row[v] = to_legs(g, u, seq.waypoints, seq.modes, label)
            if keep_sequences:
                srow[v] = seq
        all_legs.append(row)
        if keep_sequences:
            all_seqs.append(srow)
    return Technique1Tables(classes, eps, b, vic.ell, vic, hitting, trees, all_legs, all_seqs)


# --- technique 2 ----------------------------------------------------------

def build_subsequence(sp: ShortestPaths, vic: VicinityIndex, x: int, w: int, s: Fraction, b: int,
                      partition_first: np.ndarray, scale: int = 1) -> WaypointSequence:
    """One threshold-``s`` subsequence from ``x`` toward ``w``.

    Distances are divided by ``scale`` (the smallest edge weight) before
    being compared with ``s``.  ``partition_first[y]`` is the smallest-id
    vertex of ``B(y, q~) & U_j``.
    """
    d = sp.dist
    start = x
    wp, modes = [], []
    while True:
        if vic.mask[x, w]:
            wp.append(w)
            modes.append("vicinity")
            terminal = "destination"
            break
        y, z = vic.boundary_edge(x, w)
        if z == w:
            wp += [y, w]
            modes += ["vicinity", "edge"]
            terminal = "destination"
            break
        if Fraction(int(d[x, z]), scale) < s:
            r = int(partition_first[x])
            if r < 0:
                raise SequenceError(f"partition class misses the vicinity of {x}")
            wp.append(r)
            modes.append("vicinity")
            terminal = "partition"
            break
        wp += [y, z]
        modes += ["vicinity", "edge"]
        x = z
        if len(wp) >= 2 * b:
            terminal = "full"
            break
    return WaypointSequence(start, w, tuple(wp), tuple(modes), terminal)


def build_sequence_t2(sp: ShortestPaths, vic: VicinityIndex, u: int, w: int, b: int,
                      partition_first: np.ndarray, scale: int = 1, cap: int | None = None) -> DoublingSequence:
    """Two path edges, then subsequences with thresholds ``2/b, 4/b, ...``."""
    if u == w:
        raise ValueError("source equals destination")
    nh = sp.next_hop[w]
    u1 = int(nh[u])
    if u1 == w:
        return DoublingSequence(u, w, (u1,), (), ())
    u2 = int(nh[u1])
    if u2 == w:
        return DoublingSequence(u, w, (u1, u2), (), ())
    subs, thresholds = [], []
    x, s = u2, Fraction(2, b)
    total = 2
    while True:
        sub = build_subsequence(sp, vic, x, w, s, b, partition_first, scale)
        subs.append(sub)
        thresholds.append(s)
        total += len(sub)
        if cap is not None and total > cap:
            raise SequenceError(f"sequence {u}->{w} exceeds {cap} vertices")
        if sub.terminal != "full":
            break
        x, s = sub.waypoints[-1], 2 * s
    return DoublingSequence(u, w, (u1, u2), tuple(subs), tuple(thresholds))


def shortest_path_edge_range(g: Graph, dist: np.ndarray) -> tuple[int, int]:
    """``(w_min, w_max)`` over edges that are shortest paths, in ``g.unit``."""
    src, dst, w = g.edge_arrays()
    tight = dist[src, dst] == w
    return int(w[tight].min()), int(w[tight].max())


def t2_length_cap(n: int, b: int, m_ratio: Fraction) -> int:
    return 2 * b * math.ceil(math.log2(n * m_ratio)) + 2


@dataclass
class Technique2Tables:
    u_classes: np.ndarray  # class per vertex
    targets: dict[int, int]  # target -> class index
    eps: Fraction
    b: int
    ell: int
    vic: VicinityIndex
    scale: int
    m_ratio: Fraction
    legs: list[dict[int, tuple]]
    sequences: list[dict[int, DoublingSequence]] | None = None

    @property
    def length_cap(self) -> int:
        return t2_length_cap(len(self.u_classes), self.b, self.m_ratio)


def round_robin(vertices, parts: int) -> dict[int, int]:
    """Class index per vertex: sort by id, deal out in turn."""
    return {int(v): i % parts for i, v in enumerate(sorted(int(x) for x in vertices))}


def t2_preprocess(sp: ShortestPaths, u_classes, targets: dict[int, int], eps, ell: int,
                  keep_sequences: bool = False, vic: VicinityIndex | None = None) -> Technique2Tables:
    """Doubling sequences from every ``u`` to every target of its class.

    ``u_classes[u]`` is the class of ``u``; ``targets`` maps each target to
    its class.  Every class must meet every vicinity ``B(x, ell)``.
    """
    u_classes = np.asarray(u_classes)
    n = sp.n
    eps = Fraction(eps)
    b = eps_b(eps) + 1
    vic = VicinityIndex(sp, ell) if vic is None else vic
    nclass = int(u_classes.max()) + 1 if n else 0
    firsts = []
    for j in range(nclass):
        f = vic.first_in(u_classes == j)
        if (f < 0).any():
            raise ColoringError(f"class {j} misses the vicinity of vertex {int(np.argmax(f < 0))}")
        firsts.append(f)
    w_min, w_max = shortest_path_edge_range(sp.g, sp.dist)
    m_ratio = Fraction(w_max, w_min)
    cap = t2_length_cap(n, b, m_ratio)
    by_class: dict[int, list[int]] = {}
    for t, j in sorted(targets.items()):
        if not 0 <= j < nclass:
            raise ValueError(f"target {t} has class {j} outside 0..{nclass - 1}")
        by_class.setdefault(j, []).append(t)
    g = sp.g
    all_legs, all_seqs = [], [] if keep_sequences else None
    for u in range(n):
        j = int(u_classes[u])
        row, srow = {}, {}
        for w in by_class.get(j, ()):
            if w == u:
                continue
            seq = build_sequence_t2(sp, vic, u, w, b, firsts[j], w_min, cap)
            row[w] = to_legs(g, u, seq.waypoints, seq.modes)
            if keep_sequences:
                srow[w] = seq
        all_legs.append(row)
        if keep_sequences:
            all_seqs.append(srow)
    return Technique2Tables(u_classes, dict(targets), eps, b, vic.ell, vic, w_min, m_ratio, all_legs, all_seqs)


# --- stand-alone routing over one technique -------------------------------

def technique_vertex_tables(sp: ShortestPaths, t1: Technique1Tables | None = None,
                            t2: Technique2Tables | None = None, level: int = 0) -> list[VertexTable]:
    """Per-vertex tables holding just what one technique needs."""
    g = sp.g
    tables = [VertexTable(u, g.degree(u)) for u in range(sp.n)]
    vic = t1.vic if t1 is not None else t2.vic
    for u, tab in enumerate(tables):
        tab.local = local_entries(sp, vic, u)
        if t1 is not None:
            tab.t1 = t1.legs[u]
            for h, tree in t1.trees.items():
                tab.trees[tree.tree_id] = tree.nodes[u]
        if t2 is not None:
            tab.t2[level] = t2.legs[u]
    return tables


def t1_route_step(table: VertexTable, header: Header):
    """Forward one hop of a technique-1 delivery (see :func:`advance`)."""
    return advance(table, header)


def t2_route_step(table: VertexTable, header: Header):
    return advance(table, header)


def t1_header(dest: int) -> Header:
    return Header((Seq1(dest),), 0, "t1")


def t2_header(dest: int, level: int = 0) -> Header:
    return Header((Seq2(level, dest),), 0, "t2")


def t1_entry_bits(legs: tuple, bw: BitWidths) -> int:
    return bw.vertex + legs_bits(legs, bw)


def tree_tables_bits(tab: VertexTable, bw: BitWidths) -> int:
    return sum(bw.vertex + node_bits(node, bw, tab.degree) for node in tab.trees.values())
