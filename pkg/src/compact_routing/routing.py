"""Headers, per-vertex tables and the generic forwarding step.

A header is a short program of *legs* executed front to back.  Each leg is
resolved at the current vertex using only that vertex's :class:`VertexTable`
and the leg's own data:

``Local(t)``            forward with the vicinity table until ``t``
``Edge(at, port)``      at vertex ``at``, leave through ``port``
``TreeLeg(label)``      tree routing toward ``label``
``ClusterLookup(k, v)`` replace by the label of ``v`` stored here for tree ``(k, here)``
``Seq1(v)``             replace by the waypoint legs stored here for ``v``
``Seq2(level, v)``      same with doubling sequences; re-appended until ``v`` is reached

Schemes decide the first legs at the source; everything else is shared.
"""
from __future__ import annotations

from typing import NamedTuple

from .bits import BitWidths
from .treerouting import ARRIVED, TreeLabel, label_bits, tree_next_hop


class ProtocolError(RuntimeError):
    """A vertex was asked for state it does not hold (a preprocessing bug)."""


class Local(NamedTuple):
    target: int


class Edge(NamedTuple):
    at: int
    port: int


class TreeLeg(NamedTuple):
    label: TreeLabel


class ClusterLookup(NamedTuple):
    kind: object
    dest: int


class Seq1(NamedTuple):
    dest: int


class Seq2(NamedTuple):
    level: int
    dest: int


class Header(NamedTuple):
    legs: tuple
    pos: int
    branch: str


LEG_TAG_BITS = 3


def leg_bits(leg, bw: BitWidths) -> int:
    t = type(leg)
    if t is Local or t is Seq1:
        body = bw.vertex
    elif t is Edge:
        body = bw.vertex + bw.port
    elif t is TreeLeg:
        body = label_bits(leg.label, bw)
    elif t is ClusterLookup:
        body = bw.vertex + 2
    elif t is Seq2:
        body = bw.vertex + bw.count
    else:
        raise TypeError(f"unknown leg {leg!r}")
    return LEG_TAG_BITS + body


def legs_bits(legs, bw: BitWidths) -> int:
    return sum(leg_bits(x, bw) for x in legs)


def header_bits(header: Header, bw: BitWidths) -> int:
    return bw.count + legs_bits(header.legs, bw)


class VertexTable:
    """Everything one vertex stores.  Unused parts stay empty."""

    __slots__ = (
        "vertex", "degree", "local", "trees", "cluster_labels", "t1", "t2",
        "reps", "rep_dist", "radius", "intersect", "extra",
    )

    def __init__(self, vertex: int, degree: int):
        self.vertex = vertex
        self.degree = degree
        self.local: dict[int, int] = {}
        self.trees: dict = {}  # tree id -> TreeNode
        self.cluster_labels: dict = {}  # kind -> {member: TreeLabel}
        self.t1: dict[int, tuple] = {}  # destination -> legs
        self.t2: dict[int, dict[int, tuple]] = {}  # level -> destination -> legs
        self.reps: dict[int, tuple[int, ...]] = {}  # level -> color -> vertex
        self.rep_dist: dict[int, tuple[int, ...]] = {}
        self.radius: dict[int, int] = {}
        self.intersect: dict[int, dict[int, int]] = {}  # level -> v -> w
        self.extra: dict = {}

    def __getstate__(self):
        return {k: getattr(self, k) for k in self.__slots__}

    def __setstate__(self, state):
        for k, v in state.items():
            setattr(self, k, v)


def advance(table: VertexTable, header: Header):
    """Resolve legs at ``table.vertex`` until one yields a port.

    Returns ``(port | ARRIVED, header, events)``; ``events`` lists relay
    records ``("relay", vertex, level, dest, legs)`` emitted when a doubling
    sequence is loaded.
    """
    x = table.vertex
    legs, pos, branch = header
    events = None
    while pos < len(legs):
        leg = legs[pos]
        t = type(leg)
        if t is Local:
            if leg.target == x:
                pos += 1
                continue
            port = table.local.get(leg.target)
            if port is None:
                raise ProtocolError(f"vertex {x}: {leg.target} not in vicinity")
            return port, Header(legs, pos, branch), events
        if t is Edge:
            if leg.at != x:
                raise ProtocolError(f"vertex {x}: edge leg expected at {leg.at}")
            return leg.port, Header(legs, pos + 1, branch), events
        if t is TreeLeg:
            node = table.trees.get(leg.label.tree)
            if node is None:
                raise ProtocolError(f"vertex {x}: not in tree {leg.label.tree!r}")
            port = tree_next_hop(node, leg.label)
            if port == ARRIVED:
                pos += 1
                continue
            return port, Header(legs, pos, branch), events
        if t is ClusterLookup:
            try:
                label = table.cluster_labels[leg.kind][leg.dest]
            except KeyError:
                raise ProtocolError(f"vertex {x}: no {leg.kind!r} label for {leg.dest}") from None
            legs = (TreeLeg(label),) + legs[pos + 1:]
            pos = 0
            continue
        if t is Seq1:
            if leg.dest == x:
                pos += 1
                continue
            stored = table.t1.get(leg.dest)
            if stored is None:
                raise ProtocolError(f"vertex {x}: no waypoint sequence for {leg.dest}")
            legs = stored + legs[pos + 1:]
            pos = 0
            continue
        if t is Seq2:
            if leg.dest == x:
                pos += 1
                continue
            stored = table.t2.get(leg.level, {}).get(leg.dest)
            if stored is None:
                raise ProtocolError(f"vertex {x}: no doubling sequence for {leg.dest}")
            events = (events or []) + [("relay", x, leg.level, leg.dest, stored)]
            legs = stored + (leg,) + legs[pos + 1:]
            pos = 0
            continue
        raise ProtocolError(f"unknown leg {leg!r}")
    return ARRIVED, Header(legs, pos, branch), events
