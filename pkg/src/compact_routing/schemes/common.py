"""Shared pieces of every scheme: parameters, the built instance, helpers."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from ..bits import BitWidths
from ..graph import Graph
from ..oracle import ShortestPaths
from ..routing import Header, VertexTable, advance
from ..treerouting import ARRIVED, TreeRoutingScheme


class SchemeError(ValueError):
    pass


@dataclass(frozen=True)
class SchemeParams:
    eps: Fraction = Fraction(1, 2)
    k: int = 3
    ell: int = 2
    alpha: float = 1.0
    beta: float = 4.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eps", Fraction(self.eps).limit_denominator(10**6))
        if self.eps <= 0:
            raise SchemeError("epsilon must be positive")
        if self.alpha <= 0 or self.beta <= 1:
            raise SchemeError("need alpha > 0 and beta > 1")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["eps"] = str(self.eps)
        return d


def ceil_power(n: int, num: int, den: int) -> int:
    """``ceil(n ** (num / den))`` in exact integer arithmetic."""
    target = n ** num
    x = max(1, int(round(n ** (num / den))))
    while x ** den < target:
        x += 1
    while x > 1 and (x - 1) ** den >= target:
        x -= 1
    return x


def vicinity_size(n: int, x: int, alpha: float) -> int:
    """``x~ = ceil(alpha * x * log2 n)``, clamped to ``n``."""
    return max(1, min(n, math.ceil(alpha * x * math.log2(max(n, 2)) - 1e-9)))


@dataclass
class SchemeInstance:
    """Tables, labels and parameters of one built scheme.

    ``aux`` keeps preprocessing facts used only by tests and reports
    (never by routing).
    """

    scheme: str
    params: SchemeParams
    graph: Graph
    tables: list[VertexTable]
    labels: list
    info: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def bw(self) -> BitWidths:
        return BitWidths(**self.info["widths"])


StartFn = Callable[[VertexTable, object], tuple[Header, dict | None]]


def new_tables(g: Graph) -> list[VertexTable]:
    return [VertexTable(u, g.degree(u)) for u in range(g.n)]


def attach_tree(tables: list[VertexTable], tree: TreeRoutingScheme) -> None:
    for v, node in tree.nodes.items():
        tables[v].trees[tree.tree_id] = node


def attach_cluster_labels(tables: list[VertexTable], kind, root: int, tree: TreeRoutingScheme) -> None:
    tables[root].cluster_labels.setdefault(kind, {}).update(tree.labels)


def widths_for(sp: ShortestPaths) -> BitWidths:
    return BitWidths.for_graph(sp.n, sp.g.max_degree, int(sp.dist.max()))


def base_info(sp: ShortestPaths, **extra) -> dict:
    bw = widths_for(sp)
    info = {"n": sp.n, "m": len(sp.g.edges), "widths": asdict(bw)}
    info.update(extra)
    return info


def intersection_table(sp: ShortestPaths, members: np.ndarray, in_cluster: np.ndarray) -> list[dict[int, int]]:
    """Per ``u``: ``v -> argmin_{w in B(u) & B_A(v)} d(u, w) + d(w, v)``.

    ``w`` ranges over ``members[u]`` with ``v`` in its cluster; ties go to
    the smallest id.
    """
    d = sp.dist
    out = []
    for u in range(sp.n):
        m = np.sort(members[u])
        sub = in_cluster[m]
        cols = np.flatnonzero(sub.any(axis=0))
        if len(cols) == 0:
            out.append({})
            continue
        sub = sub[:, cols]
        cost = d[u, m][:, None] + d[np.ix_(m, cols)]
        cost = np.where(sub, cost, np.iinfo(np.int64).max)
        best = m[np.argmin(cost, axis=0)]
        out.append(dict(zip(cols.tolist(), best.tolist())))
    return out


def make_route_step(start: StartFn):
    """Wrap a scheme's source decision into a per-hop step function."""

    def route_step(table: VertexTable, label, header: Header | None):
        event = None
        if header is None:
            header, event = start(table, label)
            if header is None:
                return ARRIVED, Header((), 0, "local"), event
        port, header, relays = advance(table, header)
        if relays:
            event = dict(event or {})
            event["relays"] = relays
        return port, header, event

    return route_step
