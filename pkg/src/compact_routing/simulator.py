"""Hop-by-hop delivery in the fixed-port model, and size accounting.

The simulator owns the network: at each hop it hands the scheme's step
function the current vertex's own table, the destination label and the
header, and moves the message along the returned port.  Step functions
never receive the graph or any other vertex's table.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .bits import BitWidths, width
from .routing import Header, VertexTable, header_bits, leg_bits, legs_bits
from .schemes import SchemeInstance, label_bits, route_step_for
from .treerouting import ARRIVED, label_bits as tree_label_bits, node_bits


class RoutingLoop(RuntimeError):
    pass


class RouteFailure(RuntimeError):
    def __init__(self, vertex: int, src: int, dst: int, cause: Exception):
        super().__init__(f"routing {src}->{dst} failed at vertex {vertex}: {cause}")
        self.vertex = vertex
        self.cause = cause


@dataclass
class RouteTrace:
    src: int
    dst: int
    hops: list[int]  # visited vertices, src first
    length: int  # sum of edge weights, in units of graph.unit
    header_bits: int
    branch: str
    events: list = field(default_factory=list)

    def as_record(self, d: int | None = None, unit=1) -> dict:
        rec = {
            "src": self.src, "dst": self.dst, "hops": self.hops,
            "length": str(self.length * unit), "header_bits": self.header_bits, "branch": self.branch,
        }
        if d is not None:
            rec["d"] = str(d * unit)
        return rec


def deliver(inst: SchemeInstance, u: int, v: int, hop_budget: int | None = None,
            keep_events: bool = False) -> RouteTrace:
    g = inst.graph
    step = route_step_for(inst.scheme)
    label = inst.labels[v]
    tables = inst.tables
    bw = inst.bw
    budget = 16 * g.n if hop_budget is None else hop_budget
    hops = [u]
    length = 0
    header = None
    max_bits = 0
    seen_legs = None
    branch = "local"
    events = []
    x = u
    while True:
        try:
            port, header, event = step(tables[x], label, header)
        except Exception as exc:  # surface with the offending vertex
            raise RouteFailure(x, u, v, exc) from exc
        if event:
            branch = event.get("branch", branch)
            if keep_events:
                events.append((x, event))
        if header.legs is not seen_legs:
            seen_legs = header.legs
            max_bits = max(max_bits, header_bits(header, bw))
        if port == ARRIVED:
            break
        if len(hops) > budget:
            raise RoutingLoop(f"routing loop: {u}->{v} exceeded {budget} hops")
        length += g.port_weight(x, port)
        x = g.neighbor(x, port)
        hops.append(x)
    if x != v:
        raise RouteFailure(x, u, v, RuntimeError("message stopped before the destination"))
    return RouteTrace(u, v, hops, length, max_bits, branch, events)


def write_traces(traces: Iterable[RouteTrace], dist: np.ndarray, path, unit=1) -> None:
    """JSON lines ``{src, dst, hops, length, d, header_bits, branch}``."""
    with open(path, "w") as fh:
        for t in traces:
            fh.write(json.dumps(t.as_record(int(dist[t.src, t.dst]), unit)) + "\n")


# --- size accounting ------------------------------------------------------------

def table_components(tab: VertexTable, bw: BitWidths) -> dict[str, int]:
    """Stored bits of one vertex, split by component."""
    port = width(tab.degree)
    out = {
        "local": len(tab.local) * (bw.vertex + port),
        "trees": sum(bw.vertex + 2 + node_bits(nd, bw, tab.degree) for nd in tab.trees.values()),
        "cluster_labels": sum(
            bw.vertex + tree_label_bits(lab, bw) for labs in tab.cluster_labels.values() for lab in labs.values()
        ),
        "t1": sum(bw.vertex + legs_bits(legs, bw) for legs in tab.t1.values()),
        "t2": sum(bw.vertex + legs_bits(legs, bw) for row in tab.t2.values() for legs in row.values()),
        "reps": sum(len(r) * bw.vertex for r in tab.reps.values())
        + sum(len(r) * bw.dist for r in tab.rep_dist.values()),
        "radius": len(tab.radius) * bw.dist,
        "intersect": sum(len(row) * 2 * bw.vertex for row in tab.intersect.values()),
    }
    return out


def table_bits(tab: VertexTable, bw: BitWidths) -> int:
    return sum(table_components(tab, bw).values())


def _stats(values) -> dict:
    a = np.asarray(values, dtype=np.float64)
    if len(a) == 0:
        return {"max": 0, "mean": 0.0, "p50": 0.0, "p90": 0.0, "p99": 0.0}
    return {
        "max": int(a.max()), "mean": float(a.mean()),
        "p50": float(np.percentile(a, 50)), "p90": float(np.percentile(a, 90)),
        "p99": float(np.percentile(a, 99)),
    }


@dataclass
class SizeReport:
    scheme: str
    n: int
    table_bits: dict
    label_bits: dict
    components_max: dict[str, int]
    per_vertex: list[int]

    def as_dict(self) -> dict:
        d = asdict(self)
        d.pop("per_vertex")
        return d


def measure(inst: SchemeInstance) -> SizeReport:
    bw = inst.bw
    comps = [table_components(t, bw) for t in inst.tables]
    per_vertex = [sum(c.values()) for c in comps]
    keys = comps[0].keys() if comps else ()
    comp_max = {k: max(c[k] for c in comps) for k in keys}
    labels = [label_bits(inst, v) for v in range(inst.n)]
    return SizeReport(inst.scheme, inst.n, _stats(per_vertex), _stats(labels), comp_max, per_vertex)


__all__ = [
    "RouteFailure", "RouteTrace", "RoutingLoop", "SizeReport", "deliver", "leg_bits", "measure",
    "table_bits", "table_components", "write_traces", "Header",
]
