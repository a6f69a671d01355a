"""The two techniques wrapped as stand-alone instances.

Labels are plain vertex ids.  Only *eligible* pairs are routable: same
color class for technique 1, ``u`` in ``U_j`` and target in ``W_j`` for
technique 2.
"""
from __future__ import annotations

import numpy as np

from ..bits import BitWidths
from ..centers import tz_centers
from ..coloring import compute_coloring
from ..oracle import ShortestPaths, VicinityIndex
from ..techniques import (
    round_robin, t1_header, t1_preprocess, t2_header, t2_preprocess, technique_vertex_tables,
)
from .common import SchemeInstance, SchemeParams, base_info, ceil_power, vicinity_size


def build_t1(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    n = sp.n
    q = ceil_power(n, 1, 2)
    qt = vicinity_size(n, q, params.alpha)
    vic = VicinityIndex(sp, qt)
    col = compute_coloring(vic.members, n, q, seed=[params.seed, 1], beta=params.beta)
    t1 = t1_preprocess(sp, col.color, params.eps, qt, keep_sequences=True)
    tables = technique_vertex_tables(sp, t1=t1)
    info = base_info(sp, q=q, q_tilde=qt, b=t1.b, hitting=len(t1.hitting),
                     max_waypoints=t1.max_waypoints())
    aux = {"color": col.color, "sequences": t1.sequences}
    return SchemeInstance("t1", params, sp.g, tables, list(range(n)), info, aux)


def build_t2(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    n = sp.n
    q = ceil_power(n, 1, 3)
    qt = vicinity_size(n, q, params.alpha)
    vic = VicinityIndex(sp, qt)
    col = compute_coloring(vic.members, n, q, seed=[params.seed, 1], beta=params.beta)
    cs = tz_centers(sp, ceil_power(n, 2, 3), seed=[params.seed, 2])
    part = round_robin(cs.centers.tolist(), q)
    t2 = t2_preprocess(sp, col.color, part, params.eps, qt, keep_sequences=True, vic=vic)
    tables = technique_vertex_tables(sp, t2=t2)
    info = base_info(sp, q=q, q_tilde=qt, b=t2.b, m_ratio=str(t2.m_ratio), length_cap=t2.length_cap,
                     max_sequence=max((len(s) for row in t2.sequences for s in row.values()), default=0))
    aux = {"color": col.color, "part": part, "sequences": t2.sequences}
    return SchemeInstance("t2", params, sp.g, tables, list(range(n)), info, aux)


def start_t1(tab, v: int):
    if v == tab.vertex:
        return None, {"branch": "local"}
    return t1_header(v), {"branch": "t1"}


def start_t2(tab, v: int):
    if v == tab.vertex:
        return None, {"branch": "local"}
    return t2_header(v), {"branch": "t2"}


def bits_plain(label: int, bw: BitWidths, info) -> int:
    return bw.vertex


def eligible_t1(inst: SchemeInstance) -> list[tuple[int, int]]:
    color = inst.aux["color"]
    return [(u, v) for u in range(inst.n) for v in np.flatnonzero(color == color[u]).tolist()]


def eligible_t2(inst: SchemeInstance) -> list[tuple[int, int]]:
    color, part = inst.aux["color"], inst.aux["part"]
    return [(u, w) for u in range(inst.n) for w, j in part.items() if j == color[u]]
