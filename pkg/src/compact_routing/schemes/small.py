"""The 3+eps warm-up, the (2+eps, 1) scheme and the 5+eps scheme."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..bits import BitWidths, width
from ..centers import build_cluster_trees, global_tree, tz_centers
from ..coloring import compute_coloring, representatives
from ..local import local_entries
from ..oracle import ShortestPaths, VicinityIndex
from ..routing import ClusterLookup, Edge, Header, Local, Seq1, Seq2, TreeLeg
from ..techniques import round_robin, t1_preprocess, t2_preprocess
from ..treerouting import TreeLabel, label_bits
from .common import (
    SchemeError, SchemeInstance, SchemeParams, attach_cluster_labels, attach_tree, base_info,
    ceil_power, intersection_table, new_tables, vicinity_size,
)


class WarmupLabel(NamedTuple):
    v: int
    color: int


class Label21(NamedTuple):
    v: int
    color: int
    pivot: int
    pivot_dist: int
    tree: TreeLabel  # v in the global tree of its pivot


class Label5(NamedTuple):
    v: int
    pivot: int
    part: int  # class of the pivot in the center partition
    port: int  # first edge pivot -> v, -1 when v is its own pivot


def _colored_vicinities(sp: ShortestPaths, params: SchemeParams, q: int, salt: int):
    n = sp.n
    qt = vicinity_size(n, q, params.alpha)
    vic = VicinityIndex(sp, qt)
    col = compute_coloring(vic.members, n, q, seed=[params.seed, salt], beta=params.beta)
    return qt, vic, col, representatives(vic.members, col)


def _reps_into(tables, reps: np.ndarray, sp: ShortestPaths, level: int = 0, with_dist=False):
    for u, tab in enumerate(tables):
        tab.reps[level] = tuple(reps[u].tolist())
        if with_dist:
            tab.rep_dist[level] = tuple(sp.dist[u, reps[u]].tolist())


# --- warm-up ---------------------------------------------------------------

def build_warmup3(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    g, n = sp.g, sp.n
    q = ceil_power(n, 1, 2)
    qt, vic, col, reps = _colored_vicinities(sp, params, q, 1)
    t1 = t1_preprocess(sp, col.color, params.eps, qt)
    tables = new_tables(g)
    for u, tab in enumerate(tables):
        tab.local = local_entries(sp, vic, u)
        tab.t1 = t1.legs[u]
    _reps_into(tables, reps, sp)
    for tree in t1.trees.values():
        attach_tree(tables, tree)
    labels = [WarmupLabel(v, int(col.color[v])) for v in range(n)]
    info = base_info(sp, q=q, q_tilde=qt, b=t1.b, hitting=len(t1.hitting), coloring_attempts=col.attempts)
    return SchemeInstance("warmup3", params, g, tables, labels, info, {"color": col.color})


def start_warmup3(tab, label: WarmupLabel):
    v = label.v
    if v == tab.vertex:
        return None, {"branch": "local"}
    if v in tab.local:
        return Header((Local(v),), 0, "local"), {"branch": "local"}
    rep = tab.reps[0][label.color]
    return Header((Local(rep), Seq1(v)), 0, "t1"), {"branch": "t1"}


def bits_warmup3(label: WarmupLabel, bw: BitWidths, info) -> int:
    return bw.vertex + width(info["q"])


# --- (2+eps, 1) -------------------------------------------------------------

def build_scheme21(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    g, n = sp.g, sp.n
    if not g.is_unweighted:
        raise SchemeError("scheme requires unweighted")
    q = ceil_power(n, 1, 3)
    qt, vic, col, reps = _colored_vicinities(sp, params, q, 1)
    cs = build_cluster_trees(sp, tz_centers(sp, ceil_power(n, 2, 3), seed=[params.seed, 2]))
    gtrees = {int(a): global_tree(sp, int(a)) for a in cs.centers}
    t1 = t1_preprocess(sp, col.color, params.eps, qt, trees=gtrees)
    inter = intersection_table(sp, vic.members, cs.in_cluster)

    tables = new_tables(g)
    for u, tab in enumerate(tables):
        tab.local = local_entries(sp, vic, u)
        tab.t1 = t1.legs[u]
        tab.intersect[0] = inter[u]
    _reps_into(tables, reps, sp, with_dist=True)
    for tree in gtrees.values():
        attach_tree(tables, tree)
    for w, tree in cs.trees.items():
        attach_tree(tables, tree)
        attach_cluster_labels(tables, "C", w, tree)

    labels = []
    for v in range(n):
        p = int(cs.pivot[v])
        labels.append(Label21(v, int(col.color[v]), p, int(cs.dist_to_centers[v]), gtrees[p].labels[v]))
    info = base_info(sp, q=q, q_tilde=qt, s=ceil_power(n, 2, 3), centers=len(cs.centers),
                     center_rounds=cs.rounds, b=t1.b, hitting=len(t1.hitting),
                     coloring_attempts=col.attempts)
    aux = {"color": col.color, "in_cluster": cs.in_cluster, "pivot": cs.pivot}
    return SchemeInstance("scheme21", params, g, tables, labels, info, aux)


def start_scheme21(tab, label: Label21):
    v = label.v
    if v == tab.vertex:
        return None, {"branch": "local"}
    w = tab.intersect[0].get(v)
    if w is not None:
        return Header((Local(w), ClusterLookup("C", v)), 0, "intersection"), {"branch": "intersection"}
    if label.pivot_dist <= tab.rep_dist[0][label.color]:
        return Header((TreeLeg(label.tree),), 0, "tree"), {"branch": "tree"}
    rep = tab.reps[0][label.color]
    return Header((Local(rep), Seq1(v)), 0, "t1"), {"branch": "t1"}


def bits_scheme21(label: Label21, bw: BitWidths, info) -> int:
    return 2 * bw.vertex + width(info["q"]) + bw.dist + label_bits(label.tree, bw)


# --- 5+eps --------------------------------------------------------------------

def build_scheme5(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    g, n = sp.g, sp.n
    q = ceil_power(n, 1, 3)
    qt, vic, col, reps = _colored_vicinities(sp, params, q, 1)
    cs = build_cluster_trees(sp, tz_centers(sp, ceil_power(n, 2, 3), seed=[params.seed, 2]))
    part = round_robin(cs.centers.tolist(), q)
    t2 = t2_preprocess(sp, col.color, part, params.eps, qt, vic=vic)

    tables = new_tables(g)
    for u, tab in enumerate(tables):
        tab.local = local_entries(sp, vic, u)
        tab.t2[0] = t2.legs[u]
    _reps_into(tables, reps, sp)
    for w, tree in cs.trees.items():
        attach_tree(tables, tree)
        attach_cluster_labels(tables, "C", w, tree)

    labels = []
    for v in range(n):
        p = int(cs.pivot[v])
        port = -1 if p == v else g.port(p, int(sp.next_hop[v, p]))
        labels.append(Label5(v, p, part[p], port))
    info = base_info(sp, q=q, q_tilde=qt, s=ceil_power(n, 2, 3), centers=len(cs.centers),
                     center_rounds=cs.rounds, b=t2.b, m_ratio=str(t2.m_ratio),
                     coloring_attempts=col.attempts)
    aux = {"color": col.color, "in_cluster": cs.in_cluster, "pivot": cs.pivot, "part": part}
    return SchemeInstance("scheme5", params, g, tables, labels, info, aux)


def start_scheme5(tab, label: Label5):
    v = label.v
    if v == tab.vertex:
        return None, {"branch": "local"}
    if v in tab.local:
        return Header((Local(v),), 0, "local"), {"branch": "local"}
    own = tab.cluster_labels.get("C", {}).get(v)
    if own is not None:
        return Header((TreeLeg(own),), 0, "cluster"), {"branch": "cluster"}
    rep = tab.reps[0][label.part]
    legs = (Local(rep), Seq2(0, label.pivot))
    if label.pivot != v:
        legs += (Edge(label.pivot, label.port), ClusterLookup("C", v))
    return Header(legs, 0, "t2"), {"branch": "t2"}


def bits_scheme5(label: Label5, bw: BitWidths, info) -> int:
    return 2 * bw.vertex + width(info["q"]) + bw.port
