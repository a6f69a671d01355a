"""The (4k-5) hierarchy baseline and the (4k-7+eps) scheme built on it.

Levels ``V = A_0 > A_1 > ... > A_{k-1} > A_k = {}``; ``A_1`` comes from the
bounded-cluster construction so that clusters of level-0 vertices stay small,
higher levels sample the previous one with probability ``n^(-1/k)``.  The
cluster of ``w`` in ``A_i \\ A_{i+1}`` is ``{u : d(u, w) < d(u, A_{i+1})}``.
Pivots are taken top-down and keep the higher pivot on ties, so ``v`` lies in
the cluster of each of its pivots.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..bits import BitWidths, width
from ..centers import INF, spt_parents, tz_centers
from ..coloring import compute_coloring, representatives
from ..local import local_entries
from ..oracle import ShortestPaths, VicinityIndex
from ..routing import Header, Local, Seq2, TreeLeg
from ..techniques import round_robin, t2_preprocess
from ..treerouting import TreeLabel, build_tree_from_parents, label_bits
from .common import (
    SchemeError, SchemeInstance, SchemeParams, attach_tree, base_info, ceil_power, new_tables,
    vicinity_size,
)


class TZLabel(NamedTuple):
    v: int
    levels: tuple  # ((pivot_i, tree label of v in T(pivot_i)) for i in 0..k-1)
    part: int = -1  # class of pivot_{k-2} (4k-7 scheme only)


class Hierarchy(NamedTuple):
    levels: list  # sorted center arrays A_0 .. A_{k-1}
    top: np.ndarray  # highest level containing each vertex
    pivot: np.ndarray  # [i, v], i in 0..k
    pdist: np.ndarray  # [i, v]
    in_cluster: np.ndarray  # [w, u]
    attempts: int


def build_hierarchy(sp: ShortestPaths, k: int, seed: int, max_tries: int = 100) -> Hierarchy:
    n = sp.n
    d = sp.dist
    a1 = tz_centers(sp, ceil_power(n, k - 1, k), seed=[seed, 3]).centers
    prob = n ** (-1.0 / k)
    for attempt in range(max_tries):
        rng = np.random.default_rng([seed, 4, attempt])
        levels = [np.arange(n), a1]
        for _ in range(2, k):
            prev = levels[-1]
            levels.append(prev[rng.random(len(prev)) < prob])
        if len(levels[k - 1]) > 0:
            break
    else:
        raise SchemeError("could not sample a nonempty top level")
    top = np.zeros(n, dtype=np.int64)
    for i, A in enumerate(levels):
        top[A] = i
    pivot = np.full((k + 1, n), -1, dtype=np.int64)
    pdist = np.full((k + 1, n), INF, dtype=np.int64)
    for i in range(k - 1, -1, -1):
        A = levels[i]
        idx = np.argmin(d[:, A], axis=1)
        cand, cd = A[idx], d[np.arange(n), A[idx]]
        keep = cd == pdist[i + 1]
        pivot[i] = np.where(keep, pivot[i + 1], cand)
        pdist[i] = cd
    # w at top level i covers u when d(u, w) < d(u, A_{i+1})
    in_cluster = d < pdist[top + 1][:, :]
    return Hierarchy(levels, top, pivot, pdist, in_cluster, attempt + 1)


def _tz_tables(sp: ShortestPaths, h: Hierarchy):
    g, n = sp.g, sp.n
    tables = new_tables(g)
    trees = {}
    for w in range(n):
        members = np.flatnonzero(h.in_cluster[w])
        tree = build_tree_from_parents(g, w, spt_parents(sp, w, members), ("TZ", w))
        trees[w] = tree
        attach_tree(tables, tree)
        if h.top[w] == 0:
            tables[w].cluster_labels["TZ"] = dict(tree.labels)
    k = h.pivot.shape[0] - 1
    labels = []
    for v in range(n):
        levels = tuple((int(h.pivot[i, v]), trees[int(h.pivot[i, v])].labels[v]) for i in range(k))
        labels.append(TZLabel(v, levels))
    return tables, labels, trees


def _hierarchy_info(h: Hierarchy) -> dict:
    return {
        "level_sizes": [len(A) for A in h.levels],
        "max_cluster_level0": int(h.in_cluster[h.top == 0].sum(axis=1).max(initial=0)),
        "max_bunch": int(h.in_cluster.sum(axis=0).max()),
        "sampling_attempts": h.attempts,
    }


def build_tz45(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    k = params.k
    if k < 2:
        raise SchemeError("need k >= 2")
    h = build_hierarchy(sp, k, params.seed)
    tables, labels, _ = _tz_tables(sp, h)
    info = base_info(sp, k=k, **_hierarchy_info(h))
    aux = {"pivot": h.pivot, "pdist": h.pdist, "top": h.top}
    return SchemeInstance("tz45", params, sp.g, tables, labels, info, aux)


def _tz_choice(tab, label: TZLabel):
    """``(branch, tree label)`` of the hierarchy rule, or ``None``."""
    v = label.v
    own = tab.cluster_labels.get("TZ", {}).get(v)
    if own is not None:
        return "cluster", own
    for i, (p, lab) in enumerate(label.levels):
        if lab.tree in tab.trees:
            return i, lab
    return None


def start_tz45(tab, label: TZLabel):
    if label.v == tab.vertex:
        return None, {"branch": "local"}
    choice = _tz_choice(tab, label)
    if choice is None:
        raise SchemeError(f"vertex {tab.vertex}: no pivot tree of {label.v}")
    i, lab = choice
    branch = "cluster" if i == "cluster" else f"tree{i}"
    return Header((TreeLeg(lab),), 0, "tree"), {"branch": branch}


def bits_tz45(label: TZLabel, bw: BitWidths, info) -> int:
    return bw.vertex + sum(bw.vertex + label_bits(lab, bw) for _, lab in label.levels)


def build_scheme4k7(sp: ShortestPaths, params: SchemeParams) -> SchemeInstance:
    g, n = sp.g, sp.n
    k = params.k
    if k < 3:
        raise SchemeError("scheme4k7 needs k >= 3 (4k-7 is vacuous for k = 2)")
    h = build_hierarchy(sp, k, params.seed)
    tables, labels, _ = _tz_tables(sp, h)
    q = ceil_power(n, 1, k)
    qt = vicinity_size(n, q, params.alpha)
    vic = VicinityIndex(sp, qt)
    col = compute_coloring(vic.members, n, q, seed=[params.seed, 1], beta=params.beta)
    reps = representatives(vic.members, col)
    part = round_robin(h.levels[k - 2].tolist(), q)
    t2 = t2_preprocess(sp, col.color, part, params.eps, qt, vic=vic)
    for u, tab in enumerate(tables):
        tab.local = local_entries(sp, vic, u)
        tab.t2[0] = t2.legs[u]
        tab.reps[0] = tuple(reps[u].tolist())
    labels = [lab._replace(part=part[lab.levels[k - 2][0]]) for lab in labels]
    info = base_info(sp, k=k, q=q, q_tilde=qt, b=t2.b, m_ratio=str(t2.m_ratio),
                     coloring_attempts=col.attempts, **_hierarchy_info(h))
    aux = {"pivot": h.pivot, "pdist": h.pdist, "top": h.top, "color": col.color}
    return SchemeInstance("scheme4k7", params, g, tables, labels, info, aux)


def start_scheme4k7(tab, label: TZLabel):
    v = label.v
    if v == tab.vertex:
        return None, {"branch": "local"}
    if v in tab.local:
        return Header((Local(v),), 0, "local"), {"branch": "local"}
    choice = _tz_choice(tab, label)
    k = len(label.levels)
    if choice is not None and (choice[0] == "cluster" or choice[0] <= k - 2):
        i, lab = choice
        branch = "cluster" if i == "cluster" else f"tree{i}"
        return Header((TreeLeg(lab),), 0, "tree"), {"branch": branch}
    p, lab = label.levels[k - 2]
    legs = (Local(tab.reps[0][label.part]), Seq2(0, p), TreeLeg(lab))
    return Header(legs, 0, "t2"), {"branch": "t2"}


def bits_scheme4k7(label: TZLabel, bw: BitWidths, info) -> int:
    return bits_tz45(label, bw, info) + width(info["q"])
