"""The (3 - 2/l + eps, 2) and (3 + 2/l + eps, 2) schemes for unweighted graphs.

Both use nested vicinities ``B_i(u)`` (``B_0(u) = {u}``, then sizes
``ceil(alpha q^i log2 n)``) and center sets ``L_0 = V, L_1, ..., L_l`` whose
clusters hold ``O(q^i)`` vertices.  A pair is routed exactly when some
``B_i(u)`` meets the bunch of ``v`` with respect to ``L_{l-i}``; otherwise one
level ``j`` is picked from the vicinity radii of ``u`` and the pivot
distances in the label of ``v``, and the message travels
``u -> rep -> pivot -> v`` through a level-``j`` doubling sequence.

The two variants differ only in ``q``, the coloring levels and how the
chosen level pairs with a center level:

* minus: ``q = n^(1/(2l-1))``, levels ``j in 0..l-1`` paired with ``k = l-j-1``;
* plus:  ``q = n^(1/(2l+1))``, levels ``j in 1..l``   paired with ``k = l-j+1``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ..bits import BitWidths, width
from ..centers import build_cluster_trees, tz_centers
from ..coloring import compute_coloring, representatives
from ..local import local_entries
from ..oracle import ShortestPaths, VicinityIndex
from ..routing import ClusterLookup, Edge, Header, Local, Seq2, TreeLeg
from ..techniques import round_robin, t2_preprocess
from .common import (
    SchemeError, SchemeInstance, SchemeParams, attach_cluster_labels, attach_tree, base_info,
    ceil_power, intersection_table, new_tables, vicinity_size,
)


class LevelEntry(NamedTuple):
    pivot: int
    part: int
    dist: int
    port: int  # first edge pivot -> v, -1 when v is its own pivot


class GenLabel(NamedTuple):
    v: int
    levels: dict  # center level -> LevelEntry


def _layout(variant: str, ell: int):
    """``(exponent, coloring levels, center level paired with a coloring level)``."""
    if variant == "minus":
        return 2 * ell - 1, list(range(0, ell)), (lambda j: ell - j - 1)
    if variant == "plus":
        return 2 * ell + 1, list(range(1, ell + 1)), (lambda j: ell - j + 1)
    raise ValueError(variant)


def level_sizes(n: int, q: int, ell: int, alpha: float) -> list[int]:
    return [1] + [vicinity_size(n, q ** i, alpha) for i in range(1, ell + 1)]


def build_general(sp: ShortestPaths, params: SchemeParams, variant: str) -> SchemeInstance:
    g, n = sp.g, sp.n
    ell = params.ell
    if ell < 2:
        raise SchemeError("need l >= 2")
    if not g.is_unweighted:
        raise SchemeError("scheme requires unweighted")
    expo, color_levels, pair = _layout(variant, ell)
    q = ceil_power(n, 1, expo)
    sizes = level_sizes(n, q, ell, params.alpha)
    vics = [VicinityIndex(sp, s) for s in sizes]

    centers = {}
    for i in range(ell + 1):
        s_i = max(1, math.ceil(n / q ** i))
        cs = tz_centers(sp, s_i, seed=[params.seed, 2, i])
        centers[i] = build_cluster_trees(sp, cs, tag=("C", i)) if i > 0 else cs

    tables = new_tables(g)
    for u, tab in enumerate(tables):
        tab.local = local_entries(sp, vics[ell], u)
        for i in range(ell + 1):
            tab.radius[i] = int(vics[i].radius[u])
    for i in range(1, ell + 1):
        for w, tree in centers[i].trees.items():
            attach_tree(tables, tree)
            attach_cluster_labels(tables, ("C", i), w, tree)
    for i in range(1, ell):
        inter = intersection_table(sp, vics[i].members, centers[ell - i].in_cluster)
        for u, tab in enumerate(tables):
            tab.intersect[i] = inter[u]

    parts = {}
    attempts = {}
    for j in color_levels:
        k = pair(j)
        colors = q ** j
        col = compute_coloring(vics[j].members, n, colors, seed=[params.seed, 1, j], beta=params.beta)
        attempts[j] = col.attempts
        parts[k] = round_robin(centers[k].centers.tolist(), colors)
        t2 = t2_preprocess(sp, col.color, parts[k], params.eps, sizes[j], vic=vics[j])
        reps = representatives(vics[j].members, col)
        for u, tab in enumerate(tables):
            tab.t2[j] = t2.legs[u]
            tab.reps[j] = tuple(reps[u].tolist())

    labels = []
    for v in range(n):
        levels = {}
        for k in parts:
            cs = centers[k]
            p = int(cs.pivot[v])
            port = -1 if p == v else g.port(p, int(sp.next_hop[v, p]))
            levels[k] = LevelEntry(p, parts[k][p], int(cs.dist_to_centers[v]), port)
        labels.append(GenLabel(v, levels))

    info = base_info(
        sp, variant=variant, ell=ell, q=q, sizes=sizes,
        center_sizes=[len(centers[i].centers) for i in range(ell + 1)],
        coloring_levels=color_levels, coloring_attempts=attempts,
    )
    aux = {
        "pivot_dist": np.stack([centers[i].dist_to_centers for i in range(ell + 1)]),
        "radius": np.stack([v.radius for v in vics]),
    }
    return SchemeInstance(f"gen_{variant}", params, g, tables, labels, info, aux)


def _start(tab, label: GenLabel, variant: str):
    v = label.v
    ell = len(tab.radius) - 1
    if v == tab.vertex:
        return None, {"branch": "local"}
    if v in tab.local:
        return Header((Local(v),), 0, "intersection"), {"branch": "intersection", "level": ell}
    own = tab.cluster_labels.get(("C", ell), {}).get(v)
    if own is not None:
        return Header((TreeLeg(own),), 0, "intersection"), {"branch": "intersection", "level": 0}
    for i in range(1, ell):
        w = tab.intersect[i].get(v)
        if w is not None:
            legs = (Local(w), ClusterLookup(("C", ell - i), v))
            return Header(legs, 0, "intersection"), {"branch": "intersection", "level": i}

    _, color_levels, pair = _layout(variant, ell)
    a = [tab.radius[i] for i in range(ell + 1)]
    b = {k: (e.dist - 1 if e.dist > 0 else 0) for k, e in label.levels.items()}
    best = None
    for j in color_levels:
        score = a[j] + b[pair(j)]
        # ties go to the highest index, except that index 0 keeps a tie at a
        # positive score: j > 0 pays one extra hop to reach w, which the
        # selection inequality does not absorb when 0 is the only good index
        if best is None or score < best[0] or (score == best[0] and (best[1] != 0 or score == 0)):
            best = (score, j)
    j = best[1]
    k = pair(j)
    e = label.levels[k]
    legs = (Local(tab.reps[j][e.part]), Seq2(j, e.pivot))
    if e.pivot != v:
        legs += (Edge(e.pivot, e.port), ClusterLookup(("C", k), v))
    return Header(legs, 0, "t2"), {"branch": "t2", "j": j, "k": k, "a": a, "b": b}


def build_gen_minus(sp, params):
    return build_general(sp, params, "minus")


def build_gen_plus(sp, params):
    return build_general(sp, params, "plus")


def start_gen_minus(tab, label):
    return _start(tab, label, "minus")


def start_gen_plus(tab, label):
    return _start(tab, label, "plus")


def bits_general(label: GenLabel, bw: BitWidths, info) -> int:
    q = info["q"]
    total = bw.vertex
    for k in label.levels:
        total += bw.vertex + width(q ** info["ell"]) + bw.dist + bw.port
    return total
