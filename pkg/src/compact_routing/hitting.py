"""Greedy hitting sets."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np


def greedy_hitting_set(sets: Sequence[Sequence[int]] | np.ndarray, n: int) -> list[int]:
    """A set ``H`` of vertices meeting every input set.

    Greedy set cover on the dual: repeatedly take the vertex contained in the
    most sets not yet hit (smallest id on ties).  With ``s`` the smallest set
    size and ``k`` the number of sets, ``|H| <= (1 + ln k) * n / s``.
    """
    sets = [np.unique(np.asarray(S, dtype=np.int64)) for S in sets]
    if any(len(S) == 0 for S in sets):
        raise ValueError("cannot hit an empty set")
    if not sets:
        return []
    rows = np.concatenate([np.full(len(S), i) for i, S in enumerate(sets)])
    cols = np.concatenate(sets)
    if cols.min() < 0 or cols.max() >= n:
        raise ValueError("set element outside the universe")
    members_of = [[] for _ in range(n)]
    for r, c in zip(rows.tolist(), cols.tolist()):
        members_of[c].append(r)
    count = np.bincount(cols, minlength=n)
    hit = np.zeros(len(sets), dtype=bool)
    chosen = []
    while not hit.all():
        v = int(np.argmax(count))
        chosen.append(v)
        for r in members_of[v]:
            if not hit[r]:
                hit[r] = True
                np.subtract.at(count, sets[r], 1)
    return sorted(chosen)


def greedy_bound(sets: Sequence[Sequence[int]], n: int) -> float:
    """Upper bound on the greedy hitting set size used by the tests."""
    s = min(len(set(S)) for S in sets)
    big = max(len(set(S)) for S in sets)
    return (1 + math.log(big * len(sets))) * n / s
