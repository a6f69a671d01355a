"""Random balanced colorings in which every monitored set sees every color."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ColoringError(RuntimeError):
    pass


@dataclass(frozen=True)
class Coloring:
    """Colors are ``0 .. q-1``; ``classes[j]`` is the sorted color class ``j``."""

    q: int
    color: np.ndarray
    classes: tuple[np.ndarray, ...]
    seed: int
    attempts: int

    def class_mask(self, j: int) -> np.ndarray:
        return self.color == j


def _rainbow(color: np.ndarray, sets: np.ndarray, q: int) -> bool:
    seen = np.zeros((sets.shape[0], q), dtype=bool)
    seen[np.arange(sets.shape[0])[:, None], color[sets]] = True
    return bool(seen.all())


def compute_coloring(sets, n: int, q: int, seed: int = 0, beta: float = 4.0, max_tries: int = 64) -> Coloring:
    """Uniform random ``q``-coloring of ``0..n-1``, redrawn until valid.

    Valid means: every set contains all ``q`` colors and every color class has
    at most ``beta * n / q`` vertices.  ``sets`` is an ``(k, s)`` integer array
    or a sequence of equal-purpose index lists.
    """
    if q < 1:
        raise ValueError("need at least one color")
    if isinstance(sets, np.ndarray) and sets.ndim == 2:
        arrays = [sets]
    else:
        arrays = [np.asarray(S, dtype=np.int64)[None, :] for S in sets]
    for a in arrays:
        if len(np.unique(a[0])) < q or a.shape[1] < q:
            raise ValueError(f"every set needs at least q={q} vertices")
    cap = beta * n / q
    for attempt in range(max_tries):
        rng = np.random.default_rng([seed, attempt])
        color = rng.integers(0, q, size=n)
        sizes = np.bincount(color, minlength=q)
        if sizes.max() > cap:
            continue
        if all(_rainbow(color, a, q) for a in arrays):
            classes = tuple(np.flatnonzero(color == j) for j in range(q))
            return Coloring(q, color, classes, seed, attempt + 1)
    raise ColoringError("coloring failed — increase α or β")


def representatives(order_members: np.ndarray, coloring: Coloring) -> np.ndarray:
    """``reps[u, j]``: the closest member of ``u``'s vicinity with color ``j``.

    ``order_members`` is the ``(n, ell)`` member array of a vicinity index
    (rows already in ``(distance, id)`` order).
    """
    cols = coloring.color[order_members]
    reps = np.empty((order_members.shape[0], coloring.q), dtype=np.int64)
    for j in range(coloring.q):
        hit = cols == j
        if not hit.any(axis=1).all():
            raise ColoringError(f"color {j} missing from some vicinity")
        reps[:, j] = order_members[np.arange(len(reps)), np.argmax(hit, axis=1)]
    return reps
