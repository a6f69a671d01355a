"""Technique 2 on a weighted path: watch relays make progress toward the target.

Sources are the even vertices, targets are split round robin into the two
classes.  Every relay must satisfy d(r', w) <= d(r, w) - (a - a/b) where a is
the distance from r to the second-last waypoint of its sequence.
"""
from fractions import Fraction

import numpy as np

from compact_routing import Graph, ShortestPaths
from compact_routing.routing import advance
from compact_routing.techniques import (
    legs_vertices, round_robin, t2_header, t2_preprocess, technique_vertex_tables,
)
from compact_routing.treerouting import ARRIVED

rng = np.random.default_rng(5)
n = 150
g = Graph(n, [(i, i + 1, int(rng.integers(1, 9))) for i in range(n - 1)])
sp = ShortestPaths(g)
t2 = t2_preprocess(sp, np.arange(n) % 2, round_robin(range(n), 2), Fraction(1, 2), 4)
tables = technique_vertex_tables(sp, t2=t2)
print(f"b = {t2.b}, length cap {t2.length_cap}")

u, w = 0, 148
x, header, hops = u, t2_header(w), [u]
while True:
    port, header, relays = advance(tables[x], header)
    for rel in relays or ():
        _, r, _, dest, legs = rel
        verts = legs_vertices(g, r, legs)
        a = sp.dist[r, verts[-2]]
        print(f"relay at {r}: d(r, w) = {sp.dist[r, dest]}, next relay {verts[-1]} "
              f"d = {sp.dist[verts[-1], dest]}, required <= {sp.dist[r, dest] - (a - Fraction(a, t2.b))}")
    if port == ARRIVED:
        break
    x = g.neighbor(x, port)
    hops.append(x)
length = sum(g.weight(a, b) for a, b in zip(hops, hops[1:]))
print(f"delivered {u} -> {w}: length {length}, d = {sp.dist[u, w]}, ratio {float(length / sp.dist[u, w]):.3f}")
