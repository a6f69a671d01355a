"""Follow one message through the (2+eps, 1) scheme, hop by hop.

    python demos/route_one_message.py [n] [seed]
"""
import sys
from fractions import Fraction

from compact_routing import ShortestPaths, build_scheme, deliver, generate_graph
from compact_routing.schemes import SchemeParams, label_bits

n = int(sys.argv[1]) if len(sys.argv) > 1 else 216
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 1

sp = ShortestPaths(generate_graph("gnm-random", {"n": n, "m": 3 * n}, seed))
inst = build_scheme("scheme21", sp, SchemeParams(eps=Fraction(1, 4)))
print(f"graph: n={n} m={sp.g.m}; vicinity size {inst.info['q_tilde']}, bound {inst.info['bound']}")

# prefer a far pair that goes through the technique-1 branch
u = 0
order = sorted(range(n), key=lambda x: -sp.dist[u, x])
traces = [deliver(inst, u, v, keep_events=True) for v in order]
t = next((t for t in traces if t.branch == "t1"), next(t for t in traces if t.branch != "intersection"))
v = t.dst
d = int(sp.dist[u, v])
print(f"route {u} -> {v}: branch {t.branch}, {len(t.hops) - 1} hops, length {t.length}, d = {d}")
print(f"  label of {v}: {label_bits(inst, v)} bits, peak header {t.header_bits} bits")
print(f"  path:     {' '.join(map(str, t.hops))}")
print(f"  shortest: {' '.join(map(str, sp.path(u, v)))}")
for x, ev in t.events:
    print(f"  decision at {x}: {ev}")
