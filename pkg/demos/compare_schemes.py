"""Table size versus stretch for the weighted schemes on one graph.

    python demos/compare_schemes.py [n] [pairs]
"""
import sys
from fractions import Fraction

import numpy as np

from compact_routing import ShortestPaths, build_scheme, generate_graph, measure
from compact_routing.harness import aggregate, verify_all_pairs
from compact_routing.schemes import SchemeParams

n = int(sys.argv[1]) if len(sys.argv) > 1 else 300
count = int(sys.argv[2]) if len(sys.argv) > 2 else 20000

sp = ShortestPaths(generate_graph("random-weighted", {"n": n, "m": 3 * n, "w_max": 8}, 3))
rng = np.random.default_rng(0)
pairs = list(zip(rng.integers(0, n, count).tolist(), rng.integers(0, n, count).tolist()))
half = Fraction(1, 2)
runs = [
    ("warmup3", SchemeParams(eps=half)),
    ("scheme5", SchemeParams(eps=half)),
    ("tz45", SchemeParams(k=3)),
    ("scheme4k7", SchemeParams(k=3, eps=half)),
    ("tz45", SchemeParams(k=4)),
    ("scheme4k7", SchemeParams(k=4, eps=half)),
]
print(f"random weighted graph n={n}, {count} sampled pairs")
print(f"{'scheme':<10} {'k':>2} {'max table':>10} {'mean table':>11} {'label':>6} {'worst':>7} {'bound':>22} viol")
for name, params in runs:
    inst = build_scheme(name, sp, params)
    size = measure(inst)
    records, violations = verify_all_pairs(inst, sp, pairs)
    agg = aggregate(records, sp.g.unit)
    k = params.k if name in ("tz45", "scheme4k7") else ""
    print(f"{name:<10} {k:>2} {size.table_bits['max']:>10} {size.table_bits['mean']:>11.0f} "
          f"{size.label_bits['max']:>6} {agg['max_ratio_float']:>7.3f} {inst.info['bound']:>22} {len(violations)}")
