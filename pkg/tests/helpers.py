"""Shared fixtures-as-functions for the test modules."""
import functools

from compact_routing import ShortestPaths, generate_graph


@functools.lru_cache(maxsize=None)
def cached_sp(kind: str, n: int, m: int, seed: int, w_max: int = 8) -> ShortestPaths:
    params = {"n": n, "m": m, "w_min": 1, "w_max": w_max}
    return ShortestPaths(generate_graph(kind, params, seed))


def path_length(g, hops) -> int:
    return sum(g.weight(a, b) for a, b in zip(hops, hops[1:]))


def relay_progress(g, dist, trace, b):
    """Check the relay progress inequality on one delivered trace.

    For each relay ``r_i`` whose stored sequence ends at a partition vertex
    ``r_{i+1}``, with ``r_i'`` the waypoint before it and
    ``alpha = d(r_i, r_i')``, require
    ``d(r_{i+1}, w) <= d(r_i, w) - (alpha - alpha / b)``.
    Returns the list of ``(r_i, r_{i+1}, ok)`` triples.
    """
    from fractions import Fraction

    from compact_routing.techniques import legs_vertices

    w = trace.dst
    relays = [(rec[1], rec[4]) for _, ev in trace.events for rec in ev.get("relays", ())]
    out = []
    for i, (r, legs) in enumerate(relays):
        verts = legs_vertices(g, r, legs)
        r_next = verts[-1]
        if r_next == w:
            continue
        if i + 1 < len(relays):
            assert relays[i + 1][0] == r_next, "relay chain broken"
        r_prime = verts[-2]
        alpha = int(dist[r, r_prime])
        ok = dist[r_next, w] <= dist[r, w] - (alpha - Fraction(alpha, b))
        out.append((r, r_next, bool(ok and dist[r_next, w] < dist[r, w])))
    return out


def weighted_path(n: int, seed: int):
    """Path with integer weights 1..8: long routes that force relays."""
    import numpy as np

    from compact_routing import Graph

    rng = np.random.default_rng(seed)
    return Graph(n, [(i, i + 1, int(rng.integers(1, 9))) for i in range(n - 1)])


def t2_relay_run(g, ell: int, eps, classes, targets):
    """Technique 2 alone on ``g``: deliver every ``U_j -> W_j`` pair.

    Returns ``(worst ratio, relay checks, pairs, b)``.
    """
    from fractions import Fraction

    from compact_routing import ShortestPaths
    from compact_routing.routing import advance
    from compact_routing.simulator import RouteTrace
    from compact_routing.techniques import t2_header, t2_preprocess, technique_vertex_tables
    from compact_routing.treerouting import ARRIVED

    sp = ShortestPaths(g)
    t2 = t2_preprocess(sp, classes, targets, eps, ell)
    tables = technique_vertex_tables(sp, t2=t2)
    worst, checks, pairs = Fraction(0), [], 0
    for u in range(g.n):
        for w in t2.legs[u]:
            x, header, hops, events = u, t2_header(w), [u], []
            while True:
                port, header, ev = advance(tables[x], header)
                if ev:
                    events.append((x, {"relays": ev}))
                if port == ARRIVED:
                    break
                x = g.neighbor(x, port)
                hops.append(x)
            assert x == w
            pairs += 1
            worst = max(worst, Fraction(path_length(g, hops), int(sp.dist[u, w])))
            trace = RouteTrace(u, w, hops, path_length(g, hops), 0, "t2", events)
            checks += relay_progress(g, sp.dist, trace, t2.b)
    return worst, checks, pairs, t2.b


def gen_selection(inst, v: int, event: dict, delta: int):
    """Index-selection check for the generalized schemes on one no-intersection pair.

    Returns ``(precondition, selected_ok)`` where ``precondition`` is
    ``x_i + y_{l-i} <= 1`` for all ``i`` and ``selected_ok`` is the
    inequality the selected index must satisfy (``1 - 1/l`` for the minus
    variant with ``y_{l-j-1}``, ``1 + 1/l`` for the plus variant with
    ``y_{l-j+1}``).
    """
    from fractions import Fraction

    ell = inst.params.ell
    a = event["a"]
    pd = inst.aux["pivot_dist"]
    b = [max(int(pd[i][v]) - 1, 0) for i in range(ell + 1)]
    for k, bk in event["b"].items():
        assert b[k] == bk, "label distance disagrees with the oracle"
    x = [Fraction(a[0], delta)] + [Fraction(a[i] + 1, delta) for i in range(1, ell + 1)]
    y = [Fraction(bi, delta) for bi in b]
    pre = all(x[i] + y[ell - i] <= 1 for i in range(ell + 1))
    j = event["j"]
    if inst.scheme == "gen_minus":
        ok = x[j] + y[ell - j - 1] <= 1 - Fraction(1, ell)
    else:
        ok = x[j] + y[ell - j + 1] <= 1 + Fraction(1, ell)
    return pre, ok
