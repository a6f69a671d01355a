"""Experiments: build a scheme, deliver pairs, compare with the oracle.

A config is a JSON object::

    {
      "graph":  {"kind": "gnm-random", "params": {"n": 216, "m": 650}, "seed": 1}
                or {"file": "graph.txt"},
      "scheme": "scheme21",
      "params": {"eps": "1/4", "k": 3, "ell": 2, "alpha": 1.0, "beta": 4.0, "seed": 0},
      "pairs":  {"mode": "all"} or {"mode": "sample", "count": 100000, "seed": 0},
      "all_pairs_cap": 1500,
      "output": {"csv": "pairs.csv", "json": "report.json", "traces": "traces.jsonl"},
      "check_bound": true
    }

Every field except ``scheme`` has a default.  Exact fractions are written
as strings such as ``"1/4"``.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .graph import Graph, generate_graph, load_graph
from .oracle import ShortestPaths
from .schemes import SCHEMES, SchemeError, SchemeInstance, SchemeParams, build_scheme, get_spec, validate_params
from .schemes.parts import eligible_t1, eligible_t2
from .simulator import RouteTrace, deliver, measure, write_traces

THREADS_ENV = "COMPACT_ROUTING_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scheme: str
    graph: dict = field(default_factory=lambda: {"kind": "gnm-random", "params": {"n": 64, "m": 192}, "seed": 0})
    params: SchemeParams = field(default_factory=SchemeParams)
    pairs: dict = field(default_factory=lambda: {"mode": "all"})
    all_pairs_cap: int = 1500
    output: dict = field(default_factory=dict)
    check_bound: bool = True

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - {"scheme", "graph", "params", "pairs", "all_pairs_cap", "output", "check_bound"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "scheme" not in raw:
            raise ConfigError("config needs a scheme")
        p = dict(raw.get("params", {}))
        bad = set(p) - {"eps", "k", "ell", "alpha", "beta", "seed"}
        if bad:
            raise ConfigError(f"unknown scheme params: {sorted(bad)}")
        if "eps" in p:
            p["eps"] = Fraction(str(p["eps"]))
        try:
            params = SchemeParams(**p)
        except (SchemeError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        cfg = cls(raw["scheme"], params=params)
        for key in ("graph", "pairs", "output"):
            if key in raw:
                setattr(cfg, key, dict(raw[key]))
        cfg.all_pairs_cap = int(raw.get("all_pairs_cap", cfg.all_pairs_cap))
        cfg.check_bound = bool(raw.get("check_bound", True))
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls.from_dict(raw)

    def validate(self) -> None:
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; known: {', '.join(SCHEMES)}")
        try:
            validate_params(self.scheme, self.params)
        except SchemeError as exc:
            raise ConfigError(str(exc)) from None
        if "file" not in self.graph and "kind" not in self.graph:
            raise ConfigError("graph needs either 'file' or 'kind'")
        mode = self.pairs.get("mode", "all")
        if mode not in ("all", "sample"):
            raise ConfigError(f"pairs.mode must be 'all' or 'sample', got {mode!r}")

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme, "graph": self.graph, "params": self.params.as_dict(),
            "pairs": self.pairs, "all_pairs_cap": self.all_pairs_cap, "output": self.output,
            "check_bound": self.check_bound,
        }


def make_graph(spec: dict) -> Graph:
    if "file" in spec:
        return load_graph(spec["file"])
    return generate_graph(spec["kind"], spec.get("params", {}), int(spec.get("seed", 0)))


def select_pairs(inst: SchemeInstance, pairs: dict, cap: int) -> list[tuple[int, int]]:
    """Ordered pairs to deliver; technique instances only get eligible pairs."""
    n = inst.n
    if inst.scheme == "t1":
        universe = eligible_t1(inst)
    elif inst.scheme == "t2":
        universe = eligible_t2(inst)
    else:
        universe = None
    mode = pairs.get("mode", "all")
    if mode == "all" and n <= cap:
        return universe if universe is not None else [(u, v) for u in range(n) for v in range(n)]
    count = int(pairs.get("count", 100_000))
    rng = np.random.default_rng(int(pairs.get("seed", 0)))
    if universe is not None:
        idx = rng.choice(len(universe), size=min(count, len(universe)), replace=False)
        return [universe[i] for i in sorted(idx.tolist())]
    us = rng.integers(0, n, size=count)
    vs = rng.integers(0, n, size=count)
    return list(zip(us.tolist(), vs.tolist()))


@dataclass(frozen=True)
class Violation:
    src: int
    dst: int
    d: int
    length: int | None
    bound: Fraction
    reason: str


@dataclass
class PairRecord:
    src: int
    dst: int
    d: int
    length: int
    branch: str
    header_bits: int


_WORKER: dict = {}


def _init_worker(inst, dist):
    _WORKER["inst"] = inst
    _WORKER["dist"] = dist


def _run_chunk(pairs):
    inst, dist = _WORKER["inst"], _WORKER["dist"]
    return _deliver_many(inst, dist, pairs)


def _deliver_many(inst, dist, pairs):
    out = []
    for u, v in pairs:
        try:
            t = deliver(inst, u, v)
            out.append(PairRecord(u, v, int(dist[u, v]), t.length, t.branch, t.header_bits))
        except Exception as exc:  # recorded as a violation by the caller
            out.append((u, v, f"{type(exc).__name__}: {exc}"))
    return out


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def deliver_pairs(inst: SchemeInstance, dist: np.ndarray, pairs, workers: int | None = None) -> list:
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(pairs) < 2000:
        return _deliver_many(inst, dist, pairs)
    size = math.ceil(len(pairs) / (4 * workers))
    chunks = [pairs[i: i + size] for i in range(0, len(pairs), size)]
    with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(inst, dist)) as pool:
        parts = list(pool.map(_run_chunk, chunks))  # map keeps input order
    return [r for part in parts for r in part]


def verify_all_pairs(inst: SchemeInstance, sp: ShortestPaths, pairs=None, workers: int | None = None):
    """Deliver ``pairs`` (all ordered pairs by default) and return
    ``(records, violations)``.  A pair violates when its length exceeds the
    scheme's exact bound or when delivery fails."""
    if pairs is None:
        pairs = [(u, v) for u in range(inst.n) for v in range(inst.n)]
    spec = get_spec(inst.scheme)
    mul, add = spec.bound(inst.params)
    records, violations = [], []
    for r in deliver_pairs(inst, sp.dist, pairs, workers):
        if isinstance(r, tuple):
            u, v, why = r
            violations.append(Violation(u, v, int(sp.dist[u, v]), None, mul * int(sp.dist[u, v]) + add, why))
            continue
        records.append(r)
        bound = mul * r.d + add
        if r.length > bound:
            violations.append(Violation(r.src, r.dst, r.d, r.length, bound, "exceeds bound"))
    return records, violations


def aggregate(records: list[PairRecord], unit) -> dict:
    max_ratio = Fraction(0)
    surplus = Fraction(0)
    branches: dict[str, int] = {}
    header = 0
    for r in records:
        if r.d:
            max_ratio = max(max_ratio, Fraction(r.length, r.d))
        surplus = max(surplus, Fraction(r.length - r.d))
        branches[r.branch] = branches.get(r.branch, 0) + 1
        header = max(header, r.header_bits)
    return {
        "pairs": len(records),
        "max_ratio": str(max_ratio),
        "max_ratio_float": float(max_ratio),
        "max_additive_surplus": str(surplus * unit),
        "max_header_bits": header,
        "branches": dict(sorted(branches.items())),
    }


def _fmt_violation(v: Violation, unit) -> dict:
    return {
        "src": v.src, "dst": v.dst, "d": str(v.d * unit),
        "length": None if v.length is None else str(v.length * unit),
        "bound": str(v.bound * unit), "reason": v.reason,
    }


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Build, deliver, verify and (optionally) write outputs.  Returns the report."""
    t0 = time.perf_counter()
    g = make_graph(cfg.graph)
    sp = ShortestPaths(g)
    inst = build_scheme(cfg.scheme, sp, cfg.params)
    t_build = time.perf_counter() - t0
    pairs = select_pairs(inst, cfg.pairs, cfg.all_pairs_cap)
    records, violations = verify_all_pairs(inst, sp, pairs)
    if not cfg.check_bound:
        violations = [v for v in violations if v.length is None]
    unit = g.unit
    report = {
        "config": cfg.as_dict(),
        "graph": {"n": g.n, "m": g.m, "unweighted": g.is_unweighted, "unit": str(unit)},
        "scheme": inst.scheme,
        "bound": inst.info.get("bound"),
        "build_info": {k: v for k, v in inst.info.items() if k != "bound"},
        "sizes": measure(inst).as_dict(),
        "aggregate": aggregate(records, unit),
        "violation_count": len(violations),
        "violations": [_fmt_violation(v, unit) for v in violations[:50]],
        "runtime_s": {"build": round(t_build, 3), "total": round(time.perf_counter() - t0, 3)},
    }
    out = cfg.output
    if out.get("csv"):
        write_pairs_csv(records, out["csv"], unit)
    if out.get("json"):
        Path(out["json"]).write_text(json.dumps(report, indent=2, sort_keys=True, default=str) + "\n")
    if out.get("traces"):
        traces = (deliver(inst, r.src, r.dst) for r in records)
        write_traces(traces, sp.dist, out["traces"], unit)
    return report


def write_pairs_csv(records: list[PairRecord], path, unit=1) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "d", "length", "ratio", "branch", "header_bits"])
        for r in records:
            ratio = Fraction(r.length, r.d) if r.d else Fraction(1)
            w.writerow([r.src, r.dst, r.d * unit, r.length * unit, str(ratio), r.branch, r.header_bits])


# --- scaling sweeps ---------------------------------------------------------------

def default_sweep_graph(scheme: str, n: int, degree: int = 3) -> dict:
    kind = "gnm-random" if get_spec(scheme).unweighted_only else "random-weighted"
    return {"kind": kind, "params": {"n": n, "m": degree * n, "w_min": 1, "w_max": 8}}


def fit_loglog(ns, values) -> dict:
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return {"slope": float(slope), "intercept": float(intercept), "residuals": [float(r) for r in resid]}


def scaling_sweep(scheme: str, sizes, trials: int = 1, seed: int = 0,
                  params: SchemeParams | None = None, degree: int = 3) -> dict:
    """Fit ``log(max table bits)`` against ``log n`` over the given sizes."""
    sizes = [int(s) for s in sizes]
    if len(sizes) < 3:
        raise ConfigError("a sweep needs at least three sizes")
    params = params or SchemeParams(seed=seed)
    rows = []
    for n in sizes:
        maxima, comps, reps = [], {}, []
        for t in range(trials):
            spec = default_sweep_graph(scheme, n, degree)
            g = generate_graph(spec["kind"], spec["params"], seed + 1000 * t + n)
            inst = build_scheme(scheme, g, params)
            rep = measure(inst)
            maxima.append(rep.table_bits["max"])
            for k, v in rep.components_max.items():
                comps.setdefault(k, []).append(v)
            reps.append(max((len(r) for tab in inst.tables for r in tab.reps.values()), default=0))
            del inst
        rows.append({
            "n": n,
            "max_table_bits": float(np.mean(maxima)),
            "components_max": {k: float(np.mean(v)) for k, v in comps.items()},
            "max_rep_entries": float(np.mean(reps)),
        })
    fit = fit_loglog(sizes, [r["max_table_bits"] for r in rows])
    comp_fits = {}
    for k in rows[0]["components_max"]:
        vals = [r["components_max"][k] for r in rows]
        if all(v > 0 for v in vals):
            comp_fits[k] = fit_loglog(sizes, vals)["slope"]
    # diagnostics: size in words of ceil(log2 n) bits, and the representative count alone
    words = fit_loglog(sizes, [r["max_table_bits"] / math.ceil(math.log2(r["n"])) for r in rows])
    extra = {"words_slope": words["slope"]}
    if all(r["max_rep_entries"] > 0 for r in rows):
        extra["rep_entries_slope"] = fit_loglog(sizes, [r["max_rep_entries"] for r in rows])["slope"]
    return {
        "scheme": scheme, "sizes": sizes, "trials": trials, "seed": seed,
        "params": params.as_dict(), "rows": rows, "fit": fit, "component_slopes": comp_fits,
        "diagnostics": extra,
    }
