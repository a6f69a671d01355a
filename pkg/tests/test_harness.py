import csv
import json
from fractions import Fraction

import pytest

from compact_routing import build_scheme, generate_graph
from compact_routing.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS, main
from compact_routing.graph import Graph
from compact_routing.harness import (
    ConfigError, ExperimentConfig, fit_loglog, run_experiment, scaling_sweep, select_pairs, thread_count,
    verify_all_pairs,
)
from compact_routing.oracle import ShortestPaths
from compact_routing.schemes import SchemeParams
from compact_routing.schemes.parts import eligible_t1


def cfg(**kw):
    raw = {"scheme": "warmup3", "graph": {"kind": "path", "params": {"n": 30}}, "params": {"eps": "1/2"}}
    raw.update(kw)
    return ExperimentConfig.from_dict(raw)


# --- config ------------------------------------------------------------------------

def test_config_rejects_bad_input():
    with pytest.raises(ConfigError, match="unknown scheme"):
        cfg(scheme="nope")
    with pytest.raises(ConfigError, match="k >= 3"):
        cfg(scheme="scheme4k7", params={"k": 2})
    with pytest.raises(ConfigError, match="unknown config keys"):
        cfg(extra=1)
    with pytest.raises(ConfigError, match="unknown scheme params"):
        cfg(params={"gamma": 1})
    with pytest.raises(ConfigError, match="pairs.mode"):
        cfg(pairs={"mode": "some"})
    with pytest.raises(ConfigError, match="'file' or 'kind'"):
        cfg(graph={})


def test_config_load_and_round_trip(tmp_path):
    c = cfg(pairs={"mode": "sample", "count": 10, "seed": 3})
    p = tmp_path / "c.json"
    p.write_text(json.dumps(c.as_dict()))
    back = ExperimentConfig.load(p)
    assert back.as_dict() == c.as_dict()
    assert back.params.eps == Fraction(1, 2)
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(p)


def test_thread_count(monkeypatch):
    monkeypatch.delenv("COMPACT_ROUTING_THREADS", raising=False)
    assert thread_count() == 1
    monkeypatch.setenv("COMPACT_ROUTING_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("COMPACT_ROUTING_THREADS", "many")
    with pytest.raises(ConfigError):
        thread_count()


# --- experiments ---------------------------------------------------------------------

def test_warmup3_on_path_has_no_violations(tmp_path):
    out = {"csv": str(tmp_path / "p.csv"), "json": str(tmp_path / "r.json"), "traces": str(tmp_path / "t.jsonl")}
    rep = run_experiment(cfg(output=out))
    assert rep["violation_count"] == 0
    assert rep["aggregate"]["pairs"] == 900
    assert rep["bound"] == "(3+2eps)*d"
    rows = list(csv.DictReader(open(out["csv"])))
    assert len(rows) == 900 and set(rows[0]) == {"src", "dst", "d", "length", "ratio", "branch", "header_bits"}
    assert json.loads(open(out["json"]).read())["violation_count"] == 0
    assert len(open(out["traces"]).read().splitlines()) == 900


def test_report_is_deterministic():
    c = {"graph": {"kind": "random-weighted", "params": {"n": 60, "m": 150}, "seed": 2}, "scheme": "scheme5"}
    a = run_experiment(cfg(**c))
    b = run_experiment(cfg(**c))
    a.pop("runtime_s"), b.pop("runtime_s")
    assert json.dumps(a, sort_keys=True, default=str) == json.dumps(b, sort_keys=True, default=str)


def test_sampled_pairs_are_seeded():
    c = cfg(graph={"kind": "gnm-random", "params": {"n": 50, "m": 120}, "seed": 1},
            pairs={"mode": "sample", "count": 200, "seed": 4})
    inst = build_scheme("warmup3", ShortestPaths(Graph(3, [(0, 1, 1), (1, 2, 1)])), SchemeParams())
    inst50 = build_scheme("warmup3", generate_graph("gnm-random", {"n": 50, "m": 120}, 1), SchemeParams())
    a = select_pairs(inst50, c.pairs, c.all_pairs_cap)
    assert a == select_pairs(inst50, c.pairs, c.all_pairs_cap) and len(a) == 200
    assert len(select_pairs(inst, {"mode": "all"}, 1500)) == 9


def test_technique_schemes_use_eligible_pairs():
    rep = run_experiment(cfg(scheme="t1", graph={"kind": "random-weighted", "params": {"n": 60, "m": 150}, "seed": 5}))
    assert rep["violation_count"] == 0
    g = generate_graph("random-weighted", {"n": 60, "m": 150}, 5)
    inst = build_scheme("t1", g, SchemeParams(eps=Fraction(1, 2)))
    assert rep["aggregate"]["pairs"] == len(eligible_t1(inst))


def _detour_cycle():
    n = 10
    g = Graph(n, [(i, (i + 1) % n, 1) for i in range(n)])
    inst = build_scheme("warmup3", g, SchemeParams(eps=Fraction(1, 2)))
    # send everything bound for vertex 1 the long way round
    for x in range(n):
        if x not in (1, 2):
            inst.tables[x].local[1] = g.port(x, (x - 1) % n)
    return inst


def test_fault_injection_reports_pair():
    inst = _detour_cycle()
    _, violations = verify_all_pairs(inst, ShortestPaths(inst.graph), [(0, 1), (5, 6)], workers=1)
    assert [(v.src, v.dst) for v in violations] == [(0, 1)]
    assert violations[0].length == 9 and violations[0].reason == "exceeds bound"


def test_delivery_failure_is_a_violation():
    inst = _detour_cycle()
    del inst.tables[5].local[6]
    _, violations = verify_all_pairs(inst, ShortestPaths(inst.graph), [(4, 6)], workers=1)
    assert len(violations) == 1 and violations[0].length is None
    assert "vertex 5" in violations[0].reason


def test_parallel_delivery_matches_serial():
    sp = ShortestPaths(generate_graph("random-weighted", {"n": 60, "m": 150}, 6))
    inst = build_scheme("scheme5", sp, SchemeParams(eps=Fraction(1, 2)))
    serial, _ = verify_all_pairs(inst, sp, workers=1)
    parallel, _ = verify_all_pairs(inst, sp, workers=2)
    assert serial == parallel


# --- sweeps --------------------------------------------------------------------------------

def test_fit_loglog_recovers_power():
    ns = [100, 200, 400, 800]
    fit = fit_loglog(ns, [3 * n ** 0.5 for n in ns])
    assert fit["slope"] == pytest.approx(0.5)


def test_sweep_needs_three_sizes():
    with pytest.raises(ConfigError, match="three sizes"):
        scaling_sweep("warmup3", [50, 100])


def test_sweep_rows():
    rep = scaling_sweep("warmup3", [40, 60, 90])
    assert [r["n"] for r in rep["rows"]] == [40, 60, 90]
    assert rep["fit"]["slope"] > 0


# --- CLI ---------------------------------------------------------------------------------------

def test_cli_round_trip(tmp_path, capsys):
    g = str(tmp_path / "g.txt")
    inst = str(tmp_path / "i.crlb")
    assert main(["gen", "--kind", "random-weighted", "--n", "40", "--m", "100", "-o", g]) == EXIT_OK
    assert main(["build", "--graph", g, "--scheme", "scheme5", "-o", inst]) == EXIT_OK
    capsys.readouterr()
    assert main(["route", "--instance", inst, "--src", "0", "--dst", "39"]) == EXIT_OK
    rec = json.loads(capsys.readouterr().out)
    assert rec["hops"][0] == 0 and rec["hops"][-1] == 39
    assert main(["route", "--instance", inst, "--src", "0", "--dst", "99"]) == EXIT_USAGE
    assert main(["verify", "--scheme", "scheme5", "--graph", g]) == EXIT_OK
    assert "violations=0" in capsys.readouterr().out


def test_cli_verify_config_and_errors(tmp_path, capsys):
    c = tmp_path / "c.json"
    c.write_text(json.dumps({"scheme": "scheme4k7", "params": {"k": 2}}))
    assert main(["verify", "--config", str(c)]) == EXIT_USAGE
    assert "k >= 3" in capsys.readouterr().err
    assert main(["verify", "--scheme", "warmup3"]) == EXIT_USAGE
    g = str(tmp_path / "w.txt")
    main(["gen", "--kind", "random-weighted", "--n", "30", "--m", "60", "-o", g])
    assert main(["build", "--graph", g, "--scheme", "scheme21", "-o", str(tmp_path / "x")]) == EXIT_USAGE
    assert main(["sweep", "--scheme", "warmup3", "--sizes", "30,40"]) == EXIT_USAGE


def test_cli_verify_reports_violations(tmp_path, monkeypatch, capsys):
    import compact_routing.harness as harness

    real = harness.build_scheme

    def faulty(name, g, params):
        inst = real(name, g, params)
        for x in range(inst.n):
            if x not in (1, 2):
                inst.tables[x].local[1] = inst.graph.port(x, (x - 1) % inst.n)
        return inst

    monkeypatch.setattr(harness, "build_scheme", faulty)
    g = tmp_path / "cycle.txt"
    g.write_text("10 10\n" + "".join(f"{i} {(i + 1) % 10} 1\n" for i in range(10)))
    assert main(["verify", "--scheme", "warmup3", "--graph", str(g)]) == EXIT_VIOLATIONS
    out = capsys.readouterr().out
    assert "violation 0->1" in out


@pytest.mark.parametrize("scheme, k", [("scheme5", 3), ("scheme4k7", 3), ("scheme4k7", 4)])
def test_representative_component_slope(scheme, k):
    # the per-color representative list has q = ceil(n^(1/k)) entries
    rep = scaling_sweep(scheme, [64, 216, 512], params=SchemeParams(k=k))
    assert rep["diagnostics"]["rep_entries_slope"] == pytest.approx(1 / k, abs=0.08)
