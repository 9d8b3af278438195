import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from girthplanar import lab
from girthplanar.oracle import wilson_interval


def tiny(**kw):
    base = dict(family="bipartite", g=4, n_list=(64,), p_grid=(0.0, 1.0), trials=10,
                timing=False)
    base.update(kw)
    return lab.ExperimentConfig(**base)


def test_sweep_endpoints():
    res = lab.run_sweep(tiny())
    assert [(pt.p, pt.fraction) for pt in res.points] == [(0.0, 0.0), (1.0, 1.0)]
    assert res.points[0].failures == {"cycle": 10}
    assert all(pt.successes <= pt.trials for pt in res.points)


def test_config_rejects_parity():
    with pytest.raises(lab.ConfigError, match=r"\[31, 33\]"):
        lab.ExperimentConfig("even", 6, (30, 31, 33))


@pytest.mark.parametrize("kw", [dict(trials=0), dict(family="odd"), dict(family="cubic"),
                                dict(alpha=math.inf, p_grid=None), dict(p_grid=(1.5,))])
def test_config_validation(kw):
    with pytest.raises(lab.ConfigError):
        tiny(**kw)


def test_config_json_roundtrip(tmp_path):
    cfg = tiny(p_grid=None, scales=(1.0, 2.0), alpha=0.5, beta=0.5)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_json()))
    assert lab.ExperimentConfig.load(path) == cfg
    with pytest.raises(lab.ConfigError):
        lab.ExperimentConfig.from_json({**cfg.to_json(), "bogus": 1})


def test_schedule_grid():
    cfg = tiny(p_grid=None, scales=(1.0, 3.0), alpha=0.5, beta=0.5)
    n = 1024
    base = math.sqrt(math.log(n)) / math.sqrt(n)
    assert cfg.grid(n) == pytest.approx([base, 3 * base])
    assert tiny(p_grid=None, scales=(1e9,)).grid(64) == [1.0]


def test_step_function_half():
    est = lab.estimate_p_half(lambda p, t, o: t if p >= 0.03 else 0, 1e-3, 1.0)
    assert 0.0294 <= est.p_half <= 0.0306


def test_all_zero_bracket_error():
    with pytest.raises(lab.BracketError):
        lab.estimate_p_half(lambda p, t, o: 0, 1e-3, 1.0)
    with pytest.raises(lab.BracketError):
        lab.estimate_p_half(lambda p, t, o: t, 1e-3, 1.0)


def test_logistic_half():
    rng = np.random.default_rng(4)

    def sampler(p, trials, offset):
        q = 1 / (1 + math.exp(-(p - 0.05) / 0.0005))
        return int(rng.binomial(trials, q))

    est = lab.estimate_p_half(sampler, 1e-3, 1.0, trials=50, max_trials=400)
    assert est.p_half == pytest.approx(0.05, rel=0.02)


def test_adaptive_doubling_stops_at_budget():
    calls = []

    def sampler(p, trials, offset):
        calls.append((trials, offset))
        return trials // 2 if 0.01 < p < 0.5 else (0 if p <= 0.01 else trials)

    est = lab.estimate_p_half(sampler, 1e-3, 1.0, trials=25, max_trials=200)
    assert 0.01 < est.p_half < 0.5
    offsets = [o for t, o in calls[2:]]
    assert offsets == [0, 25, 50, 100]


def test_fit_exact_power():
    ns = [512, 1024, 2048, 4096, 8192]
    fit = lab.fit_exponent([(n, n ** -0.5) for n in ns], beta=0)
    assert fit.alpha == pytest.approx(0.5, abs=1e-9)


def test_fit_with_log_factor():
    ns = [100, 1000, 10_000]
    fit = lab.fit_exponent([(n, math.sqrt(math.log(n) / n)) for n in ns], beta=0.5)
    assert fit.alpha == pytest.approx(0.5, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(0.05, 2.0), beta=st.floats(-1, 1), A=st.floats(0.01, 10))
def test_fit_recovers_planted_exponent(alpha, beta, A):
    ns = [64, 256, 1024, 4096]
    pts = [(n, A * math.log(n) ** beta * n ** -alpha) for n in ns]
    assert lab.fit_exponent(pts, beta).alpha == pytest.approx(alpha, abs=1e-9)


@pytest.mark.parametrize("pts", [[(100, 0.1), (1000, 0.01)],
                                 [(100, 0.1), (120, 0.09), (150, 0.08)],
                                 [(100, 0.1), (1000, 0.0), (10_000, 0.01)]])
def test_fit_errors(pts):
    with pytest.raises(lab.FitError):
        lab.fit_exponent(pts)


def test_csv_header_only_and_one_row(tmp_path):
    empty = lab.SweepResult(config={})
    assert lab.to_csv(empty) == ",".join(lab.CSV_COLUMNS) + "\n"
    one = lab.run_sweep(tiny(p_grid=(1.0,), trials=2))
    lines = lab.to_csv(one).splitlines()
    assert len(lines) == 2 and lines[1].startswith("bipartite,4,64,1.0,2,2,")


def test_json_roundtrip(tmp_path):
    res = lab.run_sweep(tiny(trials=3))
    res.p_half = {64: 0.5, 128: None}
    res.fit = lab.FitResult(0.5, 0.01, -0.2, 0.5, 4)
    path = tmp_path / "r.json"
    lab.export(res, path)
    back = lab.load_result(path)
    assert back == res
    assert back.dumps() == res.dumps()


def test_reproducible_csv(tmp_path):
    cfg = tiny(n_list=(40,), p_grid=(0.9, 0.99), trials=6, base_seed=17)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    lab.export(lab.run_sweep(cfg), a)
    lab.export(lab.run_sweep(cfg), b)
    assert a.read_bytes() == b.read_bytes()


def test_workers_do_not_change_results(monkeypatch):
    cfg = tiny(n_list=(40,), p_grid=(0.95,), trials=6, base_seed=3)
    one = lab.to_csv(lab.run_sweep(cfg))
    monkeypatch.setenv(lab.WORKERS_ENV, "2")
    assert lab.worker_count() == 2
    assert lab.to_csv(lab.run_sweep(cfg)) == one


def test_derive_seed():
    s = {lab.derive_seed(1, 64, 0.5, t) for t in range(100)}
    assert len(s) == 100
    assert lab.derive_seed(1, 64, None, 3) == lab.derive_seed(1, 64, None, 3)
    assert lab.derive_seed(1, 64, 0.5, 3) != lab.derive_seed(1, 64, 0.25, 3)
    assert lab.derive_seed(1, 64, 0.5, 3) != lab.derive_seed(2, 64, 0.5, 3)


def test_wilson_coverage():
    rng = np.random.default_rng(0)
    for q in (0.05, 0.3, 0.5, 0.9):
        hits = 0
        for _ in range(1000):
            k = int(rng.binomial(50, q))
            lo, hi = wilson_interval(k, 50)
            hits += lo <= q <= hi
        assert hits >= 930, (q, hits)


def test_monotone_helper():
    pts = [lab.PointResult("bipartite", 4, 64, p, 100, k, *wilson_interval(k, 100), 0.0)
           for p, k in [(0.1, 10), (0.2, 40), (0.3, 35), (0.4, 90)]]
    assert lab.monotone_within(pts) == []
    pts.append(lab.PointResult("bipartite", 4, 64, 0.5, 100, 20, *wilson_interval(20, 100), 0.0))
    assert len(lab.monotone_within(pts)) == 1


def test_theory_exponents():
    assert lab.theory_exponents("bipartite", 4) == {"window": 0.5}
    assert lab.theory_exponents("even", 6)["window"] == pytest.approx(2 / 3)
    odd = lab.theory_exponents("odd", 7)
    assert odd == pytest.approx({"window": 3 / 5, "schedule": 3 / 4, "paths": 2 / 3})


def test_sweep_with_half_estimate():
    cfg = lab.ExperimentConfig("bipartite", 4, (64,), p_grid=(), trials=8, estimate_half=True,
                               p_bounds=(0.05, 1.0), rel_tol=0.1, max_trials=16, timing=False)
    res = lab.run_sweep(cfg)
    assert res.p_half[64] is not None and 0.05 < res.p_half[64] < 1.0
    assert res.points and all(pt.n == 64 for pt in res.points)
