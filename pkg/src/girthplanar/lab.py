"""Monte Carlo sweeps, half-success bisection and threshold-exponent fits."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .builder import BuildConfig, build, family_for
from .oracle import wilson_interval
from .planar import divisibility_ok

WORKERS_ENV = "GIRTHPLANAR_WORKERS"
CSV_COLUMNS = ("family", "g", "n", "p", "trials", "successes", "wilson_lo", "wilson_hi",
               "mean_ms")


class ConfigError(ValueError):
    pass


class BracketError(ValueError):
    """The success curve does not straddle one half on the probed interval."""


class FitError(ValueError):
    pass


def theory_exponents(family: str, g: int) -> dict[str, float]:
    """Exponents alpha in p ~ n^(-alpha) suggested by the theory for each family."""
    if family == "bipartite":
        return {"window": 0.5}
    if family == "even":
        return {"window": (g - 2) / g}
    k = (g - 1) // 2
    return {"window": (g - 4) / (g - 2), "schedule": k / (k + 1), "paths": (k - 1) / k}


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    g: int
    n_list: tuple[int, ...]
    p_grid: tuple[float, ...] | None = None     # explicit grid, or ...
    scales: tuple[float, ...] = (1.0,)          # ... p(n) = A (log n)^beta n^(-alpha)
    alpha: float = 0.5
    beta: float = 0.0
    trials: int = 50
    base_seed: int = 0
    coupled: bool = False
    estimate_half: bool = False
    p_bounds: tuple[float, float] = (1e-3, 1.0)
    max_trials: int = 400
    rel_tol: float = 0.02
    delta: float | None = None
    epsilon: float | None = None
    path_restarts: int = 20
    sub_layers: int = 4
    shared_layers: bool = False
    timing: bool = True     # False pins mean_ms to 0 so exports are byte-stable
    output: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if self.p_grid is not None:
            object.__setattr__(self, "p_grid", tuple(float(p) for p in self.p_grid))
        object.__setattr__(self, "scales", tuple(float(a) for a in self.scales))
        object.__setattr__(self, "p_bounds", tuple(float(b) for b in self.p_bounds))
        if self.family not in ("bipartite", "even", "odd"):
            raise ConfigError(f"unknown family {self.family!r}")
        if self.family != family_for(self.g):
            raise ConfigError(f"girth {self.g} does not belong to family {self.family}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        bad = [n for n in self.n_list if not divisibility_ok(self.g, n)]
        if bad:
            raise ConfigError(f"n values violating the divisibility condition for g={self.g}: {bad}")
        for x in (self.alpha, self.beta, *self.scales):
            if not math.isfinite(x):
                raise ConfigError("schedule parameters must be finite")
        if self.p_grid is not None and not all(0 <= p <= 1 for p in self.p_grid):
            raise ConfigError("grid probabilities must lie in [0, 1]")

    def grid(self, n: int) -> list[float]:
        if self.p_grid is not None:
            return list(self.p_grid)
        base = math.log(n) ** self.beta * n ** (-self.alpha)
        return [min(1.0, a * base) for a in self.scales]

    def build_config(self) -> BuildConfig:
        return BuildConfig(delta=self.delta, epsilon=self.epsilon,
                           path_restarts=self.path_restarts, coupled=self.coupled,
                           sub_layers=self.sub_layers, shared_layers=self.shared_layers,
                           verify=True, planarity_check=False)

    def to_json(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class PointResult:
    family: str
    g: int
    n: int
    p: float
    trials: int
    successes: int
    wilson_lo: float
    wilson_hi: float
    mean_ms: float
    failures: dict[str, int] = field(default_factory=dict)

    @property
    def fraction(self) -> float:
        return self.successes / self.trials

    @property
    def half_width(self) -> float:
        return (self.wilson_hi - self.wilson_lo) / 2


@dataclass
class FitResult:
    alpha: float
    stderr: float
    intercept: float
    beta: float
    points: int


@dataclass
class SweepResult:
    config: dict
    points: list[PointResult] = field(default_factory=list)
    p_half: dict[int, float | None] = field(default_factory=dict)
    fit: FitResult | None = None
    exponents: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"config": self.config,
                "points": [asdict(p) for p in self.points],
                "p_half": {str(n): v for n, v in sorted(self.p_half.items())},
                "fit": asdict(self.fit) if self.fit else None,
                "exponents": self.exponents}

    @classmethod
    def from_json(cls, data: dict) -> "SweepResult":
        return cls(config=data["config"],
                   points=[PointResult(**p) for p in data["points"]],
                   p_half={int(n): v for n, v in data["p_half"].items()},
                   fit=FitResult(**data["fit"]) if data.get("fit") else None,
                   exponents=dict(data.get("exponents", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


# -- seeds and trials ---------------------------------------------------------

def derive_seed(base: int, n: int, p: float | None, trial: int) -> int:
    """Trial seed from (base, n, p, trial); p=None gives p-independent (coupled) seeds."""
    key = [int(base) & (2**63 - 1), int(n), int(trial)]
    if p is not None:
        key.append(int.from_bytes(struct.pack(">d", float(p)), "big"))
    return int(np.random.SeedSequence(key).generate_state(1, np.uint64)[0] >> 1)


def _run_trial(args) -> tuple[bool, str | None, float]:
    family, n, g, p, seed, bcfg, timing = args
    t0 = time.perf_counter()
    out = build(family, n, g, p, seed, bcfg)
    return out.success, out.failed_stage, (time.perf_counter() - t0) * 1e3 if timing else 0.0


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, jobs: list):
    w = worker_count()
    if w == 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * w))))


def run_point(cfg: ExperimentConfig, n: int, p: float, trials: int,
              first_trial: int = 0) -> PointResult:
    bcfg = cfg.build_config()
    jobs = [(cfg.family, n, cfg.g, p,
             derive_seed(cfg.base_seed, n, None if cfg.coupled else p, t), bcfg, cfg.timing)
            for t in range(first_trial, first_trial + trials)]
    res = _map(_run_trial, jobs)
    succ = sum(r[0] for r in res)
    fails: dict[str, int] = {}
    for ok, stage, _ in res:
        if not ok:
            fails[stage] = fails.get(stage, 0) + 1
    lo, hi = wilson_interval(succ, trials)
    return PointResult(cfg.family, cfg.g, n, p, trials, succ, lo, hi,
                       float(np.mean([r[2] for r in res])), dict(sorted(fails.items())))


def _merge(a: PointResult, b: PointResult) -> PointResult:
    trials, succ = a.trials + b.trials, a.successes + b.successes
    lo, hi = wilson_interval(succ, trials)
    fails = dict(a.failures)
    for k, v in b.failures.items():
        fails[k] = fails.get(k, 0) + v
    ms = (a.mean_ms * a.trials + b.mean_ms * b.trials) / trials
    return PointResult(a.family, a.g, a.n, a.p, trials, succ, lo, hi, ms, dict(sorted(fails.items())))


# -- half-success estimation --------------------------------------------------

@dataclass
class HalfEstimate:
    p_half: float
    lo: float
    hi: float
    evaluations: list[tuple[float, int, int]] = field(default_factory=list)


Sampler = Callable[[float, int, int], int]


def estimate_p_half(sampler: Sampler, p_lo: float, p_hi: float, *, trials: int = 50,
                    max_trials: int = 400, rel_tol: float = 0.02) -> HalfEstimate:
    """Geometric bisection on [p_lo, p_hi] for the p where success probability is 1/2.

    ``sampler(p, trials, first_trial)`` returns the number of successes in
    trials first_trial .. first_trial+trials-1. When the Wilson interval
    at a midpoint still contains 1/2, the trial count there is doubled up
    to ``max_trials``; if it still does, that midpoint is returned.
    """
    if not 0 < p_lo < p_hi <= 1:
        raise ValueError(f"need 0 < p_lo < p_hi <= 1, got {p_lo}, {p_hi}")
    evals: list[tuple[float, int, int]] = []

    def measure(p: float) -> tuple[int, int, float, float]:
        k, t = sampler(p, trials, 0), trials
        lo, hi = wilson_interval(k, t)
        while lo <= 0.5 <= hi and t < max_trials:
            extra = min(t, max_trials - t)
            k += sampler(p, extra, t)
            t += extra
            lo, hi = wilson_interval(k, t)
        evals.append((p, k, t))
        return k, t, lo, hi

    k, t, _, _ = measure(p_lo)
    if k / t >= 0.5:
        raise BracketError(f"success fraction {k / t:.3f} >= 1/2 already at p={p_lo}")
    k, t, _, _ = measure(p_hi)
    if k / t <= 0.5:
        raise BracketError(f"success fraction {k / t:.3f} <= 1/2 at p={p_hi}")
    lo, hi = p_lo, p_hi
    while hi / lo - 1 > rel_tol:
        mid = math.sqrt(lo * hi)
        k, t, wlo, whi = measure(mid)
        if wlo <= 0.5 <= whi:
            return HalfEstimate(mid, lo, hi, evals)
        if k / t < 0.5:
            lo = mid
        else:
            hi = mid
    return HalfEstimate(math.sqrt(lo * hi), lo, hi, evals)


# -- exponent fit -------------------------------------------------------------

def fit_exponent(points: Sequence[tuple[int, float]], beta: float = 0.0) -> FitResult:
    """Least squares of log p_half - beta log log n on log n; alpha is the negated slope."""
    pts = [(int(n), float(p)) for n, p in points]
    if len(pts) < 3:
        raise FitError(f"need at least 3 points, got {len(pts)}")
    ns = np.array([n for n, _ in pts], dtype=float)
    ps = np.array([p for _, p in pts], dtype=float)
    if (ps <= 0).any() or (ns < 3).any():
        raise FitError("p_half must be positive and n >= 3")
    if ns.max() / ns.min() < 2:
        raise FitError("n values span less than a factor of 2")
    x = np.log(ns)
    y = np.log(ps) - beta * np.log(np.log(ns))
    reg = stats.linregress(x, y)
    return FitResult(float(-reg.slope), float(reg.stderr), float(reg.intercept), beta, len(pts))


# -- sweeps -------------------------------------------------------------------

def run_sweep(cfg: ExperimentConfig, log: Callable[[str], None] | None = None) -> SweepResult:
    """Grid sweep (and, with ``estimate_half``, a p_half bisection per n)."""
    result = SweepResult(config=cfg.to_json(), exponents=theory_exponents(cfg.family, cfg.g))
    collected: dict[tuple[int, float], PointResult] = {}
    for n in cfg.n_list:
        for p in cfg.grid(n):
            collected[(n, p)] = run_point(cfg, n, p, cfg.trials)
            if log:
                pt = collected[(n, p)]
                log(f"n={n} p={p:.5g} {pt.successes}/{pt.trials}")
        if cfg.estimate_half:
            def sampler(p, trials, first, n=n):
                pt = run_point(cfg, n, p, trials, first)
                key = (n, p)
                collected[key] = _merge(collected[key], pt) if key in collected else pt
                return pt.successes
            try:
                est = estimate_p_half(sampler, *cfg.p_bounds, trials=cfg.trials,
                                      max_trials=cfg.max_trials, rel_tol=cfg.rel_tol)
                result.p_half[n] = est.p_half
            except BracketError:
                result.p_half[n] = None
            if log:
                log(f"n={n} p_half={result.p_half[n]}")
    result.points = [collected[k] for k in sorted(collected)]
    usable = [(n, p) for n, p in sorted(result.p_half.items()) if p]
    if len(usable) >= 3:
        try:
            result.fit = fit_exponent(usable, cfg.beta)
        except FitError:
            result.fit = None
    return result


def monotone_within(points: Sequence[PointResult], slack: float = 2.0) -> list[str]:
    """Violations of "success fraction non-decreasing in p" beyond ``slack`` half-widths."""
    pts = sorted(points, key=lambda r: r.p)
    bad = []
    for a, b in zip(pts, pts[1:]):
        if b.fraction < a.fraction - slack * max(a.half_width, b.half_width):
            bad.append(f"p={a.p:.4g}: {a.fraction:.3f} -> p={b.p:.4g}: {b.fraction:.3f}")
    return bad


# -- export -------------------------------------------------------------------

def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for pt in result.points:
        w.writerow([pt.family, pt.g, pt.n, repr(pt.p), pt.trials, pt.successes,
                    f"{pt.wilson_lo:.6f}", f"{pt.wilson_hi:.6f}", f"{pt.mean_ms:.3f}"])
    return buf.getvalue()


def export(result: SweepResult, path, fmt: str | None = None) -> None:
    fmt = fmt or ("json" if str(path).endswith(".json") else "csv")
    text = result.dumps() if fmt == "json" else to_csv(result)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def load_result(path) -> SweepResult:
    with open(path) as fh:
        return SweepResult.from_json(json.load(fh))
