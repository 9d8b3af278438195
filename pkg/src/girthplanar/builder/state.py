"""Construction state, configuration and outcomes shared by all builders."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from ..graph import EdgeLayers, SimpleGraph
from ..planar import RotationMap, VerificationReport, verify_spanning_maximal


class BuildFailure(Exception):
    """A construction stage could not be completed (a Monte Carlo outcome, not a bug)."""

    def __init__(self, stage: str, reason: str):
        super().__init__(f"{stage}: {reason}")
        self.stage = stage
        self.reason = reason


@dataclass(frozen=True)
class BuildConfig:
    delta: float | None = None        # fraction of n used before the final phase
    epsilon: float | None = None      # even family: face batch size as a fraction of n
    path_restarts: int = 20
    repair_factor: int = 30           # min-conflicts moves per pair and restart
    cycle_attempts: int = 50
    sub_layers: int = 4               # bipartite: sub-layers per gadget layer (1 = no split)
    shared_layers: bool = False       # diagnostic: every stage reads one G(n, p)
    coupled: bool = False             # nested-coupled layer sampling
    check_paths: bool = True          # validate every embedded path family
    verify: bool = True               # run verify_spanning_maximal on success
    planarity_check: bool | None = None

    def delta_for(self, family: str, g: int) -> float:
        if self.delta is not None:
            return self.delta
        return {"bipartite": 0.2, "even": 0.4}.get(family, 1.0 / (10 * g))

    def epsilon_for(self, g: int) -> float:
        return self.epsilon if self.epsilon is not None else 1.0 / (4 * g)


@dataclass
class StageRecord:
    stage: str
    layers: tuple
    success: bool
    faces_touched: int = 0
    vertices_consumed: int = 0
    elapsed_ms: float = 0.0
    detail: str = ""

    def to_json(self) -> dict:
        d = asdict(self)
        d["layers"] = [list(x) if isinstance(x, tuple) else x for x in self.layers]
        return d


@dataclass
class BuildOutcome:
    family: str
    n: int
    g: int
    p: float
    seed: int
    rmap: RotationMap | None = None
    failure: tuple[str, str] | None = None
    stats: dict[str, Any] = field(default_factory=dict)
    log: list[StageRecord] = field(default_factory=list)
    host: SimpleGraph | None = None
    report: VerificationReport | None = None

    @property
    def success(self) -> bool:
        return self.failure is None and self.rmap is not None

    @property
    def failed_stage(self) -> str | None:
        return None if self.failure is None else self.failure[0]

    def trace_lines(self) -> list[str]:
        return [json.dumps(r.to_json(), sort_keys=True) for r in self.log]

    def write_trace(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.trace_lines():
                fh.write(line + "\n")

    def summary(self) -> dict:
        return {"family": self.family, "n": self.n, "g": self.g, "p": self.p,
                "seed": self.seed, "success": self.success,
                "failure": list(self.failure) if self.failure else None,
                "edges": self.rmap.edge_count if self.rmap is not None else None,
                "stats": self.stats}


class ConstructionState:
    """Single-owner state of one build: map, vertex pool, layers and stage log.

    Every vertex is either used (reserved or placed) or in the free pool.
    Every map edge is recorded together with the layer (or sub-layer) it
    was drawn from, so provenance can be re-checked at the end.
    """

    def __init__(self, n: int, layers: EdgeLayers | None, rng: np.random.Generator,
                 config: BuildConfig | None = None, matrices: Sequence[np.ndarray] | None = None):
        self.n = n
        self.layers = layers
        self._matrices = matrices
        self.rng = rng
        self.config = config or BuildConfig()
        self.map = RotationMap(n)
        self.free = np.ones(n, dtype=bool)
        self.log: list[StageRecord] = []
        self.provenance: dict[tuple[int, int], Any] = {}
        self.cursor = 0
        self.counters: dict[str, int] = {}

    @classmethod
    def standalone(cls, matrix: np.ndarray, seed: int = 0,
                   config: BuildConfig | None = None) -> "ConstructionState":
        """State over a single fixed layer (layer key 0), for subroutine use."""
        return cls(matrix.shape[0], None, np.random.default_rng(seed), config, [matrix])

    # -- pool -------------------------------------------------------------

    @property
    def used_count(self) -> int:
        return int(self.n - self.free.sum())

    def pool(self) -> np.ndarray:
        return np.flatnonzero(self.free)

    def take(self, vertices: Iterable[int]) -> None:
        vs = np.fromiter(vertices, dtype=np.int64)
        if vs.size and not self.free[vs].all():
            raise AssertionError("vertex taken twice")
        self.free[vs] = False

    # -- layers -----------------------------------------------------------

    def matrix(self, key) -> np.ndarray:
        if self.config.shared_layers:
            key = 0
        if self._matrices is not None:
            j = key if isinstance(key, int) else key[0]
            return self._matrices[j]
        if isinstance(key, tuple):
            return self.layers.sub_matrix(*key)
        return self.layers.matrix(key)

    def insert(self, fid: int, path: Sequence[int], key=None) -> tuple[int, int]:
        """Draw ``path`` in face ``fid``; records its edges under ``key`` if given."""
        out = self.map.insert_path(fid, path)
        if key is not None:
            self.record_path(path, key)
        return out

    def record_path(self, path: Sequence[int], key) -> None:
        for u, v in zip(path, path[1:]):
            self.provenance[(min(u, v), max(u, v))] = key

    def check_provenance(self) -> list[str]:
        """Every map edge was recorded, and is present in its recorded layer."""
        bad = []
        by_key: dict[Any, list[tuple[int, int]]] = {}
        for e in self.map.edges():
            key = self.provenance.get(e)
            if key is None:
                bad.append(f"edge {e} has no layer record")
            else:
                by_key.setdefault(key, []).append(e)
        for key, edges in by_key.items():
            a = np.array(edges)
            present = self.matrix(key)[a[:, 0], a[:, 1]]
            bad.extend(f"edge {tuple(e)} is not in layer {key}" for e in a[~present].tolist())
        return bad

    def bump(self, name: str, k: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + k

    # -- logging ----------------------------------------------------------

    @contextmanager
    def stage(self, name: str, layers: tuple, faces: int = 0):
        rec = StageRecord(name, tuple(layers), False, faces)
        before = self.used_count
        t0 = time.perf_counter()
        try:
            yield rec
            rec.success = True
        except BuildFailure as exc:
            rec.detail = exc.reason
            raise
        finally:
            rec.elapsed_ms = (time.perf_counter() - t0) * 1e3
            rec.vertices_consumed = self.used_count - before
            self.log.append(rec)


def make_layers(n: int, p: float, m: int, seed: int, cfg: BuildConfig,
                parts: int = 1) -> EdgeLayers:
    """The m independent layers of a build (a single G(n, p) in shared mode)."""
    if cfg.shared_layers:
        m, parts = 1, 1
    return EdgeLayers(n, p, m, seed, parts=parts, coupled=cfg.coupled, cache_size=min(m, 8))


def finish(state: ConstructionState, outcome: BuildOutcome, g: int,
           host: SimpleGraph | None) -> BuildOutcome:
    """Final bookkeeping for a build that ran to completion."""
    outcome.rmap = state.map
    outcome.log = state.log
    bad = state.check_provenance()
    if bad:
        raise AssertionError("layer provenance violated: " + bad[0])
    if state.free.any():
        raise BuildFailure("final", f"{int(state.free.sum())} vertices left unplaced")
    if state.config.verify and host is not None:
        rep = verify_spanning_maximal(state.map, host, g,
                                      planarity_check=state.config.planarity_check)
        outcome.report = rep
        if not rep.passed:
            raise AssertionError("construction produced an invalid map: " + rep.failures[0])
    return outcome
