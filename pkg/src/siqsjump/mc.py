"""Reproducible Monte Carlo ensembles.

Path ``i`` of an ensemble is seeded with
``SeedSequence(base_seed, spawn_key=(i,))``: a hash of the base seed and the
path index, so any path can be rerun on its own and the result never depends
on how many workers ran the ensemble or in what order they finished.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .deterministic import NonFiniteStateError
from .model import LevyMeasure, ModelParams, NoiseParams, State
from .sde import DEFAULT_FLOOR, Grid, generate_noise, simulate_auxiliary_path, simulate_path
from .stats import Histogram, extinction_exponent, histogram, mean_and_stderr, time_average

__all__ = [
    "EnsembleConfig",
    "EnsembleSummary",
    "EnsembleError",
    "PathStats",
    "path_seed",
    "simulate_one",
    "run_ensemble",
]

COMPARTMENTS = ("S", "I", "Q")


def path_seed(base_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(base_seed), spawn_key=(int(index),))


@dataclass(frozen=True)
class EnsembleConfig:
    """What to simulate and which statistics to keep.

    Paths ``first_path, ..., first_path + path_count - 1`` are run, so two
    configs with disjoint index ranges draw disjoint seeds.  The time-average
    window defaults to the second half of the horizon.
    """

    path_count: int
    base_seed: int
    dt: float
    t_end: float
    s0: State = State(0.5, 0.3, 0.1)
    first_path: int = 0
    window: Optional[Tuple[float, float]] = None
    sample_times: Tuple[float, ...] = ()
    auxiliary: bool = False
    bins: int = 30
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.path_count < 1:
            raise ValueError(f"path_count must be >= 1, got {self.path_count}")
        Grid(self.dt, self.t_end)  # validates dt and t_end
        for ts in self.sample_times:
            if not 0 <= ts <= self.t_end:
                raise ValueError(f"sample time {ts} outside [0, {self.t_end}]")

    @property
    def grid(self) -> Grid:
        return Grid(self.dt, self.t_end)

    @property
    def averaging_window(self) -> Tuple[float, float]:
        return self.window if self.window is not None else (self.t_end / 2.0, self.t_end)

    def path_indices(self) -> range:
        return range(self.first_path, self.first_path + self.path_count)


@dataclass(frozen=True)
class PathStats:
    index: int
    terminal: np.ndarray
    time_avg: np.ndarray
    ext_terminal: float
    ext_slope: float
    samples: np.ndarray  # (len(sample_times), 3)
    clamp_count: int
    jump_count: int
    aux_mean: float = float("nan")
    aux_sq_mean: float = float("nan")
    domination_fraction: float = float("nan")


class EnsembleError(RuntimeError):
    def __init__(self, failures: List[Tuple[int, int, str]]):
        self.failures = failures
        listing = ", ".join(f"path {i} (base_seed={s}): {msg}" for i, s, msg in failures)
        super().__init__(f"{len(failures)} path(s) failed: {listing}")


def simulate_one(params: ModelParams, noise: NoiseParams, levy: LevyMeasure,
                 cfg: EnsembleConfig, index: int) -> PathStats:
    """Simulate path ``index`` of the ensemble and reduce it to its statistics."""
    grid = cfg.grid
    record = generate_noise(levy, grid, path_seed(cfg.base_seed, index))
    path = simulate_path(params, noise, levy, cfg.s0, record, floor=cfg.floor)
    w0, w1 = cfg.averaging_window
    avg = np.array([time_average(path.y[:, c], w0, w1, grid.dt) for c in range(3)])
    ext = extinction_exponent(path.I, grid.dt)
    idx = [int(round(ts / grid.dt)) for ts in cfg.sample_times]
    extra = {}
    if cfg.auxiliary:
        X = simulate_auxiliary_path(params, noise, levy, cfg.s0.N, record, path)
        extra = {
            "aux_mean": time_average(X, 0.0, cfg.t_end, grid.dt),
            "aux_sq_mean": time_average(X * X, 0.0, cfg.t_end, grid.dt),
            "domination_fraction": float(np.mean(path.N <= X + 1e-9 * X)),
        }
    return PathStats(index, path.y[-1].copy(), avg, ext["terminal"], ext["slope"],
                     path.y[idx].copy(), path.clamp_count, path.jump_count, **extra)


@dataclass
class EnsembleSummary:
    """Per-path statistics (in path-index order) and pooled summaries."""

    config: EnsembleConfig
    indices: np.ndarray
    terminal: np.ndarray         # (P, 3)
    time_avg: np.ndarray         # (P, 3)
    ext_terminal: np.ndarray     # (P,)
    ext_slope: np.ndarray        # (P,)
    samples: np.ndarray          # (P, len(sample_times), 3)
    clamp_count: np.ndarray
    jump_count: np.ndarray
    aux_mean: np.ndarray
    aux_sq_mean: np.ndarray
    domination_fraction: np.ndarray
    histograms: Dict[str, Histogram] = field(default_factory=dict)
    moments: Dict[str, Dict[str, float]] = field(default_factory=dict)

    @classmethod
    def from_paths(cls, cfg: EnsembleConfig, stats: Sequence[PathStats]) -> "EnsembleSummary":
        stats = sorted(stats, key=lambda s: s.index)
        n_samp = len(cfg.sample_times)
        out = cls(
            config=cfg,
            indices=np.array([s.index for s in stats], dtype=np.int64),
            terminal=np.array([s.terminal for s in stats]).reshape(-1, 3),
            time_avg=np.array([s.time_avg for s in stats]).reshape(-1, 3),
            ext_terminal=np.array([s.ext_terminal for s in stats]),
            ext_slope=np.array([s.ext_slope for s in stats]),
            samples=np.array([s.samples for s in stats]).reshape(len(stats), n_samp, 3),
            clamp_count=np.array([s.clamp_count for s in stats], dtype=np.int64),
            jump_count=np.array([s.jump_count for s in stats], dtype=np.int64),
            aux_mean=np.array([s.aux_mean for s in stats]),
            aux_sq_mean=np.array([s.aux_sq_mean for s in stats]),
            domination_fraction=np.array([s.domination_fraction for s in stats]),
        )
        out._pool()
        return out

    def _pool(self):
        self.histograms = {}
        self.moments = {}
        if self.path_count >= 2:
            for c, name in enumerate(COMPARTMENTS):
                self.histograms[name] = histogram(self.terminal[:, c], bins=self.config.bins)
        for label, arr in (("terminal", self.terminal), ("time_avg", self.time_avg)):
            mean, se = mean_and_stderr(arr)
            for c, name in enumerate(COMPARTMENTS):
                self.moments[f"{label}_{name}"] = {"mean": float(mean[c]), "stderr": float(se[c])}
        for label, arr in (("ext_slope", self.ext_slope), ("ext_terminal", self.ext_terminal)):
            mean, se = mean_and_stderr(arr)
            self.moments[label] = {"mean": float(mean), "stderr": float(se)}
        if self.config.auxiliary:
            for label, arr in (("aux_mean", self.aux_mean), ("aux_sq_mean", self.aux_sq_mean)):
                mean, se = mean_and_stderr(arr)
                self.moments[label] = {"mean": float(mean), "stderr": float(se)}

    @property
    def path_count(self) -> int:
        return int(self.indices.size)

    def N_at_samples(self) -> np.ndarray:
        return self.samples.sum(axis=2)

    def merge(self, other: "EnsembleSummary") -> "EnsembleSummary":
        """Union of two ensembles over disjoint path indices."""
        if set(self.indices.tolist()) & set(other.indices.tolist()):
            raise ValueError("ensembles share path indices")
        a, b = self.config, other.config
        if (a.base_seed, a.dt, a.t_end, a.s0, a.sample_times, a.auxiliary, a.averaging_window) != \
                (b.base_seed, b.dt, b.t_end, b.s0, b.sample_times, b.auxiliary, b.averaging_window):
            raise ValueError("ensembles were run with different configurations")
        lo = min(a.first_path, b.first_path)
        cfg = EnsembleConfig(**{**asdict_shallow(a), "first_path": lo,
                                "path_count": a.path_count + b.path_count})
        arrays = {}
        for name in ("indices", "terminal", "time_avg", "ext_terminal", "ext_slope", "samples",
                     "clamp_count", "jump_count", "aux_mean", "aux_sq_mean",
                     "domination_fraction"):
            arrays[name] = np.concatenate([getattr(self, name), getattr(other, name)])
        order = np.argsort(arrays["indices"], kind="stable")
        out = EnsembleSummary(cfg, **{k: v[order] for k, v in arrays.items()})
        out._pool()
        return out

    def to_dict(self) -> Dict[str, object]:
        cfg = asdict(self.config)
        d: Dict[str, object] = {"config": cfg, "path_count": self.path_count,
                                "moments": self.moments,
                                "histograms": {k: h.to_dict() for k, h in self.histograms.items()}}
        per_path = {
            "index": self.indices.tolist(),
            "seed": [[self.config.base_seed, int(i)] for i in self.indices],
            "terminal": self.terminal.tolist(),
            "time_avg": self.time_avg.tolist(),
            "ext_terminal": self.ext_terminal.tolist(),
            "ext_slope": self.ext_slope.tolist(),
            "clamp_count": self.clamp_count.tolist(),
            "jump_count": self.jump_count.tolist(),
        }
        if self.config.sample_times:
            per_path["samples"] = self.samples.tolist()
        if self.config.auxiliary:
            per_path["aux_mean"] = self.aux_mean.tolist()
            per_path["aux_sq_mean"] = self.aux_sq_mean.tolist()
            per_path["domination_fraction"] = self.domination_fraction.tolist()
        d["paths"] = per_path
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def asdict_shallow(obj) -> Dict[str, object]:
    return {f: getattr(obj, f) for f in obj.__dataclass_fields__}


def run_ensemble(params: ModelParams, noise_params: NoiseParams, levy: LevyMeasure,
                 cfg: EnsembleConfig, workers: int = 1, progress: bool = False) -> EnsembleSummary:
    """Run every path of ``cfg`` and reduce in path-index order."""
    indices = list(cfg.path_indices())
    failures: List[Tuple[int, int, str]] = []
    results: List[PathStats] = []
    step = max(1, len(indices) // 20)

    def task(i):
        try:
            return simulate_one(params, noise_params, levy, cfg, i)
        except NonFiniteStateError as exc:
            return exc

    def report(done):
        if progress and (done % step == 0 or done == len(indices)):
            print(f"paths {done}/{len(indices)}", file=sys.stderr, flush=True)

    if workers <= 1:
        outcomes = []
        for done, i in enumerate(indices, 1):
            outcomes.append(task(i))
            report(done)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = []
            for done, res in enumerate(pool.map(task, indices), 1):
                outcomes.append(res)
                report(done)
    for i, res in zip(indices, outcomes):
        if isinstance(res, Exception):
            failures.append((i, cfg.base_seed, str(res)))
        else:
            results.append(res)
    if failures:
        raise EnsembleError(failures)
    return EnsembleSummary.from_paths(cfg, results)
