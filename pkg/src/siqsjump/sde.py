"""Euler-Maruyama simulation of the SIQS model with white noise and Lévy jumps.

The driving noise of a path lives in a :class:`NoiseRecord` so the same
increments and jump marks can drive both the SIQS path and the scalar
comparison process.  Brownian increments and jump events come from two
independent child streams of the seed, so changing the jump measure never
changes the Brownian increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np

from . import _kernels
from .deterministic import NonFiniteStateError, rate_vector
from .model import LevyMeasure, ModelParams, NoiseParams, State

__all__ = [
    "Grid",
    "NoiseRecord",
    "PathOutput",
    "GridMismatchError",
    "DEFAULT_FLOOR",
    "CLAMP_FLAG_RATE",
    "as_seed_sequence",
    "generate_noise",
    "simulate_path",
    "simulate_auxiliary_path",
]

DEFAULT_FLOOR = 1e-12
# Paths clamping on more than this fraction of steps are flagged as under-resolved.
CLAMP_FLAG_RATE = 1e-3

SeedLike = Union[int, np.random.SeedSequence]


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform time grid ``0, dt, ..., t_end``; ``t_end`` must be a multiple of ``dt``."""

    dt: float
    t_end: float

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be finite and > 0, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end >= self.dt):
            raise ValueError(f"t_end must be >= dt, got t_end={self.t_end}, dt={self.dt}")
        ratio = self.t_end / self.dt
        if abs(ratio - round(ratio)) > 1e-6 * max(1.0, ratio):
            raise ValueError(f"t_end={self.t_end} is not a multiple of dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def _child(ss: np.random.SeedSequence, idx: int) -> np.random.Generator:
    # Built explicitly rather than via spawn() so repeated calls give the same stream.
    key = tuple(ss.spawn_key) + (idx,)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(ss.entropy, spawn_key=key)))


@dataclass(frozen=True)
class NoiseRecord:
    """All randomness of one path on one grid.

    ``dW`` has shape ``(n_steps, 4)`` with columns W1, W2, W3, W_beta.  Jump
    events are ``jump_times`` in ``(0, t_end]`` (sorted) with the index of the
    atom that fired in ``jump_atoms``.
    """

    grid: Grid
    dW: np.ndarray
    jump_times: np.ndarray
    jump_atoms: np.ndarray
    jump_steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dW = np.ascontiguousarray(self.dW, dtype=float)
        if dW.shape != (self.grid.n_steps, 4):
            raise GridMismatchError(
                f"dW has shape {dW.shape}, expected {(self.grid.n_steps, 4)}")
        times = np.asarray(self.jump_times, dtype=float)
        atoms = np.asarray(self.jump_atoms, dtype=np.int64)
        if times.shape != atoms.shape:
            raise ValueError("jump_times and jump_atoms must have equal length")
        order = np.argsort(times, kind="stable")
        times, atoms = times[order], atoms[order]
        if times.size and (times[0] <= 0 or times[-1] > self.grid.t_end):
            raise ValueError("jump times must lie in (0, t_end]")
        # A jump at time tau belongs to step n with n*dt < tau <= (n+1)*dt.
        steps = np.clip(np.ceil(times / self.grid.dt).astype(np.int64) - 1, 0, self.grid.n_steps - 1)
        for name, arr in (("dW", dW), ("jump_times", times), ("jump_atoms", atoms),
                          ("jump_steps", steps)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dt(self) -> float:
        return self.grid.dt

    @property
    def n_steps(self) -> int:
        return self.grid.n_steps

    @property
    def jump_count(self) -> int:
        return int(self.jump_times.size)


def generate_noise(levy: LevyMeasure, grid: Grid, seed: SeedLike) -> NoiseRecord:
    """Draw Brownian increments and compound-Poisson jump marks for one path."""
    ss = as_seed_sequence(seed)
    bm = _child(ss, 0)
    dW = bm.standard_normal((grid.n_steps, 4))
    dW *= math.sqrt(grid.dt)
    lam = levy.total_mass
    if lam > 0:
        jr = _child(ss, 1)
        count = int(jr.poisson(lam * grid.t_end))
        # 1 - U lies in (0, 1], so times land in (0, t_end].
        times = grid.t_end * (1.0 - jr.random(count))
        atoms = jr.choice(len(levy), size=count, p=levy.weights() / lam)
    else:
        times = np.empty(0)
        atoms = np.empty(0, dtype=np.int64)
    return NoiseRecord(grid, dW, times, atoms)


@dataclass(frozen=True)
class PathOutput:
    t: np.ndarray
    y: np.ndarray  # (n_points, 3): S, I, Q
    clamp_count: int
    min_pre_clamp: float
    jump_count: int = 0

    @property
    def S(self) -> np.ndarray:
        return self.y[:, 0]

    @property
    def I(self) -> np.ndarray:
        return self.y[:, 1]

    @property
    def Q(self) -> np.ndarray:
        return self.y[:, 2]

    @property
    def N(self) -> np.ndarray:
        return self.y.sum(axis=1)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    @property
    def n_steps(self) -> int:
        return self.t.size - 1

    @property
    def clamp_rate(self) -> float:
        return self.clamp_count / max(self.n_steps, 1)

    @property
    def flagged(self) -> bool:
        return self.clamp_rate > CLAMP_FLAG_RATE

    def diagnostics(self) -> Dict[str, object]:
        return {
            "clamp_count": self.clamp_count,
            "clamp_rate": self.clamp_rate,
            "flagged": self.flagged,
            "min_pre_clamp": self.min_pre_clamp,
            "jump_count": self.jump_count,
            "n_steps": self.n_steps,
            "dt": self.dt,
        }


def _jump_compensation(levy: LevyMeasure) -> np.ndarray:
    if levy.is_empty:
        return np.zeros(3)
    return np.array([math.fsum(a.w * a.etas[i] for a in levy.atoms) for i in range(3)])


def _check_atoms(levy: LevyMeasure, record: NoiseRecord):
    if record.jump_count and int(record.jump_atoms.max()) >= len(levy):
        raise ValueError("noise record references jump atoms absent from the measure")


def _noise_vector(noise: NoiseParams) -> np.ndarray:
    return np.array([noise.sigma1, noise.sigma2, noise.sigma3, noise.sigma_beta], dtype=float)


def simulate_path(
    params: ModelParams,
    noise_params: NoiseParams,
    levy: LevyMeasure,
    s0: State,
    record: NoiseRecord,
    floor: float = DEFAULT_FLOOR,
) -> PathOutput:
    """One Euler-Maruyama path driven by ``record``.

    Raw jumps are applied multiplicatively at the end of the step containing
    them, so the drift carries the compensator ``-(S, I, Q) * int eta dnu``.
    Components that go negative are reset to ``floor`` and counted.
    """
    y0 = s0.as_array()
    if not np.all(y0 > 0):
        raise ValueError(f"initial state must be component-wise > 0, got {s0}")
    _check_atoms(levy, record)
    out = np.empty((record.n_steps + 1, 3))
    clamps, min_raw, failed = _kernels.em_path(
        rate_vector(params), _noise_vector(noise_params), _jump_compensation(levy),
        levy.eta_matrix(), y0, record.dW, record.jump_steps, record.jump_atoms,
        record.dt, float(floor), out)
    if failed >= 0:
        raise NonFiniteStateError(failed)
    return PathOutput(record.grid.times(), out, int(clamps), float(min_raw), record.jump_count)


def simulate_auxiliary_path(
    params: ModelParams,
    noise_params: NoiseParams,
    levy: LevyMeasure,
    x0: float,
    record: NoiseRecord,
    companion: PathOutput,
) -> np.ndarray:
    """Scalar comparison process ``dX = (A - mu1 X) dt + noise of S + I + Q``.

    It shares every increment and jump with ``companion`` (which must have been
    simulated from ``record``) and dominates its total population ``N``.
    """
    if companion.y.shape[0] != record.n_steps + 1 or not math.isclose(
            companion.dt, record.dt, rel_tol=1e-12):
        raise GridMismatchError(
            f"companion grid ({companion.y.shape[0] - 1} steps, dt={companion.dt}) does not "
            f"match noise record ({record.n_steps} steps, dt={record.dt})")
    _check_atoms(levy, record)
    out = np.empty(record.n_steps + 1)
    failed = _kernels.aux_path(
        rate_vector(params), _noise_vector(noise_params), _jump_compensation(levy),
        levy.eta_matrix(), float(x0), record.dW, record.jump_steps, record.jump_atoms,
        record.dt, np.ascontiguousarray(companion.y), out)
    if failed >= 0:
        raise NonFiniteStateError(failed)
    return out
