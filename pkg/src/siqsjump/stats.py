"""Path and ensemble functionals: time averages, extinction exponents,
histograms and the moment-bound comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

__all__ = [
    "Histogram",
    "MomentBoundReport",
    "time_average",
    "extinction_exponent",
    "histogram",
    "is_unimodal",
    "total_variation",
    "moment_bound",
    "moment_bound_check",
    "mean_and_stderr",
]


def _window(n_points: int, dt: float, t_start: float, t_end: float):
    if not t_start < t_end:
        raise ValueError(f"need t_start < t_end, got [{t_start}, {t_end}]")
    i0 = int(round(t_start / dt))
    i1 = int(round(t_end / dt))
    if t_start < 0 or i1 > n_points - 1 or i0 >= i1:
        raise ValueError(
            f"window [{t_start}, {t_end}] lies outside the grid [0, {(n_points - 1) * dt}]")
    return i0, i1


def time_average(series, t_start: float, t_end: float, dt: float) -> float:
    """Left-Riemann estimate of ``(1/(t_end - t_start)) int series dt``.

    ``series[i]`` is the value at time ``i * dt``.
    """
    series = np.asarray(series, dtype=float)
    i0, i1 = _window(series.shape[0], dt, t_start, t_end)
    return float(series[i0:i1].mean())


def extinction_exponent(I_series, dt: float) -> Dict[str, float]:
    """``ln I(T)/T`` and the least-squares slope of ``ln I`` over the last half of the grid."""
    I_series = np.asarray(I_series, dtype=float)
    n = I_series.shape[0]
    half = I_series[(n - 1) // 2:]
    if half.shape[0] < 10:
        raise ValueError(f"need at least 10 points in the fitting window, got {half.shape[0]}")
    if not np.all(half > 0):
        raise ValueError("I must be strictly positive on the fitting window")
    T = (n - 1) * dt
    logs = np.log(half)
    x = np.arange(half.shape[0], dtype=float) * dt
    xc = x - x.mean()
    slope = float(np.dot(xc, logs - logs.mean()) / np.dot(xc, xc))
    return {"terminal": float(math.log(I_series[-1]) / T), "slope": slope}


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    densities: np.ndarray
    counts: np.ndarray
    degenerate: bool = False

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def probabilities(self) -> np.ndarray:
        return self.densities * self.widths

    @property
    def mode(self) -> float:
        i = int(np.argmax(self.densities))
        return float(0.5 * (self.edges[i] + self.edges[i + 1]))

    def to_dict(self) -> Dict[str, object]:
        return {"edges": self.edges.tolist(), "densities": self.densities.tolist(),
                "counts": self.counts.tolist(), "degenerate": self.degenerate}

    def csv_rows(self):
        for lo, hi, d in zip(self.edges[:-1], self.edges[1:], self.densities):
            yield lo, hi, d


def histogram(values, bins: Optional[int] = None, bin_width: Optional[float] = None,
              range: Optional[Sequence[float]] = None) -> Histogram:
    """Density-normalised histogram; give either ``bins`` or ``bin_width``.

    All-identical input yields a single unit-width bin flagged ``degenerate``.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2:
        raise ValueError("histogram needs at least 2 values")
    if not np.all(np.isfinite(values)):
        raise ValueError("histogram values must be finite")
    if (bins is None) == (bin_width is None):
        raise ValueError("give exactly one of bins or bin_width")
    lo, hi = (float(values.min()), float(values.max())) if range is None else map(float, range)
    if range is None and lo == hi:
        edges = np.array([lo - 0.5, lo + 0.5])
        return Histogram(edges, np.ones(1), np.array([values.size]), degenerate=True)
    if bin_width is not None:
        if not bin_width > 0:
            raise ValueError("bin_width must be > 0")
        nb = max(1, int(math.ceil((hi - lo) / bin_width)))
        edges = lo + bin_width * np.arange(nb + 1)
    else:
        edges = np.linspace(lo, hi, int(bins) + 1)
    counts, edges = np.histogram(values, bins=edges)
    total = counts.sum()
    densities = counts / (total * np.diff(edges)) if total else np.zeros(counts.shape)
    return Histogram(edges, densities, counts)


def is_unimodal(counts, z: float = 3.0) -> bool:
    """True when the counts rise to one peak and fall, up to Poisson noise.

    Moving away from the highest bin, a bin may exceed the smallest count seen
    so far by at most ``z`` standard deviations.
    """
    counts = np.asarray(counts, dtype=float)
    peak = int(np.argmax(counts))
    for side in (counts[peak::-1], counts[peak:]):
        low = side[0]
        for c in side[1:]:
            if c - low > z * math.sqrt(max(low, 1.0)):
                return False
            low = min(low, c)
    return True


def total_variation(a: Histogram, b: Histogram) -> float:
    """Total-variation distance between two histograms on identical edges."""
    if a.edges.shape != b.edges.shape or not np.allclose(a.edges, b.edges):
        raise ValueError("histograms must share bin edges")
    return float(0.5 * np.abs(a.probabilities - b.probabilities).sum())


def mean_and_stderr(values, axis: int = 0):
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    mean = values.mean(axis=axis)
    if n < 2:
        return mean, np.full_like(mean, np.nan)
    return mean, values.std(axis=axis, ddof=1) / math.sqrt(n)


def moment_bound(t, N0: float, n: int, p: float, delta: float, gamma_np: float):
    """``N0^(np) exp(-(np gamma/2) t) + 2 delta / gamma``."""
    q = n * p
    t = np.asarray(t, dtype=float)
    return N0**q * np.exp(-(q * gamma_np / 2.0) * t) + 2.0 * delta / gamma_np


@dataclass(frozen=True)
class MomentBoundReport:
    times: np.ndarray
    empirical: np.ndarray
    stderr: np.ndarray
    bound: np.ndarray
    ratios: np.ndarray
    slack: float

    @property
    def max_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def ok(self) -> bool:
        return self.max_ratio <= 1.0


def moment_bound_check(N_at_times, times, N0: float, n: int, p: float, delta: float,
                       gamma_np: float, slack: float = 1.0) -> MomentBoundReport:
    """Compare the ensemble mean of ``N^(np)`` at ``times`` against the bound.

    ``N_at_times`` has shape ``(paths, len(times))``.  A ratio above one at any
    time is a violation of ``slack * bound``.
    """
    if not gamma_np > 0:
        raise ValueError(f"gamma_np must be > 0, got {gamma_np}")
    N_at_times = np.asarray(N_at_times, dtype=float)
    times = np.asarray(times, dtype=float)
    if N_at_times.ndim != 2 or N_at_times.shape[1] != times.size:
        raise ValueError("N_at_times must have shape (paths, len(times))")
    powered = N_at_times ** (n * p)
    emp, se = mean_and_stderr(powered)
    bound = moment_bound(times, N0, n, p, delta, gamma_np)
    return MomentBoundReport(times, emp, se, bound, emp / (slack * bound), slack)
