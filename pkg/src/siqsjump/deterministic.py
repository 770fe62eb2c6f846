"""The noise-free SIQS system: right-hand side, R0, equilibria, RK4 integration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .model import ModelParams, State

__all__ = [
    "Equilibria",
    "ODETrajectory",
    "NonFiniteStateError",
    "ode_rhs",
    "compute_R0",
    "compute_equilibria",
    "integrate_ode",
]


class NonFiniteStateError(FloatingPointError):
    """Raised when an integrator produces NaN or inf; carries the step index."""

    def __init__(self, step: int, message: str = ""):
        self.step = step
        super().__init__(message or f"non-finite state at step {step}")


@dataclass(frozen=True)
class Equilibria:
    disease_free: State
    endemic: Optional[State]
    R0: float

    @property
    def stable(self) -> str:
        """Which equilibrium attracts every positive trajectory."""
        return "endemic" if self.endemic is not None else "disease_free"


@dataclass(frozen=True)
class ODETrajectory:
    t: np.ndarray
    y: np.ndarray  # shape (n_points, 3): columns S, I, Q
    clamp_count: int

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
    def final(self) -> State:
        return State.from_array(self.y[-1])


def _rhs(p: ModelParams, S, I, Q):
    dS = p.A - p.mu1 * S - p.beta * S * I + p.gamma * I + p.k * Q
    dI = p.beta * S * I - (p.mu2 + p.delta + p.gamma) * I
    dQ = p.delta * I - (p.mu3 + p.k) * Q
    return dS, dI, dQ


def ode_rhs(params: ModelParams, s: State) -> Tuple[float, float, float]:
    """Drift ``(dS/dt, dI/dt, dQ/dt)`` of the deterministic system at ``s``."""
    return _rhs(params, s.S, s.I, s.Q)


def compute_R0(params: ModelParams) -> float:
    p = params
    return p.beta * p.A / (p.mu1 * (p.mu2 + p.delta + p.gamma))


def compute_equilibria(params: ModelParams) -> Equilibria:
    """Disease-free equilibrium always; the endemic one only when R0 > 1."""
    p = params
    r0 = compute_R0(p)
    dfe = State(p.A / p.mu1, 0.0, 0.0)
    if r0 <= 1.0:
        return Equilibria(dfe, None, r0)
    # From dI = 0: S* = (mu2 + delta + gamma)/beta.  Substituting S* and
    # Q* = delta I*/(mu3 + k) into dS = 0 leaves a linear equation in I*.
    s_star = p.A / (p.mu1 * r0)
    i_star = p.A * (1.0 - 1.0 / r0) / (p.mu2 + p.delta * p.mu3 / (p.mu3 + p.k))
    q_star = p.delta * i_star / (p.mu3 + p.k)
    return Equilibria(dfe, State(s_star, i_star, q_star), r0)


def integrate_ode(
    params: ModelParams,
    s0: State,
    t_end: float,
    dt: float,
) -> ODETrajectory:
    """Classical fixed-step RK4 on a uniform grid ``0, dt, ..., t_end``.

    Negative components after a step are set to zero and counted in
    ``clamp_count``; a non-zero count means ``dt`` is too coarse.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not t_end >= dt:
        raise ValueError(f"t_end must be >= dt, got t_end={t_end}, dt={dt}")
    n_steps = int(round(t_end / dt))
    t = np.arange(n_steps + 1) * dt
    y = np.empty((n_steps + 1, 3))
    clamps, failed = _kernels.rk4(rate_vector(params), s0.as_array(), n_steps, float(dt), y)
    if failed >= 0:
        raise NonFiniteStateError(failed)
    return ODETrajectory(t, y, int(clamps))


def rate_vector(params: ModelParams) -> np.ndarray:
    p = params
    return np.array([p.A, p.mu1, p.mu2, p.mu3, p.beta, p.delta, p.gamma, p.k], dtype=float)
