"""Parameter containers for the SIQS model and its finite Lévy jump measure.

Everything here is an immutable value object.  The jump measure is a finite
sum of weighted point masses; every integral against it is a weighted sum
over atoms (see :func:`levy_integral`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

__all__ = [
    "ModelParams",
    "NoiseParams",
    "JumpAtom",
    "LevyMeasure",
    "State",
    "Violation",
    "ValidationReport",
    "validate",
    "levy_integral",
    "eta_extrema",
]


@dataclass(frozen=True)
class ModelParams:
    """Deterministic SIQS rates, all per day.

    ``mu2`` and ``mu3`` are the total death rates of the infected and
    isolated classes, so both must be at least the natural rate ``mu1``.
    """

    A: float
    mu1: float
    mu2: float
    mu3: float
    beta: float
    delta: float
    gamma: float
    k: float

    def replace(self, **changes) -> "ModelParams":
        return _replace(self, changes)


@dataclass(frozen=True)
class NoiseParams:
    """Brownian intensities (1/sqrt(day)) on S, I, Q and on the transmission rate."""

    sigma1: float = 0.0
    sigma2: float = 0.0
    sigma3: float = 0.0
    sigma_beta: float = 0.0

    def sigma_bar(self) -> float:
        return max(self.sigma1**2, self.sigma2**2, self.sigma3**2)

    def is_zero(self) -> bool:
        return self.sigma1 == self.sigma2 == self.sigma3 == self.sigma_beta == 0.0

    def replace(self, **changes) -> "NoiseParams":
        return _replace(self, changes)


@dataclass(frozen=True)
class JumpAtom:
    """A point mass of the jump measure.

    ``w`` is the rate (1/day) at which jumps of this type arrive; at a jump the
    compartments are multiplied by ``1 + eta1``, ``1 + eta2``, ``1 + eta3``.
    """

    w: float
    eta1: float
    eta2: float
    eta3: float

    @property
    def etas(self) -> Tuple[float, float, float]:
        return (self.eta1, self.eta2, self.eta3)


@dataclass(frozen=True)
class LevyMeasure:
    """Finite-activity jump measure given as a tuple of :class:`JumpAtom`."""

    atoms: Tuple[JumpAtom, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @classmethod
    def single(cls, w: float, eta1: float, eta2: float, eta3: float) -> "LevyMeasure":
        return cls((JumpAtom(w, eta1, eta2, eta3),))

    @property
    def total_mass(self) -> float:
        """Total jump rate ``nu(Z)``."""
        return math.fsum(a.w for a in self.atoms)

    @property
    def is_empty(self) -> bool:
        return len(self.atoms) == 0

    def weights(self) -> np.ndarray:
        return np.array([a.w for a in self.atoms], dtype=float)

    def eta_matrix(self) -> np.ndarray:
        """``(n_atoms, 3)`` array of jump multipliers."""
        return np.array([a.etas for a in self.atoms], dtype=float).reshape(-1, 3)

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class State:
    """Population densities of the susceptible, infected and isolated classes."""

    S: float
    I: float
    Q: float

    @property
    def N(self) -> float:
        return self.S + self.I + self.Q

    def as_array(self) -> np.ndarray:
        return np.array([self.S, self.I, self.Q], dtype=float)

    @classmethod
    def from_array(cls, arr: Sequence[float]) -> "State":
        s, i, q = (float(v) for v in arr)
        return cls(s, i, q)


def _replace(obj, changes):
    values = {f.name: getattr(obj, f.name) for f in fields(obj)}
    unknown = set(changes) - set(values)
    if unknown:
        raise TypeError(f"unknown field(s): {sorted(unknown)}")
    values.update(changes)
    return type(obj)(**values)


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def fields(self) -> List[str]:
        return [v.field for v in self.violations]

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def validate(params: ModelParams, noise: NoiseParams, levy: LevyMeasure) -> ValidationReport:
    """Check positivity conventions on every input; collect all failures."""
    out: List[Violation] = []
    for f in fields(params):
        v = getattr(params, f.name)
        if not math.isfinite(v) or v <= 0:
            out.append(Violation(f.name, f"must be finite and > 0, got {v!r}"))
    if params.mu2 < params.mu1:
        out.append(Violation("mu2", f"must be >= mu1 ({params.mu1}), got {params.mu2}"))
    if params.mu3 < params.mu1:
        out.append(Violation("mu3", f"must be >= mu1 ({params.mu1}), got {params.mu3}"))
    for f in fields(noise):
        v = getattr(noise, f.name)
        if not math.isfinite(v) or v < 0:
            out.append(Violation(f.name, f"must be finite and >= 0, got {v!r}"))
    for idx, atom in enumerate(levy.atoms):
        if not math.isfinite(atom.w) or atom.w <= 0:
            out.append(Violation(f"atoms[{idx}].w", f"mass must be finite and > 0, got {atom.w!r}"))
        for name, eta in zip(("eta1", "eta2", "eta3"), atom.etas):
            if not math.isfinite(eta):
                out.append(Violation(f"atoms[{idx}].{name}", f"must be finite, got {eta!r}"))
            elif 1.0 + eta <= 0:
                out.append(Violation(
                    f"atoms[{idx}].{name}",
                    f"A2 violated: 1 + {name} must be > 0, got {name}={eta}",
                ))
    return ValidationReport(tuple(out))


def levy_integral(levy: LevyMeasure, f: Callable[[float, float, float], float]) -> float:
    """Integrate ``f(eta1, eta2, eta3)`` against the jump measure."""
    return math.fsum(a.w * f(a.eta1, a.eta2, a.eta3) for a in levy.atoms)


def eta_extrema(levy: LevyMeasure) -> List[Tuple[float, float]]:
    """Per atom, the largest and smallest of the three jump multipliers."""
    return [(max(a.etas), min(a.etas)) for a in levy.atoms]


def atoms_from_rows(rows: Iterable[Sequence[float]]) -> LevyMeasure:
    return LevyMeasure(tuple(JumpAtom(*map(float, r)) for r in rows))
