"""Closed-form stochastic thresholds, margins and bounds for the SIQS jump model.

All quantities are plain double-precision formulas.  Two helper functions,
:func:`jump_excess` and :func:`log_excess`, evaluate the small-argument
expressions ``(1+x)^q - 1 - q x`` and ``x - ln(1+x)`` without cancellation.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from .deterministic import compute_R0
from .model import JumpAtom, LevyMeasure, ModelParams, NoiseParams, levy_integral

__all__ = [
    "ThresholdUndefinedError",
    "BoundNotApplicableError",
    "ThresholdReport",
    "AssumptionResult",
    "A5_P_GRID",
    "jump_excess",
    "log_excess",
    "compute_chi",
    "compute_rho_pair",
    "compute_ell_np",
    "compute_gamma_np",
    "compute_delta_sup",
    "check_assumptions",
    "compute_r0s",
    "compute_r0hat",
    "extinction_margins",
    "persistence_lower_bound",
    "threshold_report",
]

# Candidate exponents for the existence-of-p check: 1 + 63 * 2**-j, j = 0..20.
A5_P_GRID: Tuple[float, ...] = tuple(1.0 + 63.0 * 2.0**-j for j in range(21))


class ThresholdUndefinedError(ValueError):
    """A threshold whose defining formula requires a positive quantity that is not."""

    def __init__(self, quantity: str, value: float, message: str):
        self.quantity = quantity
        self.value = value
        super().__init__(message)


class BoundNotApplicableError(ValueError):
    pass


def jump_excess(x: float, q: float) -> float:
    """``(1 + x)**q - 1 - q*x`` for ``x > -1``, accurate near ``x = 0`` and ``q = 1``."""
    if x == 0.0:
        return 0.0
    if x < 0.0 and q * -x > 1.0:
        return (1.0 + x) ** q - 1.0 - q * x
    if abs(x) <= 0.5:
        # Binomial series from the quadratic term on.
        coef = q * (q - 1.0) / 2.0
        xp = x * x
        total = coef * xp
        j = 2
        while j < 4000:
            coef *= (q - j) / (j + 1.0)
            xp *= x
            term = coef * xp
            total += term
            j += 1
            if j > q + 1 and abs(term) <= 1e-17 * abs(total):
                break
        return total
    # x > 0.5: factor out the q = 1 part so q close to 1 keeps its precision.
    return (1.0 + x) * math.expm1((q - 1.0) * math.log1p(x)) - (q - 1.0) * x


def log_excess(x: float) -> float:
    """``x - ln(1 + x)`` for ``x > -1``."""
    if abs(x) < 0.1:
        total = 0.0
        xp = x
        for j in range(2, 40):
            xp *= -x
            term = -xp / j  # (-1)**j * x**j / j
            total += term
            if abs(term) <= 1e-18 * abs(total):
                break
        return total
    return x - math.log1p(x)


def compute_chi(params: ModelParams, noise: NoiseParams, levy: LevyMeasure) -> float:
    """``2 mu1 - sigma_bar - sum_k w_k max(eta_bar_k**2, eta_under_k**2)``."""
    jumps = levy_integral(levy, lambda e1, e2, e3: max(max(e1, e2, e3) ** 2, min(e1, e2, e3) ** 2))
    return 2.0 * params.mu1 - noise.sigma_bar() - jumps


def compute_rho_pair(atom: JumpAtom, n: int, p: float) -> Tuple[float, float]:
    """``(g(eta_bar), g(eta_under))`` with ``g(x) = (1+x)^(np) - 1 - np x``."""
    q = n * p
    return jump_excess(max(atom.etas), q), jump_excess(min(atom.etas), q)


def compute_ell_np(levy: LevyMeasure, n: int, p: float) -> float:
    return math.fsum(a.w * max(compute_rho_pair(a, n, p)) for a in levy.atoms)


def compute_gamma_np(params: ModelParams, noise: NoiseParams, levy: LevyMeasure,
                     n: int, p: float) -> float:
    q = n * p
    return params.mu1 - (q - 1.0) / 2.0 * noise.sigma_bar() - compute_ell_np(levy, n, p) / q


def compute_delta_sup(params: ModelParams, gamma_np: float, n: int, p: float) -> float:
    """Supremum over ``N > 0`` of ``A N^(q-1) - (gamma/2) N^q`` with ``q = n p``.

    The maximiser is ``N* = 2A(q-1)/(gamma q)`` and the supremum simplifies to
    ``(A/q) N*^(q-1)``; at ``q = 1`` it is ``A``.
    """
    if not gamma_np > 0:
        raise ThresholdUndefinedError(
            "gamma_np", gamma_np, f"supremum is infinite unless Gamma_(n,p) > 0 (got {gamma_np})")
    q = n * p
    if q < 1.0:
        raise ValueError(f"n*p must be >= 1, got {q}")
    if q == 1.0:
        return params.A
    n_star = 2.0 * params.A * (q - 1.0) / (gamma_np * q)
    return params.A / q * n_star ** (q - 1.0)


def _j2(levy: LevyMeasure) -> float:
    return levy_integral(levy, lambda e1, e2, e3: log_excess(e2))


def _infected_exit(params: ModelParams, noise: NoiseParams) -> float:
    return params.mu2 + params.delta + params.gamma + noise.sigma2**2 / 2.0


def compute_r0s(params: ModelParams, noise: NoiseParams, levy: LevyMeasure) -> float:
    """Noise-corrected threshold for ergodicity and persistence in the mean."""
    chi = compute_chi(params, noise, levy)
    if not chi > 0:
        raise ThresholdUndefinedError(
            "chi", chi, f"R0^s is undefined: chi = {chi:.6g} must be > 0")
    p = params
    num = (p.beta * p.A / p.mu1
           - p.A**2 * noise.sigma_beta**2 / (p.mu1 * chi)
           - _j2(levy))
    return num / _infected_exit(p, noise)


def compute_r0hat(params: ModelParams, noise: NoiseParams, levy: LevyMeasure) -> float:
    """Threshold below which (with the sigma_beta margin) the infection dies out."""
    p = params
    num = (p.beta * p.A / p.mu1
           - noise.sigma_beta**2 * p.A**2 / (2.0 * p.mu1**2)
           - _j2(levy))
    return num / _infected_exit(p, noise)


@dataclass(frozen=True)
class ExtinctionMargins:
    r0hat: float
    sigma_margin: float
    cond2_margin: float

    @property
    def cond1(self) -> bool:
        return self.r0hat < 1.0 and self.sigma_margin <= 0.0

    @property
    def cond2(self) -> bool:
        return self.cond2_margin < 0.0

    @property
    def cond2_applicable(self) -> bool:
        return math.isfinite(self.cond2_margin)


def extinction_margins(params: ModelParams, noise: NoiseParams,
                       levy: LevyMeasure) -> ExtinctionMargins:
    """Both sufficient extinction conditions.

    ``cond2_margin`` is ``+inf`` when ``sigma_beta = 0``; the second condition
    cannot hold then.
    """
    p = params
    sb2 = noise.sigma_beta**2
    sigma_margin = sb2 - p.mu1 * p.beta / p.A
    if sb2 == 0.0:
        cond2 = math.inf
    else:
        cond2 = p.beta**2 / (2.0 * sb2) - _infected_exit(p, noise) - _j2(levy)
    return ExtinctionMargins(compute_r0hat(p, noise, levy), sigma_margin, cond2)


def extinction_rate_bound(params: ModelParams, noise: NoiseParams, levy: LevyMeasure) -> float:
    """Upper bound on ``limsup ln I(t) / t`` under the first extinction condition."""
    return _infected_exit(params, noise) * (compute_r0hat(params, noise, levy) - 1.0)


def persistence_lower_bound(params: ModelParams, noise: NoiseParams, levy: LevyMeasure) -> float:
    """Lower bound on ``liminf (1/t) int_0^t I`` when ``R0^s > 1``."""
    r0s = compute_r0s(params, noise, levy)
    if not r0s > 1.0:
        raise BoundNotApplicableError(f"persistence bound needs R0^s > 1, got {r0s:.6g}")
    return _persistence_bound_from_r0s(params, noise, r0s)


def _persistence_bound_from_r0s(params: ModelParams, noise: NoiseParams, r0s: float) -> float:
    p = params
    weight = p.mu2 / p.mu1 + p.delta * p.mu3 / (p.mu1 * (p.mu3 + p.k))
    return _infected_exit(p, noise) * (r0s - 1.0) / (p.beta * weight)


@dataclass
class AssumptionResult:
    name: str
    passed: bool
    detail: str
    values: Dict[str, object] = field(default_factory=dict)


def _a5_search(params, noise, levy, n) -> AssumptionResult:
    gammas = [compute_gamma_np(params, noise, levy, n, p) for p in A5_P_GRID]
    passing = [p for p, g in zip(A5_P_GRID, gammas) if g > 0]
    values: Dict[str, object] = {"n": n}
    if passing:
        witness = max(passing)
        values["p_witness"] = witness
        values["gamma_np"] = compute_gamma_np(params, noise, levy, n, witness)
        return AssumptionResult(f"A5[n={n}]", True, f"Gamma_({n},p) > 0 at p = {witness:.6g}", values)
    # Endpoint refinement: Gamma is continuous in p, so a positive limit at p -> 1+
    # guarantees a witness between 1 and the smallest grid point.
    lo, hi = 1.0, A5_P_GRID[-1]
    if compute_gamma_np(params, noise, levy, n, lo) > 0:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if compute_gamma_np(params, noise, levy, n, mid) > 0:
                lo = mid
            else:
                hi = mid
        if lo > 1.0:
            values["p_witness"] = lo
            values["gamma_np"] = compute_gamma_np(params, noise, levy, n, lo)
            return AssumptionResult(f"A5[n={n}]", True,
                                    f"Gamma_({n},p) > 0 at refined p = {lo!r}", values)
    values["p_witness"] = None
    values["max_gamma_on_grid"] = max(gammas)
    return AssumptionResult(f"A5[n={n}]", False,
                            f"Gamma_({n},p) <= 0 at every grid p in (1, 64]", values)


def check_assumptions(params: ModelParams, noise: NoiseParams, levy: LevyMeasure,
                      n_max: int = 2) -> List[AssumptionResult]:
    """Report the jump integrals behind A1-A4 and search for A5 witnesses."""
    names = ("eta1", "eta2", "eta3")
    results: List[AssumptionResult] = []
    a1 = {f"int_{nm}^2": levy_integral(levy, lambda *e, i=i: e[i] ** 2) for i, nm in enumerate(names)}
    results.append(AssumptionResult("A1", all(math.isfinite(v) for v in a1.values()),
                                    "second moments of the jump sizes", a1))

    bad = [f"atoms[{k}].{nm}" for k, a in enumerate(levy.atoms)
           for nm, e in zip(names, a.etas) if not 1.0 + e > 0]
    if bad:
        results.append(AssumptionResult("A2", False, "1 + eta must be > 0 for " + ", ".join(bad),
                                        {"offending": bad}))
        for label in ("A3", "A4"):
            results.append(AssumptionResult(label, False, "undefined: A2 fails", {}))
    else:
        a2 = {f"int_{nm}-ln(1+{nm})": levy_integral(levy, lambda *e, i=i: log_excess(e[i]))
              for i, nm in enumerate(names)}
        results.append(AssumptionResult("A2", True, "all 1 + eta > 0", a2))
        a3 = {f"int_ln(1+{nm})^2": levy_integral(levy, lambda *e, i=i: math.log1p(e[i]) ** 2)
              for i, nm in enumerate(names)}
        results.append(AssumptionResult("A3", True, "finite for atomic measures", a3))
        a4 = {"int_((1+eta_bar)^2-1)^2":
              levy_integral(levy, lambda *e: ((1.0 + max(e)) ** 2 - 1.0) ** 2)}
        results.append(AssumptionResult("A4", True, "finite for atomic measures", a4))
    if bad:
        results.extend(AssumptionResult(f"A5[n={n}]", False, "undefined: A2 fails", {"n": n})
                       for n in range(1, n_max + 1))
    else:
        results.extend(_a5_search(params, noise, levy, n) for n in range(1, n_max + 1))
    return results


@dataclass
class ThresholdReport:
    """Every computed threshold for one parameter set.

    Quantities whose formula is undefined for the inputs are ``None`` and the
    reason is stored under ``notes``.
    """

    r0: float
    chi: float
    r0s: Optional[float]
    r0hat: float
    cond1_sigma_margin: float
    cond1_holds: bool
    cond2_margin: float
    cond2_holds: bool
    extinction_rate_bound: float
    persistence_lower_bound: Optional[float]
    assumption_results: List[AssumptionResult]
    gamma_np_table: List[Tuple[int, float, float]]
    delta_table: List[Tuple[int, float, Optional[float]]] = field(default_factory=list)
    paper_reported: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def persistent(self) -> bool:
        return self.r0s is not None and self.r0s > 1.0

    def to_dict(self) -> Dict[str, object]:
        d = asdict(self)
        d["cond2_margin"] = self.cond2_margin if math.isfinite(self.cond2_margin) else None
        d["cond2_applicable"] = math.isfinite(self.cond2_margin)
        d["gamma_np_table"] = [{"n": n, "p": p, "gamma_np": g} for n, p, g in self.gamma_np_table]
        d["delta_table"] = [{"n": n, "p": p, "delta": dl} for n, p, dl in self.delta_table]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=2, **kw)

    def to_text(self) -> str:
        def fmt(v):
            if v is None:
                return "undefined"
            if isinstance(v, bool):
                return "yes" if v else "no"
            if isinstance(v, float):
                return f"{v:.10g}"
            return str(v)

        rows = [
            ("R0", self.r0),
            ("chi", self.chi),
            ("R0^s", self.r0s),
            ("R0hat^s", self.r0hat),
            ("sigma_beta^2 - mu1*beta/A", self.cond1_sigma_margin),
            ("extinction cond1 holds", self.cond1_holds),
            ("cond1 extinction rate bound", self.extinction_rate_bound),
            ("cond2 margin", self.cond2_margin if math.isfinite(self.cond2_margin) else None),
            ("extinction cond2 holds", self.cond2_holds),
            ("persistence lower bound", self.persistence_lower_bound),
        ]
        rows += [(f"Gamma_({n},{p:g})", g) for n, p, g in self.gamma_np_table]
        rows += [(f"Delta_({n},{p:g})", d) for n, p, d in self.delta_table]
        rows += [(f"paper_reported {k}", v) for k, v in self.paper_reported.items()]
        width = max(len(r[0]) for r in rows)
        lines = [f"{name.ljust(width)}  {fmt(val)}" for name, val in rows]
        lines.append("")
        for a in self.assumption_results:
            lines.append(f"{a.name.ljust(8)} {'pass' if a.passed else 'FAIL'}  {a.detail}")
        lines.extend(f"note: {n}" for n in self.notes)
        return "\n".join(lines)


def threshold_report(params: ModelParams, noise: NoiseParams, levy: LevyMeasure,
                     n_max: int = 2, p_values: Tuple[float, ...] = (2.0,),
                     paper_reported: Optional[Dict[str, float]] = None) -> ThresholdReport:
    notes: List[str] = []
    chi = compute_chi(params, noise, levy)
    r0s: Optional[float]
    bound: Optional[float] = None
    try:
        r0s = compute_r0s(params, noise, levy)
    except ThresholdUndefinedError as exc:
        r0s = None
        notes.append(str(exc))
    if r0s is not None:
        if r0s > 1.0:
            bound = _persistence_bound_from_r0s(params, noise, r0s)
        else:
            notes.append(f"persistence bound not applicable: R0^s = {r0s:.6g} <= 1")
    margins = extinction_margins(params, noise, levy)
    if not margins.cond2_applicable:
        notes.append("cond2 unusable: sigma_beta = 0")
    gamma_table = []
    delta_table = []
    for n in range(1, n_max + 1):
        for p in p_values:
            g = compute_gamma_np(params, noise, levy, n, p)
            gamma_table.append((n, p, g))
            delta_table.append((n, p, compute_delta_sup(params, g, n, p) if g > 0 else None))
    return ThresholdReport(
        r0=compute_R0(params),
        chi=chi,
        r0s=r0s,
        r0hat=margins.r0hat,
        cond1_sigma_margin=margins.sigma_margin,
        cond1_holds=margins.cond1,
        cond2_margin=margins.cond2_margin,
        cond2_holds=margins.cond2,
        extinction_rate_bound=extinction_rate_bound(params, noise, levy),
        persistence_lower_bound=bound,
        assumption_results=check_assumptions(params, noise, levy, n_max),
        gamma_np_table=gamma_table,
        delta_table=delta_table,
        paper_reported=dict(paper_reported or {}),
        notes=notes,
    )
