"""Stochastic SIQS epidemic model with white-noise transmission and Lévy jumps."""

from .deterministic import (Equilibria, compute_equilibria, compute_R0, integrate_ode,
                            ode_rhs)
from .mc import EnsembleConfig, EnsembleSummary, run_ensemble
from .model import (JumpAtom, LevyMeasure, ModelParams, NoiseParams, State, eta_extrema,
                    levy_integral, validate)
from .presets import PRESETS, TABLE1, Scenario, get_preset
from .sde import Grid, NoiseRecord, PathOutput, generate_noise, simulate_auxiliary_path, simulate_path
from .thresholds import (ThresholdReport, check_assumptions, compute_chi, compute_delta_sup,
                         compute_ell_np, compute_gamma_np, compute_r0hat, compute_r0s,
                         compute_rho_pair, extinction_margins, persistence_lower_bound,
                         threshold_report)

__version__ = "0.1.0"
