import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from siqsjump.model import JumpAtom, LevyMeasure, ModelParams, NoiseParams  # noqa: E402
from siqsjump.presets import PRESETS, TABLE1  # noqa: E402
from siqsjump.thresholds import compute_chi  # noqa: E402


@pytest.fixture
def table1():
    return TABLE1


@pytest.fixture
def example1():
    return PRESETS["example1"]


@pytest.fixture
def example2b():
    return PRESETS["example2b"]


def random_configs(count, seed=20240917):
    """Valid parameter sets with chi > 0, drawn from a fixed stream."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        mu1 = rng.uniform(0.02, 0.1)
        params = ModelParams(
            A=rng.uniform(0.05, 0.5), mu1=mu1, mu2=mu1 + rng.uniform(0, 0.1),
            mu3=mu1 + rng.uniform(0, 0.05), beta=rng.uniform(0.01, 0.2),
            delta=rng.uniform(0.005, 0.1), gamma=rng.uniform(0.005, 0.1),
            k=rng.uniform(0.005, 0.1))
        noise = NoiseParams(*rng.uniform(0.0, 0.12, size=4))
        atoms = tuple(JumpAtom(rng.uniform(0.1, 2.0), *rng.uniform(-0.2, 0.2, size=3))
                      for _ in range(rng.integers(0, 4)))
        levy = LevyMeasure(atoms)
        if compute_chi(params, noise, levy) > 0.005:
            out.append((params, noise, levy))
    return out


# Verdict lines of tests/test_acceptance.py, keyed by criterion number.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
