import numpy as np
import pytest

from siqsjump.mc import EnsembleConfig, EnsembleError, path_seed, run_ensemble, simulate_one
from siqsjump.model import NoiseParams
from siqsjump.presets import PRESETS
from siqsjump.sde import Grid, generate_noise, simulate_path
from siqsjump.stats import extinction_exponent, time_average

EX1 = PRESETS["example1"]
CFG = EnsembleConfig(path_count=6, base_seed=2024, dt=0.01, t_end=40.0,
                     sample_times=(10.0, 40.0), auxiliary=True, bins=5)


def _run(cfg=CFG, workers=1, **kw):
    return run_ensemble(EX1.params, EX1.noise, EX1.levy, cfg, workers=workers, **kw)


def test_path_seed_is_hash_of_base_and_index():
    a = np.random.default_rng(path_seed(5, 3)).random()
    assert a == np.random.default_rng(path_seed(5, 3)).random()
    assert a != np.random.default_rng(path_seed(5, 4)).random()
    assert a != np.random.default_rng(path_seed(6, 3)).random()


def test_single_path_composition():
    cfg = EnsembleConfig(path_count=1, base_seed=99, dt=0.01, t_end=40.0, first_path=7)
    summ = _run(cfg)
    rec = generate_noise(EX1.levy, Grid(0.01, 40.0), path_seed(99, 7))
    path = simulate_path(EX1.params, EX1.noise, EX1.levy, cfg.s0, rec)
    assert np.array_equal(summ.terminal[0], path.y[-1])
    assert summ.time_avg[0, 1] == time_average(path.I, 20.0, 40.0, 0.01)
    assert summ.ext_slope[0] == extinction_exponent(path.I, 0.01)["slope"]
    assert summ.indices.tolist() == [7]


def test_workers_bit_identical():
    a, b = _run(workers=1), _run(workers=4)
    assert a.to_json() == b.to_json()


def test_reproducible_runs():
    assert _run().to_json() == _run().to_json()


def test_merge_equals_union():
    lo = EnsembleConfig(**{**CFG.__dict__, "path_count": 3})
    hi = EnsembleConfig(**{**CFG.__dict__, "path_count": 3, "first_path": 3})
    merged = _run(hi).merge(_run(lo))
    assert merged.to_json() == _run().to_json()
    with pytest.raises(ValueError):
        _run(lo).merge(_run(lo))


def test_summary_contents():
    s = _run()
    assert s.path_count == 6
    for arr in (s.terminal, s.time_avg, s.ext_slope, s.aux_mean, s.domination_fraction):
        assert arr.shape[0] == 6
    assert s.samples.shape == (6, 2, 3)
    assert set(s.histograms) == {"S", "I", "Q"}
    for h in s.histograms.values():
        assert h.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(s.domination_fraction == 1.0)
    assert "aux_mean" in s.moments
    d = s.to_dict()
    assert d["paths"]["seed"][0] == [2024, 0]


def test_simulate_one_matches_ensemble_row():
    s = _run()
    one = simulate_one(EX1.params, EX1.noise, EX1.levy, CFG, 4)
    assert np.array_equal(one.terminal, s.terminal[4])


def test_failing_paths_are_listed():
    wild = NoiseParams(0.0, 0.0, 0.0, 1e200)
    cfg = EnsembleConfig(path_count=3, base_seed=1, dt=0.5, t_end=20.0)
    with pytest.raises(EnsembleError) as exc:
        run_ensemble(EX1.params, wild, EX1.levy, cfg)
    assert [f[0] for f in exc.value.failures] == [0, 1, 2]
    assert "base_seed=1" in str(exc.value)


def test_progress_goes_to_stderr(capsys):
    _run(progress=True)
    out, err = capsys.readouterr()
    assert out == "" and "paths 6/6" in err


@pytest.mark.parametrize("kw", [{"path_count": 0}, {"dt": 0.0}, {"sample_times": (50.0,)}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        EnsembleConfig(**{**CFG.__dict__, **kw})
