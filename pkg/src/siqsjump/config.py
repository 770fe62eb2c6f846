"""TOML scenario files.

Layout (units in comments; every section optional when a preset supplies it)::

    [model]            # rates in 1/day; beta in 1/(individual day)
    A = 0.1
    mu1 = 0.05
    mu2 = 0.09
    mu3 = 0.052
    beta = 0.075
    delta = 0.03
    gamma = 0.01
    k = 0.04

    [noise]            # Brownian intensities in 1/sqrt(day); default 0
    sigma1 = 0.01
    sigma2 = 0.03
    sigma3 = 0.07
    sigma_beta = 0.02

    [[levy.atoms]]     # w: jump rate in 1/day; eta*: relative jump sizes
    w = 1.0
    eta1 = 0.01
    eta2 = 0.02
    eta3 = 0.05

    [initial]          # S, I, Q at t = 0
    S = 0.5
    I = 0.3
    Q = 0.1

    [simulation]
    dt = 0.001         # day
    t_end = 300.0      # day
    seed = 0
    paths = 1000

Values in a file override the preset they are loaded on top of.  An empty
``levy`` section (``[levy]`` with ``atoms = []``) removes the jumps.
"""

from __future__ import annotations

import math
import re
from dataclasses import fields
from pathlib import Path
from typing import Dict, Optional, Union

import tomli_w

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .model import JumpAtom, LevyMeasure, ModelParams, NoiseParams, State
from .presets import Scenario, get_preset

__all__ = ["ConfigError", "load_config", "loads_config", "dump_config"]

_HEADER = """\
# SIQS scenario.  Units: rates in 1/day, beta in 1/(individual day),
# sigma in 1/sqrt(day), jump masses w in 1/day, eta dimensionless,
# S/I/Q in individuals, dt and t_end in days.
"""


class ConfigError(ValueError):
    def __init__(self, field: str, line: Optional[int], message: str):
        self.field = field
        self.line = line
        where = f" (line {line})" if line else ""
        super().__init__(f"{field}{where}: {message}")


def _locate(text: str, section: str, key: Optional[str]) -> Optional[int]:
    lines = text.splitlines()
    in_section = section == ""
    head = re.compile(r"^\s*\[\[?\s*" + re.escape(section) + r"(\.[\w.]+)?\s*\]\]?")
    for no, line in enumerate(lines, 1):
        if re.match(r"^\s*\[", line):
            in_section = bool(head.match(line))
            if in_section and key is None:
                return no
            continue
        if in_section and key is not None and re.match(r"^\s*" + re.escape(key) + r"\s*=", line):
            return no
    return None


def _number(text, section, key, value, allow_int=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}", _locate(text, section, key),
                          f"expected a number, got {value!r}")
    if allow_int:
        if not isinstance(value, int):
            raise ConfigError(f"{section}.{key}", _locate(text, section, key),
                              f"expected an integer, got {value!r}")
        return value
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}", _locate(text, section, key), "must be finite")
    return value


def _section(text, doc, name, allowed):
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(name, _locate(text, name, None), "expected a table")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}", _locate(text, name, key), "unknown field")
    return {k: _number(text, name, k, v, allow_int=(k in ("seed", "paths"))) for k, v in sec.items()}


def loads_config(text: str, base: Optional[Union[str, Scenario]] = None) -> Scenario:
    """Parse TOML ``text`` on top of ``base`` (a preset name or scenario)."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError("<syntax>", int(m.group(1)) if m else None, str(exc)) from None
    if isinstance(base, str):
        base = get_preset(base)
    unknown = set(doc) - {"model", "noise", "levy", "initial", "simulation", "name"}
    for name in sorted(unknown):
        raise ConfigError(name, _locate(text, name, None) or _locate(text, "", name),
                          "unknown section")

    model_names = [f.name for f in fields(ModelParams)]
    model = _section(text, doc, "model", model_names)
    if base is None:
        missing = [n for n in model_names if n not in model]
        if missing:
            raise ConfigError(f"model.{missing[0]}", _locate(text, "model", None),
                              "missing required field (no preset to inherit from)")
        params = ModelParams(**model)
    else:
        params = base.params.replace(**model)

    noise_vals = _section(text, doc, "noise", [f.name for f in fields(NoiseParams)])
    noise = (base.noise if base is not None else NoiseParams()).replace(**noise_vals)

    levy = base.levy if base is not None else LevyMeasure()
    if "levy" in doc:
        sec = doc["levy"]
        if not isinstance(sec, dict) or set(sec) - {"atoms"}:
            raise ConfigError("levy", _locate(text, "levy", None), "only 'atoms' is allowed")
        atoms = []
        for idx, raw in enumerate(sec.get("atoms", [])):
            if not isinstance(raw, dict) or set(raw) != {"w", "eta1", "eta2", "eta3"}:
                raise ConfigError(f"levy.atoms[{idx}]", _locate(text, "levy.atoms", None),
                                  "each atom needs exactly w, eta1, eta2, eta3")
            atoms.append(JumpAtom(**{k: _number(text, "levy.atoms", k, v) for k, v in raw.items()}))
        levy = LevyMeasure(tuple(atoms))

    init = _section(text, doc, "initial", ["S", "I", "Q"])
    s0_base = base.s0 if base is not None else State(0.5, 0.3, 0.1)
    s0 = State(init.get("S", s0_base.S), init.get("I", s0_base.I), init.get("Q", s0_base.Q))

    sim = _section(text, doc, "simulation", ["dt", "t_end", "seed", "paths"])
    defaults = base if base is not None else Scenario("custom", params)
    name = doc.get("name", defaults.name if base is not None else "custom")
    return Scenario(
        name=str(name), params=params, noise=noise, levy=levy, s0=s0,
        t_end=sim.get("t_end", defaults.t_end), dt=sim.get("dt", defaults.dt),
        seed=sim.get("seed", defaults.seed), paths=sim.get("paths", defaults.paths),
        description=defaults.description if base is not None else "",
        paper_reported=dict(base.paper_reported) if base is not None and (
            params, noise, levy) == (base.params, base.noise, base.levy) else {},
    )


def load_config(path: Union[str, Path], base: Optional[Union[str, Scenario]] = None) -> Scenario:
    return loads_config(Path(path).read_text(), base)


def dump_config(sc: Scenario) -> str:
    """Effective configuration as TOML; reloading it reproduces ``sc``'s inputs."""
    doc: Dict[str, object] = {
        "name": sc.name,
        "model": {f.name: getattr(sc.params, f.name) for f in fields(ModelParams)},
        "noise": {f.name: getattr(sc.noise, f.name) for f in fields(NoiseParams)},
        "levy": {"atoms": [{"w": a.w, "eta1": a.eta1, "eta2": a.eta2, "eta3": a.eta3}
                           for a in sc.levy.atoms]},
        "initial": {"S": sc.s0.S, "I": sc.s0.I, "Q": sc.s0.Q},
        "simulation": {"dt": sc.dt, "t_end": sc.t_end, "seed": sc.seed, "paths": sc.paths},
    }
    return _HEADER + tomli_w.dumps(doc)
