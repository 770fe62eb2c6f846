"""Command-line front end: ``siqsjump <subcommand> [options]``."""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from . import io
from .config import ConfigError, dump_config, load_config
from .deterministic import compute_equilibria, integrate_ode
from .mc import EnsembleConfig, EnsembleError, run_ensemble
from .model import validate
from .presets import PRESETS, Scenario, get_preset
from .sde import Grid, generate_noise, simulate_path
from .thresholds import check_assumptions, threshold_report


class CLIError(Exception):
    pass


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid {kind.__name__}: {text!r}") from None
        if not (v > 0 and (kind is int or math.isfinite(v))):
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return v
    return conv


def _scenario(args) -> Scenario:
    preset = getattr(args, "preset", None)
    config = getattr(args, "config", None)
    if preset is None and config is None:
        raise CLIError("need --config FILE or --preset NAME")
    try:
        sc = load_config(config, preset) if config else get_preset(preset)
    except ConfigError as exc:
        raise CLIError(f"config error: {exc}") from None
    except OSError as exc:
        raise CLIError(f"cannot read config: {exc}") from None
    except KeyError as exc:
        raise CLIError(str(exc.args[0])) from None
    overrides = {}
    for attr, key in (("dt", "dt"), ("t_end", "t_end"), ("seed", "seed"), ("paths", "paths")):
        v = getattr(args, attr, None)
        if v is not None:
            overrides[key] = v
    if overrides:
        sc = replace(sc, **overrides)
    report = validate(sc.params, sc.noise, sc.levy)
    if not report.ok:
        raise CLIError("invalid parameters:\n" + str(report))
    return sc


def _emit(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CLIError(f"cannot write {out}: {exc}") from None


def _grid(sc: Scenario) -> Grid:
    try:
        return Grid(sc.dt, sc.t_end)
    except ValueError as exc:
        raise CLIError(str(exc)) from None


def cmd_thresholds(args) -> int:
    sc = _scenario(args)
    rep = threshold_report(sc.params, sc.noise, sc.levy, n_max=args.n_max,
                           paper_reported=sc.paper_reported)
    if args.format == "json":
        _emit(io.json_text(rep.to_dict()), args.out)
    else:
        print(f"scenario: {sc.name}")
        print(rep.to_text())
        if args.out:
            _emit(io.json_text(rep.to_dict()), args.out)
    return 0


def cmd_check_assumptions(args) -> int:
    sc = _scenario(args)
    results = check_assumptions(sc.params, sc.noise, sc.levy, n_max=args.n_max)
    if args.format == "json":
        _emit(io.json_text([vars(r) for r in results]), args.out)
    else:
        for r in results:
            print(f"{r.name.ljust(8)} {'pass' if r.passed else 'FAIL'}  {r.detail}")
            for k, v in r.values.items():
                print(f"    {k} = {v}")
    return 0


def cmd_equilibria(args) -> int:
    sc = _scenario(args)
    eq = compute_equilibria(sc.params)
    payload = {
        "R0": eq.R0,
        "disease_free": vars(eq.disease_free),
        "endemic": vars(eq.endemic) if eq.endemic else None,
        "globally_stable": eq.stable,
    }
    if args.format == "json":
        _emit(io.json_text(payload), args.out)
        return 0
    d = eq.disease_free
    print(f"R0 = {eq.R0:.17g}")
    print(f"disease-free: S={d.S:.17g} I={d.I:.17g} Q={d.Q:.17g}"
          + ("  (globally asymptotically stable)" if eq.endemic is None else "  (unstable)"))
    if eq.endemic is not None:
        e = eq.endemic
        print(f"endemic:      S={e.S:.17g} I={e.I:.17g} Q={e.Q:.17g}"
              "  (globally asymptotically stable)")
    return 0


def cmd_ode(args) -> int:
    sc = _scenario(args)
    dt = args.dt if args.dt is not None else 0.01
    grid = _grid(replace(sc, dt=dt))
    traj = integrate_ode(sc.params, sc.s0, grid.t_end, grid.dt)
    if args.format == "json":
        _emit(io.json_text({"t": traj.t.tolist(), "S": traj.S.tolist(), "I": traj.I.tolist(),
                            "Q": traj.Q.tolist(), "clamp_count": traj.clamp_count}), args.out)
    else:
        _emit(io.trajectory_csv(traj.t, traj.y), args.out)
    print(f"steps={grid.n_steps} clamp_count={traj.clamp_count}", file=sys.stderr)
    return 0


def _simulate(sc: Scenario):
    grid = _grid(sc)
    record = generate_noise(sc.levy, grid, sc.seed)
    return simulate_path(sc.params, sc.noise, sc.levy, sc.s0, record)


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    path = _simulate(sc)
    diag = {"scenario": sc.name, "seed": sc.seed, **path.diagnostics()}
    if args.format == "json":
        _emit(io.json_text({"t": path.t.tolist(), "S": path.S.tolist(), "I": path.I.tolist(),
                            "Q": path.Q.tolist(), "diagnostics": diag}), args.out)
    else:
        _emit(io.trajectory_csv(path.t, path.y), args.out)
        if args.out and args.out != "-":
            _emit(io.json_text(diag), str(Path(args.out).with_suffix(".diagnostics.json")))
    print(f"clamp_count={path.clamp_count} jump_count={path.jump_count}"
          + (" FLAGGED: clamp rate above 0.1%" if path.flagged else ""), file=sys.stderr)
    return 0


def _write_ensemble(summary, out: Optional[str]):
    _emit(io.json_text(summary.to_dict()), out)
    if out and out != "-":
        base = Path(out)
        for name, h in summary.histograms.items():
            _emit(io.histogram_csv(h), str(base.with_name(f"{base.stem}_hist_{name}.csv")))


def cmd_ensemble(args) -> int:
    sc = _scenario(args)
    _grid(sc)
    cfg = EnsembleConfig(path_count=sc.paths, base_seed=sc.seed, dt=sc.dt, t_end=sc.t_end,
                         s0=sc.s0, bins=args.bins)
    try:
        summary = run_ensemble(sc.params, sc.noise, sc.levy, cfg, workers=args.workers,
                               progress=not args.quiet)
    except EnsembleError as exc:
        raise CLIError(str(exc)) from None
    _write_ensemble(summary, args.out)
    m = summary.moments
    neg = float((summary.ext_slope < 0).mean())
    print(f"paths={summary.path_count} mean time-avg I={m['time_avg_I']['mean']:.6g} "
          f"mean ln-slope={m['ext_slope']['mean']:.6g} negative slopes={neg:.3f}",
          file=sys.stderr)
    return 0


def cmd_reproduce(args) -> int:
    sc = get_preset(args.name)
    if args.paths is not None:
        sc = replace(sc, paths=args.paths)
    if args.seed is not None:
        sc = replace(sc, seed=args.seed)
    outdir = Path(args.out or f"reproduce-{sc.name}")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CLIError(f"cannot create {outdir}: {exc}") from None
    _emit(dump_config(sc), str(outdir / "config.toml"))
    rep = threshold_report(sc.params, sc.noise, sc.levy, paper_reported=sc.paper_reported)
    _emit(rep.to_text() + "\n", str(outdir / "thresholds.txt"))
    _emit(io.json_text(rep.to_dict()), str(outdir / "thresholds.json"))
    ode_t_end = sc.t_end if sc.noise.is_zero() and sc.levy.is_empty else max(sc.t_end, 2000.0)
    traj = integrate_ode(sc.params, sc.s0, ode_t_end, 0.01)
    _emit(io.trajectory_csv(traj.t, traj.y), str(outdir / "ode.csv"))
    if not (sc.noise.is_zero() and sc.levy.is_empty):
        path = _simulate(sc)
        _emit(io.trajectory_csv(path.t, path.y), str(outdir / "path.csv"))
        _emit(io.json_text(path.diagnostics()), str(outdir / "path.diagnostics.json"))
        cfg = EnsembleConfig(path_count=sc.paths, base_seed=sc.seed, dt=sc.dt, t_end=sc.t_end,
                             s0=sc.s0)
        try:
            summary = run_ensemble(sc.params, sc.noise, sc.levy, cfg, workers=args.workers,
                                   progress=not args.quiet)
        except EnsembleError as exc:
            raise CLIError(str(exc)) from None
        _write_ensemble(summary, str(outdir / "ensemble.json"))
    print(rep.to_text())
    print(f"outputs written to {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siqsjump",
        description="Stochastic SIQS model with white noise and Lévy jumps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sim=False, seed=False, paths=False):
        src = p.add_argument_group("inputs")
        src.add_argument("--config", help="TOML scenario file (overrides --preset values)")
        src.add_argument("--preset", choices=sorted(PRESETS), help="bundled scenario")
        p.add_argument("--out", help="output file ('-' or omitted: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if sim:
            p.add_argument("--dt", type=_positive(float), help="time step (day)")
            p.add_argument("--t-end", dest="t_end", type=_positive(float), help="horizon (day)")
        if seed:
            p.add_argument("--seed", type=int)
        if paths:
            p.add_argument("--paths", type=_positive(int))

    p = sub.add_parser("thresholds", help="all closed-form thresholds and bounds")
    common(p)
    p.add_argument("--n-max", type=_positive(int), default=2)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("check-assumptions", help="jump-coefficient assumptions A1-A5")
    common(p)
    p.add_argument("--n-max", type=_positive(int), default=2)
    p.set_defaults(func=cmd_check_assumptions)

    p = sub.add_parser("equilibria", help="R0 and equilibria of the noise-free system")
    common(p)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("ode", help="RK4 trajectory of the noise-free system")
    common(p, sim=True)
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("simulate", help="one Euler-Maruyama path")
    common(p, sim=True, seed=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ensemble", help="Monte Carlo ensemble summary and histograms")
    common(p, sim=True, seed=True, paths=True)
    p.add_argument("--workers", type=_positive(int), default=1)
    p.add_argument("--bins", type=_positive(int), default=30)
    p.add_argument("--quiet", action="store_true", help="no progress on stderr")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("reproduce", help="run every output for a bundled scenario")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--paths", type=_positive(int))
    p.add_argument("--workers", type=_positive(int), default=1)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("dump-config", help="print the effective scenario as TOML")
    common(p, sim=True, seed=True, paths=True)
    p.set_defaults(func=lambda a: (_emit(dump_config(_scenario(a)), a.out), 0)[1])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"siqsjump: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
