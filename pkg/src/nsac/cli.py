"""Command-line entry point ``nsac``.

Each subcommand reads optional TOML settings (top-level keys, overridden by a
table named after the subcommand), applies ``--eps/--grid/--order`` on top and
writes CSV/JSON/snapshot artifacts into ``--out``.
Exit status: 0 on success, 2 for invalid input, 3 when a computation fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import NumericalError, ValidationError

log = logging.getLogger("nsac")

COMMANDS = ("profiles", "simulate", "sharp", "spectral", "asymptotics", "converge")

# keys read directly by the non-experiment handlers; experiment fields are added lazily
_HANDLER_KEYS = {"L", "drho", "lambda0", "delta", "shape", "n", "center", "dt", "every", "eps"}


def _eps_values(text):
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad eps value {text!r}") from exc
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("eps must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsac", description="Phase-field / sharp-interface experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path, help="TOML settings file")
        s.add_argument("--out", type=Path, default=None, help="output directory")
        s.add_argument("--eps", type=_eps_values, default=None, help="eps or comma-separated list")
        s.add_argument("--grid", type=int, default=None, help="cells along x")
        s.add_argument("--order", type=int, default=None, choices=(0, 1))
    return p


def _settings(args) -> dict:
    from .io import load_config

    cfg = {}
    args.shared = set()
    if args.config is not None:
        raw = load_config(args.config)
        cfg = {k: v for k, v in raw.items() if not isinstance(v, dict)}
        stray = set(cfg) - _known_keys()
        if stray:
            raise ValidationError(f"unknown settings: {sorted(stray)}")
        section = raw.get(args.command, {})
        if not isinstance(section, dict):
            raise ValidationError(f"[{args.command}] must be a table")
        # top-level keys are shared by all subcommands, so each one may ignore
        # those it has no use for; keys in its own table must all be understood
        args.shared = set(cfg) - set(section)
        cfg.update(section)
    if args.grid is not None:
        if args.grid < 8:
            raise ValidationError("--grid must be at least 8")
        cfg["grid"] = args.grid
    if args.order is not None:
        cfg["order"] = args.order
    if args.eps is not None:
        cfg["eps_list"] = args.eps
    return cfg


def _known_keys() -> set:
    from dataclasses import fields

    from .harness import ExperimentConfig

    return _HANDLER_KEYS | {f.name for f in fields(ExperimentConfig)}


def _pop(cfg, key, default):
    return cfg.pop(key) if key in cfg else default


def _outdir(args, cfg) -> Path:
    out = Path(args.out) if args.out is not None else Path(_pop(cfg, "out", f"nsac_{args.command}"))
    cfg.pop("out", None)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _reject_unknown(cfg, args):
    bad = sorted(k for k in cfg if k not in getattr(args, "shared", ()))
    if bad:
        raise ValidationError(f"unknown settings: {bad}")


# ---------------------------------------------------------------------------


def cmd_profiles(args, cfg):
    from .io import write_csv
    from .potential import Potential
    from .profiles import build_profiles

    out = _outdir(args, cfg)
    pot = Potential.from_config(_pop(cfg, "potential", "standard"))
    L = float(_pop(cfg, "L", 20.0))
    drho = float(_pop(cfg, "drho", 0.01))
    lam0 = float(_pop(cfg, "lambda0", 1.0 / 3.0))
    for key in ("eps_list", "grid", "order"):
        cfg.pop(key, None)
    _reject_unknown(cfg, args)
    tab = build_profiles(pot, L=L, drho=drho, lambda0=lam0)
    write_csv(out / "profiles.csv", ["rho", "theta0", "theta0_prime", "theta1", "c1"],
              zip(tab.rho, tab.theta0, tab.theta0_prime, tab.theta1, tab.c1))
    info = {"sigma": tab.sigma, "alpha": tab.alpha, "lambda0": lam0,
            "residuals": tab.residuals or {}}
    (out / "profiles.json").write_text(json.dumps(info, indent=1, default=float))
    print(f"sigma = {tab.sigma:.12f}")


def _experiment_config(args, cfg, scenario_default, single: bool):
    from .harness import ExperimentConfig

    out = _outdir(args, cfg)
    cfg.setdefault("scenario", scenario_default)
    if single:
        eps = cfg.get("eps_list", [cfg.pop("eps", 0.04)])
        cfg["eps_list"] = [eps[0]] if isinstance(eps, list) else [float(eps)]
    cfg["out"] = str(out)
    from dataclasses import fields

    keep = {f.name for f in fields(ExperimentConfig)}
    for key in [k for k in cfg if k in getattr(args, "shared", ()) and k not in keep]:
        del cfg[key]
    try:
        return ExperimentConfig.from_dict(cfg), out
    except TypeError as exc:
        raise ValidationError(str(exc)) from exc


def cmd_simulate(args, cfg):
    from .harness import run_single

    ecfg, out = _experiment_config(args, cfg, "StationaryCircle", single=True)
    rec = run_single(ecfg, ecfg.eps_list[0])
    s = rec["summary"]
    print(f"eps={s['eps']} steps={s['steps']} energy {s['energy0']:.6g} -> {s['energy_final']:.6g} "
          f"mass drift {s['mass_drift']:.2e}")


def cmd_converge(args, cfg):
    from .harness import run_experiment

    ecfg, out = _experiment_config(args, cfg, "StationaryCircle", single=False)
    report = run_experiment(ecfg)
    for k, (rate, _, r2) in report.rates.items():
        print(f"{k}: rate {rate:.3f} (r2 {r2:.4f})")


def cmd_sharp(args, cfg):
    from .geometry import Curve
    from .io import write_csv
    from .sharp_flow import SharpState, circle_oracle, evolve, stable_dt

    out = _outdir(args, cfg)
    shape = _pop(cfg, "shape", "flower")
    n = int(_pop(cfg, "n", cfg.pop("grid", 256)))
    center = tuple(_pop(cfg, "center", (0.0, 0.0)))
    t_end = float(_pop(cfg, "t_end", 0.1))
    dt = _pop(cfg, "dt", None)
    radius = float(_pop(cfg, "radius", 1.0))
    amplitude = float(_pop(cfg, "amplitude", 0.2))
    petals = int(_pop(cfg, "petals", 5))
    radii = _pop(cfg, "radii", [0.5, 0.7])
    centers = _pop(cfg, "centers", None)
    every = int(_pop(cfg, "every", 10))
    for key in ("eps_list", "order"):
        cfg.pop(key, None)
    _reject_unknown(cfg, args)

    if shape == "circle":
        curves = [Curve.circle(radius, center, n)]
    elif shape == "flower":
        curves = [Curve.flower(radius, amplitude, petals, center, n)]
    elif shape == "ellipse":
        curves = [Curve.ellipse(radius, radius * (1.0 - amplitude), center, n)]
    elif shape == "circles":
        if centers is None:
            centers = [(2.0 * sum(radii) * k, 0.0) for k in range(len(radii))]
        curves = [Curve.circle(r, c, n) for r, c in zip(radii, centers)]
    else:
        raise ValidationError(f"unknown shape {shape!r}")
    state = SharpState.from_curves(curves)
    # margin below the 0.4 ds^2 limit: shrinking components refine ds as they move
    dt = float(dt) if dt is not None else stable_dt(curves, 0.2)
    rows = []

    def row(st):
        rows.append([st.t, *[c.area for c in st.curves], *[c.length for c in st.curves]])

    row(state)
    count = [0]

    def cb(st):
        count[0] += 1
        if count[0] % every == 0:
            row(st)

    state = evolve(state, t_end, dt, cb)
    if rows[-1][0] != state.t:
        row(state)
    k = len(curves)
    header = ["t", *[f"area{i}" for i in range(k)], *[f"length{i}" for i in range(k)]]
    write_csv(out / "sharp_series.csv", header, rows)
    for i, c in enumerate(state.curves):
        c.to_csv(out / f"curve{i}.csv")
    print(f"t={state.t:.6g} area={sum(c.area for c in state.curves):.12g}")
    if shape == "circles":
        oracle = circle_oracle(radii, state.t)
        found = [np.sqrt(c.area / np.pi) for c in state.curves]
        write_csv(out / "oracle.csv", ["component", "radius", "oracle_radius"],
                  [[i, f, o] for i, (f, o) in enumerate(zip(found, oracle))])


def cmd_spectral(args, cfg):
    from .io import write_csv
    from .potential import Potential
    from .profiles import build_profiles
    from .spectral_check import spectral_sweep

    out = _outdir(args, cfg)
    eps_list = _pop(cfg, "eps_list", [0.1, 0.05, 0.025, 0.0125])
    order = int(_pop(cfg, "order", 1))
    lam0 = float(_pop(cfg, "lambda0", 1.0 / 3.0))
    delta = float(_pop(cfg, "delta", 0.5))
    pot = Potential.from_config(_pop(cfg, "potential", "standard"))
    cfg.pop("grid", None)
    _reject_unknown(cfg, args)
    rows = spectral_sweep(build_profiles(pot, lambda0=lam0), eps_list, order, lam0, delta)
    write_csv(out / "spectral.csv", ["eps", "lambda_min", "overlap"], rows)
    for eps, lam, ov in rows:
        print(f"eps={eps:g} lambda_min={lam:.6f} overlap={ov:.6f}")


def cmd_asymptotics(args, cfg):
    from .asymptotics import build_approx_solution, residual_norms
    from .diffuse_solver import DiffuseState, GridSpec
    from .geometry import Curve
    from .io import write_snapshot
    from .potential import Potential
    from .profiles import build_profiles

    out = _outdir(args, cfg)
    eps = float(_pop(cfg, "eps_list", [0.04])[0])
    order = int(_pop(cfg, "order", 1))
    lx = float(_pop(cfg, "lx", 4.0))
    radius = float(_pop(cfg, "radius", 1.0))
    nx = int(_pop(cfg, "grid", int(np.ceil(2.56 * lx / eps / 2.0)) * 2))
    pot = Potential.from_config(_pop(cfg, "potential", "standard"))
    _reject_unknown(cfg, args)
    grid = GridSpec.square(nx, lx)
    table = build_profiles(pot)
    approx = build_approx_solution(grid, Curve.circle(radius, (lx / 2, lx / 2), 512), eps, table, order)
    norms = residual_norms(approx, None, eps, motion="stationary", table=table)
    info = {"eps": eps, "order": order, "nx": nx, "lambda0": approx.lambda0, "residual": norms}
    (out / "asymptotics.json").write_text(json.dumps(info, indent=1))
    write_snapshot(out / "c_A.nsac", DiffuseState.from_c(grid, approx.c_A, eps))
    print(f"lambda0={approx.lambda0:.12g} residual L2={norms['L2']:.6g}")


HANDLERS = {
    "profiles": cmd_profiles, "simulate": cmd_simulate, "sharp": cmd_sharp,
    "spectral": cmd_spectral, "asymptotics": cmd_asymptotics, "converge": cmd_converge,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _settings(args)
        HANDLERS[args.command](args, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
