"""Command-line interface: single runs, convergence studies and sweeps.

Verbs:
    simulate   one solve of a preset or a config file; writes the trajectory
               CSV, a JSON manifest, a concentration-profile SVG and an
               interface-position SVG
    study      mesh refinement study against a nested finer reference; writes
               the order table CSV and a log-log SVG with slope-1 guides
    sweep      simulate over several presets and/or mesh sizes, one output
               subdirectory per run

Physical outputs use minutes and mm.  Exit codes: 0 success, 2 configuration
error, 3 solver failure, 4 order-band failure (with --assert-orders).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import error_analysis as ea
from .integrator import IntegratorConfig, SolverError, solve
from .mesh import uniform_mesh
from .model import (CoefficientFunction, InitialCondition, PhysicalParams,
                    PiecewiseLinear, back_transform, nondimensionalize,
                    preset, validate_assumptions, PRESETS)
from .svgplot import line_plot, loglog_plot

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_BANDS = 4

# acceptance bands checked by `study --assert-orders`: the three norms with a
# guaranteed first-order rate must land in [0.8, 1.3] for every mesh pair,
# and the L2-in-space-and-time error must converge with order at least 1
ORDER_BANDS = {"boundary_L2": (0.8, 1.3), "boundary_deriv_L2": (0.8, 1.3),
               "L2H1": (0.8, 1.3)}
ORDER_FLOORS = {"L2L2": 1.0}


class ConfigError(Exception):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _coeff_from_dict(d: dict) -> CoefficientFunction:
    kind = d.get("kind", "constant")
    if kind == "constant":
        return CoefficientFunction.constant(float(d["value"]))
    if kind == "linear":
        return CoefficientFunction.linear(float(d["slope"]))
    if kind == "smooth-cutoff":
        return CoefficientFunction.smooth_cutoff(float(d["plateau"]), float(d["ramp"]))
    raise ConfigError(f"unknown coefficient kind {kind!r}")


def _load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    if p.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(p.read_text())
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc


def _params_from_config(cfg: dict) -> tuple[PhysicalParams, InitialCondition]:
    if "preset" in cfg:
        p, u0 = preset(cfg["preset"])
        return p, u0
    try:
        kwargs = {k: float(cfg[k]) for k in ("D", "beta", "H", "a0", "s0", "L", "m0", "Tf")}
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc} in config") from exc
    if "b" in cfg:
        b = cfg["b"]
        if isinstance(b, dict) and "ts" in b:
            kwargs["b"] = PiecewiseLinear(tuple(map(float, b["ts"])), tuple(map(float, b["vs"])))
        elif isinstance(b, dict):
            kwargs["b"] = _coeff_from_dict(b)
        else:
            kwargs["b"] = CoefficientFunction.constant(float(b))
    if "sigma" in cfg:
        kwargs["sigma"] = _coeff_from_dict(cfg["sigma"])
    u0_val = float(cfg.get("u0", 1.0))
    return PhysicalParams(**kwargs), InitialCondition.constant(u0_val)


def _integrator_config(args, p: PhysicalParams) -> IntegratorConfig:
    kwargs = {}
    if args.scheme is not None:
        kwargs["scheme"] = args.scheme
    if args.dt is not None:
        # --dt is given in minutes; the integrator works in diffusion time
        kwargs["dt"] = float(args.dt) * p.D / p.L**2
        kwargs.setdefault("scheme", "fixed-RK4")
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _read_experimental(path: str) -> tuple[np.ndarray, np.ndarray]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"experimental data file not found: {path}")
    try:
        data = np.genfromtxt(p, delimiter=",", names=True)
        t = np.atleast_1d(data["t"]).astype(float)
        s = np.atleast_1d(data["s"]).astype(float)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"experimental CSV must have t,s columns: {exc}") from exc
    if t.size == 0 or not np.all(np.isfinite(t)) or not np.all(np.isfinite(s)):
        raise ConfigError("experimental CSV contains no finite t,s rows")
    return t, s


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_dict(config: IntegratorConfig) -> dict:
    return asdict(config)


def _params_dict(p: PhysicalParams) -> dict:
    d = {k: getattr(p, k) for k in ("D", "beta", "H", "a0", "s0", "L", "m0", "Tf")}
    d["b"] = repr(p.b)
    d["sigma"] = repr(p.sigma)
    dim = nondimensionalize(p)
    d["dimensionless"] = {"Bi": dim.Bi, "A0": dim.A0, "h0": dim.h0, "T": dim.T}
    return d


def cmd_simulate(args) -> int:
    p, u0, mesh_n = _resolve_run(args)
    config = _integrator_config(args, p)
    report = validate_assumptions(p, u0)
    if not report.ok:
        raise ConfigError("inadmissible parameters:\n" + str(report))
    out = _outdir(args)
    dim = nondimensionalize(p)
    traj = solve(dim, u0, uniform_mesh(mesh_n + 1), config)
    return _write_simulate_artifacts(args, p, traj, out, prefix=args.preset or "run")


def _write_simulate_artifacts(args, p: PhysicalParams, traj, out: Path, prefix: str) -> int:
    csv_path = out / f"{prefix}_trajectory.csv"
    traj.to_csv(csv_path)

    phys = back_transform(traj, p)
    idx = np.unique(np.linspace(0, len(phys.t) - 1, 6).astype(int))[1:]
    profile_series = []
    for i in idx:
        m = phys.m[i]
        keep = ~np.isnan(m)
        profile_series.append((f"t = {phys.t[i]:.1f} min", phys.x[keep], m[keep]))
    profiles_svg = out / f"{prefix}_profiles.svg"
    profiles_svg.write_text(line_plot(
        profile_series, xlabel="x (mm)", ylabel="concentration (g/mm^3)",
        title=f"concentration profiles ({prefix})"))

    interface_series = [("computed s(t)", phys.t, phys.s)]
    residual_table = None
    if args.experimental:
        t_exp, s_exp = _read_experimental(args.experimental)
        interface_series.append(("experimental", t_exp, s_exp))
        s_model = np.interp(t_exp, phys.t, phys.s)
        residual_table = [{"t": float(a), "s_data": float(b),
                           "s_model": float(c), "residual": float(b - c)}
                          for a, b, c in zip(t_exp, s_exp, s_model)]
    interface_svg = out / f"{prefix}_interface.svg"
    interface_svg.write_text(line_plot(
        interface_series, xlabel="t (min)", ylabel="front position s (mm)",
        title=f"moving boundary ({prefix})", markers=args.experimental is not None))

    manifest = {
        "mode": "simulate",
        "preset": args.preset,
        "params": _params_dict(p),
        "mesh_n": traj.mesh.n - 1,
        "integrator": _config_dict(traj.config),
        "status": traj.status,
        "events": [list(e) for e in traj.events],
        "n_steps": traj.n_steps,
        "min_alpha": traj.min_alpha,
        "final": {"tau": float(traj.times[-1]), "h": float(traj.hs[-1]),
                  "t_min": float(phys.t[-1]), "s_mm": float(phys.s[-1])},
        "artifacts": {name.name: _sha256(name)
                      for name in (csv_path, profiles_svg, interface_svg)},
    }
    if residual_table is not None:
        manifest["experimental"] = {"path": args.experimental,
                                    "residuals": residual_table}
    (out / f"{prefix}_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {csv_path}")
    return EXIT_OK


def _resolve_run(args, parse_mesh: bool = True) -> tuple[PhysicalParams, InitialCondition, int]:
    if args.config:
        cfg = _load_config_file(args.config)
        p, u0 = _params_from_config(cfg)
        mesh_spec = cfg.get("mesh_n", args.mesh_n or 100)
    elif args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; available: {sorted(PRESETS)}")
        p, u0 = preset(args.preset)
        mesh_spec = args.mesh_n or 100
    else:
        raise ConfigError("provide --preset or --config")
    if not parse_mesh:
        return p, u0, 0
    try:
        mesh_n = int(mesh_spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"mesh-n must be a single integer here: {mesh_spec!r}") from exc
    if mesh_n < 2:
        raise ConfigError("mesh-n must be at least 2 elements")
    return p, u0, mesh_n


def cmd_study(args) -> int:
    p, u0, _ = _resolve_run(args, parse_mesh=False)
    config = _integrator_config(args, p)
    report = validate_assumptions(p, u0)
    if not report.ok:
        raise ConfigError("inadmissible parameters:\n" + str(report))

    Ns = [int(v) for v in (args.mesh_n or "20,40,80,160,320").split(",")]
    ref_n = int(args.reference_n)
    if sorted(Ns) != Ns or len(set(Ns)) != len(Ns):
        raise ConfigError("mesh sizes must be strictly increasing")
    for N in Ns:
        ratio, rem = divmod(ref_n, N)
        if rem != 0 or ratio & (ratio - 1):
            raise ConfigError(
                f"reference N={ref_n} must be a power-of-2 multiple of N={N}")
    norms = tuple((args.norms or ",".join(ea.NORM_KINDS)).split(","))
    bad = [n for n in norms if n not in ea.NORM_KINDS]
    if bad:
        raise ConfigError(f"unknown norms {bad}; available: {ea.NORM_KINDS}")

    out = _outdir(args)
    dim = nondimensionalize(p)

    # solves are independent; run them on a thread pool (kernels release the GIL)
    meshes = [uniform_mesh(N + 1) for N in Ns] + [uniform_mesh(ref_n + 1)]
    with concurrent.futures.ThreadPoolExecutor(max_workers=min(4, len(meshes))) as ex:
        runs = list(ex.map(lambda m: solve(dim, u0, m, config), meshes))
    ref = runs.pop()

    ks = np.array([1.0 / N for N in Ns])
    errors = {n: np.array([ea.discrete_error(r, ref, n) for r in runs]) for n in norms}
    orders = {n: ea.observed_orders(ks, errors[n]) for n in norms}
    eta = np.array([ea.aposteriori_estimate(r, u0)["eta_total"] for r in runs])
    true_sq = np.array([ea.true_error_sq(r, ref) for r in runs])
    with np.errstate(divide="ignore", invalid="ignore"):
        effectivity = np.where(true_sq > 0.0, eta / true_sq, np.nan)
    rep = ea.ErrorReport(Ns=tuple(Ns), ks=ks, errors=errors, orders=orders,
                         eta=eta, effectivity=effectivity, ref_n=ref_n)

    csv_path = out / "study.csv"
    rep.to_csv(csv_path)
    svg_path = out / "study.svg"
    rep.to_svg(svg_path)
    manifest = {
        "mode": "study",
        "preset": args.preset,
        "params": _params_dict(p),
        "Ns": Ns, "reference_n": ref_n,
        "integrator": _config_dict(config),
        "norms": list(norms),
        "orders": {n: [None if np.isnan(v) else float(v) for v in orders[n]] for n in norms},
        "eta": eta.tolist(),
        "effectivity": [None if np.isnan(v) else float(v) for v in effectivity],
        "artifacts": {q.name: _sha256(q) for q in (csv_path, svg_path)},
    }
    (out / "study_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(rep.to_csv())

    if args.assert_orders:
        failures = []
        for norm, (lo, hi) in ORDER_BANDS.items():
            if norm not in orders:
                continue
            for i, r in enumerate(orders[norm]):
                if not (lo <= r <= hi):
                    failures.append(f"{norm} pair N={Ns[i]}->{Ns[i + 1]}: "
                                    f"order {r:.3f} outside [{lo}, {hi}]")
        for norm, floor in ORDER_FLOORS.items():
            if norm not in orders:
                continue
            for i, r in enumerate(orders[norm]):
                if not r >= floor:
                    failures.append(f"{norm} pair N={Ns[i]}->{Ns[i + 1]}: "
                                    f"order {r:.3f} below {floor}")
        if failures:
            for f in failures:
                print(f"ORDER BAND FAILURE: {f}", file=sys.stderr)
            return EXIT_BANDS
    return EXIT_OK


def cmd_sweep(args) -> int:
    presets = (args.preset or "dense,foam").split(",")
    mesh_ns = [int(v) for v in (args.mesh_n or "100").split(",")]
    out = _outdir(args)
    summary = []
    for name in presets:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    for name in presets:
        p, u0 = preset(name)
        config = _integrator_config(args, p)
        dim = nondimensionalize(p)
        for N in mesh_ns:
            sub = out / f"{name}_N{N}"
            sub.mkdir(parents=True, exist_ok=True)
            sub_args = argparse.Namespace(**vars(args))
            sub_args.out = str(sub)
            sub_args.preset = name
            traj = solve(dim, u0, uniform_mesh(N + 1), config)
            _write_simulate_artifacts(sub_args, p, traj, sub, prefix=name)
            summary.append({"preset": name, "mesh_n": N, "dir": sub.name,
                            "final_h": float(traj.hs[-1])})
    (out / "sweep_manifest.json").write_text(json.dumps(
        {"mode": "sweep", "runs": summary}, indent=2) + "\n")
    print(f"sweep complete: {len(summary)} runs under {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rubberfront",
        description="moving-boundary diffusion solver (FEM on a Landau-transformed domain)")
    sub = ap.add_subparsers(dest="mode", required=True)
    for name, fn in (("simulate", cmd_simulate), ("study", cmd_study), ("sweep", cmd_sweep)):
        sp = sub.add_parser(name)
        sp.set_defaults(func=fn)
        sp.add_argument("--preset", help="built-in parameter set (dense, foam); "
                        "sweep accepts a comma list")
        sp.add_argument("--config", help="JSON or TOML config file")
        sp.add_argument("--mesh-n", help="element count (study/sweep: comma list)")
        sp.add_argument("--dt", type=float,
                        help="fixed time step in minutes (implies fixed-RK4)")
        sp.add_argument("--scheme", choices=("adaptive-RK45", "fixed-RK4"))
        sp.add_argument("--reference-n", type=int, default=640,
                        help="reference element count for studies")
        sp.add_argument("--assert-orders", action="store_true",
                        help="exit 4 unless study orders land in the bands")
        sp.add_argument("--norms", help="comma list of norms for studies")
        sp.add_argument("--experimental", help="CSV with t,s columns to overlay")
        sp.add_argument("--out", default="out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        record = {"error": "solver-failure", "message": str(exc),
                  "status": exc.status, "tau_reached": exc.tau_reached}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
