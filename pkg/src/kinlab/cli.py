"""Command-line interface: riemann / profile / kinetic / sweep subcommands."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .gas import GasState
from .riemann import WavePattern, solve_riemann
from .transport import make_conductivity, make_viscosity
from . import profiles as prof
from .harness import (
    SweepConfig,
    emit_report,
    run_convergence_sweep,
)
from .kinetic import VelocityGrid, maxwellian_state, micro_distance, moments
from .kinetic import run as kinetic_run


def _parse_state(text: str) -> GasState:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("state must be 'v,u1,theta'")
    return GasState(v=parts[0], u1=parts[1], theta=parts[2])


def parse_config(path) -> dict:
    """Flat key = value file; '#' starts a comment; commas make tuples."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = (p.strip() for p in line.split("=", 1))
        if "," in val:
            out[key] = tuple(float(v) for v in val.split(",") if v.strip())
        else:
            try:
                out[key] = float(val)
            except ValueError:
                out[key] = val
    return out


def cmd_riemann(args) -> int:
    pattern = solve_riemann(args.left, args.right)
    json.dump(pattern.to_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def _load_pattern(spec: str) -> WavePattern:
    text = sys.stdin.read() if spec == "-" else Path(spec).read_text()
    return WavePattern.from_dict(json.loads(text))


def cmd_profile(args) -> int:
    pattern = _load_pattern(args.pattern)
    t = args.time
    h = args.h if args.h is not None else t
    T = args.T if args.T is not None else t + 0.5
    if not (h <= t <= T):
        raise SystemExit(f"--time {t} must lie in the window [{h}, {T}]")
    eps = args.eps
    sigma = args.sigma if args.sigma is not None else eps ** 0.2
    if args.x_min is None or args.x_max is None:
        pad = max(8.0 * np.sqrt(eps * (1.0 + T)), 6.0 * sigma, 0.4)
        x_lo = pattern.fan_left * T - pad
        x_hi = pattern.s3 * T + pad
    else:
        x_lo, x_hi = args.x_min, args.x_max
    dm = min(sigma / 10.0, np.sqrt(eps) / 10.0)
    n_x = args.nx or int(np.ceil((x_hi - x_lo) / dm)) + 1
    x = np.linspace(x_lo, x_hi, n_x)
    comp = prof.build_composite(pattern, eps, h, T, x, times=(t,), sigma=sigma,
                                mu=make_viscosity(args.mu0),
                                kappa=make_conductivity(args.mu0, args.prandtl))
    snap = comp.at_time(t)
    header = ["x", "V", "U1", "U2", "U3", "Theta", "E"]
    columns = [x] + [snap[k] for k in header[1:]]
    if args.decompose:
        dec = comp.decomposition_at(t)
        for name in ("V_R1", "d1", "V_CD", "V_S3", "b1"):
            header.append(name)
            columns.append(dec[name])
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])
    print(f"wrote {args.out} ({n_x} rows)")
    return 0


def _config_states(cfg: dict):
    def state_of(key):
        val = cfg[key]
        if not isinstance(val, tuple) or len(val) != 3:
            raise ValueError(f"config key {key} must be 'v,u1,theta'")
        return GasState(v=val[0], u1=val[1], theta=val[2])

    return state_of("left"), state_of("right")


def _write_snapshot_csv(path, x, mac, micro_norm, extra=None):
    header = ["x", "rho", "u1", "theta", "E", "micro_norm"]
    cols = [x, mac.rho, mac.u1, mac.theta, mac.E, micro_norm]
    for name, arr in (extra or {}).items():
        header.append(name)
        cols.append(arr)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([repr(float(v)) for v in row])


def cmd_kinetic(args) -> int:
    cfg = parse_config(args.config)
    left, right = _config_states(cfg)
    eps = float(cfg["eps"])
    n_x = int(cfg.get("n_x", 2000))
    n_xi = int(cfg.get("n_xi", 128))
    span = cfg.get("x_span", (-2.0, 2.0))
    t_end = float(cfg.get("t_end", 0.5))
    raw_snaps = cfg.get("snapshots", (t_end,))
    snaps = (raw_snaps,) if isinstance(raw_snaps, float) else raw_snaps
    init_mode = str(cfg.get("init_mode", "sharp"))
    cfl = float(cfg.get("cfl", 0.9))
    mu0 = float(cfg.get("mu0", 1.0))

    pattern = solve_riemann(left, right)
    if init_mode == "sharp":
        x = np.linspace(span[0], span[1], n_x)
        vgrid = VelocityGrid.for_states(
            (pattern.left, pattern.mid_star, pattern.mid_upper, pattern.right), n_xi=n_xi)
        rho0 = np.where(x < 0.0, 1.0 / left.v, 1.0 / right.v)
        u10 = np.where(x < 0.0, left.u1, right.u1)
        th0 = np.where(x < 0.0, left.theta, right.theta)
        state = maxwellian_state(x, vgrid, rho0, u10, th0, eps, time=0.0)
        results = kinetic_run(state, t_end, snapshot_times=snaps, cfl=cfl, mu0=mu0)
        star = GasState(v=pattern.mid_star.v, u1=pattern.mid_star.u1,
                        theta=float(cfg.get("star_theta_factor", 0.75))
                        * pattern.mid_star.theta)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for st in results:
            mac = moments(st)
            name = out_dir / f"kinetic_t{st.time:.6g}.csv"
            _write_snapshot_csv(name, x, mac, micro_distance(st, mac, star))
            print(f"wrote {name}")
        return 0
    # composite initialization reuses the sweep machinery for one eps
    config = SweepConfig(
        left=left, right=right, eps_list=(eps, eps / 2, eps / 4),
        h=float(cfg.get("h", 0.1)), T=t_end, n_x=n_x, n_xi=n_xi,
        snapshots=tuple(float(s) for s in snaps), init_mode="composite",
        cfl=cfl, mu0=mu0, prandtl=float(cfg.get("prandtl", 1.0)),
        star_theta_factor=float(cfg.get("star_theta_factor", 0.75)),
    )
    from .harness import run_single_eps

    res = run_single_eps(config, pattern, eps, keep_snapshots=True)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rec in res.snapshots:
        name = out_dir / f"kinetic_t{rec['t']:.6g}.csv"
        from .kinetic import MacroFields

        mac = MacroFields(rho=rec["rho"], u1=rec["u1"], theta=rec["theta"], E=rec["E"])
        _write_snapshot_csv(name, rec["x"], mac, rec["micro_norm"])
        print(f"wrote {name}")
    return 0


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    left, right = _config_states(cfg)
    eps_list = cfg["eps_list"]
    if isinstance(eps_list, float):
        eps_list = (eps_list,)
    raw_snaps = cfg.get("snapshots", ())
    snaps = (raw_snaps,) if isinstance(raw_snaps, float) else raw_snaps
    config = SweepConfig(
        left=left, right=right, eps_list=tuple(eps_list),
        h=float(cfg.get("h", 0.1)), T=float(cfg.get("T", 0.5)),
        n_x=int(cfg.get("n_x", 2000)), n_xi=int(cfg.get("n_xi", 128)),
        snapshots=tuple(float(s) for s in snaps),
        init_mode=str(cfg.get("init_mode", "composite")),
        cfl=float(cfg.get("cfl", 0.9)), mu0=float(cfg.get("mu0", 1.0)),
        prandtl=float(cfg.get("prandtl", 1.0)),
        star_theta_factor=float(cfg.get("star_theta_factor", 0.75)),
        grid_self_check=bool(cfg.get("grid_self_check", 0.0)),
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result, runs = run_convergence_sweep(config, keep_snapshots=True)
    emit_report(result, out_dir / "sweep.csv", "csv")
    emit_report(result, out_dir / "sweep.json", "json")
    from .kinetic import MacroFields

    for run_res in runs:
        for rec in run_res.snapshots:
            mac = MacroFields(rho=rec["rho"], u1=rec["u1"], theta=rec["theta"], E=rec["E"])
            name = out_dir / f"eps{run_res.eps:.6g}_t{rec['t']:.6g}.csv"
            _write_snapshot_csv(name, rec["x"], mac, rec["micro_norm"], extra={
                "rho_ref": rec["rho_ref"], "u1_ref": rec["u1_ref"],
                "theta_ref": rec["theta_ref"], "rho_comp": rec["rho_comp"],
                "u1_comp": rec["u1_comp"], "theta_comp": rec["theta_comp"],
            })
    print(f"wrote {out_dir}/sweep.csv, sweep.json and per-eps snapshots")
    print(f"fitted order: {result.fitted_order:.3f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="kinlab",
                                     description="Kinetic-to-Euler limit laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p_r = sub.add_parser("riemann", help="solve a Riemann problem, print the pattern")
    p_r.add_argument("--left", type=_parse_state, required=True, metavar="v,u1,theta")
    p_r.add_argument("--right", type=_parse_state, required=True, metavar="v,u1,theta")
    p_r.set_defaults(func=cmd_riemann)

    p_p = sub.add_parser("profile", help="build the composite profile at one time")
    p_p.add_argument("--pattern", required=True, help="pattern JSON path or - for stdin")
    p_p.add_argument("--eps", type=float, required=True)
    p_p.add_argument("--time", type=float, required=True)
    p_p.add_argument("--out", required=True)
    p_p.add_argument("--decompose", action="store_true")
    p_p.add_argument("--h", type=float, default=None)
    p_p.add_argument("--T", type=float, default=None)
    p_p.add_argument("--sigma", type=float, default=None)
    p_p.add_argument("--x-min", type=float, default=None)
    p_p.add_argument("--x-max", type=float, default=None)
    p_p.add_argument("--nx", type=int, default=None)
    p_p.add_argument("--mu0", type=float, default=1.0)
    p_p.add_argument("--prandtl", type=float, default=1.0)
    p_p.set_defaults(func=cmd_profile)

    p_k = sub.add_parser("kinetic", help="run the BGK solver from a config file")
    p_k.add_argument("--config", required=True)
    p_k.add_argument("--out", default=".")
    p_k.set_defaults(func=cmd_kinetic)

    p_s = sub.add_parser("sweep", help="run a Knudsen convergence sweep")
    p_s.add_argument("--config", required=True)
    p_s.add_argument("--out", required=True)
    p_s.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
