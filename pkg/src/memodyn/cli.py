"""Command-line front end.

Subcommands
-----------
simulate    integrate a model and write a trajectory CSV (+ manifest JSON)
analyze     period, cycle signature and loop quantities of a trajectory
verify      force-law / jounce / reconstruction residuals of a trajectory
equivalent  rms-matched linear G-C and R-L one-ports from a waveform
netlist     emit the op-amp realization deck for a fast/slow parameter point
sweep       run a parameter grid in parallel and tabulate the outcomes

Configuration is JSON; every simulate-produced CSV is accompanied by a
manifest carrying the exact parameters, so downstream subcommands need no
repeated flags.  Exit codes: 0 success, 2 invalid input or failed
verification, 3 numerical failure during integration.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .analysis import (
    analysis_report,
    detect_period,
    extract_period,
    element_waveforms,
    signature_string,
)
from .circuits import (
    as_state_array,
    default_mmo_params,
    is_equilibrium,
    model_tag,
    params_from_json,
    params_to_json,
)
from .equivalence import gc_equivalent, rl_equivalent
from .integrator import IntegratorOptions, Trajectory, integrate
from .memelement import MemElementKind, MemElementSpec
from .netlist import emit_netlist, NetlistSpec
from .newtonian import verify_all


def _default_threads() -> int:
    env = os.environ.get("MEMODYN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"MEMODYN_THREADS must be an integer, got {env!r}")
    return 1


def _load_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _config_pieces(config: dict):
    params = (
        params_from_json(config["params"])
        if "params" in config
        else default_mmo_params()
    )
    s0 = as_state_array(config.get("initial_state", np.zeros(4)))
    integ = {k: v for k, v in config.get("integrator", {}).items() if v is not None}
    integ.setdefault("t0", 0.0)
    integ.setdefault("t1", 100.0)
    opts = IntegratorOptions(**integ)
    return params, s0, opts


def _manifest_path(csv_path: str) -> str:
    return csv_path + ".manifest.json"


def _write_manifest(csv_path: str, params, s0, opts) -> None:
    manifest = {
        "version": __version__,
        "model": model_tag(params),
        "params": json.loads(params_to_json(params)),
        "initial_state": list(map(float, s0)),
        "integrator": {
            "method": opts.method,
            "t0": opts.t0,
            "t1": opts.t1,
            "h": opts.h,
            "rtol": opts.rtol,
            "atol": opts.atol,
            "record_stride": opts.record_stride,
            "n_record": opts.n_record,
        },
        "equilibrium_start": is_equilibrium(params, s0),
    }
    with open(_manifest_path(csv_path), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _load_trajectory(path: str, config_path=None) -> Trajectory:
    traj = Trajectory.from_csv(path)
    params = None
    if config_path:
        params = params_from_json(_load_json(config_path)["params"])
    elif os.path.exists(_manifest_path(path)):
        manifest = _load_json(_manifest_path(path))
        params = params_from_json(manifest["params"])
    if params is not None:
        traj.params = params
        traj.model = model_tag(params)
    return traj


def _print_columns(traj: Trajectory, cols: str) -> None:
    names = [c.strip() for c in cols.split(",") if c.strip()]
    data = np.column_stack([traj.column(n) for n in names])
    print(" ".join(f"{n:>24s}" for n in names))
    for row in data:
        print(" ".join(f"{v:24.16e}" for v in row))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_simulate(args) -> int:
    config = _load_json(args.config) if args.config else {}
    params, s0, opts = _config_pieces(config)
    traj = integrate(params, s0, opts)
    traj.to_csv(args.out)
    _write_manifest(args.out, params, s0, opts)
    print(
        f"wrote {args.out} ({len(traj)} samples, model {traj.model}, "
        f"t in [{opts.t0:g}, {opts.t1:g}])"
    )
    if is_equilibrium(params, s0):
        print("note: the initial state is an equilibrium of this model")
    if args.plot_cols:
        _print_columns(traj, args.plot_cols)
    return 0


def _cmd_analyze(args) -> int:
    traj = _load_trajectory(args.trajectory, args.config)
    report = analysis_report(
        traj,
        transient_fraction=args.transient_fraction,
        threshold=args.threshold,
    )
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    est = report["period"]
    print(
        f"period T = {est['T']:.6g} (converged: {est['converged']}, "
        f"{est['n_crossings']} crossings), signature {report['signature_text']}"
    )
    for warning in report["warnings"]:
        print("warning:", warning)
    if args.plot_cols:
        ptraj = extract_period(traj, detect_period(traj, args.transient_fraction))
        _print_columns(ptraj, args.plot_cols)
    return 0


def _cmd_verify(args) -> int:
    traj = _load_trajectory(args.trajectory, args.config)
    if traj.params is None:
        raise ValueError(
            "verification needs model parameters: pass --config or keep the "
            "manifest next to the trajectory"
        )
    reports = verify_all(traj, args.force_tol, args.reconstruct_tol)
    for rep in reports:
        print(rep.summary())
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([rep.__dict__ for rep in reports], fh, indent=2)
            fh.write("\n")
    return 0 if all(rep.passed for rep in reports) else 2


def _cmd_equivalent(args) -> int:
    with open(args.waveform) as fh:
        header = fh.readline().strip()
    if header.startswith("t,") and len(header.split(",")) == 3:
        data = np.loadtxt(args.waveform, delimiter=",", skiprows=1, ndmin=2)
        t, v, i = data[:, 0], data[:, 1], data[:, 2]
    else:
        traj = _load_trajectory(args.waveform, args.config)
        est = detect_period(traj, args.transient_fraction)
        ptraj = extract_period(traj, est)
        element = None
        if traj.params is not None and args.kind:
            element = MemElementSpec(MemElementKind(args.kind), traj.params.g)
        wf = element_waveforms(ptraj, element)
        t, v, i = wf["t"], wf["v"], wf["i"]
    gc = gc_equivalent(t, v, i)
    rl = rl_equivalent(t, v, i)
    out = {
        "T": gc.T,
        "v_rms": gc.v_rms,
        "i_rms": gc.i_rms,
        "power": gc.power,
        "gc": {"G": gc.G, "C": gc.C},
        "rl": {"R": rl.R, "L": rl.L},
    }
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2)
            fh.write("\n")
    print(
        f"G = {gc.G:.9g}, C = {gc.C:.9g}; R = {rl.R:.9g}, L = {rl.L:.9g} "
        f"(T = {gc.T:.6g}, power = {gc.power:.6g})"
    )
    return 0


def _cmd_netlist(args) -> int:
    config = _load_json(args.config) if args.config else {}
    params = (
        params_from_json(config["params"])
        if "params" in config
        else default_mmo_params()
    )
    base = NetlistSpec(**config.get("base", {}))
    deck = emit_netlist(params, base)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(deck)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(deck)
    return 0


def _set_by_path(config: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = config
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value


def _sweep_worker(task) -> dict:
    """One sweep point: simulate, analyze, verify; never raises."""
    config, assignment = task
    row = dict(assignment)
    try:
        params, s0, opts = _config_pieces(config)
        traj = integrate(params, s0, opts)
        est = detect_period(traj, config.get("transient_fraction", 0.5))
        ptraj = extract_period(traj, est)
        from .analysis import classify_mmo, closure_defect

        sig = classify_mmo(ptraj, threshold=config.get("threshold", 0.5))
        reports = verify_all(traj)
        row.update(
            T=est.T,
            converged=est.converged,
            signature=signature_string(sig),
            closure=closure_defect(ptraj),
            max_force_residual=max(r.normalized_max for r in reports),
            error="",
        )
    except (ValueError, RuntimeError) as exc:
        row.update(
            T="",
            converged="",
            signature="",
            closure="",
            max_force_residual="",
            error=str(exc),
        )
    return row


def _cmd_sweep(args) -> int:
    spec = _load_json(args.config)
    base = spec.get("base", {})
    grid = spec.get("grid", {})
    rng = np.random.default_rng(args.seed)
    axes = []
    for key in sorted(grid):
        values = grid[key]
        if isinstance(values, dict):
            values = rng.uniform(values["low"], values["high"], int(values["n"]))
            values = [float(v) for v in values]
        axes.append((key, list(values)))
    if not axes:
        raise ValueError("sweep config has an empty grid")
    tasks = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        config = json.loads(json.dumps(base))  # deep copy
        assignment = {}
        for (key, _), value in zip(axes, combo):
            _set_by_path(config, key, value)
            assignment[key] = value
        tasks.append((config, assignment))
    threads = args.threads if args.threads else _default_threads()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_worker, tasks))
    else:
        rows = [_sweep_worker(t) for t in tasks]
    fieldnames = [key for key, _ in axes] + [
        "T",
        "converged",
        "signature",
        "closure",
        "max_force_residual",
        "error",
    ]
    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    n_ok = sum(1 for r in rows if not r["error"])
    print(f"wrote {args.out}: {len(rows)} points, {n_ok} analyzed cleanly")
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memodyn",
        description="memory-element oscillator simulation and verification",
    )
    parser.add_argument("--version", action="version", version=f"memodyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a model and write CSV + manifest")
    p.add_argument("--config", help="JSON config (params/initial_state/integrator)")
    p.add_argument("--out", default="trajectory.csv", help="output CSV path")
    p.add_argument("--plot-cols", help="comma-separated columns to print")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("analyze", help="period, signature and loop quantities")
    p.add_argument("trajectory", help="trajectory CSV from `memodyn simulate`")
    p.add_argument("--config", help="JSON config overriding the manifest")
    p.add_argument("--out", help="write the full JSON report here")
    p.add_argument("--transient-fraction", type=float, default=0.5)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--plot-cols", help="print these columns of the period window")
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("verify", help="force-law and reconstruction residuals")
    p.add_argument("trajectory", help="trajectory CSV from `memodyn simulate`")
    p.add_argument("--config", help="JSON config overriding the manifest")
    p.add_argument("--out", help="write residual reports as JSON here")
    p.add_argument("--force-tol", type=float, default=1e-5)
    p.add_argument("--reconstruct-tol", type=float, default=1e-6)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("equivalent", help="rms-matched linear G-C / R-L one-ports")
    p.add_argument("waveform", help="CSV: either t,v,i or a trajectory")
    p.add_argument("--config", help="JSON config overriding the manifest")
    p.add_argument("--kind", default="VCMR", help="element kind for role mapping")
    p.add_argument("--transient-fraction", type=float, default=0.5)
    p.add_argument("--out", help="write the equivalents as JSON here")
    p.set_defaults(fn=_cmd_equivalent)

    p = sub.add_parser("netlist", help="emit the op-amp realization deck")
    p.add_argument("--config", help="JSON config with fast/slow params")
    p.add_argument("--out", help="deck path (stdout when omitted)")
    p.set_defaults(fn=_cmd_netlist)

    p = sub.add_parser("sweep", help="parameter grid -> outcome table")
    p.add_argument("--config", required=True, help="JSON: {base, grid}")
    p.add_argument("--out", required=True, help="results CSV path")
    p.add_argument("--threads", type=int, help="workers (default MEMODYN_THREADS or 1)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled grid axes")
    p.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
