"""Command line interface.

Subcommands:
    run       single trajectory -> trace.csv, states.csv, optional VTK
    sweep     descending-viscosity study -> sweep.csv + per-viscosity traces
    check     re-audit an existing run directory or trace CSV
    mesh-gen  write the configured mesh in the plain ASCII format
    oracle    run the brute-force oracle suite -> oracle.csv

Exit codes: 0 success, 1 invariant violation, 2 configuration error,
3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .audit import audit_run
from .config import load_config
from .errors import ConfigError, MeshFormatError, NonConvergenceError, PffracError
from .evolution import energy_inequality_report, prepare_initial_state, run_evolution
from .fem_core import write_mesh
from .outputs import (
    delta_tag,
    ensure_dir,
    write_oracle_csv,
    write_pair_csv,
    write_reparam_csv,
    write_states_csv,
    write_sweep_csv,
    write_trace_csv,
    write_vtk,
)
from .viscosity import delta_sweep

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pffrac", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("config", help="configuration file")
        sp.add_argument("-o", "--output", default=None, help="output directory (or file for mesh-gen)")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized oracle probes")
        sp.add_argument("--quiet", action="store_true", help="suppress progress output")

    common(sub.add_parser("run", help="run a single trajectory"))
    common(sub.add_parser("sweep", help="run a descending-viscosity sweep"))
    sp = sub.add_parser("check", help="audit an existing run")
    sp.add_argument("path", help="run directory or trace CSV")
    sp.add_argument("--quiet", action="store_true")
    common(sub.add_parser("mesh-gen", help="generate the configured mesh"))
    sp = sub.add_parser("oracle", help="run the oracle suite")
    sp.add_argument("-o", "--output", default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--quiet", action="store_true")
    return p


def _out_dir(args, cfg=None) -> str:
    if args.output:
        return args.output
    if cfg is not None and cfg.output_dir:
        return cfg.output_dir
    return os.environ.get("PFF_OUTPUT_DIR", ".")


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    evo = cfg.evolution()
    out = ensure_dir(_out_dir(args, cfg))
    u0, z0 = prepare_initial_state(evo, cfg.z_seed())
    traj = run_evolution(evo, (u0, z0))

    write_trace_csv(traj, os.path.join(out, "trace.csv"))
    write_states_csv(traj, os.path.join(out, "states.csv"))
    with open(os.path.join(out, "config_used.ini"), "w") as fh:
        fh.write(cfg.raw_text)
    if cfg.vtk_every > 0:
        for i in range(0, len(traj.times), cfg.vtk_every):
            write_vtk(traj.us[i], traj.zs[i], evo.mesh, os.path.join(out, f"state_{i:05d}.vtk"))

    audit = energy_inequality_report(traj)
    min_z = min(r.min_z for r in traj.records)
    if min_z < -evo.tol_z:
        _say(args, f"note: phase field dipped to {min_z:.3e} below zero (monitored, not constrained)")
    max_rate = max((evo.delta * r.rate_L2 for r in traj.records), default=0.0)
    _say(args, f"run complete: {cfg.steps} steps, F(T) = {traj.records[-1].F:.8g}, "
               f"arc length = {traj.records[-1].cum_arc_len:.8g}, "
               f"max viscous rate = {max_rate:.3e}")
    _say(args, f"energy audit: fitted remainder constant {audit.c_fitted:.3g}, "
               f"min slack {audit.slack_fitted.min():.3e}")
    if not audit.passed:
        print(f"energy inequality violated at step {int(audit.violations[0])}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not cfg.delta_list:
        raise ConfigError(f"{args.config}: [viscosity] delta_list is required for a sweep")
    out = ensure_dir(_out_dir(args, cfg))
    evo = cfg.evolution(delta=cfg.delta_list[0])
    u0, z0 = prepare_initial_state(evo, cfg.z_seed())
    report = delta_sweep(evo, cfg.delta_list, (u0, z0), tau_over_delta=cfg.tau_over_delta)

    write_sweep_csv(report, os.path.join(out, "sweep.csv"))
    for j, entry in enumerate(report.entries):
        tag = delta_tag(entry.delta)
        write_trace_csv(entry.trajectory, os.path.join(out, f"trace_delta_{tag}.csv"))
        write_reparam_csv(entry, os.path.join(out, f"reparam_delta_{tag}.csv"))
        if j + 1 < len(report.entries):
            nxt = report.entries[j + 1]
            rp, rq = entry.reparam, nxt.reparam
            dist = np.array([evo.mesh.norm_L2h(rp.z[p] - rq.z[p]) for p in range(rp.s.size)])
            write_pair_csv(rp.s, dist, os.path.join(out, f"reparam_dist_{tag}_vs_{delta_tag(nxt.delta)}.csv"))
        _say(args, f"delta {entry.delta:g}: steps {entry.steps}, S = {entry.arc_length:.8g}, "
                   f"max advancing slope {entry.max_advancing_slope:.3e}")
    return EXIT_OK


def _cmd_check(args) -> int:
    result = audit_run(args.path)
    for msg in result.failures:
        print(f"FAIL {msg}", file=sys.stderr)
    _say(args, f"{result.checks_run} checks, {len(result.failures)} failures")
    return EXIT_OK if result.passed else EXIT_INVARIANT


def _cmd_mesh_gen(args) -> int:
    cfg = load_config(args.config)
    mesh = cfg.mesh()
    target = args.output or "mesh.txt"
    if os.path.isdir(target):
        target = os.path.join(target, "mesh.txt")
    write_mesh(mesh, target)
    _say(args, f"wrote {mesh.n_nodes} nodes / {mesh.n_tris} triangles to {target}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    from .oracle_suite import run_oracle_suite

    out = ensure_dir(_out_dir(args))
    verdicts = run_oracle_suite(seed=args.seed)
    write_oracle_csv(verdicts, os.path.join(out, "oracle.csv"))
    bad = [v for v in verdicts if not v.passed]
    for v in verdicts:
        _say(args, v.csv_row())
    return EXIT_OK if not bad else EXIT_INVARIANT


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "check": _cmd_check,
        "mesh-gen": _cmd_mesh_gen,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, MeshFormatError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        where = f" (step {exc.step})" if exc.step is not None else ""
        print(f"solver did not converge{where}: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except PffracError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
