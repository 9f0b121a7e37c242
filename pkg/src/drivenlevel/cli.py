"""Command-line front end.

Subcommands: bound-states, u0, evolve, comb, oracle-compare, sweep.
Each takes --config FILE plus any number of --set KEY.PATH=VALUE overrides;
results go to stdout as JSON and, for traces, to CSV/SVG files named in the
config's output block.  Exit codes: 0 success, 2 configuration problem,
3 numerical failure.  Output files are written to NAME.partial first and
renamed only on success, so an interrupted run never leaves a file that
looks finished.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import oracle
from .comb import comb_reports
from .config import load_config
from .errors import ConfigError, DrivenLevelError
from .kernel import kernel_for
from .spectral import Semicircle, compute_u0, find_bound_states
from .svgplot import line_plot
from .sweep import SweepAxis, SweepSpec, run_sweep
from .traceio import write_trace
from .volterra import PropagatorTrace, aligned_grid, evolve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _emit(path, write_fn):
    """Write via a .partial file and rename into place on success."""
    tmp = path + ".partial"
    write_fn(tmp)
    os.replace(tmp, path)


def _print_json(obj):
    print(json.dumps(obj, indent=2))


def _make_kernel(sd, grid):
    return kernel_for(sd, grid.h, grid.h * grid.n_steps,
                      analytic=isinstance(sd, Semicircle))


def _svg_from_traces(path, labeled_traces, title):
    curves = [(tr.times(), tr.magnitude(), label)
              for tr, label in labeled_traces]
    _emit(path, lambda p: line_plot(p, curves, title=title,
                                    xlabel="t", ylabel="|u|"))


def cmd_bound_states(cfg, args):
    states = find_bound_states(cfg.sd, cfg.eps_on)
    payload = [{"energy": s.energy, "residue": s.residue} for s in states]
    _print_json(payload)
    report = cfg.output.get("report")
    if report:
        _emit(report, lambda p: _dump_json_file(p, payload))
    return EXIT_OK


def _dump_json_file(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def cmd_u0(cfg, args):
    cfg.require_grid()
    grid = aligned_grid(0.0, cfg.t_max, cfg.h)
    values = compute_u0(cfg.sd, cfg.eps_on, grid.times())
    trace = PropagatorTrace(grid, values)
    out = cfg.output.get("trace", "u0.csv")
    _emit(out, lambda p: write_trace(p, trace, config=cfg.to_dict()))
    svg = cfg.output.get("svg")
    if svg:
        _svg_from_traces(svg, [(trace, "driving-free")], "|u0(t)|")
    _print_json({"trace": out, "n_nodes": grid.n_steps + 1,
                 "final_magnitude": float(np.abs(values[-1]))})
    return EXIT_OK


def cmd_evolve(cfg, args):
    cfg.require_grid()
    cfg.require_drive()
    grid = aligned_grid(0.0, cfg.t_max, cfg.h, cfg.drive)
    trace = evolve(_make_kernel(cfg.sd, grid), cfg.eps_s, cfg.drive, grid)

    extra = None
    labeled = [(trace, "driven")]
    if cfg.output.get("overlay_u0"):
        u0 = compute_u0(cfg.sd, cfg.eps_on, grid.times())
        extra = {"re_u0": u0.real, "im_u0": u0.imag, "abs_u0": np.abs(u0)}
        labeled.append((PropagatorTrace(grid, u0), "driving-free"))

    out = cfg.output.get("trace", "trace.csv")
    _emit(out, lambda p: write_trace(p, trace, config=cfg.to_dict(),
                                     extra_columns=extra))
    svg = cfg.output.get("svg")
    if svg:
        _svg_from_traces(svg, labeled, "|u(t)|")
    _print_json({"trace": out, "h": grid.h, "t_end": grid.t_end,
                 "final_magnitude": float(np.abs(trace.values[-1]))})
    return EXIT_OK


def cmd_comb(cfg, args):
    cfg.require_drive()
    states = find_bound_states(cfg.sd, cfg.eps_on)
    reports = comb_reports(states, cfg.drive, cfg.sd.band)
    payload = {"states": [dataclasses.asdict(r) for r in reports]}
    _print_json(payload)
    report = cfg.output.get("report")
    if report:
        _emit(report, lambda p: _dump_json_file(p, payload))
    return EXIT_OK


def cmd_oracle_compare(cfg, args):
    cfg.require_grid()
    cfg.require_drive()
    grid = aligned_grid(0.0, cfg.t_max, cfg.h, cfg.drive)
    trace = evolve(_make_kernel(cfg.sd, grid), cfg.eps_s, cfg.drive, grid)
    model = oracle.discretize(cfg.sd, cfg.n_modes, cfg.eps_s)
    ref = oracle.propagate(model, cfg.drive, grid)
    deviation = oracle.compare(trace, ref)
    _print_json({"n_modes": cfg.n_modes,
                 "trust_horizon": model.trust_horizon(),
                 "t_end": grid.t_end,
                 "max_abs_deviation": deviation})
    return EXIT_OK


def cmd_sweep(cfg, args):
    cfg.require_grid()
    cfg.require_drive()
    block = cfg.sweep
    if not block:
        raise ConfigError("this command needs a sweep block")
    if cfg.window is None:
        raise ConfigError("sweep needs a window [t1, t2]")
    try:
        axes = tuple(SweepAxis(a["name"], tuple(a["values"]))
                     for a in block["axes"])
        out = block["out"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad sweep block: {exc}") from None
    spec = SweepSpec(sd=cfg.sd, eps_s=cfg.eps_s, drive=cfg.drive,
                     t_max=cfg.t_max, h=cfg.h, window=cfg.window,
                     axes=axes, out_path=out)
    computed = run_sweep(spec, workers=block.get("workers"))
    _print_json({"out": out, "rows_computed": computed,
                 "rows_total": spec.n_points()})
    return EXIT_OK


_COMMANDS = {
    "bound-states": cmd_bound_states,
    "u0": cmd_u0,
    "evolve": cmd_evolve,
    "comb": cmd_comb,
    "oracle-compare": cmd_oracle_compare,
    "sweep": cmd_sweep,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="drivenlevel",
        description="Driven-level reservoir dynamics: bound states, "
                    "propagator traces, comb reports, sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="JSON configuration file")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY.PATH=VALUE",
                       help="override a config entry (repeatable)")
        p.set_defaults(func=fn)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DrivenLevelError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
