"""CSV persistence for propagator traces.

Layout: one '#'-prefixed JSON metadata line, then a header row and one row
per node with t, re_u, im_u, abs_u (extra columns pass through untouched).
The metadata carries the grid and, when the caller supplies one, the full
run configuration, so a trace file is self-describing.
"""

import csv
import json

import numpy as np

from .errors import ConfigError
from .volterra import PropagatorTrace, TimeGrid

FORMAT_NAME = "drivenlevel-trace"
FORMAT_VERSION = 1


def _fmt(x):
    return format(float(x), ".17g")


def write_trace(path, trace, config=None, extra_columns=None):
    """Write a trace to CSV.

    extra_columns: optional dict name -> array (same length as the trace),
    appended after abs_u.  config: JSON-serializable dict stored in the
    metadata line.
    """
    grid = trace.grid
    meta = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "t0": grid.t0,
        "h": grid.h,
        "n_steps": grid.n_steps,
    }
    if config is not None:
        meta["config"] = config
    extras = extra_columns or {}
    for name, col in extras.items():
        if len(col) != grid.n_steps + 1:
            raise ValueError(f"column {name!r} length {len(col)} does not "
                             f"match the grid ({grid.n_steps + 1} nodes)")
    t = trace.times()
    u = trace.values
    with open(path, "w", newline="") as fh:
        fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "re_u", "im_u", "abs_u"] + list(extras))
        cols = [t, u.real, u.imag, np.abs(u)]
        cols += [np.asarray(extras[name], dtype=float) for name in extras]
        for row in zip(*cols):
            writer.writerow([_fmt(x) for x in row])


def read_trace(path):
    """Read a trace written by write_trace; returns (trace, metadata)."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ConfigError(f"{path}: missing metadata line")
        try:
            meta = json.loads(first.lstrip("#").strip())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: bad metadata line: {exc}") from None
        if meta.get("format") != FORMAT_NAME:
            raise ConfigError(f"{path}: not a {FORMAT_NAME} file")
        reader = csv.reader(fh)
        header = next(reader)
        if header[:4] != ["t", "re_u", "im_u", "abs_u"]:
            raise ConfigError(f"{path}: unexpected columns {header[:4]}")
        rows = [row for row in reader if row]
    grid = TimeGrid(float(meta["t0"]), float(meta["h"]), int(meta["n_steps"]))
    if len(rows) != grid.n_steps + 1:
        raise ConfigError(
            f"{path}: {len(rows)} rows but metadata promises {grid.n_steps + 1}")
    data = np.array([[float(r[0]), float(r[1]), float(r[2])] for r in rows])
    if not np.allclose(data[:, 0], grid.times(), rtol=0.0, atol=1e-9 * grid.h):
        raise ConfigError(f"{path}: time column disagrees with the grid")
    values = data[:, 1] + 1j * data[:, 2]
    return PropagatorTrace(grid, values), meta
