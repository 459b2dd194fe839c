"""Field serialization (CSV with a header line) and image export."""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np
from PIL import Image

from .grid import Grid, ScalarField

_HEADER_RE = re.compile(r"^# cdii-field N=(\d+) a=(\S+) b=(\S+)$")


def write_field(path, field: ScalarField) -> None:
    """Write a field as CSV: header, then one row of y-index j per line.

    Values use 17 significant digits so read_field round-trips bit-exactly.
    """
    g = field.grid
    lines = [f"# cdii-field N={g.n_cells} a={g.a:.17g} b={g.b:.17g}"]
    for row in field.mat:
        lines.append(",".join(f"{v:.17g}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_field(path) -> ScalarField:
    """Read a field file, validating the header and dimensions."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty field file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError(f"{path}: malformed header {lines[0]!r}")
    n_cells = int(m.group(1))
    grid = Grid(n_cells, float(m.group(2)), float(m.group(3)))
    rows = lines[1:]
    if len(rows) != grid.n_nodes:
        raise ValueError(f"{path}: expected {grid.n_nodes} data rows, found {len(rows)}")
    data = np.empty((grid.n_nodes, grid.n_nodes))
    for j, row in enumerate(rows):
        parts = row.split(",")
        if len(parts) != grid.n_nodes:
            raise ValueError(f"{path}: row {j} has {len(parts)} values, expected {grid.n_nodes}")
        data[j] = [float(p) for p in parts]
    return ScalarField(grid, data)


def render_png(field: ScalarField, path, value_range: tuple[float, float] | None = None) -> None:
    """Write a grayscale raster, one pixel per node, linear intensity map."""
    vals = field.mat
    if not np.all(np.isfinite(vals)):
        raise ValueError("field contains non-finite values; refusing to render")
    if value_range is None:
        lo, hi = float(vals.min()), float(vals.max())
    else:
        lo, hi = value_range
    span = hi - lo
    if span <= 0:
        scaled = np.full(vals.shape, 127, dtype=np.uint8)
    else:
        scaled = np.clip((vals - lo) / span, 0.0, 1.0)
        scaled = np.round(255.0 * scaled).astype(np.uint8)
    # image row 0 is the top of the picture, i.e. the largest y
    Image.fromarray(scaled[::-1, :], mode="L").save(path)
