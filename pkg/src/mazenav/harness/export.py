"""CSV and SVG export of run records.

The CSV writer formats floats with ``repr`` so that identical runs give
byte-identical files.  Any object exposing the columns ``t, x, y, theta,
u, d, beta, mode, submode, sigma`` can be exported, which includes
symbolic-path traces.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

COLUMNS = ("t", "x", "y", "theta", "u", "d", "beta", "mode", "submode", "sigma")

COLORS = {
    ("A", "TURN"): "#1f77b4",
    ("A", "SMT"): "#17becf",
    ("B", "IT"): "#d62728",
    ("B", "SMEC"): "#2ca02c",
    ("B", "SMT"): "#ff7f0e",
    ("B", "BANG"): "#9467bd",
    ("SP", "SMT"): "#17becf",
    ("SP", "FOLLOW"): "#2ca02c",
}


class ExportError(OSError):
    """Unwritable or unreadable export path."""


@dataclass
class TrajectoryTable:
    """Columns read back from a CSV export."""

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    u: np.ndarray
    d: np.ndarray
    beta: np.ndarray
    mode: list
    submode: list
    sigma: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


def _fmt(v) -> str:
    return repr(float(v))


def csv_text(record) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    cols = [getattr(record, c) for c in COLUMNS]
    for row in zip(*cols):
        t, x, y, th, u, d, b, mode, sub, sg = row
        w.writerow([_fmt(t), _fmt(x), _fmt(y), _fmt(th), _fmt(u), _fmt(d), _fmt(b),
                    mode, sub, int(sg)])
    return buf.getvalue()


def read_csv(path) -> TrajectoryTable:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ExportError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != COLUMNS:
        raise ValueError(f"{path}: header must be {','.join(COLUMNS)}")
    body = rows[1:]

    def num(j):
        return np.array([float(r[j]) for r in body])

    return TrajectoryTable(num(0), num(1), num(2), num(3), num(4), num(5), num(6),
                           [r[7] for r in body], [r[8] for r in body],
                           np.array([int(r[9]) for r in body], dtype=int))


def mode_runs(record) -> list:
    """Maximal index ranges ``(i0, i1, label)`` of constant (mode, submode).

    Consecutive runs share their boundary sample so the drawn polylines
    connect.
    """
    labels = list(zip(record.mode, record.submode))
    runs = []
    i0 = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[i0]:
            runs.append((i0, min(i, len(labels) - 1), labels[i0]))
            i0 = i
    return runs


def _poly_attr(pts) -> str:
    return " ".join(f"{x:.6g},{y:.6g}" for x, y in pts)


def svg_text(record, obstacle=None, target=None, offsets=(), width: int = 800) -> str:
    """SVG drawing of the trajectory colored by mode.

    ``offsets`` lists distances whose equidistant curves are drawn dashed.
    """
    x = np.asarray(record.x, dtype=float)
    y = np.asarray(record.y, dtype=float)
    pts = [np.c_[x, y]] if len(x) else []
    shapes = []
    if obstacle is not None:
        body, _ = obstacle.offset_curve(0.0, tol=1e-3)
        pts.append(body)
        shapes.append(f'<polygon class="obstacle" points="{_poly_attr(body)}" '
                      f'fill="#bbbbbb" stroke="#444444" stroke-width="{{sw}}"/>')
        for d in offsets:
            c, _ = obstacle.offset_curve(float(d), tol=1e-3)
            pts.append(c)
            shapes.append(f'<polygon class="offset" points="{_poly_attr(c)}" fill="none" '
                          f'stroke="#888888" stroke-dasharray="{{dash}}" stroke-width="{{sw}}"/>')
    if target is not None:
        pts.append(np.asarray(target, dtype=float)[None, :])
    allp = np.vstack(pts) if pts else np.zeros((1, 2))
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = max(float(np.max(hi - lo)), 1.0)
    pad = 0.05 * span
    lo, hi = lo - pad, hi + pad
    w, h = hi - lo
    sw = span / 400.0
    height = int(round(width * h / w))
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="{lo[0]:.6g} {-hi[1]:.6g} {w:.6g} {h:.6g}">',
           '<g transform="scale(1,-1)">']
    out += [s.format(sw=f"{sw:.4g}", dash=f"{4 * sw:.4g}") for s in shapes]
    for i0, i1, label in mode_runs(record):
        color = COLORS.get(tuple(label), "#000000")
        seg = np.c_[x[i0:i1 + 1], y[i0:i1 + 1]]
        out.append(f'<polyline class="trajectory" data-mode="{label[0]}" data-submode="{label[1]}" '
                   f'points="{_poly_attr(seg)}" fill="none" stroke="{color}" '
                   f'stroke-width="{2 * sw:.4g}"/>')
    if target is not None:
        tx, ty = target
        out.append(f'<circle class="target" cx="{tx:.6g}" cy="{ty:.6g}" r="{4 * sw:.4g}" fill="#d62728"/>')
    out += ["</g>", "</svg>"]
    return "\n".join(out) + "\n"


def export(record, fmt: str, path, scenario=None) -> Path:
    """Write ``record`` as ``csv`` or ``svg``.

    For SVG, a scenario adds the obstacle, C(d_safe), C(d_trig) and the
    target.  Raises ``ExportError`` when the path cannot be written.
    """
    if fmt == "csv":
        text = csv_text(record)
    elif fmt == "svg":
        if scenario is not None:
            offs = [d for d in (scenario.nav.d_safe, scenario.nav.d_trig)
                    if d < scenario.obstacle.d_star]
            text = svg_text(record, scenario.obstacle, scenario.target, offs)
        else:
            text = svg_text(record)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    p = Path(path)
    try:
        p.write_text(text)
    except OSError as exc:
        raise ExportError(f"cannot write {p}: {exc}") from exc
    return p
