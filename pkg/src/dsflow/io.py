"""Trajectory serialization and SVG line charts.

Floats are written with ``repr`` so every value round-trips exactly and
identical runs produce byte-identical files.
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import SeriesParseError
from .verifier import af_check

SCHEMA_VERSION = 1


def functional_columns(n):
    cols = ["t"]
    cols += [f"A_{l}" for l in range(-1, n + 1)]
    cols += [f"B_{l}" for l in range(-1, n + 1)]
    cols += [f"mink_{l}" for l in range(1, n + 1)]
    cols += ["margin_space", "margin_cone", "margin_pinch", "max_r", "min_r", "max_u",
             "dt", "max_speed"]
    return cols


def record_row(rec, n):
    row = [rec.t]
    row += [rec.A[l] for l in range(-1, n + 1)]
    row += [rec.B[l] for l in range(-1, n + 1)]
    row += [rec.minkowski_residual[l] for l in range(1, n + 1)]
    row += [rec.margin_space, rec.margin_cone, rec.margin_pinch, rec.max_r, rec.min_r,
            rec.max_u, rec.dt, rec.max_speed]
    return row


def _fmt(x):
    return repr(float(x))


def write_functionals_csv(path, records, n):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(functional_columns(n))
        for rec in records:
            w.writerow([_fmt(x) for x in record_row(rec, n)])


def write_profiles_csv(path, times, profiles):
    N = len(profiles[0]) - 1 if profiles else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"r_{j}" for j in range(N + 1)])
        for t, r in zip(times, profiles):
            w.writerow([_fmt(t)] + [_fmt(x) for x in r])


def read_series_csv(path):
    """Parse a numeric CSV with a header row into ``(columns, ndarray)``.

    Raises
    ------
    SeriesParseError
        Naming the file and line of the first malformed row.
    """
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise SeriesParseError(path, 0, str(exc)) from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SeriesParseError(path, 1, "missing header row") from None
        if not header or header[0] != "t":
            raise SeriesParseError(path, 1, "header must start with 't'")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise SeriesParseError(
                    path, lineno, f"expected {len(header)} fields, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError as exc:
                raise SeriesParseError(path, lineno, str(exc)) from None
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return header, data


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def record_dict(rec):
    return {
        "t": rec.t,
        "A": {str(l): v for l, v in rec.A.items()},
        "B": {str(l): v for l, v in rec.B.items()},
        "B_minus1_dual": rec.B_minus1_dual,
        "minkowski_residual": {str(l): v for l, v in rec.minkowski_residual.items()},
        "margins": {"space": rec.margin_space, "cone": rec.margin_cone,
                    "pinch": rec.margin_pinch},
        "max_r": rec.max_r, "min_r": rec.min_r, "max_u": rec.max_u,
    }


def af_gap_series(header, data, k):
    """AF gap at every row of a functionals table."""
    n = max(int(c[2:]) for c in header if c.startswith("B_"))
    ib, im = header.index(f"B_{k}"), header.index("B_-1")
    return np.array([af_check(row[ib], row[im], n, k) for row in data])


# -- SVG -------------------------------------------------------------------

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def line_chart(series, title="", xlabel="", ylabel="", width=640, height=400):
    """Render ``{label: (x, y)}`` as a standalone SVG string.

    The plotted numbers are embedded as XML comments so the figure can be
    checked against its source data.  An empty mapping gives empty axes.
    """
    ml, mr, mt, mb = 70, 150, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xs = [np.asarray(x, float) for x, _ in series.values()]
    ys = [np.asarray(y, float) for _, y in series.values()]
    finite_x = np.concatenate([x[np.isfinite(x)] for x in xs]) if xs else np.array([])
    finite_y = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.array([])
    x0, x1 = _range(finite_x)
    y0, y1 = _range(finite_y)

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- title: {_esc(title)} -->",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{ml + pw / 2}" y="{mt - 15}" text-anchor="middle" font-size="14">'
        f"{_esc(title)}</text>",
        f'<text x="{ml + pw / 2}" y="{height - 12}" text-anchor="middle" font-size="12">'
        f"{_esc(xlabel)}</text>",
        f'<text x="15" y="{mt + ph / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {mt + ph / 2})">{_esc(ylabel)}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{sx(xv):.2f}" y="{mt + ph + 18}" text-anchor="middle" '
                   f'font-size="10">{xv:.4g}</text>')
        out.append(f'<text x="{ml - 5}" y="{sy(yv):.2f}" text-anchor="end" '
                   f'font-size="10">{yv:.6g}</text>')
    for i, (label, (x, y)) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        x, y = np.asarray(x, float), np.asarray(y, float)
        data = ";".join(f"{a!r},{b!r}" for a, b in zip(x.tolist(), y.tolist()))
        out.append(f"<!-- data {_esc(label)}: {data} -->")
        ok = np.isfinite(x) & np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        if pts:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                       f'points="{pts}"/>')
        ly = mt + 15 * (i + 1)
        out.append(f'<line x1="{ml + pw + 10}" y1="{ly}" x2="{ml + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{ml + pw + 35}" y="{ly + 4}" font-size="11">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _range(v):
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi - lo <= 1e-12 * max(abs(lo), abs(hi), 1e-300):
        pad = max(abs(lo) * 1e-3, 1e-12) if math.isfinite(lo) else 1.0
        return lo - pad, hi + pad
    return lo, hi


def _esc(s):
    return (str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace("--", "- -"))
