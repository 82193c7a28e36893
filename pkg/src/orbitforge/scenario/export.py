"""CSV, JSON-lines and SVG exporters for scenario outputs."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .scenarios import SERIES_KEYS, OutputBundle

COLUMNS = {
    "r_BN_N": ("rx_m", "ry_m", "rz_m"),
    "v_BN_N": ("vx_mps", "vy_mps", "vz_mps"),
    "sigma_BN": ("sigma_BN_1", "sigma_BN_2", "sigma_BN_3"),
    "omega_BN_B": ("omega_BN_B_x_radps", "omega_BN_B_y_radps", "omega_BN_B_z_radps"),
    "sigma_BR": ("sigma_BR_1", "sigma_BR_2", "sigma_BR_3"),
    "omega_BR_B": ("omega_BR_B_x_radps", "omega_BR_B_y_radps", "omega_BR_B_z_radps"),
    "cmd_torque": ("torque_x_Nm", "torque_y_Nm", "torque_z_Nm"),
    "elements": ("a_m", "e", "i_rad", "raan_rad", "argp_rad", "f_rad"),
}


class ExportError(OSError):
    pass


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write(path, text: str) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def export_csv(bundle: OutputBundle, path, keys: Optional[Sequence[str]] = None) -> Path:
    """Write ``t_s`` plus the selected series (all available by default)."""
    if len(bundle) == 0:
        raise ValueError("no samples to export")
    keys = [k for k in SERIES_KEYS if k in bundle] if keys is None else list(keys)
    for k in keys:
        if k not in bundle:
            raise KeyError(f"series {k!r} not in outputs")
    header = ["t_s"] + [c for k in keys for c in COLUMNS[k]]
    lines = [",".join(header)]
    t_s = bundle.t_s
    for row in range(len(bundle)):
        vals = [_fmt(t_s[row])]
        for k in keys:
            vals.extend(_fmt(x) for x in bundle[k][row])
        lines.append(",".join(vals))
    return _write(path, "\n".join(lines) + "\n")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, data


def _vec(v) -> list[float]:
    return [float(x) for x in v]


def export_telemetry_jsonl(bundle: OutputBundle, path) -> Path:
    """One JSON object per sample: time, spacecraft state, bodies, FSW mode."""
    if len(bundle) == 0:
        raise ValueError("no samples to export")
    lines = []
    t_s = bundle.t_s
    for k in range(len(bundle)):
        rec = {
            "t_s": float(t_s[k]),
            "sc": {
                "r": _vec(bundle["r_BN_N"][k]),
                "v": _vec(bundle["v_BN_N"][k]),
                "sigma": _vec(bundle["sigma_BN"][k]),
                "omega": _vec(bundle["omega_BN_B"][k]),
            },
            "bodies": [{"name": name, "r": _vec(r[k])} for name, r in bundle.bodies.items()],
            "mode": bundle.modes[k] if bundle.modes is not None else None,
        }
        lines.append(json.dumps(rec, separators=(",", ":")))
    return _write(path, "\n".join(lines) + "\n")


@dataclass
class PlotSpec:
    title: str = ""
    xlabel: str = "time [s]"
    ylabel: str = ""
    width: int = 640
    height: int = 400


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_svg_plot(x, series: Mapping[str, Sequence[float]], path, spec: Optional[PlotSpec] = None) -> Path:
    """Self-contained SVG line chart; identical input gives identical bytes."""
    spec = spec or PlotSpec()
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least 2 samples to plot")
    ys = {}
    for label, y in series.items():
        y = np.asarray(y, dtype=float)
        if y.shape != x.shape:
            raise ValueError(f"series {label!r} has {len(y)} points, x has {len(x)}")
        ys[label] = y
    if not ys:
        raise ValueError("nothing to plot")

    W, H = spec.width, spec.height
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = W - left - right, H - top - bottom
    x0, x1 = float(x.min()), float(x.max())
    y0 = min(float(np.nanmin(y)) for y in ys.values())
    y1 = max(float(np.nanmax(y)) for y in ys.values())
    if y1 == y0:
        # flat data: stretch the range to zero so the line sits on an axis
        y0, y1 = min(0.0, y0), max(0.0, y1)
        if y1 == y0:
            y1 = 1.0
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (y1 - v) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for tv in _ticks(x0, x1):
        px = sx(tv)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{tv:.4g}</text>')
    for tv in _ticks(y0, y1):
        py = sy(tv)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" font-size="11" '
                   f'text-anchor="end">{tv:.4g}</text>')
    for idx, (label, y) in enumerate(ys.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{left + pw - 5}" y="{top + 15 + 14 * idx}" font-size="11" '
                   f'text-anchor="end" fill="{color}">{_esc(label)}</text>')
    if spec.title:
        out.append(f'<text x="{W / 2:.1f}" y="22" font-size="14" text-anchor="middle">{_esc(spec.title)}</text>')
    if spec.xlabel:
        out.append(f'<text x="{left + pw / 2:.1f}" y="{H - 10}" font-size="12" '
                   f'text-anchor="middle">{_esc(spec.xlabel)}</text>')
    if spec.ylabel:
        out.append(f'<text x="15" y="{top + ph / 2:.1f}" font-size="12" text-anchor="middle" '
                   f'transform="rotate(-90 15 {top + ph / 2:.1f})">{_esc(spec.ylabel)}</text>')
    out.append("</svg>")
    return _write(path, "\n".join(out) + "\n")
