"""Deterministic JSON, CSV and SVG writers for reports."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

SCHEMA = "edgeindex/1"


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
    return path


def svg_spectrum(eigenvalues: Sequence[float], gaps: Sequence[tuple[float, float]] = (),
                 width: int = 640, height: int = 80, title: str = "") -> str:
    """Strip plot: one tick per eigenvalue, bulk gaps shaded."""
    lam = np.asarray(eigenvalues, dtype=float)
    lo = min(lam.min(), *(g[0] for g in gaps)) if len(gaps) else lam.min()
    hi = max(lam.max(), *(g[1] for g in gaps)) if len(gaps) else lam.max()
    span = hi - lo or 1.0
    pad = 20

    def sx(v: float) -> float:
        return pad + (v - lo) / span * (width - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for a, b in gaps:
        parts.append(f'<rect x="{sx(a):.2f}" y="15" width="{sx(b) - sx(a):.2f}" '
                     f'height="{height - 35}" fill="#f2c7c7"/>')
    for v in lam:
        parts.append(f'<line x1="{sx(v):.2f}" y1="18" x2="{sx(v):.2f}" y2="{height - 23}" '
                     f'stroke="black" stroke-width="0.5"/>')
    parts.append(f'<text x="{pad}" y="{height - 5}" font-size="10">{lo:.3f}</text>')
    parts.append(f'<text x="{width - pad}" y="{height - 5}" font-size="10" '
                 f'text-anchor="end">{hi:.3f}</text>')
    if title:
        parts.append(f'<text x="{width / 2}" y="11" font-size="10" text-anchor="middle">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_heatmap(coords: np.ndarray, values: np.ndarray, cell: int = 8, title: str = "") -> str:
    """Site heat map with a diverging red/blue scale centred at zero."""
    coords = np.asarray(coords)
    values = np.asarray(values, dtype=float)
    w = int(coords[:, 0].max()) + 1
    h = int(coords[:, 1].max()) + 1
    vmax = float(np.abs(values).max()) or 1.0
    top = 14
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * cell}" height="{h * cell + top}">',
             f'<rect width="{w * cell}" height="{h * cell + top}" fill="#dddddd"/>']
    for (x, y), v in zip(coords, values):
        t = max(-1.0, min(1.0, v / vmax))
        if t >= 0:
            r, g, b = 255, int(255 * (1 - t)), int(255 * (1 - t))
        else:
            r, g, b = int(255 * (1 + t)), int(255 * (1 + t)), 255
        # y grows upwards in the picture
        py = top + (h - 1 - int(y)) * cell
        parts.append(f'<rect x="{int(x) * cell}" y="{py}" width="{cell}" height="{cell}" '
                     f'fill="rgb({r},{g},{b})"/>')
    if title:
        parts.append(f'<text x="2" y="11" font-size="10">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
