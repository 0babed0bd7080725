"""Artifact serialization: CSV/JSON/SVG writers with atomic replace semantics.

Floats are formatted with ``repr`` (shortest round-trip form), so identical
inputs always produce byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .embed import FeatureMatrix


class DataFileError(ValueError):
    """Unreadable or inconsistent data file; carries the line number when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc += str(path)
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


def _fmt(x: float) -> str:
    return repr(float(x))


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def matrix_csv(ids: list[str], labels: list[str], values: np.ndarray, prefix: str) -> str:
    n, d = values.shape
    header = "id,label," + ",".join(f"{prefix}{j}" for j in range(d))
    lines = [header]
    for i in range(n):
        lines.append(f"{ids[i]},{labels[i]}," + ",".join(_fmt(v) for v in values[i]))
    return "\n".join(lines) + "\n"


def write_feature_csv(path: str, fm: FeatureMatrix) -> None:
    atomic_write_text(path, matrix_csv(fm.point_ids, fm.labels, fm.values, "f"))


def write_embedding_csv(path: str, ids: list[str], labels: list[str], Y: np.ndarray) -> None:
    atomic_write_text(path, matrix_csv(ids, labels, Y, "y"))


def read_matrix_csv(path: str) -> tuple[list[str], list[str], np.ndarray]:
    """Read an ``id,label,<cols...>`` CSV back into ids, labels and values."""
    if not os.path.exists(path):
        raise DataFileError("file not found", path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataFileError("empty file", path)
    header = lines[0].split(",")
    if len(header) < 3 or header[0] != "id" or header[1] != "label":
        raise DataFileError("header must start with 'id,label,'", path, 1)
    width = len(header)
    ids: list[str] = []
    labels: list[str] = []
    rows: list[list[float]] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != width:
            raise DataFileError(
                f"expected {width} fields, found {len(parts)}", path, line_no
            )
        ids.append(parts[0])
        labels.append(parts[1])
        try:
            rows.append([float(v) for v in parts[2:]])
        except ValueError as exc:
            raise DataFileError(f"non-numeric value ({exc})", path, line_no) from exc
    if not rows:
        raise DataFileError("no data rows", path)
    return ids, labels, np.array(rows)


def write_curve_csv(path: str, curve: dict[int, float]) -> None:
    lines = ["k,value"] + [f"{k},{_fmt(v)}" for k, v in sorted(curve.items())]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_affinity_csv(path: str, values: np.ndarray) -> None:
    lines = [",".join(_fmt(v) for v in row) for row in values]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_density_csv(path: str, ids: list[str], roles: list[str], weights, p) -> None:
    lines = ["id,role,weight,p"]
    for i, rec_id in enumerate(ids):
        lines.append(f"{rec_id},{roles[i]},{_fmt(weights[i])},{_fmt(p[i])}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# fixed categorical palette so reruns color classes identically
PALETTE = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1b9e77", "#7570b3",
]


def scatter_svg(
    Y: np.ndarray,
    labels: list[str],
    title: str = "",
    size: int = 640,
    timestamp: str | None = None,
) -> str:
    """Deterministic SVG scatter plot colored by class label.

    No timestamp is embedded unless one is passed explicitly, so identical
    inputs yield identical bytes.
    """
    n = Y.shape[0]
    margin, legend_w = 50, 150
    w, h = size + legend_w, size
    lo = Y.min(axis=0)
    hi = Y.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)

    def sx(v: float) -> float:
        return margin + (v - lo[0]) / span[0] * (size - 2 * margin)

    def sy(v: float) -> float:
        return h - margin - (v - lo[1]) / span[1] * (size - 2 * margin)

    classes = sorted(set(labels))
    color = {c: PALETTE[i % len(PALETTE)] for i, c in enumerate(classes)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">'
    ]
    if timestamp is not None:
        parts.append(f"<!-- generated {timestamp} -->")
    parts.append(f'<rect width="{w}" height="{h}" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{size / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    # axes
    parts.append(
        f'<line x1="{margin}" y1="{h - margin}" x2="{size - margin}" '
        f'y2="{h - margin}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{h - margin}" '
        f'stroke="black"/>'
    )
    for frac in (0.0, 0.5, 1.0):
        xv = lo[0] + frac * span[0]
        yv = lo[1] + frac * span[1]
        parts.append(
            f'<text x="{sx(xv):.1f}" y="{h - margin + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{xv:.3g}</text>'
        )
        parts.append(
            f'<text x="{margin - 6}" y="{sy(yv):.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{yv:.3g}</text>'
        )
    parts.append(
        f'<text x="{size / 2:.1f}" y="{h - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">y0</text>'
    )
    parts.append(
        f'<text x="16" y="{h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {h / 2:.1f})">y1</text>'
    )
    for i in range(n):
        parts.append(
            f'<circle cx="{sx(Y[i, 0]):.2f}" cy="{sy(Y[i, 1]):.2f}" r="3" '
            f'fill="{color[labels[i]]}" fill-opacity="0.75"/>'
        )
    # legend
    lx = size + 10
    parts.append(
        f'<text x="{lx}" y="{margin}" font-family="sans-serif" '
        f'font-size="12" font-weight="bold">classes</text>'
    )
    for i, c in enumerate(classes):
        cy = margin + 20 + i * 18
        parts.append(f'<circle cx="{lx + 6}" cy="{cy - 4}" r="5" fill="{color[c]}"/>')
        parts.append(
            f'<text x="{lx + 18}" y="{cy}" font-family="sans-serif" '
            f'font-size="11">{c}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
