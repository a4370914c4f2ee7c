"""CSV ingestion and the tabular outputs of the command-line tools.

Sample files have a header row, one row per point with ``d`` numeric
columns, and an optional final ``weight`` column. Floats are written with
``repr`` so every file round-trips exactly and is byte-stable across runs.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .measures import DiscreteMeasure


class InputError(ValueError):
    """Malformed input file; the message carries the file and line number."""


def _fmt(x):
    return repr(float(x))


def read_samples(path) -> DiscreteMeasure:
    path = Path(path)
    try:
        handle = path.open(newline="")
    except OSError as exc:
        raise InputError(f"{path}: cannot open ({exc.strerror})") from exc
    with handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        while header is not None and not any(c.strip() for c in header):
            header = next(reader, None)
        if header is None:
            raise InputError(f"{path}: empty file (a header row is required)")
        names = [h.strip() for h in header]
        has_weight = names[-1].lower() == "weight"
        width = len(names)
        dim = width - 1 if has_weight else width
        if dim < 1:
            raise InputError(f"{path}:{reader.line_num}: header has no coordinate columns")
        for k, name in enumerate(names):
            try:
                float(name)
            except ValueError:
                continue
            raise InputError(f"{path}:{reader.line_num}: header row required, column {k + 1} is numeric ({name!r})")
        rows = []
        for row in reader:
            line = reader.line_num
            if not any(c.strip() for c in row):
                continue
            if len(row) != width:
                raise InputError(f"{path}:{line}: expected {width} columns, found {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                bad = next(c for c in row if not _is_float(c))
                raise InputError(f"{path}:{line}: not a number: {bad.strip()!r}") from None
            if not all(math.isfinite(v) for v in vals):
                raise InputError(f"{path}:{line}: non-finite value")
            if has_weight and vals[-1] < 0:
                raise InputError(f"{path}:{line}: negative weight {vals[-1]!r}")
            rows.append(vals)
    if not rows:
        raise InputError(f"{path}: no data rows")
    data = np.array(rows, dtype=np.float64)
    points = data[:, :dim]
    if not has_weight:
        return DiscreteMeasure(points)
    try:
        # round-off within 1e-9 of the simplex is renormalized, anything else rejected
        return DiscreteMeasure(points, data[:, -1])
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _is_float(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def coordinate_names(dim):
    return [f"x{k}" for k in range(dim)] if dim > 1 else ["x"]


def write_samples(path, measure: DiscreteMeasure, weights=True):
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(coordinate_names(measure.dim) + (["weight"] if weights else []))
        for pt, w in zip(measure.points, measure.weights):
            out.writerow([_fmt(v) for v in pt] + ([_fmt(w)] if weights else []))


def write_table(path, header, rows):
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([c if isinstance(c, (int, np.integer, str)) else _fmt(c) for c in row])


def write_trajectory(path, snapshots):
    """Rows ``step, particle_id, x...`` for each ``(step, particles)`` snapshot."""
    snapshots = list(snapshots)
    dim = snapshots[0][1].shape[1] if snapshots else 1

    def rows():
        for step, pts in snapshots:
            for pid, pt in enumerate(pts):
                yield [int(step), pid, *pt]

    write_table(path, ["step", "particle_id"] + coordinate_names(dim), rows())


def write_series(path, history):
    write_table(path, ["step", "divergence", "gap"],
                ([int(r.step), r.divergence, r.gap] for r in history))


def write_gaussian_curve(path, rows):
    write_table(path, ["eps", "m_R", "sigma_R", "divergence"], rows)


def write_sweep(path, rows):
    write_table(path, ["eps", "divergence", "divergence_over_eps", "gap"], rows)


def read_table(path):
    """Header and float rows of a CSV written by this module."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, np.array([[float(c) for c in row] for row in reader if row], dtype=np.float64)
