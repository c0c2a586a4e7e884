"""Plain-text data files, CSV output, run manifests, and the SVG heatmap.

Matrix files (``.mtx`` here names this package's own plain-text layout):
line 1 is ``<rows> <cols> <field>`` with field ``real`` or ``complex``,
followed by one whitespace-separated line per row. Complex entries are
written ``re:im``. Floats carry 17 significant digits, so a written matrix
re-reads bit-identically. Vectors are stored as n x 1 matrices.
"""

import csv
import dataclasses
import json
from typing import Optional, Sequence

import numpy as np


class FileFormatError(Exception):
    """A data file does not conform to its expected layout."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_entry(x, complex_field: bool) -> str:
    if complex_field:
        return f"{_fmt(x.real)}:{_fmt(x.imag)}"
    return _fmt(x)


def write_matrix(path, A) -> None:
    A = np.atleast_2d(np.asarray(A))
    complex_field = bool(np.iscomplexobj(A))
    m, n = A.shape
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m} {n} {'complex' if complex_field else 'real'}\n")
        for i in range(m):
            fh.write(" ".join(_fmt_entry(A[i, j], complex_field) for j in range(n)))
            fh.write("\n")


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise FileFormatError(f"{path}: header must be '<rows> <cols> <field>'")
        try:
            m, n = int(header[0]), int(header[1])
        except ValueError as exc:
            raise FileFormatError(f"{path}: non-integer dimensions in header") from exc
        field = header[2]
        if field not in ("real", "complex"):
            raise FileFormatError(f"{path}: unknown field {field!r}")
        if m < 1 or n < 1:
            raise FileFormatError(f"{path}: dimensions must be positive")
        A = np.zeros((m, n), dtype=np.complex128 if field == "complex" else np.float64)
        for i in range(m):
            tokens = fh.readline().split()
            if len(tokens) != n:
                raise FileFormatError(f"{path}: row {i} has {len(tokens)} entries, expected {n}")
            for j, tok in enumerate(tokens):
                try:
                    if field == "complex":
                        re, _, im = tok.partition(":")
                        if not _:
                            raise ValueError("missing ':'")
                        A[i, j] = complex(float(re), float(im))
                    else:
                        A[i, j] = float(tok)
                except ValueError as exc:
                    raise FileFormatError(f"{path}: bad entry {tok!r} at ({i}, {j})") from exc
    return A


def write_vector(path, v) -> None:
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("expected a 1-d array")
    write_matrix(path, v.reshape(-1, 1))


def read_vector(path) -> np.ndarray:
    A = read_matrix(path)
    if 1 not in A.shape:
        raise FileFormatError(f"{path}: expected a single row or column, got {A.shape}")
    return A.reshape(-1)


def write_csv(path, records: Sequence, schema: Sequence[str]) -> None:
    """RFC-4180-style CSV with a header row; floats keep 17 significant
    digits so numeric values round-trip exactly. ``records`` may be dicts
    or dataclass instances carrying every schema field."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(schema)
        for rec in records:
            if dataclasses.is_dataclass(rec):
                rec = dataclasses.asdict(rec)
            row = []
            for name in schema:
                value = rec[name]
                if isinstance(value, bool) or value is None:
                    row.append("" if value is None else str(value).lower())
                elif isinstance(value, float):
                    row.append(_fmt(value))
                else:
                    row.append(str(value))
            writer.writerow(row)


def read_csv(path):
    """Read back a CSV written by ``write_csv``: (schema, rows-as-dicts)."""
    with open(path, "r", encoding="ascii", newline="") as fh:
        reader = csv.reader(fh)
        try:
            schema = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: empty CSV")
        rows = [dict(zip(schema, row)) for row in reader]
    return schema, rows


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run: the command, its full
    parameter set, the master seed, and the files it produced."""

    command: str
    parameters: dict
    master_seed: int
    version: str
    duration_seconds: float
    outputs: tuple


def write_manifest(path, manifest: RunManifest) -> None:
    payload = dataclasses.asdict(manifest)
    payload["outputs"] = list(manifest.outputs)
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path) -> RunManifest:
    with open(path, "r", encoding="ascii") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON") from exc
    try:
        return RunManifest(
            command=payload["command"], parameters=payload["parameters"],
            master_seed=payload["master_seed"], version=payload["version"],
            duration_seconds=payload["duration_seconds"],
            outputs=tuple(payload["outputs"]),
        )
    except KeyError as exc:
        raise FileFormatError(f"{path}: missing manifest key {exc}") from exc


_CELL = 24
_MARGIN_LEFT = 56
_MARGIN_TOP = 20
_MARGIN_BOTTOM = 40


def _axis_position(values, x) -> Optional[float]:
    """Piecewise-linear map from an axis value to a fractional cell index;
    None when x falls outside the axis range."""
    if x < values[0] or x > values[-1]:
        return None
    if len(values) == 1:
        return 0.0
    for i in range(len(values) - 1):
        lo, hi = values[i], values[i + 1]
        if lo <= x <= hi:
            frac = 0.0 if hi == lo else (x - lo) / (hi - lo)
            return i + frac
    return float(len(values) - 1)


def write_phase_svg(path, grid) -> None:
    """Render a phase grid: one gray rectangle per (m, s) cell, rate 0 black
    through rate 1 white, plus the per-s measurement bound as a polyline."""
    n_m, n_s = len(grid.m_values), len(grid.s_values)
    width = _MARGIN_LEFT + n_m * _CELL + 20
    height = _MARGIN_TOP + n_s * _CELL + _MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    for i_s, s in enumerate(grid.s_values):
        y = _MARGIN_TOP + i_s * _CELL
        for i_m, m in enumerate(grid.m_values):
            level = int(round(255 * grid.cells[i_s][i_m].rate))
            x = _MARGIN_LEFT + i_m * _CELL
            parts.append(
                f'<rect x="{x}" y="{y}" width="{_CELL}" height="{_CELL}" '
                f'fill="rgb({level},{level},{level})" stroke="#888" stroke-width="0.5"/>'
            )
        parts.append(
            f'<text x="{_MARGIN_LEFT - 6}" y="{y + _CELL - 8}" font-size="10" '
            f'text-anchor="end">s={s}</text>'
        )
    for i_m, m in enumerate(grid.m_values):
        x = _MARGIN_LEFT + i_m * _CELL + _CELL / 2
        parts.append(
            f'<text x="{x}" y="{height - _MARGIN_BOTTOM + 14}" font-size="10" '
            f'text-anchor="middle">{m}</text>'
        )
    if grid.overlay_m is not None:
        points = []
        for i_s, m_bound in enumerate(grid.overlay_m):
            if m_bound is None:
                continue
            pos = _axis_position(grid.m_values, m_bound)
            if pos is None:
                continue
            x = _MARGIN_LEFT + (pos + 0.5) * _CELL
            y = _MARGIN_TOP + (i_s + 0.5) * _CELL
            points.append(f"{x:.2f},{y:.2f}")
        if points:
            parts.append(
                f'<polyline points="{" ".join(points)}" fill="none" '
                f'stroke="#cc2222" stroke-width="1.5"/>'
            )
        parts.append(
            f'<text x="{_MARGIN_LEFT}" y="{height - 8}" font-size="10">'
            f'overlay: {grid.overlay_bound} (eps={grid.overlay_eps})</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")
