"""CSV and JSON serialization for series, sweep maps and field records.

Numbers are written with 17 significant digits so a write/read cycle
reproduces every float bit-for-bit. Nothing here emits timestamps or
machine identifiers: the same inputs always produce byte-identical
files.
"""
from __future__ import annotations

import csv
import io as _stdio
import json

import numpy as np

from .dynamics import FieldRecord
from .errors import ParseError
from .series import SpectrumSeries, SweepMap, unit_scale

# 17 significant digits round-trips IEEE doubles exactly
_FMT = "%.17g"

RECORD_COLUMNS = ("t_s", "reE", "imE", "reEt", "imEt", "reEr", "imEr")


def _fmt(x: float) -> str:
    return _FMT % float(x)


def _parse_float(text: str, column: str, row: int) -> float:
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"row {row}: column {column!r} is not a number: {text!r}") from None
    if not np.isfinite(value):
        raise ParseError(f"row {row}: column {column!r} is not finite: {text!r}")
    return value


def write_series(series: SpectrumSeries, path) -> None:
    """Two-column CSV with the series' own unit-suffixed header names."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([series.x_name, series.y_name])
        for xv, yv in zip(series.x, series.y):
            w.writerow([_fmt(xv), _fmt(yv)])


def read_series(path) -> SpectrumSeries:
    """Read a two-column CSV written by write_series.

    Column names must carry known unit suffixes; any NaN/inf cell or
    malformed number raises ParseError naming the row and column.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != 2:
        raise ParseError(f"{path}: expected a 2-column CSV with a header row")
    x_name, y_name = rows[0]
    # raises on unknown suffix before any data is parsed
    unit_scale(x_name)
    unit_scale(y_name)
    xs, ys = [], []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 2:
            raise ParseError(f"row {i}: expected 2 cells, got {len(row)}")
        xs.append(_parse_float(row[0], x_name, i))
        ys.append(_parse_float(row[1], y_name, i))
    return SpectrumSeries(x=np.array(xs), y=np.array(ys), x_name=x_name, y_name=y_name)


def write_record(record: FieldRecord, path) -> None:
    """Field record CSV: t_s, re/im of intracavity, transmitted, reflected."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RECORD_COLUMNS)
        for i in range(record.times.size):
            ev = record.intracavity[i]
            tv = record.transmitted[i]
            rv = record.reflected[i]
            w.writerow(
                [
                    _fmt(record.times[i]),
                    _fmt(ev.real),
                    _fmt(ev.imag),
                    _fmt(tv.real),
                    _fmt(tv.imag),
                    _fmt(rv.real),
                    _fmt(rv.imag),
                ]
            )


def read_record_arrays(path):
    """Read a field-record CSV back into (times, intracavity, transmitted, reflected)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != RECORD_COLUMNS:
        raise ParseError(f"{path}: expected header {','.join(RECORD_COLUMNS)}")
    cols = [[] for _ in RECORD_COLUMNS]
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(RECORD_COLUMNS):
            raise ParseError(f"row {i}: expected {len(RECORD_COLUMNS)} cells, got {len(row)}")
        for j, cell in enumerate(row):
            cols[j].append(_parse_float(cell, RECORD_COLUMNS[j], i))
    t, re_e, im_e, re_t, im_t, re_r, im_r = (np.array(c) for c in cols)
    return t, re_e + 1j * im_e, re_t + 1j * im_t, re_r + 1j * im_r


def write_map_csv(smap: SweepMap, path) -> None:
    """Long-form CSV: one row per (offset, frequency) cell."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([smap.dl_name, smap.freq_name, smap.psd_name])
        for i, dl in enumerate(smap.dl_grid):
            for j, fv in enumerate(smap.freq_grid):
                w.writerow([_fmt(dl), _fmt(fv), _fmt(smap.psd[i, j])])


def read_map_csv(path) -> SweepMap:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != 3:
        raise ParseError(f"{path}: expected a 3-column CSV with a header row")
    dl_name, freq_name, psd_name = rows[0]
    triples = []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 3:
            raise ParseError(f"row {i}: expected 3 cells, got {len(row)}")
        triples.append(
            (
                _parse_float(row[0], dl_name, i),
                _parse_float(row[1], freq_name, i),
                _parse_float(row[2], psd_name, i),
            )
        )
    dl_grid = sorted({t[0] for t in triples})
    freq_grid = sorted({t[1] for t in triples})
    dl_pos = {v: i for i, v in enumerate(dl_grid)}
    f_pos = {v: i for i, v in enumerate(freq_grid)}
    psd = np.full((len(dl_grid), len(freq_grid)), np.nan)
    for dl, fv, pv in triples:
        psd[dl_pos[dl], f_pos[fv]] = pv
    if np.any(np.isnan(psd)):
        raise ParseError(f"{path}: grid is not complete (missing cells)")
    return SweepMap(
        dl_grid=np.array(dl_grid),
        freq_grid=np.array(freq_grid),
        psd=psd,
        dl_name=dl_name,
        freq_name=freq_name,
        psd_name=psd_name,
    )


def map_to_json(smap: SweepMap) -> str:
    """Canonical JSON form of a sweep map (sorted keys, 17-digit floats)."""
    payload = {
        "dl_grid": [float(_fmt(v)) for v in smap.dl_grid],
        "freq_grid": [float(_fmt(v)) for v in smap.freq_grid],
        "psd_rows": [[float(_fmt(v)) for v in row] for row in smap.psd],
        "dl_name": smap.dl_name,
        "freq_name": smap.freq_name,
        "psd_name": smap.psd_name,
        "meta": {k: smap.meta[k] for k in sorted(smap.meta)},
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_map_json(smap: SweepMap, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(map_to_json(smap))


def read_map_json(path) -> SweepMap:
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    try:
        smap = SweepMap(
            dl_grid=np.array(payload["dl_grid"], dtype=float),
            freq_grid=np.array(payload["freq_grid"], dtype=float),
            psd=np.array(payload["psd_rows"], dtype=float),
            dl_name=payload.get("dl_name", "dl_over_halflambda"),
            freq_name=payload.get("freq_name", "freq_hz"),
            psd_name=payload.get("psd_name", "psd_v2_hz"),
            meta=payload.get("meta", {}),
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    if not np.all(np.isfinite(smap.psd)):
        raise ParseError(f"{path}: non-finite values in psd_rows")
    return smap


def series_to_text(series: SpectrumSeries) -> str:
    """The CSV text of a series, for in-memory comparisons."""
    buf = _stdio.StringIO()
    w = csv.writer(buf)
    w.writerow([series.x_name, series.y_name])
    for xv, yv in zip(series.x, series.y):
        w.writerow([_fmt(xv), _fmt(yv)])
    return buf.getvalue()
