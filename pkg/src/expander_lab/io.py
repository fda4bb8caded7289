"""CSV and JSON readers and writers for profiles, shooting runs, area series and reports."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .geometry import ExpanderSpec
from .profile import ProfilePath, Termination

PROFILE_HEADER = ["s", "u", "v", "theta"]
AREA_HEADER = ["r", "area"]


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(header, rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _read_rows(source, header) -> np.ndarray:
    text = Path(source).read_text(encoding="utf-8") if not _is_text(source) else source
    reader = csv.reader(io.StringIO(text))
    got = next(reader, None)
    if got is None or [c.strip() for c in got] != header:
        raise ValueError(f"expected header {','.join(header)}, got {got}")
    rows = [[float(c) for c in row] for row in reader if row]
    return np.asarray(rows, dtype=float).reshape(-1, len(header))


def _is_text(source) -> bool:
    return isinstance(source, str) and "\n" in source


def write_profile_csv(path_obj: ProfilePath, dest=None) -> str:
    """Samples as "s,u,v,theta"; returns the CSV text and writes it to dest if given."""
    rows = zip(path_obj.s, path_obj.u, path_obj.v, path_obj.theta)
    return _write_rows(PROFILE_HEADER, rows, dest)


def read_profile_csv(source, lam: float, n: int) -> ProfilePath:
    """Inverse of write_profile_csv. source is a file path or the CSV text itself.

    The CSV carries no termination record, so the loaded path reports ReachedSmax
    unless its first and last samples both sit on the axis.
    """
    data = _read_rows(source, PROFILE_HEADER)
    if len(data) < 2:
        raise ValueError("profile CSV needs at least two rows")
    s, u, v, th = data.T
    step = float(np.median(np.diff(s)))
    if v[0] == 0.0 and v[-1] == 0.0 and len(s) > 2:
        term = Termination("AxisHit", float(s[-1]), float(th[-1]))
    else:
        term = Termination("ReachedSmax", float(s[-1]))
    return ProfilePath(ExpanderSpec(int(n), float(lam)), s.copy(), u.copy(), v.copy(), th.copy(),
                       step, term, planar=(int(n) == 1))


def write_area_csv(series, dest=None) -> str:
    return _write_rows(AREA_HEADER, zip(series.radii, series.areas), dest)


def read_area_csv(source) -> tuple:
    data = _read_rows(source, AREA_HEADER)
    return data[:, 0].copy(), data[:, 1].copy()


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    return obj


def to_json(obj, dest=None, indent: int | None = 2) -> str:
    """JSON text for a report (anything with to_dict), a list of them, or plain data.

    Non-finite floats become null so the output stays strict JSON.
    """
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    elif isinstance(obj, (list, tuple)):
        obj = [o.to_dict() if hasattr(o, "to_dict") else o for o in obj]
    text = json.dumps(_clean(obj), indent=indent, allow_nan=False)
    if dest is not None:
        Path(dest).write_text(text + "\n", encoding="utf-8")
    return text


def load_json(source):
    text = Path(source).read_text(encoding="utf-8") if not _is_text(source) else source
    return json.loads(text)
