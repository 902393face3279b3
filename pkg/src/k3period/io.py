"""CSV and JSON serialization with deterministic formatting."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def fmt(x):
    """Numbers with 17 significant digits; complex as ``re+imj``."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.17g}{x.imag:+.17g}j"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, rows, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row[c]) for c in columns])
    return path


def read_csv(path):
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o))


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, sort_keys=True, indent=2, default=_default) + "\n")
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def complex_vector(rows):
    return np.array([complex(a, b) for a, b in rows])
