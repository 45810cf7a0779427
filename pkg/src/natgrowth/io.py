"""Field files, CSV logs and JSON documents.

Field container: an ASCII header of ``key value...`` lines closed by
``end``, then the nodal values as raw little-endian float64 in row-major
order::

    natgrowth-field 1
    N 2
    n 65 65
    h 0.015151515151515152 0.015151515151515152
    end
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .grid import Grid
from .validation import check_field

MAGIC = "natgrowth-field 1"


def write_field(path, grid, values):
    values = check_field(grid, values, "values")
    header = [
        MAGIC,
        f"N {grid.ndim}",
        "n " + " ".join(str(k) for k in grid.n),
        "h " + " ".join(repr(float(h)) for h in grid.h),
        "end",
    ]
    with open(path, "wb") as fh:
        fh.write(("\n".join(header) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(values, dtype="<f8").tobytes())
    return Path(path)


def read_field(path):
    """Return ``(grid, values)`` from a field container."""
    with open(path, "rb") as fh:
        first = fh.readline().decode("ascii").strip()
        if first != MAGIC:
            raise ValueError(f"{path}: not a field file (got {first!r})")
        meta = {}
        while True:
            line = fh.readline()
            if not line:
                raise ValueError(f"{path}: header not terminated by 'end'")
            key, *vals = line.decode("ascii").split()
            if key == "end":
                break
            meta[key] = vals
        raw = fh.read()
    try:
        N = int(meta["N"][0])
        n = tuple(int(k) for k in meta["n"])
        h = tuple(float(x) for x in meta["h"])
    except (KeyError, IndexError, ValueError) as exc:
        raise ValueError(f"{path}: malformed header ({exc})") from exc
    if len(n) != N or len(h) != N:
        raise ValueError(f"{path}: header dimensions disagree with N={N}")
    grid = Grid(n, h)
    data = np.frombuffer(raw, dtype="<f8")
    if data.size != grid.size:
        raise ValueError(f"{path}: expected {grid.size} values, found {data.size}")
    return grid, data.reshape(grid.shape).astype(float)


def write_field_csv(path, grid, values):
    """One row per node: multi-index, coordinates, value."""
    values = check_field(grid, values, "values")
    X = [x.ravel() for x in grid.mesh()]
    idx = np.unravel_index(np.arange(grid.size), grid.shape)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"i{k}" for k in range(grid.ndim)] + [f"x{k}" for k in range(grid.ndim)] + ["value"])
        for j, val in enumerate(values.ravel()):
            w.writerow([int(i[j]) for i in idx] + [repr(float(x[j])) for x in X] + [repr(float(val))])
    return Path(path)


def write_table(path, rows, columns):
    """CSV with header ``columns`` from dict rows (missing entries left blank)."""
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: _plain(v) for k, v in row.items()})
    return Path(path)


LOG_COLUMNS = ("iteration", "residual", "energy", "cerami")


def write_log(path, history):
    """Convergence log: iteration, residual, energy, Cerami diagnostic."""
    return write_table(path, history, LOG_COLUMNS)


def _plain(x):
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Path):
        return str(x)
    return x


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(_plain(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return Path(path)


def sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
