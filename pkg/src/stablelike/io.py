"""Serialization of paths, jump streams and result tables.

CSV files follow RFC 4180 (header row, CRLF line ends, '.' decimal) and
print floats with ``repr``, the shortest string that round-trips, so a
reloaded array is bit-identical and two runs with equal numbers produce
equal bytes. The binary format is a fixed header followed by raw
little-endian float64 columns; it has no timestamps or other volatile
fields.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
import struct
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .core import SamplePath
from .jumps import JumpStream

__all__ = [
    "format_value",
    "write_csv",
    "read_csv",
    "write_json",
    "sha256_file",
    "path_to_csv",
    "path_from_csv",
    "stream_to_csv",
    "stream_from_csv",
    "save_binary",
    "load_binary",
    "load_stream",
    "write_c_alpha_cache",
    "read_c_alpha_cache",
]

MAGIC = b"SLPK"
VERSION = 1
_KIND = {"path": 1, "stream": 2}
# magic, version, kind, d, n, horizon, epsilon, seed, censored
_HEADER = struct.Struct("<4sIIIQddQI")


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _csv_text(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(file, rows: list[Mapping], header: list[str] | None = None) -> Path:
    """Write a list of dicts; columns follow ``header`` or the first row's keys."""
    file = Path(file)
    if header is None:
        header = list(rows[0].keys()) if rows else []
    text = _csv_text(header, ([r.get(k) for k in header] for r in rows))
    file.parent.mkdir(parents=True, exist_ok=True)
    file.write_bytes(text.encode("utf-8"))
    return file


def read_csv(file) -> list[dict[str, str]]:
    with open(file, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _json_default(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"not JSON serializable: {type(v)}")


def write_json(file, obj) -> Path:
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=True)
    file.write_bytes((text + "\n").encode("utf-8"))
    return file


def sha256_file(file) -> str:
    h = hashlib.sha256()
    with open(file, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# paths and streams as CSV

def path_to_csv(path: SamplePath, file) -> Path:
    """Columns ``t, x1..xd, jump_flag``."""
    d = path.d
    header = ["t"] + [f"x{i + 1}" for i in range(d)] + ["jump_flag"]
    rows = (
        [path.times[k], *path.states[k], bool(path.jump_flags[k])]
        for k in range(len(path))
    )
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    file.write_bytes(_csv_text(header, rows).encode("utf-8"))
    return file


def path_from_csv(file, horizon: float, censored: bool = False) -> SamplePath:
    rows = read_csv(file)
    if not rows:
        raise ValueError(f"{file}: empty path file")
    xs = sorted((k for k in rows[0] if k.startswith("x")), key=lambda k: int(k[1:]))
    t = np.array([float(r["t"]) for r in rows])
    x = np.array([[float(r[k]) for k in xs] for r in rows])
    flags = np.array([r["jump_flag"] == "true" for r in rows])
    return SamplePath(t, x, flags, float(horizon), censored)


def stream_to_csv(stream: JumpStream, file) -> Path:
    """Columns ``t, theta1..thetad, r``."""
    header = ["t"] + [f"theta{i + 1}" for i in range(stream.d)] + ["r"]
    rows = ([stream.t[k], *stream.theta[k], stream.r[k]] for k in range(len(stream)))
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    file.write_bytes(_csv_text(header, rows).encode("utf-8"))
    return file


def stream_from_csv(file, epsilon: float, horizon: float, seed: int = 0) -> JumpStream:
    """Reload a CSV stream; the cutoff and horizon are not stored in the CSV."""
    rows = read_csv(file)
    with open(file, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh))
    ths = [k for k in header if k.startswith("theta")]
    d = len(ths)
    if d == 0:
        raise ValueError(f"{file}: no theta columns")
    t = np.array([float(r["t"]) for r in rows])
    th = np.array([[float(r[k]) for k in ths] for r in rows]).reshape(-1, d)
    rr = np.array([float(r["r"]) for r in rows])
    return JumpStream(t, th, rr, float(epsilon), float(horizon), int(seed), d)


# ---------------------------------------------------------------------------
# binary

def save_binary(obj: SamplePath | JumpStream, file) -> Path:
    """Header plus raw columns. Paths store (times, states, flags), streams (t, theta, r)."""
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(obj, SamplePath):
        eps = float(obj.meta.get("epsilon", 0.0)) if obj.meta else 0.0
        seed = int(obj.meta.get("seed", 0)) if obj.meta else 0
        head = _HEADER.pack(MAGIC, VERSION, _KIND["path"], obj.d, len(obj), obj.horizon,
                            eps, seed, int(obj.censored))
        body = [obj.times.astype("<f8").tobytes(), obj.states.astype("<f8").tobytes(),
                obj.jump_flags.astype("u1").tobytes()]
    elif isinstance(obj, JumpStream):
        head = _HEADER.pack(MAGIC, VERSION, _KIND["stream"], obj.d, len(obj), obj.horizon,
                            obj.epsilon, obj.seed, 0)
        body = [obj.t.astype("<f8").tobytes(), obj.theta.astype("<f8").tobytes(),
                obj.r.astype("<f8").tobytes()]
    else:
        raise TypeError("expected a SamplePath or JumpStream")
    file.write_bytes(head + b"".join(body))
    return file


def load_binary(file) -> SamplePath | JumpStream:
    raw = Path(file).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{file}: truncated header")
    magic, version, kind, d, n, horizon, eps, seed, cens = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"{file}: not a stablelike binary file (version {VERSION})")
    off = _HEADER.size

    def take(count, dtype):
        nonlocal off
        size = count * np.dtype(dtype).itemsize
        if off + size > len(raw):
            raise ValueError(f"{file}: truncated body")
        arr = np.frombuffer(raw, dtype=dtype, count=count, offset=off).copy()
        off += size
        return arr

    if kind == _KIND["path"]:
        t = take(n, "<f8")
        x = take(n * d, "<f8").reshape(n, d)
        flags = take(n, "u1").astype(bool)
        return SamplePath(t, x, flags, horizon, bool(cens), meta={"seed": seed, "epsilon": eps})
    if kind == _KIND["stream"]:
        t = take(n, "<f8")
        th = take(n * d, "<f8").reshape(n, d)
        r = take(n, "<f8")
        return JumpStream(t, th, r, eps, horizon, seed, d)
    raise ValueError(f"{file}: unknown record kind {kind}")


def load_stream(file, epsilon: float | None = None, horizon: float | None = None) -> JumpStream:
    """Load a replay stream from either format (CSV needs ``epsilon`` and ``horizon``)."""
    file = Path(file)
    if file.suffix.lower() == ".csv":
        if epsilon is None or horizon is None:
            raise ValueError("a CSV stream needs the cutoff and horizon it was drawn with")
        return stream_from_csv(file, epsilon, horizon)
    obj = load_binary(file)
    if not isinstance(obj, JumpStream):
        raise ValueError(f"{file} holds a path, not a stream")
    return obj


# ---------------------------------------------------------------------------
# C_alpha table

def write_c_alpha_cache(file, alphas) -> Path:
    from .symbol import c_alpha_table

    return write_csv(file, c_alpha_table(alphas), ["alpha", "c_alpha"])


def read_c_alpha_cache(file) -> dict[float, float]:
    return {float(r["alpha"]): float(r["c_alpha"]) for r in read_csv(file)}
