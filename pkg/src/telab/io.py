"""File formats: grid CSV, far-field JSON, atomic writes and content hashes."""
from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile

import numpy as np

from .directions import DirectionQuadrature
from .errors import FormatValidationError, ParseError
from .geometry import GridSpec
from .herglotz import FarFieldMatrix

CSV_HEADER = "# nx ny x0 y0 h k"
CSV_COLUMNS = "i,j,x,y,re,im,inside"
FF_CONVENTION = "entry(i,j)=u_inf(xhat_i,d_j)"
FF_QUADRATURE = "equispaced,weight=2pi/N"


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _num(x):
    return repr(float(x))


# -- grid CSV ---------------------------------------------------------------


def grid_csv_text(spec, values, mask=None, k=float("nan")):
    values = np.asarray(values)
    if values.shape != spec.shape:
        raise FormatValidationError(f"values have shape {values.shape}, grid is {spec.shape}")
    mask = np.ones(spec.shape, bool) if mask is None else np.asarray(mask, bool)
    x, y = spec.axes()
    lines = [CSV_HEADER, "# " + " ".join([str(spec.nx), str(spec.ny), _num(spec.origin[0]), _num(spec.origin[1]), _num(spec.h), _num(k)]), CSV_COLUMNS]
    vals = values.astype(complex)
    for i in range(spec.nx):
        for j in range(spec.ny):
            v = vals[i, j]
            lines.append(f"{i},{j},{_num(x[i])},{_num(y[j])},{_num(v.real)},{_num(v.imag)},{int(mask[i, j])}")
    return "\n".join(lines) + "\n"


def write_grid_csv(path, spec, values, mask=None, k=float("nan")):
    return atomic_write(path, grid_csv_text(spec, values, mask, k))


def read_grid_csv(path):
    """Returns ``(spec, k, values, mask)``."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if len(lines) < 3 or lines[0].strip() != CSV_HEADER:
        raise ParseError("missing grid header", 1, 0)
    parts = lines[1].lstrip("#").split()
    if len(parts) != 6:
        raise ParseError("grid header needs 6 fields", 2, 0)
    try:
        nx, ny = int(parts[0]), int(parts[1])
        x0, y0, h, k = map(float, parts[2:])
    except ValueError as exc:
        raise ParseError(f"bad grid header: {exc}", 2, 0) from None
    spec = GridSpec((x0, y0), h, nx, ny)
    start = 3 if lines[2].strip() == CSV_COLUMNS else 2
    values = np.full(spec.shape, np.nan, dtype=complex)
    mask = np.zeros(spec.shape, bool)
    seen = 0
    for ln, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        f = line.split(",")
        if len(f) != 7:
            raise ParseError(f"expected 7 columns, got {len(f)}", ln, len(line))
        try:
            i, j = int(f[0]), int(f[1])
            values[i, j] = complex(float(f[4]), float(f[5]))
            mask[i, j] = bool(int(f[6]))
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad row: {exc}", ln, 0) from None
        seen += 1
    if seen != nx * ny:
        raise FormatValidationError(f"header declares {nx * ny} nodes, file has {seen}")
    return spec, k, values, mask


# -- far-field matrix JSON ----------------------------------------------------------


def farfield_to_json(F):
    n = F.quadrature.n
    flat = F.entries.reshape(-1)
    doc = {
        "k": float(F.k),
        "n_dir": int(n),
        "convention": FF_CONVENTION,
        "quadrature": FF_QUADRATURE,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }
    return json.dumps(doc, indent=None, separators=(",", ":")) + "\n"


def write_farfield(path, F):
    return atomic_write(path, farfield_to_json(F))


def farfield_from_json(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise FormatValidationError("far-field file must hold a JSON object")
    missing = {"k", "n_dir", "entries"} - set(doc)
    if missing:
        raise FormatValidationError(f"missing keys: {sorted(missing)}")
    if doc.get("convention", FF_CONVENTION) != FF_CONVENTION:
        raise FormatValidationError(f"unsupported convention {doc['convention']!r}")
    if doc.get("quadrature", FF_QUADRATURE) != FF_QUADRATURE:
        raise FormatValidationError(f"unsupported quadrature {doc['quadrature']!r}")
    n = doc["n_dir"]
    if not isinstance(n, int) or n < 8:
        raise FormatValidationError(f"n_dir must be an integer >= 8, got {n!r}")
    ent = doc["entries"]
    if not isinstance(ent, list) or len(ent) != n * n:
        raise FormatValidationError(f"declared n_dir = {n} needs {n * n} entries, got {len(ent) if isinstance(ent, list) else 'none'}")
    try:
        arr = np.array(ent, dtype=float)
    except (TypeError, ValueError):
        raise FormatValidationError("entries must be [re, im] number pairs") from None
    if arr.shape != (n * n, 2):
        raise FormatValidationError("entries must be [re, im] number pairs")
    k = doc["k"]
    if not isinstance(k, (int, float)) or not math.isfinite(k) or k <= 0:
        raise FormatValidationError(f"k must be a positive number, got {k!r}")
    return FarFieldMatrix(float(k), DirectionQuadrature(n), (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n))


def read_farfield(path):
    with open(path, encoding="utf-8") as fh:
        return farfield_from_json(fh.read())


def write_json(path, obj):
    return atomic_write(path, json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
