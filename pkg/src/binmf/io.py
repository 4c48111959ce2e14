"""Matrix files, run manifests and result directories.

Matrix formats
--------------
``csv``
    Comma-separated decimal floats, one matrix row per line, no header.
    Written with 17 significant digits so values round-trip exactly.
``f64le``
    16-byte header followed by the values::

        offset  size  content
        0       4     b"BNMF"
        4       4     rows      uint32 little-endian
        8       4     cols      uint32 little-endian
        12      4     version   uint32 little-endian, currently 1
        16      8*rows*cols   IEEE-754 binary64 little-endian, row-major

Result directory
----------------
``front.csv`` (one row per alpha), ``E_<alpha>.f64le`` and
``A_<alpha>.f64le`` factor files, ``trace_<alpha>.csv`` objective traces and
``manifest.json``.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import shutil
import struct
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, FormatError, ParseError
from .matrix import NonNegMatrix, as_array

MAGIC = b"BNMF"
VERSION = 1
HEADER = struct.Struct("<4sIII")

FRONT_COLUMNS = ("alpha", "j_input", "j_feature", "j_aggregated", "re", "re_phi",
                 "dominated", "iterations", "stop_reason")


def infer_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix in (".f64le", ".bin"):
        return "f64le"
    raise FormatError(f"cannot infer matrix format from {path!r}; pass format='csv' or 'f64le'")


def parse_csv_matrix(text: str, source: str = "<string>") -> NonNegMatrix:
    rows = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for ln, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        row = []
        for col, cell in enumerate(line.split(","), start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"{source}: line {ln}, column {col}: cannot parse {cell!r}",
                                 line=ln, column=col) from None
            if not np.isfinite(v):
                raise DomainError(f"{source}: non-finite value at row {ln}, column {col}")
            if v < 0:
                raise DomainError(f"{source}: negative value {v!r} at row {ln}, column {col}")
            row.append(v)
        if rows and len(row) != len(rows[0]):
            raise FormatError(f"{source}: line {ln} has {len(row)} values, expected {len(rows[0])}")
        rows.append(row)
    if not rows:
        raise FormatError(f"{source}: empty matrix file")
    return NonNegMatrix(np.array(rows, dtype=np.float64), copy=False)


def parse_f64le(buf: bytes, source: str = "<bytes>") -> NonNegMatrix:
    if len(buf) < HEADER.size:
        raise FormatError(f"{source}: {len(buf)} bytes is shorter than the 16-byte header")
    magic, rows, cols, version = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{source}: unsupported format version {version}")
    expected = HEADER.size + 8 * rows * cols
    if len(buf) != expected:
        raise FormatError(f"{source}: header declares {rows}x{cols} ({expected} bytes), "
                          f"file has {len(buf)} bytes")
    values = np.frombuffer(buf, dtype="<f8", offset=HEADER.size).astype(np.float64)
    m = values.reshape(rows, cols)
    bad = ~np.isfinite(m) | (m < 0)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise DomainError(f"{source}: invalid value {m[i, j]!r} at row {i + 1}, column {j + 1}")
    return NonNegMatrix(m, copy=False)


def load_matrix(path, format: str | None = None) -> NonNegMatrix:
    fmt = format or infer_format(path)
    if fmt == "csv":
        with open(path, encoding="ascii") as fh:
            return parse_csv_matrix(fh.read(), str(path))
    if fmt == "f64le":
        return parse_f64le(Path(path).read_bytes(), str(path))
    raise FormatError(f"unknown matrix format {fmt!r}")


def matrix_csv(m) -> str:
    arr = as_array(m)
    return "".join(",".join(f"{v:.16e}" for v in row) + "\n" for row in arr)


def matrix_f64le(m) -> bytes:
    arr = as_array(m)
    rows, cols = arr.shape
    return HEADER.pack(MAGIC, rows, cols, VERSION) + arr.astype("<f8").tobytes(order="C")


def _write_bytes(path, data: bytes):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def save_matrix(m, path, format: str | None = None):
    fmt = format or infer_format(path)
    if fmt == "csv":
        _write_bytes(path, matrix_csv(m).encode("ascii"))
    elif fmt == "f64le":
        _write_bytes(path, matrix_f64le(m))
    else:
        raise FormatError(f"unknown matrix format {fmt!r}")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: dict
    input_path: str | None = None
    input_format: str | None = None
    input_sha256: str | None = None
    tool_version: str = __version__
    started: str = field(default_factory=utc_now)
    finished: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> RunManifest:
        return cls(**json.loads(text))

    @classmethod
    def load(cls, path) -> RunManifest:
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def alpha_tag(alpha: float) -> str:
    return repr(float(alpha))


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def front_csv(rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FRONT_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in FRONT_COLUMNS])
    return buf.getvalue()


def read_front(path) -> list[dict]:
    """Parse a front.csv back into typed rows."""
    try:
        with open(path, newline="", encoding="ascii") as fh:
            reader = csv.DictReader(fh)
            missing = {"alpha", "j_input", "j_feature"} - set(reader.fieldnames or ())
            if missing:
                raise FormatError(f"{path}: missing columns {sorted(missing)}")
            rows = []
            for ln, rec in enumerate(reader, start=2):
                try:
                    row = {k: v for k, v in rec.items() if k is not None}
                    for k in ("alpha", "j_input", "j_feature", "j_aggregated", "re", "re_phi"):
                        if row.get(k) not in (None, ""):
                            row[k] = float(row[k])
                    if row.get("iterations") not in (None, ""):
                        row["iterations"] = int(row["iterations"])
                    if row.get("dominated") not in (None, ""):
                        row["dominated"] = row["dominated"] == "1"
                except ValueError as exc:
                    raise ParseError(f"{path}: line {ln}: {exc}", line=ln) from None
                rows.append(row)
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not a text file ({exc})") from None
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return rows


def write_front(rows, path):
    _write_bytes(path, front_csv(rows).encode("ascii"))


def trace_csv(trace) -> str:
    return "".join(repr(float(v)) + "\n" for v in trace)


class StagedDir:
    """Write into a temporary sibling directory and move files into place on success.

    Nothing appears under the target directory unless every write succeeded.
    """

    def __init__(self, target):
        self.target = Path(target)

    def __enter__(self):
        parent = self.target.resolve().parent
        parent.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".staging-", dir=parent))
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                if not self.target.exists():
                    os.replace(self.tmp, self.target)
                    return False
                for p in sorted(self.tmp.iterdir()):
                    os.replace(p, self.target / p.name)
        finally:
            shutil.rmtree(self.tmp, ignore_errors=True)
        return False


def save_results(front, manifest: RunManifest, out_dir, x, kernel):
    """Write a sweep's front, factors, traces and manifest under ``out_dir``."""
    from .metrics import report
    from .pareto import front_export

    X = as_array(x)
    rows = front_export(front)
    by_alpha = sorted(front.solutions, key=lambda s: s.alpha)
    for row, sol in zip(rows, by_alpha):
        m = report(X, sol.e, sol.a, kernel)
        row["re"], row["re_phi"] = m.re, m.re_phi
    with StagedDir(out_dir) as tmp:
        write_front(rows, tmp / "front.csv")
        for sol in by_alpha:
            tag = alpha_tag(sol.alpha)
            save_matrix(sol.e, tmp / f"E_{tag}.f64le")
            save_matrix(sol.a, tmp / f"A_{tag}.f64le")
            _write_bytes(tmp / f"trace_{tag}.csv", trace_csv(sol.trace).encode("ascii"))
        manifest.finished = utc_now()
        _write_bytes(tmp / "manifest.json", manifest.to_json().encode("utf-8"))
    return rows
