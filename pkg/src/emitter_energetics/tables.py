"""CSV and JSON files read and written by the command-line tools.

Floats are written with ``repr`` (shortest round-trip decimal) and every file
is written to a temporary sibling and renamed into place, so readers never
see a half-written file and repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import CsvFormatError
from .synthlab import CoincidenceHistogram, DetectorTrace

SCHEMA_VERSION = "emitter-energetics/1"

TRACE_HEADER = ("t_s", "counts1", "counts2")
HISTOGRAM_HEADER = ("delay_pulses", "area")
THEORY_HEADER = ("theta_rad", "total", "unitary", "correlation", "visibility")
SWEEP_HEADER = ("theta_rad", "v", "v_err")
PHASE_HEADER = ("t_s", "phase_rad")


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, header, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return atomic_write_text(path, buf.getvalue())


def read_csv(path, header, kinds):
    """Rows of ``path`` converted by ``kinds``, one callable per column.

    Raises :class:`CsvFormatError` carrying the 1-based line number of the
    first offending line.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise CsvFormatError("file is empty", line=1, path=str(path)) from None
        if tuple(h.strip() for h in got) != tuple(header):
            raise CsvFormatError(
                f"expected header {','.join(header)!r}, found {','.join(got)!r}",
                line=1, path=str(path),
            )
        rows = []
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise CsvFormatError(
                    f"expected {len(header)} fields, found {len(row)}", line=line, path=str(path)
                )
            try:
                rows.append(tuple(k(x.strip()) for k, x in zip(kinds, row)))
            except ValueError as exc:
                raise CsvFormatError(f"bad value ({exc})", line=line, path=str(path)) from None
    return rows


def _int(s: str) -> int:
    return int(s)


def _finite(s: str) -> float:
    x = float(s)
    if not math.isfinite(x):
        raise ValueError(f"non-finite number {s!r}")
    return x


# -- typed files -------------------------------------------------------------------


def write_trace(path, trace: DetectorTrace) -> Path:
    t = trace.times
    return write_csv(path, TRACE_HEADER, zip(t, trace.counts1, trace.counts2))


def read_trace(path, duration: float | None = None) -> DetectorTrace:
    rows = read_csv(path, TRACE_HEADER, (_finite, _int, _int))
    if len(rows) < 2:
        raise CsvFormatError("a trace needs at least two bins", line=len(rows) + 1, path=str(path))
    t = np.array([r[0] for r in rows])
    steps = np.diff(t)
    width = float(steps.mean())
    bad = np.nonzero(np.abs(steps - width) > 1e-6 * max(width, 1e-300))[0]
    if width <= 0 or bad.size:
        line = int(bad[0]) + 3 if bad.size else 3
        raise CsvFormatError("bin times are not uniformly increasing", line=line, path=str(path))
    for i, r in enumerate(rows):
        if r[1] < 0 or r[2] < 0:
            raise CsvFormatError("negative count", line=i + 2, path=str(path))
    if duration is None:
        duration = len(rows) * width
    return DetectorTrace(width, [r[1] for r in rows], [r[2] for r in rows], duration)


def write_histogram(path, hist: CoincidenceHistogram) -> Path:
    return write_csv(path, HISTOGRAM_HEADER, zip(hist.peak_delays, hist.areas))


def read_histogram(path, t_rep: float | None = None) -> CoincidenceHistogram:
    rows = read_csv(path, HISTOGRAM_HEADER, (_int, _finite))
    for i, r in enumerate(rows):
        if r[1] < 0:
            raise CsvFormatError("negative peak area", line=i + 2, path=str(path))
    if not any(r[0] == 0 for r in rows):
        raise CsvFormatError("no zero-delay peak", line=len(rows) + 1, path=str(path))
    kw = {} if t_rep is None else {"t_rep": t_rep}
    return CoincidenceHistogram([r[0] for r in rows], [r[1] for r in rows], **kw)


def write_theory(path, curve) -> Path:
    cols = [curve.theta_values] + [curve.column(n) for n in ("total", "unitary", "correlation")]
    cols.append(curve.visibilities)
    return write_csv(path, THEORY_HEADER, zip(*cols))


def write_sweep(path, thetas, v, v_err) -> Path:
    return write_csv(path, SWEEP_HEADER, zip(thetas, v, v_err))


def read_sweep(path):
    rows = read_csv(path, SWEEP_HEADER, (_finite, _finite, _finite))
    if len(rows) < 2:
        raise CsvFormatError("a sweep needs at least two points", line=len(rows) + 1, path=str(path))
    for i, r in enumerate(rows):
        if r[2] <= 0:
            raise CsvFormatError("v_err must be positive", line=i + 2, path=str(path))
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1], arr[:, 2]


def write_phases(path, times, phases) -> Path:
    return write_csv(path, PHASE_HEADER, zip(times, phases))


def sniff_kind(path) -> str:
    """Which schema a CSV uses, judged by its header line."""
    with open(path, encoding="utf-8", newline="") as fh:
        first = fh.readline()
    header = tuple(h.strip() for h in first.strip().split(","))
    for kind, h in (("trace", TRACE_HEADER), ("histogram", HISTOGRAM_HEADER), ("sweep", SWEEP_HEADER)):
        if header == h:
            return kind
    raise CsvFormatError(f"unrecognised header {first.strip()!r}", line=1, path=str(path))


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def write_json(path, payload: dict) -> Path:
    doc = {"schema_version": SCHEMA_VERSION, **to_jsonable(payload)}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return atomic_write_text(path, text)


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
