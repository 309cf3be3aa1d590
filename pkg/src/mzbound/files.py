"""Scan files (CSV) and analysis reports (JSON).

Scan file layout::

    # m: 2
    # n: 1
    # source: coherent 1.0
    phase,rate,shots
    0.0,0.0,1000
    ...

``#`` lines before the header hold ``key: value`` metadata. The ``shots``
column is optional. Phases are in radians and strictly increasing.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .coincidence import CoincidencePattern, CoincidenceScan, PhaseGrid
from .errors import InputError
from .montecarlo import binomial_errors

__all__ = ["ScanFileError", "ScanFile", "write_scan", "read_scan", "write_report", "read_report"]

HEADERS = (("phase", "rate"), ("phase", "rate", "shots"))


class ScanFileError(InputError):
    def __init__(self, path, line: int | None, message: str):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.line = line


class ScanFile:
    """A parsed scan file: the metadata dictionary plus the scan itself."""

    def __init__(self, metadata: dict[str, str], scan: CoincidenceScan):
        self.metadata = metadata
        self.scan = scan

    @property
    def pattern(self) -> CoincidencePattern:
        return self.scan.pattern


def _fmt(x: float) -> str:
    return repr(float(x))


def write_scan(path, scan: CoincidenceScan, metadata: dict[str, Any] | None = None) -> None:
    """Write ``scan`` as CSV; ``path`` may be ``"-"`` for stdout."""
    meta = {"m": scan.pattern.m, "n": scan.pattern.n, "provenance": scan.provenance}
    meta.update(metadata or {})
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    with_shots = scan.shots is not None
    lines.append(",".join(HEADERS[1] if with_shots else HEADERS[0]))
    for i, (phi, rate) in enumerate(zip(scan.phases, scan.values)):
        row = [_fmt(phi), _fmt(rate)]
        if with_shots:
            row.append(str(int(scan.shots[i])))
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_scan(path, require_pattern: bool = True) -> ScanFile:
    """Parse a scan file, raising :class:`ScanFileError` with the offending line."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScanFileError(path, None, f"cannot read file ({exc.strerror})") from exc
    meta: dict[str, str] = {}
    header = None
    phases, rates, shots = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, value = body.split(":", 1)
                meta[key.strip()] = value.strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            if tuple(fields) not in HEADERS:
                raise ScanFileError(path, lineno, f"expected header 'phase,rate[,shots]', got {line!r}")
            header = tuple(fields)
            continue
        if len(fields) != len(header):
            raise ScanFileError(path, lineno, f"expected {len(header)} columns, got {len(fields)}")
        try:
            phi, rate = float(fields[0]), float(fields[1])
        except ValueError:
            raise ScanFileError(path, lineno, "phase and rate must be numbers") from None
        if not (math.isfinite(phi) and math.isfinite(rate)):
            raise ScanFileError(path, lineno, "phase and rate must be finite")
        if rate < 0:
            raise ScanFileError(path, lineno, f"negative rate {rate!r}")
        if phases and phi <= phases[-1]:
            raise ScanFileError(path, lineno, "phases must be strictly increasing")
        if len(header) == 3:
            try:
                s = int(fields[2])
            except ValueError:
                raise ScanFileError(path, lineno, "shots must be an integer") from None
            if s < 1:
                raise ScanFileError(path, lineno, "shots must be positive")
            shots.append(s)
        phases.append(phi)
        rates.append(rate)
    if header is None:
        raise ScanFileError(path, None, "missing 'phase,rate[,shots]' header")

    try:
        pattern = CoincidencePattern(int(meta["m"]), int(meta["n"]))
    except KeyError:
        if require_pattern:
            raise ScanFileError(path, None, "pattern metadata '# m:' and '# n:' required") from None
        pattern = CoincidencePattern(0, 0)
    except ValueError:
        raise ScanFileError(path, None, "pattern metadata must be non-negative integers") from None

    rates_arr = np.array(rates, dtype=float)
    if shots:
        shots_arr = np.array(shots, dtype=np.int64)
        errors = binomial_errors(rates_arr, shots_arr)
    else:
        shots_arr = errors = None
    scan = CoincidenceScan(PhaseGrid(np.array(phases)), rates_arr, pattern, "ingested", shots_arr, errors)
    return ScanFile(meta, scan)


def write_report(path, report: dict) -> None:
    """JSON with shortest round-trip float representations."""
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_report(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: cannot read report ({exc})") from exc
