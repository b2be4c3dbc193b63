"""Reading the eye-state recording from ARFF or CSV, and summarizing it.

Only the subset of ARFF used by the UCI EEG Eye State file is supported:
numeric attributes followed by one binary class attribute, dense rows.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

import numpy as np

from . import _io
from .epochs import find_transitions
from .exceptions import (EmptyData, InvalidLabel, MalformedHeader,
                         NonNumericValue, ParseError, RaggedRow)
from .recording import DEFAULT_SAMPLE_RATE_HZ, Recording

__all__ = ["parse_arff", "parse_csv", "load_recording", "write_csv",
           "SummaryStats", "summarize"]

_NUMERIC_TYPES = {"numeric", "real", "integer"}
_ATTR_RE = re.compile(
    r"""^@attribute\s+('(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*"|\S+)\s+(.+)$""",
    re.IGNORECASE)


def _parse_label(token: str, row_no: int) -> int:
    token = token.strip().strip("'\"")
    try:
        value = float(token)
    except ValueError:
        raise InvalidLabel(f"row {row_no}: class value {token!r} is not 0 or 1") from None
    if value not in (0.0, 1.0):
        raise InvalidLabel(f"row {row_no}: class value {token!r} is not 0 or 1")
    return int(value)


def _parse_float(token: str, row_no: int, col: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise NonNumericValue(
            f"row {row_no}, column {col!r}: {token.strip()!r} is not numeric") from None
    if not np.isfinite(value):
        raise NonNumericValue(f"row {row_no}, column {col!r}: non-finite value {token.strip()!r}")
    return value


def _rows_to_recording(names, rows, sample_rate_hz) -> Recording:
    if not rows:
        raise EmptyData("no data rows")
    arr = np.array([r[0] for r in rows], dtype=np.float64)
    labels = np.array([r[1] for r in rows], dtype=np.int8)
    return Recording(names=names, values=arr, labels=labels,
                     sample_rate_hz=sample_rate_hz)


def parse_arff(source, sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> Recording:
    """Parse an ARFF document into a :class:`Recording`.

    ``source`` may be a path, raw bytes, or a file object. Every attribute
    except the last must be numeric and becomes a channel; the last one is
    the binary eye-state class.
    """
    text = _io.read_text(source)
    attrs: list[tuple[str, str]] = []
    data_start = None
    lines = text.splitlines()
    for lineno, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        low = line.lower()
        if low.startswith("@relation"):
            continue
        if low.startswith("@attribute"):
            m = _ATTR_RE.match(line)
            if m is None:
                raise MalformedHeader(f"line {lineno + 1}: cannot parse {line!r}")
            name = m.group(1)
            if name[0] in "'\"":
                name = name[1:-1]
            attrs.append((name, m.group(2).strip()))
            continue
        if low.startswith("@data"):
            data_start = lineno + 1
            break
        raise MalformedHeader(f"line {lineno + 1}: unexpected header line {line!r}")

    if data_start is None:
        raise MalformedHeader("missing @data section")
    if len(attrs) < 3:
        raise MalformedHeader(f"need at least 2 channel attributes and a class, got {len(attrs)}")
    for name, kind in attrs[:-1]:
        if kind.lower() not in _NUMERIC_TYPES:
            raise MalformedHeader(f"attribute {name!r} has unsupported type {kind!r}")
    cls_name, cls_kind = attrs[-1]
    if cls_kind.startswith("{"):
        if not cls_kind.endswith("}"):
            raise MalformedHeader(f"class attribute {cls_name!r}: unterminated nominal list")
        values = {v.strip().strip("'\"") for v in cls_kind[1:-1].split(",")}
        if not values or not values <= {"0", "1"}:
            raise MalformedHeader(f"class attribute {cls_name!r} must be binary {{0,1}}, got {cls_kind}")
    elif cls_kind.lower() not in _NUMERIC_TYPES:
        raise MalformedHeader(f"class attribute {cls_name!r} has unsupported type {cls_kind!r}")

    names = [a[0] for a in attrs[:-1]]
    width = len(attrs)
    rows = []
    for lineno in range(data_start, len(lines)):
        line = lines[lineno].strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("{"):
            raise ParseError(f"line {lineno + 1}: sparse ARFF rows are not supported")
        fields = line.split(",")
        if len(fields) != width:
            raise RaggedRow(f"line {lineno + 1}: {len(fields)} fields, expected {width}")
        rows.append(([_parse_float(f, lineno + 1, n) for f, n in zip(fields, names)],
                     _parse_label(fields[-1], lineno + 1)))
    return _rows_to_recording(names, rows, sample_rate_hz)


def parse_csv(source, has_header: bool = True,
              sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> Recording:
    """Parse a comma-delimited table whose last column is the label.

    Lines starting with ``#`` are skipped, so files written by
    :func:`write_csv` with a config comment read back unchanged.
    """
    text = _io.read_text(source)
    reader = csv.reader(line for line in io.StringIO(text)
                        if line.strip() and not line.startswith("#"))
    rows = []
    names = None
    width = None
    for row_no, fields in enumerate(reader, start=1):
        if width is None:
            width = len(fields)
            if width < 3:
                raise ParseError(f"need at least 2 channel columns and a label, got {width} columns")
            if has_header:
                names = [f.strip() for f in fields[:-1]]
                continue
            names = [f"ch{i}" for i in range(width - 1)]
        if len(fields) != width:
            raise RaggedRow(f"row {row_no}: {len(fields)} fields, expected {width}")
        rows.append(([_parse_float(f, row_no, n) for f, n in zip(fields, names)],
                     _parse_label(fields[-1], row_no)))
    if names is None:
        raise EmptyData("empty CSV")
    return _rows_to_recording(names, rows, sample_rate_hz)


def load_recording(path, fmt: str | None = None,
                   sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ) -> Recording:
    """Read ``path`` as ARFF or CSV, chosen by ``fmt`` or the file suffix."""
    fmt = (fmt or str(path).rsplit(".", 1)[-1]).lower()
    if fmt == "arff":
        return parse_arff(path, sample_rate_hz=sample_rate_hz)
    if fmt == "csv":
        return parse_csv(path, has_header=True, sample_rate_hz=sample_rate_hz)
    raise ParseError(f"cannot infer format of {path}; pass 'arff' or 'csv'")


def write_csv(rec: Recording, header: bool = True, label_name: str = "eyeDetection",
              config: dict | None = None) -> str:
    """Serialize ``rec`` to CSV text that :func:`parse_csv` reads back exactly."""
    # repr() of a Python float round-trips bit-for-bit
    rows = ([repr(float(v)) for v in vals] + [str(int(lab))]
            for vals, lab in zip(rec.values, rec.labels))
    head = list(rec.names) + [label_name] if header else None
    return _io.csv_text(rows, header=head, config=config)


@dataclass(frozen=True)
class SummaryStats:
    n_samples: int
    channel_stats: dict = field(default_factory=dict)
    label_counts: dict = field(default_factory=dict)
    transitions: int = 0

    def to_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "channel_stats": self.channel_stats,
            "label_counts": {str(k): v for k, v in self.label_counts.items()},
            "transitions": self.transitions,
        }

    def to_json(self, config: dict | None = None) -> str:
        d = self.to_dict()
        if config is not None:
            d["config"] = config
        return _io.dumps(d)

    def counts_csv(self, config: dict | None = None) -> str:
        return _io.csv_text(sorted(self.label_counts.items()),
                            header=["label", "count"], config=config)


def summarize(rec: Recording) -> SummaryStats:
    stats = {
        name: {"min": float(col.min()), "mean": float(col.mean()), "max": float(col.max())}
        for name, col in zip(rec.names, rec.values.T)
    }
    counts = {0: int(np.sum(rec.labels == 0)), 1: int(np.sum(rec.labels == 1))}
    return SummaryStats(n_samples=rec.n_samples, channel_stats=stats,
                        label_counts=counts,
                        transitions=len(find_transitions(rec.labels)))
