"""Small I/O helpers: reading sources, JSON encoding, commented CSV headers."""

from __future__ import annotations

import io
import json
import os
from pathlib import Path

import numpy as np


def read_text(source) -> str:
    """Return the text content of a path, bytes, or file-like ``source``."""
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, (str, os.PathLike)):
        return Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"{type(o).__name__} is not JSON serializable")


def dumps(obj) -> str:
    # sort_keys keeps byte-identical output across runs
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def config_comment(config: dict | None) -> str:
    if not config:
        return ""
    return "# config: " + json.dumps(config, sort_keys=True, default=_default) + "\n"


def csv_text(rows, header=None, config: dict | None = None) -> str:
    import csv

    buf = io.StringIO()
    buf.write(config_comment(config))
    w = csv.writer(buf, lineterminator="\n")
    if header is not None:
        w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
