"""Transition-centred epoch slicing.

Windows of ``window_len`` samples are centred on eye-state transitions,
clamped into the recording, and kept pairwise disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _io
from .exceptions import DataError, InsufficientTransitions
from .recording import Recording

__all__ = ["EpochSet", "find_transitions", "slice_windows", "window_bounds"]


def find_transitions(labels) -> np.ndarray:
    """Indices ``i`` with ``labels[i] != labels[i - 1]``, ascending."""
    labels = np.asarray(labels)
    if labels.size < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(labels[1:] != labels[:-1]).astype(np.int64) + 1


def window_bounds(transition: int, window_len: int, length: int) -> tuple[int, int]:
    start = transition - window_len // 2
    start = min(max(start, 0), length - window_len)
    return start, start + window_len


@dataclass(frozen=True, eq=False)
class EpochSet:
    """Rows gathered from accepted windows, ordered by window start.

    ``windows`` holds ``(start, end, transition)`` triples with ``end``
    exclusive. ``recording`` carries the concatenated rows with their
    original labels.
    """

    windows: tuple[tuple[int, int, int], ...]
    recording: Recording
    window_len: int
    source_length: int

    @property
    def rows(self) -> np.ndarray:
        return self.recording.values

    @property
    def labels(self) -> np.ndarray:
        return self.recording.labels

    @property
    def n_rows(self) -> int:
        return self.recording.n_samples

    def row_index(self) -> np.ndarray:
        """Parent-recording index of every row."""
        if not self.windows:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.arange(s, e) for s, e, _ in self.windows])

    def window_recordings(self) -> list[Recording]:
        out = []
        for k in range(len(self.windows)):
            sl = slice(k * self.window_len, (k + 1) * self.window_len)
            out.append(self.recording.take_rows(sl))
        return out

    def manifest(self, config: dict | None = None) -> dict:
        d = {
            "window_len": self.window_len,
            "source_length": self.source_length,
            "n_windows": len(self.windows),
            "n_rows": self.n_rows,
            "channels": list(self.recording.names),
            "windows": [{"start": s, "end": e, "transition": t} for s, e, t in self.windows],
        }
        if config is not None:
            d["config"] = config
        return d

    def manifest_json(self, config: dict | None = None) -> str:
        return _io.dumps(self.manifest(config))

    def rows_csv(self, config: dict | None = None) -> str:
        idx = self.row_index()
        rows = ([int(i)] + [repr(float(v)) for v in vals] + [int(lab)]
                for i, vals, lab in zip(idx, self.rows, self.labels))
        head = ["index"] + list(self.recording.names) + ["label"]
        return _io.csv_text(rows, header=head, config=config)

    def window_plot_csv(self, k: int = 0, config: dict | None = None) -> str:
        """Time (s), per-channel values and label for window ``k``."""
        s, e, _ = self.windows[k]
        rate = self.recording.sample_rate_hz
        sl = slice(k * self.window_len, (k + 1) * self.window_len)
        rows = ([repr(i / rate)] + [repr(float(v)) for v in vals] + [int(lab)]
                for i, vals, lab in zip(range(s, e), self.rows[sl], self.labels[sl]))
        head = ["time_s"] + list(self.recording.names) + ["label"]
        return _io.csv_text(rows, header=head, config=config)


def _candidate_positions(n_transitions: int, count: int, rng) -> list[int]:
    """Evenly spaced positions into the transition list.

    Exact half-way positions are rounded up or down by ``rng``.
    """
    if count == 1:
        pos = [(n_transitions - 1) / 2]
    else:
        pos = [k * (n_transitions - 1) / (count - 1) for k in range(count)]
    out = []
    for p in pos:
        lo = int(np.floor(p))
        frac = p - lo
        if frac == 0.5:
            out.append(lo + int(rng.integers(2)))
        else:
            out.append(lo + (frac > 0.5))
    return out


def _overlaps(bounds, accepted) -> bool:
    s, e = bounds
    return any(s < ae and as_ < e for as_, ae in accepted)


def slice_windows(rec: Recording, window_len: int = 384, count: int = 20,
                  seed: int = 0) -> EpochSet:
    """Cut ``count`` disjoint transition-centred windows from ``rec``.

    Candidate transitions are spread evenly over the ordered transition
    list. A candidate whose window overlaps an accepted one is skipped in
    favour of the next transition. If that pass comes up short, remaining
    transitions are scanned left to right to fill the gap.

    Raises
    ------
    InsufficientTransitions
        Fewer than ``count`` disjoint windows can be placed.
    """
    length = rec.n_samples
    if window_len < 2 or window_len >= length:
        raise DataError(f"window_len must be in [2, {length}), got {window_len}")
    if count < 1:
        raise DataError(f"count must be positive, got {count}")
    trans = find_transitions(rec.labels)
    if len(trans) < count:
        raise InsufficientTransitions(
            f"{len(trans)} transitions, {count} windows requested")
    bounds = [window_bounds(int(t), window_len, length) for t in trans]

    rng = np.random.default_rng(seed)
    accepted: dict[int, tuple[int, int]] = {}
    for j in _candidate_positions(len(trans), count, rng):
        while j < len(trans) and (j in accepted or _overlaps(bounds[j], accepted.values())):
            j += 1
        if j < len(trans):
            accepted[j] = bounds[j]
    for j in range(len(trans)):
        if len(accepted) >= count:
            break
        if j not in accepted and not _overlaps(bounds[j], accepted.values()):
            accepted[j] = bounds[j]
    if len(accepted) < count:
        # the earlier picks may block a feasible packing; leftmost greedy is
        # optimal for equal-length intervals
        packed: dict[int, tuple[int, int]] = {}
        for j in range(len(trans)):
            if not _overlaps(bounds[j], packed.values()):
                packed[j] = bounds[j]
        if len(packed) >= count:
            keys = list(packed)
            picks = np.linspace(0, len(keys) - 1, count).round().astype(int)
            accepted = {keys[p]: packed[keys[p]] for p in picks}
    if len(accepted) < count:
        raise InsufficientTransitions(
            f"only {len(accepted)} disjoint windows of length {window_len} fit "
            f"around {len(trans)} transitions; {count} requested")

    order = sorted(accepted, key=lambda j: bounds[j][0])
    windows = tuple((bounds[j][0], bounds[j][1], int(trans[j])) for j in order)
    index = np.concatenate([np.arange(s, e) for s, e, _ in windows])
    return EpochSet(windows=windows, recording=rec.take_rows(index),
                    window_len=window_len, source_length=length)
