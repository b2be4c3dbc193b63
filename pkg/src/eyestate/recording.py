"""Immutable container for a multichannel recording with eye-state labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DataError, InvalidLabel

DEFAULT_SAMPLE_RATE_HZ = 128


@dataclass(frozen=True)
class ChannelSeries:
    name: str
    values: np.ndarray


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Recording:
    """Multichannel recording plus per-timepoint binary labels.

    Parameters
    ----------
    names : sequence of str
        Electrode labels, unique and non-empty, in file declaration order.
    values : array-like of shape (n_samples, n_channels)
        Voltage samples. Stored observation-major so the matrix can be
        handed straight to an estimator.
    labels : array-like of shape (n_samples,)
        Eye state per timepoint, 0 (open) or 1 (blink / closed).
    sample_rate_hz : int, default=128
    """

    names: tuple[str, ...]
    values: np.ndarray
    labels: np.ndarray
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        values = np.asarray(self.values, dtype=np.float64)
        labels = np.asarray(self.labels)

        if values.ndim != 2:
            raise DataError(f"values must be 2-D, got shape {values.shape}")
        n_samples, n_channels = values.shape
        if n_channels < 2:
            raise DataError(f"a recording needs at least 2 channels, got {n_channels}")
        if len(names) != n_channels:
            raise DataError(f"{len(names)} names for {n_channels} channels")
        if any(not n for n in names):
            raise DataError("channel names must be non-empty")
        if len(set(names)) != len(names):
            raise DataError(f"duplicate channel names in {names}")
        if labels.shape != (n_samples,):
            raise DataError(
                f"labels have shape {labels.shape}, expected ({n_samples},)")
        if not np.all(np.isfinite(values)):
            raise DataError("channel values must be finite")
        if labels.size and not np.isin(labels, (0, 1)).all():
            bad = labels[~np.isin(labels, (0, 1))][0]
            raise InvalidLabel(f"label {bad!r} is not 0 or 1")
        rate = int(self.sample_rate_hz)
        if rate != self.sample_rate_hz or rate <= 0:
            raise DataError(f"sample_rate_hz must be a positive integer, got {self.sample_rate_hz}")

        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int8)))
        object.__setattr__(self, "sample_rate_hz", rate)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> list[ChannelSeries]:
        return [ChannelSeries(n, self.values[:, i]) for i, n in enumerate(self.names)]

    def channel(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def replace(self, *, values=None, labels=None, names=None) -> "Recording":
        return Recording(
            names=self.names if names is None else names,
            values=self.values if values is None else values,
            labels=self.labels if labels is None else labels,
            sample_rate_hz=self.sample_rate_hz,
        )

    def take_rows(self, index) -> "Recording":
        return self.replace(values=self.values[index], labels=self.labels[index])

    def select_channels(self, channels: Sequence[int | str]) -> "Recording":
        idx = [self.names.index(c) if isinstance(c, str) else int(c) for c in channels]
        return self.replace(values=self.values[:, idx],
                            names=[self.names[i] for i in idx])

    def __eq__(self, other):
        if not isinstance(other, Recording):
            return NotImplemented
        return (self.names == other.names
                and self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None
