"""Locating the UCI EEG Eye State file and generating a synthetic stand-in.

The UCI file is not redistributed with the package. Point the
``EYESTATE_UCI_PATH`` environment variable at ``EEG Eye State.arff`` (or a
CSV export of it), or drop it under ``data/`` in the working directory.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .recording import Recording

__all__ = ["UCI_CHANNELS", "UCI_ENV_VAR", "find_uci_dataset", "make_synthetic_recording"]

UCI_ENV_VAR = "EYESTATE_UCI_PATH"
UCI_CHANNELS = ("AF3", "F7", "F3", "FC5", "T7", "P7", "O1",
                "O2", "P8", "T8", "FC6", "F4", "F8", "AF4")
_CANDIDATES = ("EEG Eye State.arff", "EEG_Eye_State.arff", "eeg_eye_state.arff",
               "EEG Eye State.csv", "eeg_eye_state.csv")


def find_uci_dataset(search_dirs=None) -> Path | None:
    """Return the path of the UCI recording, or None when it is absent."""
    env = os.environ.get(UCI_ENV_VAR)
    if env:
        p = Path(env)
        return p if p.is_file() else None
    dirs = search_dirs or [Path.cwd() / "data", Path(__file__).resolve().parents[2] / "data"]
    for d in dirs:
        for name in _CANDIDATES:
            p = Path(d) / name
            if p.is_file():
                return p
    return None


def _segment_labels(n, rng, mean_segment):
    labels = np.empty(n, dtype=np.int8)
    pos, state = 0, 0
    while pos < n:
        length = max(int(rng.exponential(mean_segment)), mean_segment // 4)
        labels[pos:pos + length] = state
        pos += length
        state = 1 - state
    return labels


def make_synthetic_recording(n_samples: int = 14980, seed: int = 0,
                             n_outliers: int = 3, mean_segment: int = 300,
                             sample_rate_hz: int = 128) -> Recording:
    """Recording shaped like the UCI file, with planted structure.

    Fourteen channels near 4000-4600 uV share a slow common drift; during
    label 1 a 10 Hz component is added with channel-specific gain, which
    changes both channel means and their correlation pattern. Eye-state
    segments have exponentially distributed lengths. ``n_outliers``
    timepoints get a spike of several hundred thousand uV on one channel.
    """
    rng = np.random.default_rng(seed)
    labels = _segment_labels(n_samples, rng, mean_segment)
    t = np.arange(n_samples) / sample_rate_hz
    C = len(UCI_CHANNELS)

    base = rng.uniform(4000, 4600, size=C)
    drift = np.cumsum(rng.normal(size=n_samples)) * 0.3
    drift -= np.convolve(drift, np.ones(512) / 512, mode="same")
    mix = rng.uniform(0.5, 1.5, size=C)
    alpha = np.sin(2 * np.pi * 10 * t + rng.uniform(0, 2 * np.pi))
    alpha_gain = rng.uniform(2, 12, size=C)
    shift = rng.normal(0, 6, size=C)
    noise = rng.normal(0, 4, size=(n_samples, C))
    smooth = np.cumsum(rng.normal(size=(n_samples, C)), axis=0) * 0.1

    values = (base + drift[:, None] * mix + noise + smooth
              + labels[:, None] * (alpha[:, None] * alpha_gain + shift))
    for r in rng.choice(n_samples, size=n_outliers, replace=False):
        values[r, rng.integers(C)] = rng.uniform(3e5, 8e5)
    return Recording(names=UCI_CHANNELS, values=values, labels=labels,
                     sample_rate_hz=sample_rate_hz)
