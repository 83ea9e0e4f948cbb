"""Counter-based random streams for reproducible, order-free Monte Carlo.

Every uniform variate is a pure function of ``(master_seed, hypothesis,
trial_index, pulse_index)``, so trials can be evaluated in any order, in
any number of workers, and still reproduce bit for bit.

The derivation, with all arithmetic modulo 2**64 and ``mix`` the SplitMix64
finaliser (Steele, Lea & Flood 2014)::

    GAMMA = 0x9E3779B97F4A7C15
    mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
             return z ^ (z >> 31)

    hyp_key    = mix(master_seed + (h + 1) * GAMMA)     h = 0 for H0, 1 for H1
    stream_key = mix(hyp_key ^ trial_index)
    u_k        = (mix(stream_key + (k + 1) * GAMMA) >> 11) * 2**-53   k = 0, 1, ...

A stream is therefore a SplitMix64 generator seeded with ``stream_key``;
``u_k`` is the uniform consumed by pulse ``k`` of that trial.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1
_TO_UNIT = 2.0**-53


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def hypothesis_key(master_seed: int, hypothesis_index: int) -> int:
    return mix64(master_seed + (hypothesis_index + 1) * GAMMA)


def stream_key(master_seed: int, hypothesis_index: int, trial_index: int) -> int:
    return mix64(hypothesis_key(master_seed, hypothesis_index) ^ (trial_index & _MASK))


class TrialStream:
    """Sequential view of one trial's substream."""

    __slots__ = ("key", "counter")

    def __init__(self, key: int):
        self.key = key & _MASK
        self.counter = 0

    @classmethod
    def for_trial(cls, master_seed: int, hypothesis_index: int, trial_index: int) -> "TrialStream":
        return cls(stream_key(master_seed, hypothesis_index, trial_index))

    def random(self) -> float:
        self.counter += 1
        return (mix64(self.key + self.counter * GAMMA) >> 11) * _TO_UNIT


# Vectorised counterparts.  numpy uint64 arithmetic wraps modulo 2**64.

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_UM1 = np.uint64(_M1)
_UM2 = np.uint64(_M2)
_UGAMMA = np.uint64(GAMMA)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _U30)) * _UM1
    z = (z ^ (z >> _U27)) * _UM2
    return z ^ (z >> _U31)


def stream_keys(master_seed: int, hypothesis_index: int, trial_indices: np.ndarray) -> np.ndarray:
    base = np.uint64(hypothesis_key(master_seed, hypothesis_index))
    return mix64_array(base ^ trial_indices.astype(np.uint64))


def uniforms(keys: np.ndarray, pulse_index: int) -> np.ndarray:
    """The uniform for pulse ``pulse_index`` (0-based) of each stream in ``keys``."""
    offset = np.uint64(((pulse_index + 1) * GAMMA) & _MASK)
    bits = mix64_array(keys + offset) >> _U11
    return bits.astype(np.float64) * _TO_UNIT
