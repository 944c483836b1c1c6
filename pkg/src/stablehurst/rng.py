"""Deterministic random streams and symmetric alpha-stable variates.

Streams are numpy ``Generator`` objects backed by the counter-based Philox
bit generator.  A stream is keyed on ``(master_seed, stream_index)`` through
``SeedSequence`` spawn keys, so the sequence a replication sees does not
depend on how many workers run or in which order they are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

__all__ = ["SeedSpec", "derive_stream", "sample_standard_sas", "sample_gaussian"]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeedSpec:
    """Key of a random stream.

    Parameters
    ----------
    master_seed : int
        Unsigned 64-bit campaign seed.
    stream_index : int
        Non-negative index of the stream (replication, path, block, ...).
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= _UINT64_MAX:
            raise ValidationError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        if int(self.stream_index) < 0:
            raise ValidationError(f"stream_index must be non-negative, got {self.stream_index}")

    def child(self, index: int) -> "SeedSpec":
        """Seed of the ``index``-th sub-stream of this stream."""
        # Pack (stream_index, index) into one non-negative integer without collisions.
        a, b = int(self.stream_index), int(index)
        return SeedSpec(self.master_seed, (a + b) * (a + b + 1) // 2 + b)


def derive_stream(seed: SeedSpec) -> np.random.Generator:
    """Return an independent, reproducible generator for ``seed``."""
    ss = np.random.SeedSequence(int(seed.master_seed), spawn_key=(int(seed.stream_index),))
    return np.random.Generator(np.random.Philox(ss))


def _check_alpha(alpha):
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")


def sample_standard_sas(stream: np.random.Generator, alpha: float, size=None):
    """Draw standard SaS variates with characteristic function exp(-|t|^alpha).

    Chambers-Mallows-Stuck construction for the symmetric case.  With this
    normalisation alpha = 2 gives N(0, 2) and alpha = 1 the standard Cauchy law.

    Parameters
    ----------
    stream : numpy.random.Generator
    alpha : float
        Stability index in (0, 2].
    size : int or tuple of int, optional
        Output shape; a float is returned when omitted.
    """
    alpha = float(alpha)
    _check_alpha(alpha)
    v = stream.uniform(-np.pi / 2, np.pi / 2, size=size)
    if alpha == 1.0:
        return np.tan(v)
    w = stream.standard_exponential(size=size)
    if alpha == 2.0:
        return 2.0 * np.sin(v) * np.sqrt(w)
    out = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
           * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))
    return out


def sample_gaussian(stream: np.random.Generator, size=None):
    """Standard normal draws from ``stream``."""
    return stream.standard_normal(size=size)
