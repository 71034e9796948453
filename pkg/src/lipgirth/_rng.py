"""Keyed random streams.

Every draw is a pure function of ``(seed, a, b)`` (for example variable id and
resample counter), so schedules that touch variables in different orders still
produce identical assignments.
"""

from __future__ import annotations

import numba
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


@numba.njit(cache=True, inline="always")
def mix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(cache=True, inline="always")
def key3(seed, a, b):
    return mix64(mix64(mix64(np.uint64(seed)) ^ np.uint64(a)) ^ np.uint64(b))


@numba.njit(cache=True, inline="always")
def to_unit(z):
    return float(z >> _S11) * _INV53


@numba.njit(cache=True)
def _keyed_uniform(seed, a, ids):
    out = np.empty(len(ids))
    for i in range(len(ids)):
        out[i] = to_unit(key3(seed, a, ids[i]))
    return out


def keyed_uniform(seed, a, ids):
    """Uniform ``[0, 1)`` values, one per id, keyed by ``(seed, a, id)``."""
    ids = np.ascontiguousarray(ids, dtype=np.uint64)
    return _keyed_uniform(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(a), ids)


def stream_generator(seed, a, b):
    """A numpy Generator keyed by ``(seed, a, b)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed) & (2**64 - 1), int(a), int(b)])))
