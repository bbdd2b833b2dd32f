"""Counter-based random streams.

Each stream is a Philox generator whose 128-bit key packs the run seed with
a stream index, so the numbers drawn for (seed, slice, sample) never depend
on which worker or in which order the stream is used.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def stream(seed: int, *index: int) -> np.random.Generator:
    sid = 0
    for i in index:
        if not 0 <= i < (1 << 21):
            raise ValueError("stream index out of range")
        sid = (sid << 21) | i
    key = ((seed & _MASK64) << 64) | (sid & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
