"""Counter-based random streams: one Philox key per sample.

Sample k of a run draws from Philox keyed by (seed, purpose << 48 | k).
Consequences worth relying on:

* the ensemble is a pure function of (seed, steps): batching, thread
  count, and evaluation order cannot change a single draw;
* estimators that consume different processes under the same seed stay
  independent through the purpose tag;
* any sample can be regenerated in isolation, which is how the
  path-level API reproduces exactly what a bulk run saw.
"""

import numpy as np

from ..errors import CapacityError

PURPOSE_BM = 0
PURPOSE_OU = 1

_INDEX_BITS = 48
_MAX_INDEX = 1 << _INDEX_BITS


def stream_key(seed, index, purpose=PURPOSE_BM):
    """The 128-bit Philox key for one sample, as uint64[2]."""
    seed = int(seed)
    index = int(index)
    purpose = int(purpose)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    if not 0 <= index < _MAX_INDEX:
        raise CapacityError(f"sample index must be below 2**{_INDEX_BITS}")
    if not 0 <= purpose < (1 << 16):
        raise ValueError("purpose tag out of range")
    return np.array([seed, (purpose << _INDEX_BITS) | index], dtype=np.uint64)


def sample_generator(seed, index, purpose=PURPOSE_BM):
    """A Generator positioned at the start of one sample's stream."""
    return np.random.Generator(
        np.random.Philox(key=stream_key(seed, index, purpose))
    )


def fill_normals(buf, seed, start, purpose=PURPOSE_BM):
    """Fill buf[k] with sample (start + k)'s unit normals, in place.

    buf must be a C-contiguous float64 array whose leading axis indexes
    samples; each buf[k] is filled by a single stream read so the same
    (seed, index, purpose, shape) always reproduces the same values.
    """
    if buf.dtype != np.float64 or not buf.flags.c_contiguous:
        raise ValueError("buffer must be C-contiguous float64")
    for k in range(buf.shape[0]):
        gen = sample_generator(seed, start + k, purpose)
        gen.standard_normal(out=buf[k])
    return buf
