"""Deterministic random streams.

Everything random in the package is drawn from numpy's Philox bit generator, a
counter-based generator on 64-bit words.  Independent streams are obtained by
key splitting rather than jumping: stream s of master seed m uses the two-word
Philox key [m, s], so any (seed, stream) pair addresses the same sequence on
every platform and under any degree of parallelism.

Stream allocation:

====================  =======================================
stream                used by
====================  =======================================
0                     sample_cloud (radii first, then angles)
500                   rule audits and the brute-force oracle suite
1000 + k              Monte Carlo sampler of the k-th limit term
====================  =======================================
"""

import numpy as np

BIT_GENERATOR = "Philox"

STREAM_CLOUD = 0
STREAM_AUDIT = 500
STREAM_LIMIT_BASE = 1000


def make_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the given (seed, stream) pair.

    Seeds may be any Python integers; they are reduced modulo 2**64 to fit the
    Philox key words.
    """
    seed = int(seed) % (1 << 64)
    stream = int(stream) % (1 << 64)
    return np.random.Generator(np.random.Philox(key=[seed, stream]))
