"""Deterministic random streams.

All Monte Carlo code derives its randomness from a single 64-bit master
seed through counter-based Philox streams, so runs are reproducible and
replicas can be generated independently of execution order.
"""

import numpy as np


def substream(seed, *key):
    """Return a Generator for the stream identified by (seed, *key).

    Distinct key tuples give statistically independent streams.  The same
    (seed, key) always yields the same stream.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


#: replicas are drawn in fixed-size blocks so results do not depend on how
#: work is split across workers
REPLICA_BLOCK = 2048


def replica_blocks(replicas):
    """Yield (block_index, block_size) pairs covering `replicas` replicas."""
    done = 0
    block = 0
    while done < replicas:
        size = min(REPLICA_BLOCK, replicas - done)
        yield block, size
        done += size
        block += 1
