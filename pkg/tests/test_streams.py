import numpy as np

from percolab.streams import REPLICA_BLOCK, replica_blocks, substream


def test_substream_deterministic():
    a = substream(42, 1, 2).random(8)
    b = substream(42, 1, 2).random(8)
    assert np.array_equal(a, b)


def test_substream_key_separation():
    a = substream(42, 1, 2).random(8)
    b = substream(42, 1, 3).random(8)
    c = substream(43, 1, 2).random(8)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_replica_blocks_partition():
    total = 2 * REPLICA_BLOCK + 17
    blocks = list(replica_blocks(total))
    assert [b for b, _ in blocks] == [0, 1, 2]
    assert sum(size for _, size in blocks) == total
    assert all(size <= REPLICA_BLOCK for _, size in blocks)


def test_replica_blocks_small():
    assert list(replica_blocks(5)) == [(0, 5)]
