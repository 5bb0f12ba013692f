"""
Tests for the ncpart module.
"""

import pytest

from freeregress.algebra.ncpart import (
    NonCrossingPartition,
    catalan,
    enumerate_nc,
    is_noncrossing,
    iter_nc,
    iter_set_partitions,
)
from freeregress.errors import NotAPartition, SizeLimitExceeded


@pytest.mark.parametrize("n", range(1, 13))
def test_count_is_catalan(n):
    """Test that NC(n) has catalan(n) elements."""
    assert sum(1 for _ in iter_nc(n)) == catalan(n)


def test_first_catalan_numbers():
    """Test the Catalan numbers themselves."""
    assert [catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


def test_enumeration_is_noncrossing_and_distinct():
    """Test that every enumerated partition is non-crossing and appears once."""
    partitions = enumerate_nc(6)
    assert len({p.blocks for p in partitions}) == len(partitions)
    for partition in partitions:
        assert is_noncrossing(partition.blocks, 6)
        assert sum(partition.block_sizes()) == 6


@pytest.mark.parametrize("n", range(1, 8))
def test_noncrossing_among_all_set_partitions(n):
    """Test that filtering all set partitions by the predicate leaves catalan(n)."""
    assert sum(is_noncrossing(blocks, n) for blocks in iter_set_partitions(n)) == catalan(n)


def test_crossing_predicate():
    """Test the smallest crossing and nested configurations."""
    assert not is_noncrossing([[1, 3], [2, 4]])
    assert is_noncrossing([[1, 4], [2, 3]])
    assert is_noncrossing([[1, 2], [3, 4]])


def test_partition_rejects_crossing_blocks():
    """Test that NonCrossingPartition refuses crossing blocks."""
    with pytest.raises(ValueError, match="cross"):
        NonCrossingPartition(((1, 3), (2, 4)), 4)


def test_partition_normalizes_blocks():
    """Test that blocks are sorted and ordered by their minima."""
    partition = NonCrossingPartition(((3, 2), (4, 1)), 4)
    assert partition.blocks == ((1, 4), (2, 3))
    assert str(partition) == "{{1,4}, {2,3}}"


def test_overlapping_blocks_are_not_a_partition():
    """Test that repeated or missing elements are rejected."""
    with pytest.raises(NotAPartition, match="more than one block"):
        is_noncrossing([[1, 2], [2, 3]])
    with pytest.raises(NotAPartition, match="cover"):
        is_noncrossing([[1], [3]], 3)


def test_size_ceiling():
    """Test that enumeration above the ceiling is refused."""
    with pytest.raises(SizeLimitExceeded, match="ceiling"):
        enumerate_nc(17)
    with pytest.raises(SizeLimitExceeded):
        enumerate_nc(5, ceiling=4)
