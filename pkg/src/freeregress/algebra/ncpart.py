"""
Non-Crossing Partitions

Enumeration and predicates for non-crossing partitions of {1..n}, the index set
of the free moment-cumulant formula.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator, List, Optional, Sequence, Tuple

from ..config import PARTITION_CONFIG
from ..errors import NotAPartition, SizeLimitExceeded

logger = logging.getLogger(__name__)

Blocks = Tuple[Tuple[int, ...], ...]

# Shapes up to this size are kept in memory; larger ones are streamed.
_CACHED_SHAPE_SIZE = 11


def catalan(n: int) -> int:
    """The n-th Catalan number."""
    return comb(2 * n, n) // (n + 1)


def _validate_blocks(blocks: Sequence[Sequence[int]], n: Optional[int]) -> Tuple[Blocks, int]:
    normalized = []
    seen = set()
    for block in blocks:
        block = tuple(sorted(int(i) for i in block))
        if not block:
            raise NotAPartition("Blocks must be nonempty")
        for i in block:
            if i in seen:
                raise NotAPartition(f"Element {i} appears in more than one block")
            seen.add(i)
        normalized.append(block)

    if n is None:
        n = max(seen) if seen else 0
    if seen != set(range(1, n + 1)):
        missing = sorted(set(range(1, n + 1)) - seen)
        extra = sorted(seen - set(range(1, n + 1)))
        raise NotAPartition(
            f"Blocks do not cover {{1..{n}}} exactly (missing {missing}, extra {extra})"
        )

    normalized.sort(key=lambda b: b[0])
    return tuple(normalized), n


def _blocks_cross(first: Tuple[int, ...], second: Tuple[int, ...]) -> bool:
    for i1, i2 in combinations(first, 2):
        inside = any(i1 < j < i2 for j in second)
        outside = any(j < i1 or j > i2 for j in second)
        if inside and outside:
            return True
    return False


def is_noncrossing(blocks: Sequence[Sequence[int]], n: Optional[int] = None) -> bool:
    """
    Decide whether a set partition of {1..n} is non-crossing.

    Args:
        blocks: The candidate blocks
        n: Size of the ground set; defaults to the largest element

    Returns:
        True iff no i1 < j1 < i2 < j2 has i1, i2 in one block and j1, j2 in another
    """
    normalized, _ = _validate_blocks(blocks, n)
    for a, b in combinations(normalized, 2):
        if _blocks_cross(a, b):
            return False
    return True


@dataclass(frozen=True)
class NonCrossingPartition:
    """
    A non-crossing partition, blocks sorted and ordered by their minima.

    Attributes:
        blocks: Disjoint sorted blocks covering {1..n}
        n: Size of the ground set
    """

    blocks: Blocks
    n: int

    def __post_init__(self):
        """Normalize blocks and reject crossings."""
        normalized, n = _validate_blocks(self.blocks, self.n)
        object.__setattr__(self, "blocks", normalized)
        for a, b in combinations(normalized, 2):
            if _blocks_cross(a, b):
                raise ValueError(f"Blocks {a} and {b} cross")

    @classmethod
    def _from_trusted(cls, blocks: Blocks, n: int) -> "NonCrossingPartition":
        # enumeration output is non-crossing by construction
        partition = object.__new__(cls)
        object.__setattr__(partition, "blocks", blocks)
        object.__setattr__(partition, "n", n)
        return partition

    def __len__(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def __str__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)
        return "{" + inner + "}"


def _shift(blocks: Blocks, offset: int) -> Blocks:
    return tuple(tuple(i + offset for i in block) for block in blocks)


def _iter_shapes(m: int) -> Iterator[Blocks]:
    """Non-crossing partitions of {0..m-1}: the block of 0 and its nested gaps."""
    if m == 0:
        yield ()
        return
    rest = range(1, m)
    for size in range(0, m):
        for partners in combinations(rest, size):
            members = (0,) + partners
            boundaries = list(members) + [m]
            gaps = [
                (boundaries[k] + 1, boundaries[k + 1])
                for k in range(len(members))
                if boundaries[k + 1] - boundaries[k] > 1
            ]
            yield from _fill_gaps(members, gaps)


def _fill_gaps(members: Tuple[int, ...], gaps: List[Tuple[int, int]]) -> Iterator[Blocks]:
    if not gaps:
        yield (members,)
        return
    (start, stop), remaining = gaps[0], gaps[1:]
    for inner in _shapes(stop - start):
        for tail in _fill_gaps(members, remaining):
            yield (tail[0],) + _shift(inner, start) + tail[1:]


@lru_cache(maxsize=None)
def _cached_shapes(m: int) -> Tuple[Blocks, ...]:
    return tuple(_iter_shapes(m))


def _shapes(m: int):
    if m <= _CACHED_SHAPE_SIZE:
        return _cached_shapes(m)
    return _iter_shapes(m)


def _check_size(n: int, ceiling: Optional[int]) -> None:
    ceiling = PARTITION_CONFIG["ceiling"] if ceiling is None else ceiling
    if n < 1:
        raise ValueError(f"Ground set size must be positive, got {n}")
    if n > ceiling:
        raise SizeLimitExceeded(f"n={n} exceeds the partition ceiling {ceiling}")


def iter_nc(n: int, ceiling: Optional[int] = None) -> Iterator[NonCrossingPartition]:
    """
    Stream the non-crossing partitions of {1..n} in a deterministic order.

    Args:
        n: Ground set size
        ceiling: Largest admissible n; defaults to the configured ceiling

    Yields:
        Each non-crossing partition exactly once
    """
    _check_size(n, ceiling)
    for shape in _shapes(n):
        blocks = tuple(sorted(_shift(shape, 1), key=lambda b: b[0]))
        yield NonCrossingPartition._from_trusted(blocks, n)


def enumerate_nc(n: int, ceiling: Optional[int] = None) -> Tuple[NonCrossingPartition, ...]:
    """
    All non-crossing partitions of {1..n}; there are catalan(n) of them.

    Args:
        n: Ground set size, 1 <= n <= ceiling
        ceiling: Largest admissible n; defaults to the configured ceiling

    Returns:
        The partitions, blocks sorted and ordered by their minima
    """
    partitions = tuple(iter_nc(n, ceiling))
    logger.debug(f"Enumerated {len(partitions)} non-crossing partitions of size {n}")
    return partitions


def iter_set_partitions(n: int) -> Iterator[Blocks]:
    """All set partitions of {1..n} (Bell many), crossing or not."""
    def build(k: int, blocks: List[List[int]]):
        if k > n:
            yield tuple(tuple(b) for b in blocks)
            return
        for block in blocks:
            block.append(k)
            yield from build(k + 1, blocks)
            block.pop()
        blocks.append([k])
        yield from build(k + 1, blocks)
        blocks.pop()

    yield from build(1, [])
