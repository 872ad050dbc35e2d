"""Run independent trial chunks on a thread pool.

'why': trials are split into fixed-size chunks that each own an RNG substream, so
results depend on the chunk layout only, never on how many threads ran them
"""
from __future__ import annotations

import concurrent.futures
from collections.abc import Callable
from typing import Final, TypeVar

from ._errors import DomainError

_T = TypeVar("_T")

DEFAULT_CHUNK_SIZE: Final[int] = 256


def chunk_bounds(total: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> list[tuple[int, int]]:
    """Return (start, count) for each chunk covering `total` trials."""

    if total < 0:
        raise DomainError(f"trial count must be non-negative (got {total})")
    if chunk_size < 1:
        raise DomainError(f"chunk size must be positive (got {chunk_size})")
    return [(start, min(chunk_size, total - start)) for start in range(0, total, chunk_size)]


def map_chunks(
    fn: Callable[[int, int, int], _T],
    total: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[_T]:
    """Call `fn(chunk_index, start, count)` for every chunk and return results in chunk order.

    With `threads == 1` the chunks run inline, which keeps tracebacks simple.
    """

    if threads < 1:
        raise DomainError(f"threads must be at least 1 (got {threads})")
    bounds = chunk_bounds(total, chunk_size)
    if threads == 1 or len(bounds) <= 1:
        return [fn(index, start, count) for index, (start, count) in enumerate(bounds)]

    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as executor:
        futures = [executor.submit(fn, index, start, count) for index, (start, count) in enumerate(bounds)]
        return [future.result() for future in futures]
