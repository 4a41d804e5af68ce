"""
Parallel Map

Chunked, seed-split execution whose result does not depend on thread count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .stats import JACKKNIFE_GROUPS

logger = logging.getLogger(__name__)

T = TypeVar("T")


def chunk_sizes(n_items: int, n_chunks: int = JACKKNIFE_GROUPS) -> list[int]:
    n_chunks = max(1, min(n_chunks, n_items))
    base, extra = divmod(n_items, n_chunks)
    return [base + (1 if k < extra else 0) for k in range(n_chunks)]


def map_chunks(
    fn: Callable[[int, np.random.Generator], T],
    n_items: int,
    seed: int,
    threads: int = 1,
    n_chunks: int = JACKKNIFE_GROUPS,
) -> list[T]:
    """Run fn(size, rng) on each chunk; chunk k always gets sub-stream k."""
    sizes = chunk_sizes(n_items, n_chunks)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    rngs = [np.random.default_rng(s) for s in streams]
    logger.debug("map_chunks: %d items in %d chunks on %d threads", n_items, len(sizes), threads)
    if threads <= 1:
        return [fn(size, rng) for size, rng in zip(sizes, rngs)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, sizes, rngs))
