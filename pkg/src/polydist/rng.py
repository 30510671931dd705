"""Reproducible parallel sampling on top of numpy's Philox counter-based generator.

A stream is keyed by ``(seed, chunk_index)``.  Work is cut into fixed-size
chunks that each draw from their own keyed stream.  Partial results are merged
in chunk order, so output never depends on the number of workers.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

from .errors import DomainError

CHUNK_SIZE = 1 << 16
T = TypeVar("T")


def check_seed(seed) -> int:
    if seed is None:
        raise DomainError("a seed is required for stochastic computations")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise DomainError("seed must lie in [0, 2^64)")
    return seed


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sub-stream ``index`` of ``seed``."""
    return np.random.Generator(np.random.Philox(key=[check_seed(seed), int(index)]))


def default_threads() -> int:
    return os.cpu_count() or 1


def chunk_sizes(total: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(total, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn: Callable[[int, int], T], total: int, threads: int | None = None,
               chunk: int = CHUNK_SIZE) -> list[T]:
    """Call ``fn(chunk_index, chunk_len)`` for every chunk; results come back in chunk order."""
    sizes = chunk_sizes(total, chunk)
    threads = threads or default_threads()
    if threads < 1:
        raise DomainError("thread count must be positive")
    if threads == 1 or len(sizes) <= 1:
        return [fn(i, s) for i, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))
