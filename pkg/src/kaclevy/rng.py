"""Counter-based random streams and a deterministic batch runner.

A stream is a Philox generator keyed by (seed, stream_id), so the k-th draw
of a stream depends on those three numbers only. Monte-Carlo work is cut
into fixed-size batches, each with its own stream id, so results do not
depend on how batches are spread over workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

BATCH_SIZE = 16384
_MASK64 = (1 << 64) - 1


def rng_stream(seed: int, stream_id: int) -> np.random.Generator:
    key = np.array([seed & _MASK64, stream_id & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def stream_id(tag: int, index: int) -> int:
    """Pack an experiment tag and a batch index into one 64-bit id."""
    return ((tag & 0xFFFFFFFF) << 32) | (index & 0xFFFFFFFF)


def child_stream(rng: np.random.Generator) -> np.random.Generator:
    """Independent generator keyed by two words drawn from ``rng``."""
    key = rng.integers(0, 2**63, size=2, dtype=np.int64).astype(np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def run_batches(fn: Callable[[np.random.Generator, int], np.ndarray], n: int, seed: int,
                tag: int = 0, workers: int = 1, batch_size: int = BATCH_SIZE) -> np.ndarray:
    """Evaluate ``fn(rng, size)`` over consecutive batches and concatenate in order.

    ``fn`` must return an array whose first axis has length ``size``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    sizes = [batch_size] * (n // batch_size)
    if n % batch_size:
        sizes.append(n % batch_size)

    def job(k: int) -> np.ndarray:
        return np.asarray(fn(rng_stream(seed, stream_id(tag, k)), sizes[k]))

    if workers <= 1:
        parts = [job(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    return np.concatenate(parts, axis=0)
