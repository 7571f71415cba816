"""Counter-based random streams and order-fixed parallel maps.

Every random draw in the package comes from a Philox stream whose 128-bit key
is built from ``(seed, purpose, index)``. A sample (or a block of samples)
always gets the same stream no matter which worker computes it, so results do
not depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from enum import IntEnum
from typing import Callable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
BLOCK_SIZE = 4096
THREADS_ENV = "STOCHSOL_THREADS"


class Purpose(IntEnum):
    """Domain separation tag stored in the top byte of the stream key."""

    NOISE = 1
    TREE = 2
    PATH = 3
    LABEL = 4


def stream_key(seed: int, purpose: Purpose, index: int = 0) -> tuple[int, int]:
    seed = int(seed)
    index = int(index)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a non-negative 64-bit integer, got {seed}")
    if not 0 <= index < (1 << 56):
        raise ValueError(f"stream index out of range: {index}")
    return seed, (int(purpose) << 56) | index


def make_rng(seed: int, purpose: Purpose, index: int = 0) -> np.random.Generator:
    k0, k1 = stream_key(seed, purpose, index)
    return np.random.Generator(np.random.Philox(key=k0 | (k1 << 64)))


class SampleStreams:
    """Per-sample generators sharing one Philox instance.

    ``streams[i]`` rekeys the shared bit generator and returns it, which is an
    order of magnitude cheaper than building a fresh ``Philox`` per sample and
    yields exactly the same stream as ``make_rng(seed, purpose, i)``. The
    returned generator is only valid until the next lookup.
    """

    def __init__(self, seed: int, purpose: Purpose):
        self.seed = seed
        self.purpose = purpose
        self._bitgen = np.random.Philox()
        self._rng = np.random.Generator(self._bitgen)

    def __getitem__(self, index: int) -> np.random.Generator:
        k0, k1 = stream_key(self.seed, self.purpose, index)
        self._bitgen.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.zeros(4, dtype=np.uint64),
                "key": np.array([k0, k1], dtype=np.uint64),
            },
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return self._rng


def resolve_workers(workers: int | None = None) -> int:
    """Explicit argument wins, then the environment variable, then 1."""
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "1"))
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _concat(results: Sequence[tuple]) -> tuple[np.ndarray, ...]:
    return tuple(np.concatenate(parts) for parts in zip(*results))


def _run_block(fn, seed, purpose, index, size):
    return fn(make_rng(seed, purpose, index), size)


def map_blocks(
    fn: Callable[[np.random.Generator, int], tuple],
    n: int,
    seed: int,
    purpose: Purpose,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> tuple[np.ndarray, ...]:
    """Run a vectorized sampler over fixed-size blocks and concatenate in block order.

    ``fn(rng, size)`` must return a tuple of 1-d arrays of length ``size``.
    Block ``b`` always covers samples ``[b*block_size, (b+1)*block_size)`` and
    draws from stream ``(seed, purpose, b)``.
    """
    sizes = [min(block_size, n - start) for start in range(0, n, block_size)]
    args = [(fn, seed, purpose, b, size) for b, size in enumerate(sizes)]
    workers = resolve_workers(workers)
    if workers == 1 or len(args) == 1:
        results = [_run_block(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_block, *zip(*args)))
    return _concat(results)


def map_chunks(
    fn: Callable[[int, int], tuple],
    n: int,
    workers: int | None = None,
) -> tuple[np.ndarray, ...]:
    """Split ``range(n)`` into contiguous chunks; ``fn(start, stop)`` handles one chunk.

    Used with per-sample streams, where chunk boundaries do not affect results.
    """
    workers = resolve_workers(workers)
    n_chunks = min(n, workers * 4) if workers > 1 else 1
    edges = np.linspace(0, n, n_chunks + 1).astype(int)
    bounds = [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    if workers == 1 or len(bounds) == 1:
        results = [fn(a, b) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, *zip(*bounds)))
    return _concat(results)
