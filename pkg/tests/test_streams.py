import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochsol.streams import (
    THREADS_ENV,
    Purpose,
    SampleStreams,
    make_rng,
    map_blocks,
    map_chunks,
    resolve_workers,
    stream_key,
)


def _normals(rng, size):
    return (rng.standard_normal(size),)


def _indices(start, stop):
    return (np.arange(start, stop, dtype=float),)


def test_same_key_same_stream():
    a = make_rng(5, Purpose.TREE, 3).random(10)
    b = make_rng(5, Purpose.TREE, 3).random(10)
    assert np.array_equal(a, b)


def test_purpose_and_index_separate_streams():
    base = make_rng(5, Purpose.TREE, 3).random(4)
    assert not np.array_equal(base, make_rng(5, Purpose.PATH, 3).random(4))
    assert not np.array_equal(base, make_rng(5, Purpose.TREE, 4).random(4))
    assert not np.array_equal(base, make_rng(6, Purpose.TREE, 3).random(4))


def test_sample_streams_match_fresh_generators():
    streams = SampleStreams(11, Purpose.TREE)
    for i in (0, 1, 17, 12345):
        assert np.array_equal(streams[i].standard_normal(6), make_rng(11, Purpose.TREE, i).standard_normal(6))
    # rekeying restarts the stream
    first = streams[3].random(3)
    assert np.array_equal(streams[3].random(3), first)


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**40), st.integers(0, 2**40))
def test_stream_key_injective_in_index(seed, i, j):
    if i != j:
        assert stream_key(seed, Purpose.PATH, i) != stream_key(seed, Purpose.PATH, j)


def test_stream_key_rejects_bad_input():
    with pytest.raises(ValueError):
        stream_key(-1, Purpose.PATH)
    with pytest.raises(ValueError):
        stream_key(1, Purpose.PATH, 1 << 56)


def test_map_blocks_independent_of_workers():
    a = map_blocks(_normals, 10_000, 3, Purpose.PATH, workers=1, block_size=1000)[0]
    b = map_blocks(_normals, 10_000, 3, Purpose.PATH, workers=3, block_size=1000)[0]
    assert a.shape == (10_000,)
    assert a.tobytes() == b.tobytes()


def test_map_blocks_prefix_stable():
    # growing n only appends samples
    a = map_blocks(_normals, 2500, 3, Purpose.PATH, block_size=1000)[0]
    b = map_blocks(_normals, 3500, 3, Purpose.PATH, block_size=1000)[0]
    assert np.array_equal(a[:2000], b[:2000])


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 200), st.integers(1, 6))
def test_map_chunks_covers_range_in_order(n, workers):
    (out,) = map_chunks(_indices, n, workers=1)
    assert np.array_equal(out, np.arange(n))


def test_map_chunks_parallel_order():
    (out,) = map_chunks(_indices, 1000, workers=3)
    assert np.array_equal(out, np.arange(1000))


def test_resolve_workers(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert resolve_workers() == 1
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_workers() == 3
    assert resolve_workers(2) == 2
    with pytest.raises(ValueError):
        resolve_workers(0)
