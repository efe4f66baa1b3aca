"""Stream derivation: reference vectors, independence, pool reuse."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from runslab._rng import StreamPool, mix_key, splitmix64, stream


def test_splitmix64_reference_vectors():
    # First outputs of the standard sequence seeded at 0 and 1.
    assert splitmix64(0) == 16294208416658607535
    assert splitmix64(1) == 10451216379200822465


def test_mix_key_frozen_values():
    # Any change here silently re-seeds every simulation in the package,
    # so the mapping is pinned.
    assert mix_key(0, 1) == 627405149472732430
    assert mix_key(1, 0) == 6791897765849424158
    assert mix_key(0, 12) == 10802576077850714572


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_mix_key_is_64_bit(base, index):
    assert 0 <= mix_key(base, index) < 2**64


def test_mix_key_asymmetric():
    assert mix_key(3, 7) != mix_key(7, 3)


def test_nearby_keys_are_far_apart():
    keys = [mix_key(0, i) for i in range(1000)]
    assert len(set(keys)) == 1000
    # crude avalanche check: consecutive keys differ in ~half their bits
    flips = [bin(keys[i] ^ keys[i + 1]).count("1") for i in range(999)]
    assert 15 < min(flips) and max(flips) < 50


def test_stream_is_deterministic():
    a = stream(42, 3).random(8)
    b = stream(42, 3).random(8)
    np.testing.assert_array_equal(a, b)


def test_streams_differ_across_index_and_seed():
    base = stream(42, 0).random(4)
    assert not np.array_equal(base, stream(42, 1).random(4))
    assert not np.array_equal(base, stream(43, 0).random(4))


def test_pool_matches_fresh_streams():
    pool = StreamPool(base_seed=99)
    for index in (0, 1, 17, 2**40):
        np.testing.assert_array_equal(
            pool.get(index).random(16), stream(99, index).random(16)
        )


def test_pool_reuse_resets_position():
    pool = StreamPool(base_seed=5)
    first = pool.get(2).random(10)
    pool.get(3).random(7)  # burn some state on another stream
    np.testing.assert_array_equal(pool.get(2).random(10), first)


def test_pool_permutations_match():
    pool = StreamPool(base_seed=0)
    np.testing.assert_array_equal(
        pool.get(6).permutation(50), stream(0, 6).permutation(50)
    )


@pytest.mark.parametrize("index", [0, 1, 2])
def test_integer_draws_match_pool(index):
    pool = StreamPool(base_seed=123)
    a = pool.get(index).integers(0, 1 << 62, size=5)
    b = stream(123, index).integers(0, 1 << 62, size=5)
    np.testing.assert_array_equal(a, b)
