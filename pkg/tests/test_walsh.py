import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubefield.errors import DomainError
from cubefield.walsh import bit_positions, fwht, iter_submasks, popcounts, subset_signs


def naive_transform(values):
    """O(4^N) sign-matrix oracle."""
    n = len(values)
    out = np.zeros(n)
    for x in range(n):
        acc = 0.0
        for z in range(n):
            acc += values[z] * (-1.0) ** bin(x & z).count("1")
        out[x] = acc
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=6),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_matches_naive_oracle(n_bits, seed):
    v = np.random.default_rng(seed).standard_normal(1 << n_bits)
    assert np.allclose(fwht(v), naive_transform(v), atol=1e-12)


def test_matches_naive_oracle_n10(rng):
    v = rng.standard_normal(1 << 10)
    assert np.abs(fwht(v) - naive_transform(v)).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=8),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_involution(n_bits, seed):
    v = np.random.default_rng(seed).standard_normal(1 << n_bits)
    assert np.allclose(fwht(fwht(v)), (1 << n_bits) * v, rtol=1e-12, atol=1e-12)


def test_batch_matches_rows(rng):
    batch = rng.standard_normal((7, 64))
    out = fwht(batch)
    assert out.shape == batch.shape
    for i in range(7):
        assert np.array_equal(out[i], fwht(batch[i]))


def test_rejects_bad_length():
    with pytest.raises(DomainError):
        fwht(np.ones(12))


def test_popcounts_small():
    assert popcounts(3).tolist() == [0, 1, 1, 2, 1, 2, 2, 3]


def test_subset_signs_definition():
    n = 4
    for mask in (0b0000, 0b0101, 0b1111):
        signs = subset_signs(mask, n)
        for a in range(1 << n):
            assert signs[a] == (-1.0) ** bin(a & mask).count("1")


def test_iter_submasks_enumerates_powerset():
    subs = sorted(iter_submasks(0b1011))
    assert subs == [a for a in range(16) if a | 0b1011 == 0b1011]


def test_bit_positions():
    assert bit_positions(0) == []
    assert bit_positions(0b10110) == [1, 2, 4]
