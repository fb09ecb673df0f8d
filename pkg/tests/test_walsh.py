import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evobench.bent.walsh import (
    affine_tables,
    bent_bound,
    brute_force_nonlinearity,
    fwht,
    n_vars_of,
    nl_of_words,
    nonlinearity,
    pack,
    packed_variable_masks,
    unpack,
    unpack_words,
    variable_mask,
    walsh_spectrum,
)


def test_small_examples():
    spec, nl = nonlinearity([0, 0, 0, 0])
    assert list(spec) == [4, 0, 0, 0] and nl == 0
    spec, nl = nonlinearity([0, 0, 0, 1])
    assert list(np.abs(spec)) == [2, 2, 2, 2] and nl == 1 == bent_bound(2)
    assert nonlinearity([0, 1, 1, 0])[1] == 0


def test_bent_bound_values():
    assert [bent_bound(n) for n in (2, 4, 6, 12)] == [1, 6, 28, 2016]
    with pytest.raises(ValueError):
        bent_bound(5)


def test_length_checks():
    with pytest.raises(ValueError):
        nonlinearity([0, 1, 1])
    with pytest.raises(ValueError):
        fwht(np.zeros(6))
    assert n_vars_of(np.zeros(64)) == 6


def test_affine_oracle_by_itself():
    aff = affine_tables(3)
    assert aff.shape == (16, 8) and len({row.tobytes() for row in aff}) == 16


def test_all_four_variable_functions_agree_with_affine_distance():
    idx = np.arange(1 << 16)
    tables = ((idx[:, None] >> np.arange(16)[None, :]) & 1).astype(np.uint8)
    _, nl = nonlinearity(tables)
    aff = affine_tables(4)
    # Hamming distance to every affine table, minimised
    dist = np.zeros((1 << 16,), dtype=np.int64) + 99
    for row in aff:
        dist = np.minimum(dist, (tables != row).sum(axis=1))
    assert (nl == dist).all()
    assert nl.max() == bent_bound(4)
    # bent functions of 4 variables: 896 of them
    assert int((nl == 6).sum()) == 896


@pytest.mark.parametrize("n", [4, 8, 12])
def test_parseval(n):
    rng = np.random.default_rng(n)
    tables = rng.integers(0, 2, size=(10**4 if n < 12 else 2000, 1 << n), dtype=np.uint8)
    spec = walsh_spectrum(tables)
    assert ((spec**2).sum(axis=1) == 1 << (2 * n)).all()


@given(st.lists(st.integers(-1000, 1000), min_size=16, max_size=16))
def test_fwht_involution(values):
    v = np.array(values)
    assert (fwht(fwht(v)) == 16 * v).all()


@given(st.integers(0, 2**32), st.sampled_from([4, 6, 8]))
def test_nl_invariant_under_variable_permutation(seed, n):
    rng = np.random.default_rng(seed)
    table = rng.integers(0, 2, size=1 << n).astype(np.uint8)
    perm = rng.permutation(n)
    x = np.arange(1 << n)
    bits = (x[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    y = (bits[:, perm] << (n - 1 - np.arange(n))[None, :]).sum(axis=1)
    assert nonlinearity(table[y])[1] == nonlinearity(table)[1]


@given(st.integers(0, 2**32), st.sampled_from([2, 3, 5, 6, 7, 10]))
def test_compiled_nl_matches_numpy(seed, n):
    table = np.random.default_rng(seed).integers(0, 2, size=1 << n).astype(np.uint8)
    words = np.frombuffer(np.packbits(np.pad(table, (0, max(0, 64 - len(table)))), bitorder="little").tobytes(), "<u8")
    assert (unpack_words(words, n) == table).all()
    assert nl_of_words(words.astype(np.uint64), n) == nonlinearity(table)[1]


def test_variable_masks_and_packing():
    n = 3
    assert list(unpack(variable_mask(0, n), n)) == [0, 0, 0, 0, 1, 1, 1, 1]
    assert list(unpack(variable_mask(2, n), n)) == [0, 1, 0, 1, 0, 1, 0, 1]
    t = np.random.default_rng(0).integers(0, 2, 256).astype(np.uint8)
    assert (unpack(pack(t), 8) == t).all()
    words = packed_variable_masks(8)
    for v in range(8):
        assert (unpack_words(words[v], 8) == unpack(variable_mask(v, 8), 8)).all()


def test_brute_force_matches_spectrum_on_random_six():
    rng = np.random.default_rng(5)
    for _ in range(50):
        t = rng.integers(0, 2, 64).astype(np.uint8)
        assert brute_force_nonlinearity(t) == nonlinearity(t)[1]
