import itertools
from functools import reduce
from operator import xor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmnc import gf2
from oracles import full_rank_square


def random_invertible(rng, n):
    while True:
        m = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        if gf2.rank_gf2(m) == n:
            return m


def test_mat_vec_example():
    m = np.array([[1, 1, 0], [1, 0, 1]], dtype=np.uint8)
    assert gf2.mat_vec_mod2(m, [1, 1, 1]).tolist() == [0, 0]
    assert gf2.mat_vec_mod2(m, [1, 0, 0]).tolist() == [1, 1]


def test_mat_mul_identity():
    m = np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0]], dtype=np.uint8)
    assert np.array_equal(gf2.mat_mul_mod2(m, gf2.identity(3)), m)


def test_elementwise_product_is_and():
    a = np.array([1, 0, 1, 1], dtype=np.uint8)
    b = np.array([1, 1, 0, 1], dtype=np.uint8)
    assert gf2.elementwise_product(a, b).tolist() == [1, 0, 0, 1]


def test_rejects_non_binary():
    with pytest.raises(ValueError):
        gf2.as_bits([0, 2, 1])
    with pytest.raises(ValueError):
        gf2.rank_gf2([[1, 3], [0, 1]])


def test_rejects_empty():
    with pytest.raises(ValueError):
        gf2.as_bits([])


def test_rank_examples():
    assert gf2.rank_gf2([[1, 1], [1, 1]]) == 1
    assert gf2.rank_gf2([[1, 0], [0, 1]]) == 2
    assert gf2.rank_gf2([[0, 0, 0]]) == 0
    # over the reals this has rank 3; mod 2 the rows sum to zero
    assert gf2.rank_gf2([[1, 1, 0], [0, 1, 1], [1, 0, 1]]) == 2


def test_invert_small():
    m = np.array([[1, 1], [0, 1]], dtype=np.uint8)
    assert gf2.invert_gf2(m).tolist() == [[1, 1], [0, 1]]


def test_invert_singular_raises():
    with pytest.raises(gf2.NotInvertible):
        gf2.invert_gf2([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        gf2.invert_gf2([[1, 0, 1], [0, 1, 1]])


@pytest.mark.parametrize("n", range(1, 9))
def test_inverse_round_trip_random(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(40):
        m = random_invertible(rng, n)
        inv = gf2.invert_gf2(m)
        assert np.array_equal(gf2.mat_mul_mod2(m, inv), gf2.identity(n))
        assert np.array_equal(gf2.mat_mul_mod2(inv, m), gf2.identity(n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rank_matches_null_vector_search(n):
    for bits in itertools.product((0, 1), repeat=n * n):
        m = np.array(bits, dtype=np.uint8).reshape(n, n)
        assert (gf2.rank_gf2(m) == n) == full_rank_square(m)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=n, max_size=n)
))
def test_rank_invariant_under_row_ops(rows):
    m = np.array(rows, dtype=np.uint8)
    r = gf2.rank_gf2(m)
    if m.shape[0] > 1:
        m2 = m.copy()
        m2[0] ^= m2[1]
        assert gf2.rank_gf2(m2) == r
    assert gf2.rank_gf2(m.T) == r


def test_pack_unpack_round_trip():
    m = np.array([[1, 0, 1, 1], [0, 1, 1, 0]], dtype=np.uint8)
    rows = gf2.pack_rows(m)
    assert rows == [0b1101, 0b0110]
    assert np.array_equal(gf2.unpack_rows(rows, 4), m)


@pytest.mark.parametrize("q", range(1, 7))
def test_xor_expansion_exhaustive(q):
    for bits in itertools.product((0, 1), repeat=q):
        assert gf2.xor_expansion(bits) == reduce(xor, bits)


def test_xor_expansion_guards():
    with pytest.raises(ValueError):
        gf2.xor_expansion([])
    with pytest.raises(ValueError):
        gf2.xor_expansion([0, 2])
    with pytest.raises(ValueError):
        gf2.xor_expansion([0] * 33)


def test_xor_fold():
    assert gf2.xor_fold([1, 1, 1]) == 1
    assert gf2.xor_fold([1, 0, 1, 0]) == 0


def test_matrix_text_round_trip():
    text = "2 3\n1 1 0\n1 0 1\n"
    m = gf2.parse_matrix(text)
    assert m.tolist() == [[1, 1, 0], [1, 0, 1]]
    assert gf2.format_matrix(m) == text


@pytest.mark.parametrize(
    "bad",
    ["", "2\n1 1\n", "2 2\n1 0\n", "2 2\n1 0\n0 x\n", "1 2\n1 0 1\n", "1 2\n2 0\n"],
)
def test_parse_matrix_rejects(bad):
    with pytest.raises(ValueError):
        gf2.parse_matrix(bad)
