"""Core algebra and predicate tests."""

from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from olsembed import (
    EmptySquareError,
    LatinSquare,
    OrderMismatchError,
    PartialLatinSquare,
    ProductPair,
    SymbolArray,
    Triple,
    apply_isotopy,
    are_orthogonal_latin,
    are_orthogonal_partial,
    contains,
    decode_pair,
    encode_pair,
    is_partial_latin,
    is_transversal,
    orthogonality_violations,
    partial_latin_violations,
    xor_mul,
)

from conftest import random_latin_grid


# ---------------------------------------------------------------------------
# xor group


def test_xor_examples():
    assert xor_mul(7, 7) == 0
    assert xor_mul(0, 7) == 7
    assert xor_mul(3, 5) == 6


def test_xor_group_laws_exhaustive():
    # associativity, commutativity, self-inverse, identity over all of [2^8]
    x = np.arange(256, dtype=np.int64)
    xy = x[:, None] ^ x[None, :]
    assert np.array_equal(xy, xy.T)  # commutative
    assert (x ^ x == 0).all()
    assert (x ^ 0 == x).all()
    left = xy[:, :, None] ^ x[None, None, :]
    right = x[:, None, None] ^ xy[None, :, :]
    assert np.array_equal(left, right)  # associative


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_xor_group_laws_random(x, y, z):
    assert xor_mul(x, y) == xor_mul(y, x)
    assert xor_mul(xor_mul(x, y), z) == xor_mul(x, xor_mul(y, z))
    assert xor_mul(x, x) == 0


def test_encode_pair_examples():
    assert encode_pair(0, 5, 3) == 5
    assert encode_pair(2, 3, 2) == 11
    assert decode_pair(11, 2) == (2, 3)


@pytest.mark.parametrize("exponent", range(1, 7))
def test_encode_decode_bijection(exponent):
    size = 1 << exponent
    seen = set()
    for hi in range(size):
        for lo in range(size):
            value = encode_pair(hi, lo, exponent)
            assert decode_pair(value, exponent) == (hi, lo)
            seen.add(value)
    assert seen == set(range(size * size))


def test_encode_pair_range_errors():
    with pytest.raises(ValueError):
        encode_pair(2, 0, 1)
    with pytest.raises(ValueError):
        decode_pair(4, 1)


# ---------------------------------------------------------------------------
# partial latin squares


def test_reference_square_is_partial_latin(reference_pair):
    p, q = reference_pair
    assert p.volume == 11
    assert is_partial_latin(p)
    assert is_partial_latin(q)


def test_same_cell_two_symbols_rejected():
    square = PartialLatinSquare(2, (Triple(0, 0, 0), Triple(0, 0, 1)))
    assert not is_partial_latin(square)
    assert any("cell (0, 0)" in msg for msg in partial_latin_violations(square))


def test_row_repeat_rejected():
    square = PartialLatinSquare(2, (Triple(0, 0, 0), Triple(0, 1, 0)))
    assert not is_partial_latin(square)


def test_malformed_coordinates_reported_not_raised():
    square = PartialLatinSquare(2, (Triple(0, 0, 0), Triple(5, 0, 1)))
    assert not is_partial_latin(square)
    assert any("outside" in msg for msg in partial_latin_violations(square))


def test_volume_zero_is_a_distinct_error():
    with pytest.raises(EmptySquareError):
        PartialLatinSquare(3, ())


def test_triples_sorted_and_deduplicated():
    square = PartialLatinSquare(2, (Triple(1, 1, 0), Triple(0, 0, 1), Triple(1, 1, 0)))
    assert square.triples == (Triple(0, 0, 1), Triple(1, 1, 0))
    assert square.volume == 2


def test_full_latin_square_viewed_as_triples_is_partial_latin():
    rng = random.Random(7)
    for order in (2, 3, 4, 5):
        square = LatinSquare(random_latin_grid(order, rng))
        assert is_partial_latin(square.as_partial())


# ---------------------------------------------------------------------------
# orthogonality


def test_reference_pair_is_orthogonal(reference_pair):
    assert are_orthogonal_partial(*reference_pair)


def test_pair_against_itself_with_repeated_symbol():
    # a symbol repeated in P forces a repeated (x, x) pair against itself
    p = PartialLatinSquare(3, (Triple(0, 0, 0), Triple(1, 1, 0)))
    assert is_partial_latin(p)
    assert not are_orthogonal_partial(p, p)


def test_tampered_reference_pair_fails(reference_pair):
    p, q = reference_pair
    tampered = [Triple(r, c, 1 if (r, c) == (0, 1) else e) for r, c, e in q.triples]
    assert not are_orthogonal_partial(p, PartialLatinSquare(4, tuple(tampered)))


def test_cell_set_mismatch_reported():
    p = PartialLatinSquare(2, (Triple(0, 0, 0), Triple(1, 1, 1)))
    q = PartialLatinSquare(2, (Triple(0, 0, 0),))
    msgs = orthogonality_violations(p, q)
    assert msgs and "empty" in msgs[0]


def test_order_mismatch_is_an_error_not_false():
    p = PartialLatinSquare(2, (Triple(0, 0, 0),))
    q = PartialLatinSquare(3, (Triple(0, 0, 0),))
    with pytest.raises(OrderMismatchError):
        are_orthogonal_partial(p, q)


def test_agreement_with_full_square_predicate():
    # on full squares the partial-pair predicate and the latin-pair predicate agree
    rng = random.Random(11)
    for _ in range(20):
        a = LatinSquare(random_latin_grid(4, rng))
        b = LatinSquare(random_latin_grid(4, rng))
        assert are_orthogonal_latin(a, b) == are_orthogonal_partial(
            a.as_partial(), b.as_partial()
        )


# ---------------------------------------------------------------------------
# latin squares and pairs


def test_order_one_pair_is_orthogonal():
    one = LatinSquare(np.array([[0]]))
    assert are_orthogonal_latin(one, one)


@pytest.mark.parametrize("order", [2, 3, 4, 8])
def test_square_never_orthogonal_to_itself(order):
    rng = random.Random(order)
    square = LatinSquare(random_latin_grid(order, rng))
    assert not are_orthogonal_latin(square, square)


def test_product_pair_order_four_is_orthogonal():
    array = SymbolArray(np.arange(4).reshape(2, 2))
    pair = ProductPair(array, LatinSquare.xor_table(1))
    main, mate = pair.materialize()
    assert are_orthogonal_latin(main, mate)


def test_latin_square_constructor_rejects_bad_grids():
    with pytest.raises(ValueError):
        LatinSquare(np.array([[0, 1], [0, 1]]))
    with pytest.raises(ValueError):
        LatinSquare(np.array([[0, 1], [1, 2]]))


def test_left_divide_inverts_rows():
    rng = random.Random(3)
    square = LatinSquare(random_latin_grid(8, rng))
    for a in range(8):
        for c in range(8):
            assert square.left_divide(a, int(square.grid[a, c])) == c
    xor = LatinSquare.xor_table(3)
    for a in range(8):
        for t in range(8):
            assert xor.left_divide(a, t) == a ^ t


# ---------------------------------------------------------------------------
# transversals


def test_transversal_symbol_repeat_is_false():
    square = LatinSquare.xor_table(1)
    assert not is_transversal(square, [Triple(0, 0, 0), Triple(1, 1, 0)])


def test_transversal_requires_triples_from_the_square():
    square = LatinSquare(np.array([[0, 1], [1, 0]]))
    with pytest.raises(ValueError):
        is_transversal(square, [Triple(0, 0, 0), Triple(1, 1, 1)])


def test_product_transversals_pass_the_predicate():
    array = SymbolArray(np.arange(16).reshape(4, 4))
    pair = ProductPair(array, LatinSquare.xor_table(2))
    main, _ = pair.materialize()
    for z in range(4):
        for d in range(4):
            assert is_transversal(main, pair.transversal(z, d))


# ---------------------------------------------------------------------------
# containment


def test_containment_identity_maps(reference_pair):
    p, _ = reference_pair
    from olsembed import embed_pls

    square = embed_pls(p, 8)
    assert contains(p, square)
    altered = PartialLatinSquare(
        4, (Triple(0, 0, 1),) + tuple(t for t in p.triples if t.cell != (0, 0))
    )
    assert not contains(altered, square)


def test_containment_wrong_region_fails(reference_pair):
    p, _ = reference_pair
    from olsembed import embed_pls

    square = embed_pls(p, 8)
    shifted = np.arange(4) + 4  # a region that cannot hold the copy
    assert not contains(p, square, row_map=shifted, col_map=shifted)


def test_containment_rejects_non_injective_maps(reference_pair):
    p, _ = reference_pair
    from olsembed import embed_pls

    square = embed_pls(p, 8)
    with pytest.raises(ValueError):
        contains(p, square, row_map=[0, 0, 1, 2])


# ---------------------------------------------------------------------------
# isotopy


def test_identity_isotopy_is_noop():
    square = LatinSquare.xor_table(2)
    identity = np.arange(4)
    moved = apply_isotopy(square, identity, identity, identity)
    assert np.array_equal(moved.grid, square.grid)


def test_row_swap_is_an_involution():
    square = LatinSquare.xor_table(2)
    perm = np.array([1, 0, 2, 3])
    identity = np.arange(4)
    once = apply_isotopy(square, perm, identity, identity)
    twice = apply_isotopy(once, perm, identity, identity)
    assert not np.array_equal(once.grid, square.grid)
    assert np.array_equal(twice.grid, square.grid)


def test_row_reversal_stays_latin():
    square = LatinSquare.xor_table(2)
    identity = np.arange(4)
    moved = apply_isotopy(square, identity[::-1].copy(), identity, identity)
    assert isinstance(moved, LatinSquare)  # constructor revalidates


def test_non_permutation_rejected():
    square = LatinSquare.xor_table(1)
    with pytest.raises(ValueError):
        apply_isotopy(square, [0, 0], [0, 1], [0, 1])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_isotopy_preserves_latin_and_inverse_restores(data):
    order = data.draw(st.integers(2, 5))
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    square = LatinSquare(random_latin_grid(order, rng))
    rp = np.array(data.draw(st.permutations(range(order))))
    cp = np.array(data.draw(st.permutations(range(order))))
    sp = np.array(data.draw(st.permutations(range(order))))
    moved = apply_isotopy(square, rp, cp, sp)
    inv = lambda perm: np.argsort(perm)
    restored = apply_isotopy(moved, inv(rp), inv(cp), inv(sp))
    assert np.array_equal(restored.grid, square.grid)


def test_isotopy_preserves_orthogonality_with_shared_row_col_perms():
    array = SymbolArray(np.arange(16).reshape(4, 4))
    pair = ProductPair(array, LatinSquare.xor_table(2))
    main, mate = pair.materialize()
    rng = random.Random(5)
    order = main.order
    rp = np.array(rng.sample(range(order), order))
    cp = np.array(rng.sample(range(order), order))
    sp1 = np.array(rng.sample(range(order), order))
    sp2 = np.array(rng.sample(range(order), order))
    moved_main = apply_isotopy(main, rp, cp, sp1)
    moved_mate = apply_isotopy(mate, rp, cp, sp2)
    assert are_orthogonal_latin(moved_main, moved_mate)
