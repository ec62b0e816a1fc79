import math
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fluxring as fr
from fluxring.basis import apply_hop, hopping_moves, mode, spin_word
from fluxring.errors import EmptySector


def test_sector_dimensions():
    assert fr.enumerate_sector(4, 2, 0).dim == 16
    assert fr.enumerate_sector(4, 2, 0, hardcore=True).dim == 12
    assert fr.enumerate_sector(7, 6, 0, hardcore=True).dim == comb(7, 6) * comb(6, 3)


def test_sector_counts_match_formulas():
    for L in (3, 4, 5):
        for N in range(0, 2 * L + 1):
            for two_sz in range(-N, N + 1, 2):
                n_up = (N + two_sz) // 2
                if n_up > L or N - n_up > L:
                    continue
                free = fr.enumerate_sector(L, N, two_sz)
                assert free.dim == comb(L, n_up) * comb(L, N - n_up)
                if N <= L:
                    hc = fr.enumerate_sector(L, N, two_sz, hardcore=True)
                    assert hc.dim == comb(L, N) * comb(N, n_up)


def test_empty_sector():
    with pytest.raises(EmptySector):
        fr.enumerate_sector(4, 2, 1)  # parity mismatch
    with pytest.raises(EmptySector):
        fr.enumerate_sector(4, 2, 4)  # |2Sz| > N
    with pytest.raises(EmptySector):
        fr.enumerate_sector(3, 4, 0, hardcore=True)


def test_states_sorted_and_indexed():
    basis = fr.enumerate_sector(5, 3, 1, hardcore=True)
    assert list(basis.states) == sorted(basis.states)
    for i, s in enumerate(basis.states):
        assert basis.index[s] == i
        assert s.bit_count() == 3


def test_necklace_period_examples():
    assert fr.necklace_period("udud") == 2
    assert fr.necklace_period("uudd") == 4
    assert fr.necklace_period("ududud") == 2
    assert fr.necklace_period("u") == 1
    assert fr.necklace_period("ud") == 2


@given(st.text(alphabet="ud", min_size=1, max_size=12))
@settings(max_examples=100, deadline=None)
def test_necklace_period_properties(word):
    p = fr.necklace_period(word)
    assert len(word) % p == 0
    assert word[p:] + word[:p] == word
    # the period is a class invariant: every rotation has the same one
    for k in range(len(word)):
        assert fr.necklace_period(word[k:] + word[:k]) == p


def test_fermion_sign_hand_computed():
    # c+_2 c_0 with mode 1 occupied in between: one crossing, sign -1
    occ = (1 << 0) | (1 << 1)
    new, sign = apply_hop(occ, 2, 0)
    assert new == (1 << 1) | (1 << 2) and sign == -1
    # same move with nothing in between: sign +1
    occ = 1 << 0
    new, sign = apply_hop(occ, 2, 0)
    assert new == 1 << 2 and sign == +1
    # spin flip at one site touches adjacent modes: never a sign
    occ = (1 << 1) | (1 << 4)
    new, sign = apply_hop(occ, 0, 1)
    assert sign == +1
    # Pauli blocking and empty-source both kill the move
    assert apply_hop(0b11, 0, 1) is None
    assert apply_hop(0b10, 2, 0) is None


def test_single_block_l4():
    spec = fr.make_spec(4, 2, U=fr.INFINITY)
    basis = fr.enumerate_sector(4, 2, 0, hardcore=True)
    blocks = fr.decompose_blocks(basis, spec)
    assert len(blocks) == 1
    assert blocks[0].period == 2
    assert blocks[0].dimension == 12


def _cyclic_classes(word_len, n_up):
    """Independent necklace census: orbits of binary words under rotation."""
    seen, classes = set(), []
    for ups in combinations(range(word_len), n_up):
        word = "".join("u" if i in ups else "d" for i in range(word_len))
        if word in seen:
            continue
        orbit = {word[k:] + word[:k] for k in range(word_len)}
        seen |= orbit
        classes.append((min(orbit), len(orbit)))
    return classes


def test_blocks_l6_n4_match_necklace_census():
    spec = fr.make_spec(6, 4, U=fr.INFINITY)
    basis = fr.enumerate_sector(6, 4, 0, hardcore=True)
    blocks = fr.decompose_blocks(basis, spec)
    census = _cyclic_classes(4, 2)  # words of length N=4 with two ups
    assert len(blocks) == len(census) == 2
    got = sorted((b.representative, b.dimension) for b in blocks)
    want = sorted((rep, orbit * comb(6, 4)) for rep, orbit in census)
    assert got == want
    assert sorted(b.period for b in blocks) == [2, 4]
    assert all(b.period % 2 == 0 for b in blocks)  # Sz = 0 forces even periods


def test_blocks_polarized_sector_allows_odd_period():
    spec = fr.make_spec(5, 2, U=fr.INFINITY)
    basis = fr.enumerate_sector(5, 2, 2, hardcore=True)  # word "uu"
    blocks = fr.decompose_blocks(basis, spec)
    assert len(blocks) == 1
    assert blocks[0].period == 1
    assert blocks[0].dimension == basis.dim


@pytest.mark.parametrize("L,N", [(4, 2), (6, 4), (7, 6), (5, 4)])
def test_blocks_closed_under_hopping_and_partition(L, N):
    spec = fr.make_spec(L, N, U=fr.INFINITY)
    basis = fr.enumerate_sector(L, N, 0, hardcore=True)
    blocks = fr.decompose_blocks(basis, spec)
    assert sum(b.dimension for b in blocks) == basis.dim
    owner = {}
    for k, b in enumerate(blocks):
        for i in b.member_indices:
            owner[i] = k
    for i, j, *_ in hopping_moves(spec, basis):
        assert owner[i] == owner[j]
    # every member's spin word is a rotation of the block representative
    for b in blocks:
        for i in b.member_indices:
            w = spin_word(basis.states[i], L)
            assert min(w[k:] + w[:k] for k in range(len(w))) == b.representative


def test_block_membership_gauge_invariant():
    import numpy as np

    base = fr.make_spec(6, 4, U=fr.INFINITY)
    basis = fr.enumerate_sector(6, 4, 0, hardcore=True)
    a = fr.decompose_blocks(basis, base)
    rng = np.random.default_rng(5)
    moved = fr.make_spec(6, 4, base.hop_mag, rng.uniform(0, 2 * math.pi, 6), base.V,
                         fr.INFINITY)
    b = fr.decompose_blocks(basis, moved)
    assert [x.member_indices for x in a] == [x.member_indices for x in b]
