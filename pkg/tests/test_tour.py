import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from islandea import Tour, cycle_length, random_tour

from conftest import (assert_valid_permutation, brute_force_cycle_length,
                      circle_instance)


class TestBasics:
    def test_rejects_non_permutation(self, square_instance):
        with pytest.raises(ValueError):
            Tour(square_instance, [0, 1, 2, 2])
        with pytest.raises(ValueError):
            Tour(square_instance, [0, 1, 2, 4])
        with pytest.raises(ValueError):
            Tour(square_instance, [0, 1, 2])

    def test_position_is_inverse(self, ring12):
        t = random_tour(ring12, np.random.default_rng(0))
        for p in range(12):
            assert t.position[t.order[p]] == p

    def test_successor_wraps(self, square_instance):
        t = Tour(square_instance, [0, 1, 2, 3])
        assert t.successor(3) == 0

    def test_successor_reads_permutation(self, square_instance):
        t = Tour(square_instance, [0, 2, 1, 3])
        assert t.successor(0) == 2
        assert t.successor(2) == 1
        assert t.successor(1) == 3
        assert t.predecessor(2) == 0

    def test_successor_out_of_range(self, square_instance):
        t = Tour(square_instance, [0, 1, 2, 3])
        with pytest.raises(IndexError):
            t.successor(4)

    def test_successor_function_is_bijection(self, ring12):
        t = random_tour(ring12, np.random.default_rng(5))
        succ = t.successors()
        assert_valid_permutation(succ, 12)

    def test_copy_is_independent(self, ring12):
        t = random_tour(ring12, np.random.default_rng(1))
        c = t.copy()
        c.invert_segment(2, 5)
        assert not np.array_equal(t.order, c.order) or t == c


class TestCycleLength:
    def test_tiny_hand_sum(self, tiny_instance):
        # 1 + nint(sqrt(2)) + 1 = 3
        t = Tour(tiny_instance, [0, 1, 2])
        assert t.length == 3
        assert cycle_length(t, tiny_instance) == 3

    def test_deterministic(self, ring12):
        t = random_tour(ring12, np.random.default_rng(2))
        assert cycle_length(t, ring12) == cycle_length(t, ring12)

    def test_reversed_tour_same_length(self, ring12):
        rng = np.random.default_rng(3)
        for _ in range(20):
            t = random_tour(ring12, rng)
            r = Tour(ring12, t.order[::-1].copy())
            assert t.length == r.length

    def test_dimension_mismatch(self, tiny_instance, square_instance):
        t = Tour(tiny_instance, [0, 1, 2])
        with pytest.raises(ValueError):
            cycle_length(t, square_instance)

    def test_matches_brute_force(self):
        inst = circle_instance(17)
        rng = np.random.default_rng(4)
        for _ in range(25):
            t = random_tour(inst, rng)
            assert t.length == brute_force_cycle_length(t.order, inst)


class TestInvertSegment:
    def test_simple_inversion(self, square_instance):
        t = Tour(square_instance, [0, 1, 2, 3])
        t.invert_segment(1, 2)
        assert list(t.order) == [0, 2, 1, 3]

    def test_wrap_around_inversion(self, ring12):
        t = Tour(ring12, list(range(12)))
        t.invert_segment(10, 1)
        # positions 10, 11, 0, 1 reversed
        assert list(t.order[:2]) == [11, 10]
        assert list(t.order[10:]) == [1, 0]

    def test_full_wrap_is_reversal(self, ring12):
        t = Tour(ring12, list(range(12)))
        before = t.length
        t.invert_segment(0, 11)
        assert list(t.order) == list(range(12))[::-1]
        assert t.length == before
        assert t.length == t.recompute_length()

    def test_out_of_range(self, ring12):
        t = Tour(ring12, list(range(12)))
        with pytest.raises(IndexError):
            t.invert_segment(0, 12)

    def test_incremental_length_random_cases(self):
        # frozen oracle: full recomputation after every inversion
        inst = circle_instance(23)
        rng = np.random.default_rng(99)
        t = random_tour(inst, rng)
        for _ in range(2000):
            i = int(rng.integers(0, 23))
            j = int(rng.integers(0, 23))
            t.invert_segment(i, j)
            assert_valid_permutation(t.order, 23)
            assert t.length == brute_force_cycle_length(t.order, inst)
            assert t.position[t.order].tolist() == list(range(23))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 11), st.integers(0, 11), st.integers(0, 2**32 - 1))
    def test_incremental_length_property(self, i, j, seed):
        inst = circle_instance(12)
        t = random_tour(inst, np.random.default_rng(seed))
        t.invert_segment(i, j)
        assert t.length == brute_force_cycle_length(t.order, inst)
