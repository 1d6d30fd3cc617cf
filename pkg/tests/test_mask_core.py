import numpy as np
import pytest

from skinmorph.mask_core import (BinaryMask, ProbabilityMap, complement,
                                 foreground_count, multiply, subtract,
                                 threshold)


def checkerboard(h, w):
    return (np.indices((h, w)).sum(axis=0) % 2) == 0


class TestBinaryMask:
    @pytest.mark.parametrize("w", [1, 2, 63, 64, 65, 128, 129, 200])
    def test_pack_round_trip(self, rng, w):
        arr = rng.random((17, w)) < 0.5
        m = BinaryMask.from_array(arr)
        assert m.width == w and m.height == 17
        assert np.array_equal(m.to_array(), arr)

    def test_zeros_and_ones(self):
        z = BinaryMask.zeros(70, 3)
        assert foreground_count(z) == 0
        o = BinaryMask.ones(70, 3)
        assert foreground_count(o) == 70 * 3

    def test_padding_bits_forced_zero(self):
        # a caller handing in words with junk past the width must still
        # get a canonical mask
        words = np.full((2, 2), np.uint64(0xFFFFFFFFFFFFFFFF))
        m = BinaryMask(65, 2, words)
        assert foreground_count(m) == 130
        assert m == BinaryMask.ones(65, 2)

    @pytest.mark.parametrize("w,h", [(0, 5), (5, 0), (0, 0), (-1, 3)])
    def test_rejects_empty_dims(self, w, h):
        with pytest.raises(ValueError):
            BinaryMask(w, h)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            BinaryMask.from_array(np.zeros(5, dtype=bool))
        with pytest.raises(ValueError):
            BinaryMask.from_array(np.zeros((2, 2, 2), dtype=bool))

    def test_equality(self):
        a = BinaryMask.from_array(checkerboard(4, 4))
        b = BinaryMask.from_array(checkerboard(4, 4))
        c = BinaryMask.from_array(~checkerboard(4, 4))
        assert a == b
        assert a != c
        assert a != BinaryMask.zeros(4, 5)


class TestProbabilityMap:
    def test_holds_uint8(self):
        p = ProbabilityMap(np.arange(6, dtype=np.uint8).reshape(2, 3))
        assert p.width == 3 and p.height == 2
        assert p.values.dtype == np.uint8

    def test_accepts_wider_ints_in_range(self):
        p = ProbabilityMap(np.array([[0, 255]], dtype=np.int64))
        assert p.values.tolist() == [[0, 255]]

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            ProbabilityMap(np.array([[0, 256]]))
        with pytest.raises(ValueError):
            ProbabilityMap(np.array([[-1, 0]]))

    def test_rejects_floats(self):
        with pytest.raises(ValueError):
            ProbabilityMap(np.array([[0.5]]))

    def test_values_read_only(self):
        p = ProbabilityMap(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(ValueError):
            p.values[0, 0] = 1


class TestSetOps:
    def test_multiply_checkerboard_with_top_half(self):
        cb = checkerboard(4, 4)
        top = np.zeros((4, 4), dtype=bool)
        top[:2] = True
        got = multiply(BinaryMask.from_array(cb), BinaryMask.from_array(top))
        assert np.array_equal(got.to_array(), cb & top)

    def test_subtract_center_from_full(self):
        full = BinaryMask.ones(3, 3)
        center = np.zeros((3, 3), dtype=bool)
        center[1, 1] = True
        got = subtract(full, BinaryMask.from_array(center))
        assert foreground_count(got) == 8
        assert not got.to_array()[1, 1]

    def test_complement_top_half(self):
        top = np.zeros((4, 4), dtype=bool)
        top[:2] = True
        got = complement(BinaryMask.from_array(top))
        assert np.array_equal(got.to_array(), ~top)

    def test_complement_involution_keeps_padding_clean(self, rng):
        arr = rng.random((9, 67)) < 0.3
        m = BinaryMask.from_array(arr)
        assert complement(complement(m)) == m
        assert foreground_count(complement(m)) == 9 * 67 - arr.sum()

    def test_dimension_mismatch_rejected(self):
        a = BinaryMask.zeros(4, 4)
        b = BinaryMask.zeros(4, 5)
        for op in (multiply, subtract):
            with pytest.raises(ValueError, match="mismatch"):
                op(a, b)

    def test_ops_do_not_mutate_inputs(self, rng):
        arr = rng.random((6, 80)) < 0.5
        arr2 = rng.random((6, 80)) < 0.5
        a = BinaryMask.from_array(arr)
        b = BinaryMask.from_array(arr2)
        multiply(a, b)
        subtract(a, b)
        complement(a)
        assert np.array_equal(a.to_array(), arr)
        assert np.array_equal(b.to_array(), arr2)

    def test_foreground_count_checkerboard(self):
        assert foreground_count(BinaryMask.from_array(checkerboard(4, 4))) == 8


class TestThreshold:
    def test_basic_cut(self):
        p = ProbabilityMap(np.array([[0, 49, 50, 51, 255]], dtype=np.uint8))
        m = threshold(p, 50)
        assert m.to_array().tolist() == [[False, False, True, True, True]]

    def test_tau_zero_all_foreground(self):
        p = ProbabilityMap(np.zeros((3, 4), dtype=np.uint8))
        assert foreground_count(threshold(p, 0)) == 12

    def test_tau_255_only_saturated(self):
        p = ProbabilityMap(np.array([[254, 255]], dtype=np.uint8))
        assert threshold(p, 255).to_array().tolist() == [[False, True]]

    @pytest.mark.parametrize("tau", [-1, 256, 1000])
    def test_rejects_out_of_range_tau(self, tau):
        p = ProbabilityMap(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(ValueError):
            threshold(p, tau)

    def test_rejects_non_integer_tau(self):
        p = ProbabilityMap(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(ValueError):
            threshold(p, 0.5)
