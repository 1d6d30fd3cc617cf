import numpy as np
import pytest

import class_suite
from skinmorph.classification import (MaskFeatures, PatternClass,
                                      ThresholdParams, border_skin_ratio,
                                      classify, skin_ratio)
from skinmorph.mask_core import BinaryMask


def mask(arr):
    return BinaryMask.from_array(arr)


class TestThresholdParams:
    def test_valid(self):
        p = ThresholdParams(a1=0.3, a2=0.06, b1=10, b2=40, c1=0.25)
        assert p.a1 == 0.3

    @pytest.mark.parametrize("kw", [
        dict(a1=0.3, a2=0.3, b1=1, b2=1, c1=0.5),    # a2 not < a1
        dict(a1=0.3, a2=0.5, b1=1, b2=1, c1=0.5),    # a2 > a1
        dict(a1=1.2, a2=0.1, b1=1, b2=1, c1=0.5),    # a1 > 1
        dict(a1=0.3, a2=-0.1, b1=1, b2=1, c1=0.5),   # a2 < 0
        dict(a1=0.3, a2=0.1, b1=0, b2=1, c1=0.5),    # b1 < 1
        dict(a1=0.3, a2=0.1, b1=1, b2=0, c1=0.5),    # b2 < 1
        dict(a1=0.3, a2=0.1, b1=1, b2=1, c1=1.5),    # c1 > 1
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ThresholdParams(**kw)


class TestSkinRatio:
    def test_plain_fraction(self):
        arr = np.zeros((10, 10), dtype=bool)
        arr[:3] = True
        assert skin_ratio(mask(arr)) == 0.3

    def test_hole_counts_after_filling(self):
        # 6x6 ring (20 px) around a 4x4 hole on 10x10: the hole fills,
        # so the ratio covers 36 px, not 20
        arr = np.zeros((10, 10), dtype=bool)
        arr[2:8, 2:8] = True
        arr[3:7, 3:7] = False
        assert skin_ratio(mask(arr)) == 36 / 100

    def test_empty_and_full(self):
        assert skin_ratio(BinaryMask.zeros(7, 5)) == 0.0
        assert skin_ratio(BinaryMask.ones(7, 5)) == 1.0


class TestBorderSkinRatio:
    def test_top_row_only(self):
        arr = np.zeros((5, 5), dtype=bool)
        arr[0] = True
        # border set has 5 + 2*5 - 4 = 11 positions, 5 foreground
        assert border_skin_ratio(mask(arr)) == 5 / 11

    def test_bottom_row_excluded(self):
        arr = np.zeros((5, 5), dtype=bool)
        arr[-1] = True
        # the whole bottom row, corners included, is outside the
        # border set: side columns stop one short of it
        assert border_skin_ratio(mask(arr)) == 0.0

    def test_side_columns(self):
        arr = np.zeros((4, 6), dtype=bool)
        arr[:, 0] = True
        # side column contributes h-1 = 3 positions (bottom corner out)
        assert border_skin_ratio(mask(arr)) == 3 / (6 + 2 * 4 - 4)

    def test_full_frame_is_one(self):
        assert border_skin_ratio(BinaryMask.ones(9, 4)) == 1.0

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            border_skin_ratio(BinaryMask.ones(1, 5))
        with pytest.raises(ValueError):
            border_skin_ratio(BinaryMask.ones(5, 1))


def suite_params():
    strict = ThresholdParams(**class_suite.PARAMS_STRICT)
    loose = ThresholdParams(**class_suite.PARAMS_LOOSE)
    return strict, loose


class TestClassifySuite:
    @pytest.mark.parametrize("case", class_suite.build_cases(),
                             ids=lambda c: c.name)
    def test_class_and_features_strict(self, case):
        strict, _ = suite_params()
        got = classify(mask(case.array), strict)
        assert got.pattern_class == PatternClass(case.expected_strict)
        assert got.features.sr == pytest.approx(float(case.sr), abs=1e-12)
        assert got.features.cc == case.cc
        if case.bsr_strict is None:
            assert got.features.bsr is None
        else:
            assert got.features.bsr == pytest.approx(
                float(case.bsr_strict), abs=1e-12)

    @pytest.mark.parametrize("case", class_suite.build_cases(),
                             ids=lambda c: c.name)
    def test_class_and_features_loose(self, case):
        _, loose = suite_params()
        got = classify(mask(case.array), loose)
        assert got.pattern_class == PatternClass(case.expected_loose)
        assert got.features.sr == pytest.approx(float(case.sr), abs=1e-12)
        assert got.features.cc == case.cc
        if case.bsr_loose is None:
            assert got.features.bsr is None
        else:
            assert got.features.bsr == pytest.approx(
                float(case.bsr_loose), abs=1e-12)

    def test_intermediates_are_exposed(self):
        strict, _ = suite_params()
        arr = np.ones((64, 64), dtype=bool)
        got = classify(mask(arr), strict)
        assert got.filled == mask(arr)
        assert got.eroded == mask(arr)

    def test_low_branch_leaves_no_eroded(self):
        strict, _ = suite_params()
        got = classify(BinaryMask.zeros(32, 32), strict)
        assert got.eroded is None
        assert got.features.cc is None


class TestClassifyBranchGeometry:
    """The b1/b2 cuts against counts, pinned on tiny synthetic masks."""

    def test_cc_equal_b1_is_not_less(self):
        # three isolated blobs, b1=3: cc < b1 fails -> C
        arr = np.zeros((80, 240), dtype=bool)
        for c in (10, 90, 170):
            arr[10:60, c:c + 50] = True
        params = ThresholdParams(a1=0.3, a2=0.06, b1=3, b2=40, c1=0.5)
        got = classify(mask(arr), params)
        assert got.features.cc == 3
        assert got.pattern_class is PatternClass.C

    def test_cc_just_below_b1_checks_border(self):
        arr = np.zeros((80, 240), dtype=bool)
        for c in (10, 90, 170):
            arr[10:60, c:c + 50] = True
        params = ThresholdParams(a1=0.3, a2=0.06, b1=4, b2=40, c1=0.5)
        got = classify(mask(arr), params)
        assert got.pattern_class is PatternClass.B
        assert got.features.bsr == 0.0
