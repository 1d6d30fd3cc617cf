"""Mask pattern classification driving the adaptive pipeline.

A detector mask is sorted into one of five pattern classes from three
cheap features: the hole-filled skin ratio, the component count after
a heavy erosion, and the share of skin on the top/left/right border.
The class picks which clean-up strategy downstream applies.
"""

import enum
from dataclasses import dataclass

from .mask_core import BinaryMask, foreground_count
from .morphology import (erode, fill_holes, label_components, make_disk,
                         remove_small_components)


@dataclass(frozen=True)
class ThresholdParams:
    """Decision thresholds for the classifier.

    a1 and a2 split the skin-ratio axis (0 <= a2 < a1 <= 1), b1 and b2
    bound component counts (>= 1), c1 cuts the border skin ratio
    (0 <= c1 <= 1).
    """

    a1: float
    a2: float
    b1: int
    b2: int
    c1: float

    def __post_init__(self):
        if not 0.0 <= self.a2 < self.a1 <= 1.0:
            raise ValueError(
                f"need 0 <= a2 < a1 <= 1, got a1={self.a1}, a2={self.a2}")
        if self.b1 < 1:
            raise ValueError(f"b1 must be >= 1, got {self.b1}")
        if self.b2 < 1:
            raise ValueError(f"b2 must be >= 1, got {self.b2}")
        if not 0.0 <= self.c1 <= 1.0:
            raise ValueError(f"c1 must lie in [0, 1], got {self.c1}")


class PatternClass(enum.Enum):
    """Shape archetypes a detector mask can fall into."""

    A = "A"  # dominant blob merged with a skin-like background
    B = "B"  # one or few solid regions, interior
    C = "C"  # many sizable regions
    D = "D"  # spray of many small regions
    E = "E"  # sparse or near-empty output

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class MaskFeatures:
    """Features measured on the way to a class decision.

    cc and bsr stay None on branches that never needed them.
    """

    sr: float
    cc: int | None = None
    bsr: float | None = None


@dataclass(frozen=True)
class Classification:
    pattern_class: PatternClass
    features: MaskFeatures
    filled: BinaryMask
    eroded: BinaryMask | None


def skin_ratio(m):
    """Foreground share of the frame after filling every hole."""
    return foreground_count(fill_holes(m)) / (m.width * m.height)


def border_skin_ratio(m):
    """Foreground share of the top row plus left and right columns.

    The bottom row is excluded: detector masks in portrait-style frames
    commonly run into the bottom edge, so skin there says nothing about
    background bleed. Requires at least a 2x2 mask.
    """
    if m.width < 2 or m.height < 2:
        raise ValueError(
            f"border ratio needs at least 2x2, got {m.width}x{m.height}")
    arr = m.to_array()
    fg = int(arr[0, :].sum()) + int(arr[1:-1, 0].sum()) + int(arr[1:-1, -1].sum())
    return fg / (m.width + 2 * m.height - 4)


def classify(m, params, config=None):
    """Assign a pattern class to a detector mask.

    High skin ratio (>= a1) triggers a heavy erosion; if few components
    survive, the border ratio separates background bleed (class A) from
    solid interior regions (class B), while many survivors mean class C.
    Mid ratios (> a2) count components with specks below the tiny-area
    cut removed: an excessive count is class D. Everything else is E.

    Returns the class together with the measured features and the
    intermediate masks so callers can reuse them.
    """
    if config is None:
        from .pipelines import PipelineConfig
        config = PipelineConfig()
    filled = fill_holes(m)
    sr = foreground_count(filled) / (m.width * m.height)
    cc = None
    bsr = None
    eroded = None
    if sr >= params.a1:
        eroded = erode(m, make_disk(config.heavy_radius))
        cc = label_components(eroded, connectivity=8).count
        if cc < params.b1:
            bsr = border_skin_ratio(eroded)
            cls = PatternClass.A if bsr >= params.c1 else PatternClass.B
        else:
            cls = PatternClass.C
    elif sr > params.a2:
        if config.tiny_cc_area > 1:
            reduced = remove_small_components(m, config.tiny_cc_area - 1)
        else:
            reduced = m
        cc = label_components(reduced, connectivity=8).count
        cls = PatternClass.D if cc > params.b2 else PatternClass.E
    else:
        cls = PatternClass.E
    return Classification(pattern_class=cls,
                          features=MaskFeatures(sr=sr, cc=cc, bsr=bsr),
                          filled=filled,
                          eroded=eroded)
