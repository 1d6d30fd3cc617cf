"""Post-processing pipelines for detector masks.

Two entry points: a fixed close/erode/dilate baseline, and an adaptive
pipeline that classifies the mask first and picks its clean-up strategy
from the class. Both end by intersecting with the input mask, so they
only ever delete detector pixels, never invent new ones.
"""

from dataclasses import dataclass

from .classification import PatternClass, classify
from .mask_core import multiply, subtract
from .morphology import (closing, dilate, erode, fill_holes,
                         label_components, largest_component, make_disk,
                         remove_small_components)


@dataclass(frozen=True)
class PipelineConfig:
    """Fixed structural knobs shared by both pipelines.

    Radii are in pixels of exact Euclidean disks; areas are pixel
    counts. ``heavy_radius`` should stay at twice ``standard_radius``
    to keep the classifier's erosion aggressive relative to the
    clean-up erosion.
    """

    standard_radius: int = 6
    heavy_radius: int = 12
    bm_close_radius: int = 6
    bm_erode_radius: int = 10
    bm_dilate_radius: int = 8
    small_cc_area: int = 100
    tiny_cc_area: int = 10
    tiny_hole_area: int = 3

    def __post_init__(self):
        for name in ("standard_radius", "heavy_radius", "bm_close_radius",
                     "bm_erode_radius", "bm_dilate_radius"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("small_cc_area", "tiny_cc_area", "tiny_hole_area"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")


DEFAULT_CONFIG = PipelineConfig()


def postprocess_baseline(m, config=DEFAULT_CONFIG):
    """Fixed clean-up: close, erode, dilate, intersect with the input.

    The erode radius exceeds the dilate radius, so the net effect is a
    conservative shrink that drops small debris.
    """
    out = closing(m, make_disk(config.bm_close_radius))
    out = erode(out, make_disk(config.bm_erode_radius))
    out = dilate(out, make_disk(config.bm_dilate_radius))
    return multiply(out, m)


def remove_background(m, eroded, config=DEFAULT_CONFIG):
    """Subtract the dominant heavily-eroded region, grown back, from ``m``.

    Used on class-A masks where the detector latched onto a skin-like
    background: the largest surviving region of the heavy erosion is
    taken as that background, re-dilated with the same heavy disk, and
    removed. An empty ``eroded`` leaves ``m`` unchanged.
    """
    if m.width != eroded.width or m.height != eroded.height:
        raise ValueError(
            f"dimension mismatch: {m.width}x{m.height} vs "
            f"{eroded.width}x{eroded.height}")
    labeling = label_components(eroded, connectivity=8)
    if labeling.count == 0:
        return m
    core = largest_component(labeling)
    grown = dilate(core, make_disk(config.heavy_radius))
    return subtract(m, grown)


def postprocess_adaptive(m, params, config=DEFAULT_CONFIG):
    """Class-aware clean-up of a detector mask.

    Classifies ``m``, then: class A removes the dominant background
    region and fills all holes; B, C and D fill only tiny holes; E
    fills all holes. Every class then runs erode, small-component
    removal, dilate, and an intersection with the original mask.
    Returns the cleaned mask and the class that drove it.
    """
    c = classify(m, params, config)
    cls = c.pattern_class
    if cls is PatternClass.A:
        work = remove_background(m, c.eroded, config)
        filled = fill_holes(work)
    elif cls is PatternClass.E:
        filled = c.filled
    else:
        filled = fill_holes(m, max_area=config.tiny_hole_area)
    out = erode(filled, make_disk(config.standard_radius))
    out = remove_small_components(out, config.small_cc_area)
    out = dilate(out, make_disk(config.standard_radius))
    return multiply(out, m), cls
