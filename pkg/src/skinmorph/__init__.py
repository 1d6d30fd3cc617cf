"""Adaptive morphological post-processing for skin-segmentation masks.

Detector masks come in as bit-packed binary images, get classified
into one of five damage patterns, and a class-specific morphological
clean-up runs on top. Includes the fixed baseline pipeline, threshold
training by grid search, pixel-pooled evaluation, and the statistics
used to compare methods across datasets.
"""

from .classification import (Classification, MaskFeatures, PatternClass,
                             ThresholdParams, border_skin_ratio, classify,
                             skin_ratio)
from .evaluation import (ConfusionCounts, WilcoxonResult, average_precision,
                         confusion, dataset_f1, f1, global_rank,
                         wilcoxon_signed_rank)
from .mask_core import (BinaryMask, ProbabilityMap, complement,
                        foreground_count, multiply, subtract, threshold)
from .morphology import (ComponentLabeling, StructuringElement, closing,
                         dilate, erode, fill_holes, label_components,
                         largest_component, make_disk, opening,
                         remove_small_components)
from .pipelines import (DEFAULT_CONFIG, PipelineConfig, postprocess_adaptive,
                        postprocess_baseline, remove_background)
from .training import (CorpusEntry, GridSpec, TrainingCorpus, grid_search,
                       leave_one_dataset_out, objective)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask", "ProbabilityMap", "complement", "foreground_count",
    "multiply", "subtract", "threshold",
    "StructuringElement", "make_disk", "erode", "dilate", "opening",
    "closing", "fill_holes", "remove_small_components", "label_components",
    "largest_component", "ComponentLabeling",
    "ThresholdParams", "PatternClass", "MaskFeatures", "Classification",
    "skin_ratio", "border_skin_ratio", "classify",
    "PipelineConfig", "DEFAULT_CONFIG", "postprocess_baseline",
    "postprocess_adaptive", "remove_background",
    "CorpusEntry", "TrainingCorpus", "GridSpec", "objective", "grid_search",
    "leave_one_dataset_out",
    "ConfusionCounts", "confusion", "f1", "dataset_f1", "average_precision",
    "WilcoxonResult", "wilcoxon_signed_rank", "global_rank",
    "__version__",
]
