"""Depth-quality assessment and quality-guided fusion for RGB-D saliency.

Three per-pixel quality cues for a depth channel (edge consistency,
regional uncertainty, model variance), a quality-weighted fusion of RGB
and depth saliency branches, and the standard saliency evaluation suite
(PR curves, F/S/E measures, MAE), wrapped in a deterministic batch CLI.
"""

from .edge_consistency import (
    AnchorSet,
    EcConfig,
    EcResult,
    adaptive_spatial_weight,
    aggressive_anchors,
    coarse_edge_quality,
    default_contour,
    edge_consistency_map,
    mutual_consistency,
)
from .errors import (
    ConfigError,
    DatasetError,
    DegenerateGroundTruthError,
    DegenerateInputError,
    DepthQError,
    NoAnchorsError,
)
from .fusion import QualityBundle, quality_weighted_fuse
from .metrics import (
    EStats,
    FStats,
    ImageEval,
    MetricReport,
    PRCurve,
    e_measure,
    evaluate_pair,
    f_measure,
    f_stats,
    mae,
    pr_curve,
    quantize255,
    s_measure,
)
from .model_variance import RgbrImage, make_rgbr, model_variance
from .raster import (
    GaussianPass,
    GrayMap,
    RgbMap,
    gaussian_blur,
    hadamard,
    local_entropy,
    luminance,
    normalize_unit,
    rectify_shift,
    sobel_gradient,
)
from .regional_uncertainty import (
    RuConfig,
    RuResult,
    entropy_residual,
    localization_prior,
    regional_uncertainty_map,
)
from .superpixels import Region, Segmentation, slic

__version__ = "0.1.0"

__all__ = [
    "AnchorSet",
    "ConfigError",
    "DatasetError",
    "DegenerateGroundTruthError",
    "DegenerateInputError",
    "DepthQError",
    "EStats",
    "EcConfig",
    "EcResult",
    "FStats",
    "GaussianPass",
    "GrayMap",
    "ImageEval",
    "MetricReport",
    "NoAnchorsError",
    "PRCurve",
    "QualityBundle",
    "Region",
    "RgbMap",
    "RgbrImage",
    "RuConfig",
    "RuResult",
    "Segmentation",
    "adaptive_spatial_weight",
    "aggressive_anchors",
    "coarse_edge_quality",
    "default_contour",
    "e_measure",
    "edge_consistency_map",
    "entropy_residual",
    "evaluate_pair",
    "f_measure",
    "f_stats",
    "gaussian_blur",
    "hadamard",
    "local_entropy",
    "localization_prior",
    "luminance",
    "mae",
    "make_rgbr",
    "model_variance",
    "mutual_consistency",
    "normalize_unit",
    "pr_curve",
    "quantize255",
    "quality_weighted_fuse",
    "rectify_shift",
    "regional_uncertainty_map",
    "s_measure",
    "slic",
    "sobel_gradient",
    "__version__",
]
