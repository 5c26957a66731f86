"""Trainable skin segmentation pipeline.

Converts RGB images into binary skin masks via a trained nested-polygon
chrominance model (ternary seed), neighbor-scored seed refinement,
multi-channel Otsu class maps, a Canny edge barrier and two-stage 36-ray
diffusion; includes an evaluation harness and rule/LUT baselines.
"""

from .colorspace import Channel, DIFFUSION_CHANNELS, extract_plane, luminance_gray, rgb_to_ycbcr
from .diffusion import RAY_ANGLES, DiffusionConfig, diffuse, diffuse_stage, diffusion_score, ray_pixels
from .edgemap import CannyParams, canny, image_edges
from .evalkit import (
    Confusion,
    LutModel,
    confusion,
    kovac_daylight,
    kovac_flashlight,
    load_ground_truth,
    lut_classify,
    lut_train,
    metrics,
)
from .otsuseg import ChannelClassMaps, Histogram256, histogram, otsu_multilevel, otsu_threshold, segment_channels
from .pipeline import PipelineConfig, SegmentationResult, segment_image
from .seedgen import SeedParams, extract_seed, make_ternary, neighbor_score, refine_ternary
from .skinmodel import (
    DensityMap,
    Polygon,
    PolygonPair,
    SkinClusterModel,
    TernaryClass,
    TrainParams,
    accumulate_density,
    classify_pixel,
    estimate_polygons,
    load_model,
    point_in_polygon,
    save_model,
    train_model,
)

__version__ = "0.1.0"

__all__ = [
    "Channel",
    "DIFFUSION_CHANNELS",
    "extract_plane",
    "luminance_gray",
    "rgb_to_ycbcr",
    "RAY_ANGLES",
    "DiffusionConfig",
    "diffuse",
    "diffuse_stage",
    "diffusion_score",
    "ray_pixels",
    "CannyParams",
    "canny",
    "image_edges",
    "Confusion",
    "LutModel",
    "confusion",
    "kovac_daylight",
    "kovac_flashlight",
    "load_ground_truth",
    "lut_classify",
    "lut_train",
    "metrics",
    "ChannelClassMaps",
    "Histogram256",
    "histogram",
    "otsu_multilevel",
    "otsu_threshold",
    "segment_channels",
    "PipelineConfig",
    "SegmentationResult",
    "segment_image",
    "SeedParams",
    "extract_seed",
    "make_ternary",
    "neighbor_score",
    "refine_ternary",
    "DensityMap",
    "Polygon",
    "PolygonPair",
    "SkinClusterModel",
    "TernaryClass",
    "TrainParams",
    "accumulate_density",
    "classify_pixel",
    "estimate_polygons",
    "load_model",
    "point_in_polygon",
    "save_model",
    "train_model",
    "__version__",
]
