"""Per-image segmentation pipeline and its configuration.

The pipeline runs: ternary classification -> neighbor refinement -> seed
extraction -> per-channel Otsu class maps -> Canny edge barrier -> two-stage
diffusion. All tunables live in :class:`PipelineConfig`, loadable from a
flat ``key=value`` config file with dotted section prefixes, e.g.::

    seed.k=2
    seed.th1=-6
    seed.th2=6
    canny.sigma=1.4
    canny.low=40
    canny.high=100
    otsu.k=3
    otsu.channels=Cb,Cr,I,H,U,A,Ch
    diffusion.w_gray=2
    diffusion.w_black=0
    diffusion.channel_weights=2,2,1,1,1,1,1
    diffusion.s_min=7
    diffusion.max_ray_len=0

Command-line flags override file values.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import colorspace, diffusion, edgemap, otsuseg, seedgen, skinmodel


@dataclass(frozen=True)
class PipelineConfig:
    seed: seedgen.SeedParams = seedgen.SeedParams()
    canny: edgemap.CannyParams = edgemap.CannyParams()
    otsu_k: int = 3
    channels: tuple[colorspace.Channel, ...] = colorspace.DIFFUSION_CHANNELS
    w_gray: float = 2.0
    w_black: float = 0.0
    channel_weights: tuple[float, ...] | None = None  # None = 2 for Cb/Cr, 1 otherwise
    s_min: float = 7.0
    max_ray_len: int = 0

    def diffusion_config(self) -> diffusion.DiffusionConfig:
        weights = self.channel_weights
        if weights is None:
            weights = tuple(2.0 if ch.value in ("Cb", "Cr") else 1.0 for ch in self.channels)
        if len(weights) != len(self.channels):
            raise ValueError("diffusion.channel_weights must match otsu.channels in length")
        return diffusion.DiffusionConfig(
            channel_weights=weights, w_gray=self.w_gray, w_black=self.w_black,
            s_min=self.s_min, max_ray_len=self.max_ray_len,
        )

    def snapshot(self) -> dict:
        """JSON-ready view of every tunable (recorded in run reports)."""
        return {
            "seed": {"k": self.seed.k, "th1": self.seed.th1, "th2": self.seed.th2},
            "canny": {"sigma": self.canny.sigma, "low": self.canny.low,
                      "high": self.canny.high},
            "otsu": {"k": self.otsu_k,
                     "channels": [ch.value for ch in self.channels]},
            "diffusion": {"w_gray": self.w_gray, "w_black": self.w_black,
                          "channel_weights": list(self.diffusion_config().channel_weights),
                          "s_min": self.s_min, "max_ray_len": self.max_ray_len},
        }


def parse_config_file(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, blanks are ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def config_from_values(values: dict[str, str],
                       base: PipelineConfig = PipelineConfig()) -> PipelineConfig:
    """Apply dotted config keys on top of ``base``."""
    cfg = base
    known = {
        "seed.k", "seed.th1", "seed.th2",
        "canny.sigma", "canny.low", "canny.high",
        "otsu.k", "otsu.channels",
        "diffusion.w_gray", "diffusion.w_black", "diffusion.channel_weights",
        "diffusion.s_min", "diffusion.max_ray_len",
    }
    for key in values:
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
    v = values
    if {"seed.k", "seed.th1", "seed.th2"} & v.keys():
        cfg = replace(cfg, seed=seedgen.SeedParams(
            k=float(v.get("seed.k", cfg.seed.k)),
            th1=float(v.get("seed.th1", cfg.seed.th1)),
            th2=float(v.get("seed.th2", cfg.seed.th2)),
        ))
    if {"canny.sigma", "canny.low", "canny.high"} & v.keys():
        cfg = replace(cfg, canny=edgemap.CannyParams(
            sigma=float(v.get("canny.sigma", cfg.canny.sigma)),
            low=float(v.get("canny.low", cfg.canny.low)),
            high=float(v.get("canny.high", cfg.canny.high)),
        ))
    if "otsu.k" in v:
        cfg = replace(cfg, otsu_k=int(v["otsu.k"]))
    if "otsu.channels" in v:
        cfg = replace(cfg, channels=tuple(
            colorspace.Channel.from_string(s) for s in v["otsu.channels"].split(",")))
    if "diffusion.w_gray" in v:
        cfg = replace(cfg, w_gray=float(v["diffusion.w_gray"]))
    if "diffusion.w_black" in v:
        cfg = replace(cfg, w_black=float(v["diffusion.w_black"]))
    if "diffusion.channel_weights" in v:
        cfg = replace(cfg, channel_weights=tuple(
            float(s) for s in v["diffusion.channel_weights"].split(",")))
    if "diffusion.s_min" in v:
        cfg = replace(cfg, s_min=float(v["diffusion.s_min"]))
    if "diffusion.max_ray_len" in v:
        cfg = replace(cfg, max_ray_len=int(v["diffusion.max_ray_len"]))
    return cfg


@dataclass
class SegmentationResult:
    mask: np.ndarray
    ternary: np.ndarray
    refined: np.ndarray
    seed: np.ndarray
    class_maps: otsuseg.ChannelClassMaps
    edges: np.ndarray
    stage1: np.ndarray
    timings_ms: dict[str, float] = field(default_factory=dict)


def segment_image(img: np.ndarray, model: skinmodel.SkinClusterModel,
                  cfg: PipelineConfig) -> SegmentationResult:
    """Run the full pipeline on one RGB image."""
    timings: dict[str, float] = {}

    def timed(name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        timings[name] = (time.perf_counter() - t0) * 1000.0
        return out

    ternary = timed("ternary", seedgen.make_ternary, img, model)
    refined = timed("refine", seedgen.refine_ternary, ternary, cfg.seed)
    seed = timed("seed", seedgen.extract_seed, refined)
    class_maps = timed("otsu", otsuseg.segment_channels, img, cfg.channels, cfg.otsu_k)
    edges = timed("edges", edgemap.image_edges, img, cfg.canny)
    dcfg = cfg.diffusion_config()
    stage1 = timed("diffusion_stage1", diffusion.diffuse_stage,
                   seed, refined, class_maps, edges, dcfg, 1)
    mask = timed("diffusion_stage2", diffusion.diffuse_stage,
                 stage1, refined, class_maps, edges, dcfg, 2)
    return SegmentationResult(mask=mask, ternary=ternary, refined=refined, seed=seed,
                              class_maps=class_maps, edges=edges, stage1=stage1,
                              timings_ms=timings)
