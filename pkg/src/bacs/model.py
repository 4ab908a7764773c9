"""Shared data types, configuration and block geometry for the codec."""

import math
from dataclasses import dataclass, fields

import numpy as np


class BacsError(Exception):
    """Base class for all codec errors."""


class ConfigError(BacsError):
    """Invalid configuration value or malformed config file."""


def wire_ratio(x: float) -> float:
    """Largest float32 <= x, returned as a python float.

    Sampling ratios travel over the wire as float32. Row counts are always
    derived from the wire value, and rounding *down* guarantees the quantized
    row count never exceeds what the continuous ratio allows.
    """
    f = np.float32(x)
    if float(f) > x:
        f = np.nextafter(f, np.float32(0.0))
    return float(f)


def measurement_rows(sr: float, block_size: int) -> int:
    """Rows a block transmits at sampling ratio `sr`: floor(sr * B^2)."""
    return int(math.floor(sr * block_size * block_size))


@dataclass(frozen=True)
class CodecConfig:
    """All tunables of the codec. Validated on construction.

    Sampling ratios count measurement rows per block (rows / B^2); the
    threshold fields drive moving-block detection, the storage fraction the
    rate controller, and the solver_* fields the reconstruction.
    """

    block_size: int = 32
    high_sr: float = 0.20
    target_sr: float = 0.01
    frame_count: int = 0          # 0 = take from the input at encode time
    threshold_init: float = 0.04
    threshold_gamma: float = 0.1
    threshold_min: float = 0.005
    threshold_max: float = 0.5
    cut_fraction: float = 0.25
    initial_storage_fraction: float = 0.5
    solver_iterations: int = 60
    solver_step: float = 1.0
    solver_lambda: float = 20.0   # shrinkage on [0,255]-scaled DCT coefficients
    solver_decay: float = 0.9
    seed: int = 1

    def __post_init__(self):
        b = self.block_size
        if b < 8:
            raise ConfigError(f"block_size must be >= 8, got {b}")
        if not 0.0 < self.high_sr <= 1.0:
            raise ConfigError(f"high_sr must be in (0,1], got {self.high_sr}")
        if not 0.0 < self.target_sr < 1.0:
            raise ConfigError(f"target_sr must be in (0,1), got {self.target_sr}")
        if self.high_sr <= self.target_sr:
            raise ConfigError(
                f"high_sr ({self.high_sr}) must exceed target_sr ({self.target_sr})")
        if measurement_rows(wire_ratio(self.high_sr), b) < 2:
            raise ConfigError(
                "high_sr * block_size^2 must provide at least 2 rows "
                "(a DC row plus one detail row)")
        if not 0.0 < self.threshold_min <= self.threshold_init <= self.threshold_max:
            raise ConfigError(
                "need 0 < threshold_min <= threshold_init <= threshold_max, got "
                f"{self.threshold_min}/{self.threshold_init}/{self.threshold_max}")
        if not 0.0 < self.threshold_gamma < 1.0:
            raise ConfigError(f"threshold_gamma must be in (0,1), got {self.threshold_gamma}")
        if not 0.0 < self.cut_fraction <= 1.0:
            raise ConfigError(f"cut_fraction must be in (0,1], got {self.cut_fraction}")
        if self.initial_storage_fraction < 0.0:
            raise ConfigError("initial_storage_fraction must be >= 0")
        if self.frame_count < 0 or self.frame_count == 1:
            raise ConfigError("frame_count must be 0 (infer) or >= 2")
        if self.solver_iterations < 1:
            raise ConfigError("solver_iterations must be >= 1")
        if not 0.0 < self.solver_step <= 1.0:
            raise ConfigError(f"solver_step must be in (0,1], got {self.solver_step}")
        if self.solver_lambda < 0.0:
            raise ConfigError("solver_lambda must be >= 0")
        if not 0.0 < self.solver_decay < 1.0:
            raise ConfigError(f"solver_decay must be in (0,1), got {self.solver_decay}")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")

    @property
    def rows_high(self) -> int:
        """Rows per block at the high sampling ratio (wire-quantized)."""
        return measurement_rows(wire_ratio(self.high_sr), self.block_size)


_INT_FIELDS = {"block_size", "frame_count", "solver_iterations", "seed"}


def config_values(text: str) -> dict:
    """Parse a plain-text key=value config into a field dict.

    Unknown and duplicate keys are rejected; '#' starts a comment.
    """
    known = {f.name for f in fields(CodecConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        try:
            values[key] = int(val) if key in _INT_FIELDS else float(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {val!r}") from None
    return values


def parse_config(text: str) -> CodecConfig:
    """Parse and validate a plain-text key=value config."""
    return CodecConfig(**config_values(text))


@dataclass(frozen=True)
class Frame:
    """One grayscale frame, padded to a whole number of B x B blocks.

    `pixels` holds the padded image (row-major, values in [0,255]);
    `width`/`height` are the pre-padding dimensions.
    """

    width: int
    height: int
    block_size: int
    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if px.ndim != 2:
            raise ValueError("pixels must be a 2d array")
        if px.shape[0] % self.block_size or px.shape[1] % self.block_size:
            raise ValueError("padded dimensions must be multiples of block_size")
        if px.shape[0] < self.height or px.shape[1] < self.width:
            raise ValueError("padded image smaller than original dimensions")
        px.setflags(write=False)

    @property
    def padded_height(self) -> int:
        return self.pixels.shape[0]

    @property
    def padded_width(self) -> int:
        return self.pixels.shape[1]

    @property
    def blocks_down(self) -> int:
        return self.padded_height // self.block_size

    @property
    def blocks_across(self) -> int:
        return self.padded_width // self.block_size

    @property
    def block_count(self) -> int:
        return self.blocks_down * self.blocks_across

    def original_region(self) -> np.ndarray:
        """The unpadded image (a view)."""
        return self.pixels[: self.height, : self.width]


def pad_frame(raw: np.ndarray, block_size: int) -> Frame:
    """Pad an image to block multiples by edge replication.

    Edge replication keeps borders free of artificial high-frequency content
    that would otherwise read as motion in the padded strip.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim == 3 and raw.shape[2] == 3:
        # BT.601 luma for RGB inputs
        raw = raw @ np.array([0.299, 0.587, 0.114])
    if raw.ndim != 2:
        raise ValueError(f"expected a 2d grayscale image, got shape {raw.shape}")
    h, w = raw.shape
    if h == 0 or w == 0:
        raise ValueError("zero-sized image")
    ph = ((h + block_size - 1) // block_size) * block_size
    pw = ((w + block_size - 1) // block_size) * block_size
    padded = np.pad(raw, ((0, ph - h), (0, pw - w)), mode="edge")
    return Frame(width=w, height=h, block_size=block_size, pixels=padded)


def block_view(frame: Frame, idx: int) -> np.ndarray:
    """Raster-order flattening of block `idx` (blocks enumerated row-major)."""
    if not 0 <= idx < frame.block_count:
        raise ValueError(f"block index {idx} out of range [0, {frame.block_count})")
    b = frame.block_size
    r, c = divmod(idx, frame.blocks_across)
    return frame.pixels[r * b:(r + 1) * b, c * b:(c + 1) * b].reshape(-1)


def frame_to_blocks(img: np.ndarray, block_size: int) -> np.ndarray:
    """(H, W) image -> (l, B^2) matrix of raster-order flattened blocks."""
    h, w = img.shape
    by, bx = h // block_size, w // block_size
    return (img.reshape(by, block_size, bx, block_size)
               .transpose(0, 2, 1, 3)
               .reshape(by * bx, block_size * block_size))


def blocks_to_frame(blocks: np.ndarray, height: int, width: int, block_size: int) -> np.ndarray:
    """Inverse of frame_to_blocks."""
    by, bx = height // block_size, width // block_size
    return (blocks.reshape(by, bx, block_size, block_size)
                  .transpose(0, 2, 1, 3)
                  .reshape(height, width))


@dataclass(frozen=True)
class BlockMap:
    """Per-block moving/non-moving classification for one frame."""

    flags: np.ndarray   # bool, raster order

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=bool)
        object.__setattr__(self, "flags", flags)
        flags.setflags(write=False)

    @property
    def moving_count(self) -> int:
        return int(np.count_nonzero(self.flags))

    def __len__(self) -> int:
        return len(self.flags)


@dataclass(frozen=True)
class MeasurementSet:
    """Per-block measurement vectors for one frame, plus its classification.

    Transmitted sets hold float32 vectors (the wire type): frame 0 carries
    every block at the high rate; later frames carry moving blocks only, all
    at the same reduced row count, and empty vectors elsewhere.
    """

    frame_index: int
    per_block: tuple
    block_map: BlockMap
    sr_m: float
    threshold_used: float

    def __post_init__(self):
        if len(self.per_block) != len(self.block_map):
            raise ValueError("per_block and block_map lengths differ")
        object.__setattr__(self, "per_block", tuple(self.per_block))
        for v in self.per_block:
            v.setflags(write=False)

    @property
    def block_count(self) -> int:
        return len(self.per_block)

    def total_scalars(self) -> int:
        """Measurement scalars this frame puts on the wire."""
        return sum(len(v) for v in self.per_block)
