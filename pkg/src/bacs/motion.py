"""Moving-block detection from low-frequency measurement prefixes."""

from dataclasses import dataclass

import numpy as np

from .model import BlockMap


@dataclass(frozen=True)
class DetectionInput:
    """Cut measurements of two consecutive frames plus the active threshold.

    Both sides come from the sensor-side full-rate measurements, so every
    block has the same prefix length regardless of what was transmitted.
    """

    prev_cut: tuple
    curr_cut: tuple
    threshold: float

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if len(self.prev_cut) != len(self.curr_cut):
            raise ValueError("previous and current frames have different block counts")
        for i, (p, c) in enumerate(zip(self.prev_cut, self.curr_cut)):
            if len(p) != len(c):
                raise ValueError(f"block {i}: cut lengths differ ({len(p)} vs {len(c)})")
        object.__setattr__(self, "prev_cut", tuple(self.prev_cut))
        object.__setattr__(self, "curr_cut", tuple(self.curr_cut))


def block_scores(inp: DetectionInput, block_size: int) -> np.ndarray:
    """Mean absolute measurement change per block, normalized by B.

    The DC row sums B^2 pixels scaled by 1/B, so raw measurement magnitudes
    run ~B times the pixel scale; dividing by B makes scores (and thresholds)
    comparable across block sizes and resolutions.
    """
    scores = np.empty(len(inp.curr_cut), dtype=np.float64)
    for i, (p, c) in enumerate(zip(inp.prev_cut, inp.curr_cut)):
        scores[i] = np.mean(np.abs(np.asarray(c, dtype=np.float64)
                                   - np.asarray(p, dtype=np.float64)))
    return scores / block_size


def classify(scores: np.ndarray, threshold: float) -> BlockMap:
    """Strictly-above-threshold blocks are moving; ties are non-moving."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    return BlockMap(flags=np.asarray(scores, dtype=np.float64) > threshold)
