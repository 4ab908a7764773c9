"""Average-SR budget enforcement (block storage system) and dynamic threshold.

The controller banks unspent block transmissions: `storage` is a fractional
count of blocks that may still be sent at the high rate. Every inter frame
deposits `b_add`; moving blocks withdraw one unit each at SR_h, and when the
bank cannot cover them all, the whole remaining balance is split across them
at a reduced rate. The deposit is sized so the total spend over n frames
lands exactly on the target average sampling ratio.
"""

import math
from dataclasses import dataclass, replace

from .model import BacsError, CodecConfig


class BudgetError(BacsError):
    """The (n, SR_t, SR_h, b_ini) combination admits no valid allocation."""


@dataclass(frozen=True)
class ControllerState:
    """Rate-controller state between frames. Strictly sequential per stream."""

    storage: float
    threshold: float
    frame_cursor: int
    b_ini: float
    b_add: float
    block_count: int
    frame_count: int
    target_sr: float
    high_sr: float
    threshold_gamma: float
    threshold_min: float
    threshold_max: float

    def __post_init__(self):
        if self.storage < 0:
            raise ValueError("storage must be >= 0")


def budget_constants(cfg: CodecConfig, block_count: int, frame_count: int | None = None):
    """(b_ini, b_add) so that spending the whole bank hits the target SR.

    b_add = (l(n*SR_t - SR_h) - b_ini*SR_h) / (SR_h(n-1)); the deposit must be
    nonnegative, otherwise the initial bank exceeds the total budget and the
    early frames can overspend with nothing left to claw back.
    """
    n = cfg.frame_count if frame_count is None else frame_count
    if n < 2:
        raise BudgetError(f"need at least 2 frames, got {n}")
    if n * cfg.target_sr <= cfg.high_sr:
        raise BudgetError(
            f"infeasible budget: n*target_sr = {n * cfg.target_sr:.6g} "
            f"must exceed high_sr = {cfg.high_sr:.6g}")
    b_ini = cfg.initial_storage_fraction * block_count
    b_add = ((block_count * (n * cfg.target_sr - cfg.high_sr) - b_ini * cfg.high_sr)
             / (cfg.high_sr * (n - 1)))
    if b_add < 0:
        raise BudgetError(
            f"initial storage ({b_ini:.6g} blocks) exceeds the total inter-frame "
            f"budget; lower initial_storage_fraction or raise target_sr")
    return b_ini, b_add


def initial_state(cfg: CodecConfig, block_count: int, frame_count: int | None = None) -> ControllerState:
    n = cfg.frame_count if frame_count is None else frame_count
    b_ini, b_add = budget_constants(cfg, block_count, n)
    return ControllerState(
        storage=b_ini,
        threshold=cfg.threshold_init,
        frame_cursor=1,
        b_ini=b_ini,
        b_add=b_add,
        block_count=block_count,
        frame_count=n,
        target_sr=cfg.target_sr,
        high_sr=cfg.high_sr,
        threshold_gamma=cfg.threshold_gamma,
        threshold_min=cfg.threshold_min,
        threshold_max=cfg.threshold_max,
    )


def allocate(state: ControllerState, moving: int):
    """One storage-system step: deposit, then serve `moving` blocks.

    Returns (sr_m, new_state). Full rate while the bank covers the moving
    blocks; otherwise the remaining balance is spread across them and the
    bank empties.
    """
    if not 1 <= state.frame_cursor <= state.frame_count - 1:
        raise ValueError(f"frame cursor {state.frame_cursor} outside [1, {state.frame_count - 1}]")
    if not 0 <= moving <= state.block_count:
        raise ValueError(f"moving count {moving} outside [0, {state.block_count}]")
    bank = state.storage + state.b_add
    if moving <= bank:
        sr_m = state.high_sr
        bank -= moving
    else:
        sr_m = state.high_sr * bank / moving
        bank = 0.0
    return sr_m, replace(state, storage=bank, frame_cursor=state.frame_cursor + 1)


def update_threshold(state: ControllerState, moving: int, storage_after: float) -> float:
    """Multiplicative threshold step driven by motion-vs-storage pressure.

    p = m/(b+1): more moving blocks than banked capacity pushes the threshold
    up (detection gets stricter), surplus storage lets it drift down. Clamped
    to [threshold_min, threshold_max]; fixed point at m = b + 1.
    """
    pressure = moving / (storage_after + 1.0)
    theta = state.threshold * (1.0 + state.threshold_gamma * (pressure - 1.0))
    return min(max(theta, state.threshold_min), state.threshold_max)


def quantize_rows(sr: float, block_size: int) -> int:
    """Transmitted rows for a block at ratio `sr`: floor never overspends."""
    if sr < 0:
        raise ValueError("sampling ratio must be >= 0")
    return int(math.floor(sr * block_size * block_size))
