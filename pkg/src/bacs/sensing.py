"""Seeded, nested block sampling operator and per-block measurement."""

import math
from dataclasses import dataclass

import numpy as np

from .model import CodecConfig, MeasurementSet, wire_ratio, measurement_rows


@dataclass(frozen=True)
class SamplingOperator:
    """Row-orthonormal block measurement matrix.

    Row 0 is the constant (DC) row with entries 1/B; the remaining rows are
    seeded Gaussian vectors orthonormalized against everything above them.
    Lower sampling ratios reuse the same physical measurement by taking a row
    prefix, so the operator is never rebuilt per rate.
    """

    seed: int
    block_size: int
    rows: np.ndarray   # (M_h, B^2)

    def __post_init__(self):
        self.rows.setflags(write=False)

    @property
    def row_count(self) -> int:
        return self.rows.shape[0]

    @property
    def signal_size(self) -> int:
        return self.rows.shape[1]


def build_operator(cfg: CodecConfig, seed: int | None = None) -> SamplingOperator:
    """Deterministically build the operator for (seed, B, SR_h).

    The DC row is fixed first; Gaussian rows are orthonormalized below it with
    two Gram-Schmidt passes (the second pass scrubs the float residue of the
    first, keeping ||PhiPhi^T - I||_max well under 1e-6).
    """
    if seed is None:
        seed = cfg.seed
    b = cfg.block_size
    n = b * b
    m = measurement_rows(wire_ratio(cfg.high_sr), b)
    if m < 2:
        raise ValueError(f"need at least 2 measurement rows, got {m}")
    rows = np.empty((m, n), dtype=np.float64)
    rows[0] = 1.0 / b
    gauss = np.random.default_rng(seed).standard_normal((m - 1, n))
    for i in range(1, m):
        v = gauss[i - 1]
        for _ in range(2):
            v = v - rows[:i].T @ (rows[:i] @ v)
        norm = float(np.linalg.norm(v))
        if norm < 1e-12:
            raise RuntimeError(f"degenerate Gaussian row {i} for seed {seed}")
        rows[i] = v / norm
    return SamplingOperator(seed=seed, block_size=b, rows=rows)


def measure_block(op: SamplingOperator, block: np.ndarray, rows: int) -> np.ndarray:
    """Apply the first `rows` operator rows to one flattened block.

    The full operator is applied and the result truncated, so the prefix
    property holds bit-exactly: measuring at M1 < M2 returns exactly the
    first M1 entries of the M2 measurement (a BLAS product over a submatrix
    would not guarantee that).
    """
    if not 1 <= rows <= op.row_count:
        raise ValueError(f"row count {rows} out of range [1, {op.row_count}]")
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (op.signal_size,):
        raise ValueError(f"block must have {op.signal_size} samples, got {block.shape}")
    return (op.rows @ block)[:rows]


def measure_blocks(op: SamplingOperator, blocks: np.ndarray, rows: int) -> np.ndarray:
    """Measure a whole frame's (l, B^2) block matrix at once -> (l, rows).

    Same full-then-truncate evaluation as measure_block, for the same
    prefix-exactness reason.
    """
    if not 1 <= rows <= op.row_count:
        raise ValueError(f"row count {rows} out of range [1, {op.row_count}]")
    return (np.asarray(blocks, dtype=np.float64) @ op.rows.T)[:, :rows]


def cut_length(row_count: int, cut_fraction: float) -> int:
    """Low-frequency prefix length: max(1, floor(rho * M)). DC always kept."""
    return max(1, math.floor(cut_fraction * row_count))


def cut_measurements(mset: MeasurementSet, cut_fraction: float) -> list[np.ndarray]:
    """First-k prefix of every block's measurements (the low-frequency part)."""
    out = []
    for i, vec in enumerate(mset.per_block):
        if len(vec) < 1:
            raise ValueError(f"block {i} has no measurements to cut")
        out.append(vec[: cut_length(len(vec), cut_fraction)])
    return out
