"""Measurement assembly from the reference buffer and cooperative recovery.

Non-moving blocks are never transmitted; the decoder keeps each block's most
recent measurements and splices them in, so every frame is recovered from a
complete per-block measurement set. Recovery interleaves block-wise gradient
steps on the measurement fit with a whole-frame DCT shrinkage, which couples
the blocks and suppresses blocking artifacts.
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from .model import CodecConfig, Frame, MeasurementSet, blocks_to_frame, frame_to_blocks
from .sensing import SamplingOperator


@dataclass(frozen=True)
class ReferenceBuffer:
    """Most recent transmitted measurement vector per block position."""

    vectors: tuple   # per block: float32 array, or None before any data

    @classmethod
    def empty(cls, block_count: int) -> "ReferenceBuffer":
        return cls(vectors=(None,) * block_count)

    def __len__(self) -> int:
        return len(self.vectors)


def assemble(ref: ReferenceBuffer, mset: MeasurementSet):
    """Splice transmitted and remembered measurements into a full frame set.

    Moving blocks take this frame's vectors and refresh the reference;
    non-moving blocks (and moving blocks whose rate quantized to zero rows)
    reuse the reference verbatim and leave it untouched.
    Returns (per-block vectors, updated reference).
    """
    if len(ref) != mset.block_count:
        raise ValueError(f"block count mismatch: reference {len(ref)}, frame {mset.block_count}")
    full = []
    updated = list(ref.vectors)
    for i, vec in enumerate(mset.per_block):
        if mset.block_map.flags[i] and len(vec) > 0:
            full.append(vec)
            updated[i] = vec
        else:
            prev = ref.vectors[i]
            if prev is None:
                raise ValueError(f"block {i} has no measurements and no reference")
            full.append(prev)
    return full, ReferenceBuffer(vectors=tuple(updated))


def soft_threshold(coeffs: np.ndarray, lam: float) -> np.ndarray:
    """sign(c) * max(|c| - lam, 0)."""
    return np.sign(coeffs) * np.maximum(np.abs(coeffs) - lam, 0.0)


def data_gradient(op: SamplingOperator, blocks: np.ndarray, y: np.ndarray,
                  mask: np.ndarray) -> np.ndarray:
    """Gradient of 0.5*sum_b ||Phi_b x_b - y_b||^2 w.r.t. the block matrix.

    `blocks` is (l, B^2); `y` and `mask` are (M_h, l) with rows beyond each
    block's transmitted count zeroed/masked. Masking (rather than zero-padding
    the measurements) keeps untransmitted rows out of the fit entirely.
    """
    resid = (op.rows @ blocks.T - y) * mask
    return (op.rows.T @ resid).T


def reconstruct(op: SamplingOperator, yprime, cfg: CodecConfig,
                width: int, height: int, residual_trace: list | None = None) -> Frame:
    """Cooperative proximal-gradient recovery of one frame.

    Starts from the per-block adjoint x0 = Phi^T y and iterates: block-wise
    gradient step on the measurement fit (unit step is safe, the operator
    rows are orthonormal), then a soft-thresholded whole-frame 2D DCT with a
    geometrically decaying threshold. Output is clamped to [0, 255].

    When `residual_trace` is given, the masked measurement residual norm of
    every iterate is appended to it (solver_iterations + 1 entries).
    """
    b = cfg.block_size
    ph = ((height + b - 1) // b) * b
    pw = ((width + b - 1) // b) * b
    blocks_total = (ph // b) * (pw // b)
    if len(yprime) != blocks_total:
        raise ValueError(f"expected {blocks_total} blocks for {width}x{height}, got {len(yprime)}")

    m_high = op.row_count
    y = np.zeros((m_high, blocks_total), dtype=np.float64)
    mask = np.zeros((m_high, blocks_total), dtype=np.float64)
    for i, vec in enumerate(yprime):
        rows = len(vec)
        if rows < 1:
            raise ValueError(f"block {i} has zero measurement rows")
        if rows > m_high:
            raise ValueError(f"block {i} has {rows} rows, operator provides {m_high}")
        v = np.asarray(vec, dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise ValueError(f"block {i} has non-finite measurements")
        y[:rows, i] = v
        mask[:rows, i] = 1.0

    x = (op.rows.T @ y).T   # adjoint init; rows beyond each block's count are zero in y
    for k in range(cfg.solver_iterations):
        resid = (op.rows @ x.T - y) * mask
        if residual_trace is not None:
            residual_trace.append(float(np.linalg.norm(resid)))
        x = x - cfg.solver_step * (op.rows.T @ resid).T
        img = blocks_to_frame(x, ph, pw, b)
        coeffs = dctn(img, norm="ortho")
        coeffs = soft_threshold(coeffs, cfg.solver_lambda * cfg.solver_decay ** k)
        img = idctn(coeffs, norm="ortho")
        x = frame_to_blocks(img, b)
    if residual_trace is not None:
        resid = (op.rows @ x.T - y) * mask
        residual_trace.append(float(np.linalg.norm(resid)))

    img = np.clip(blocks_to_frame(x, ph, pw, b), 0.0, 255.0)
    return Frame(width=width, height=height, block_size=b, pixels=img)
