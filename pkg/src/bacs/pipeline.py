"""End-to-end orchestration: encode, decode, metrics, traces, and sweeps.

The encoder is strictly sequential per stream (the rate controller is
stateful); each inter frame runs detect -> allocate -> threshold update ->
row truncation -> serialize. Everything is deterministic for a fixed
(input, config, seed) triple.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .bitstream import StreamHeader, read_stream, write_stream
from .control import allocate, initial_state, quantize_rows, update_threshold
from .metrics import psnr, ssim
from .model import (BlockMap, CodecConfig, ConfigError, Frame, MeasurementSet,
                    frame_to_blocks, pad_frame, wire_ratio)
from .motion import DetectionInput, block_scores, classify
from .recon import ReferenceBuffer, assemble, reconstruct
from .sensing import build_operator, cut_length, measure_blocks


@dataclass(frozen=True)
class TraceRow:
    """One controller trace entry; psnr/ssim are NaN until metrics run."""

    frame: int
    m: int
    storage: float
    threshold: float
    sr: float
    psnr: float = math.nan
    ssim: float = math.nan


@dataclass(frozen=True)
class EncodeResult:
    header: StreamHeader
    msets: tuple
    stream: bytes
    trace: tuple


@dataclass(frozen=True)
class DecodeResult:
    header: StreamHeader
    frames: tuple     # reconstructed Frame objects
    msets: tuple


@dataclass(frozen=True)
class RunReport:
    """Per-frame trace plus summary statistics for one encode(+decode)."""

    header: StreamHeader
    stream: bytes
    trace: tuple
    average_sr: float
    mean_psnr: float
    mean_ssim: float
    recon: tuple | None   # None when metrics were skipped


def _prepare_frames(raw_frames, cfg: CodecConfig):
    frames = [np.asarray(f) for f in raw_frames]
    if cfg.frame_count:
        if cfg.frame_count > len(frames):
            raise ConfigError(
                f"config asks for {cfg.frame_count} frames, input has {len(frames)}")
        frames = frames[: cfg.frame_count]
    if len(frames) < 2:
        raise ConfigError("need at least 2 frames (no inter-frame budget otherwise)")
    padded = [pad_frame(f, cfg.block_size) for f in frames]
    first = padded[0]
    for i, fr in enumerate(padded[1:], start=1):
        if (fr.width, fr.height) != (first.width, first.height):
            raise ConfigError(
                f"frame {i} is {fr.width}x{fr.height}, frame 0 is {first.width}x{first.height}")
    if first.width > 0xFFFF or first.height > 0xFFFF:
        raise ConfigError("frame dimensions exceed the stream format limit (65535)")
    return padded


def _f32(x: float) -> float:
    return float(np.float32(x))


def encode(raw_frames, cfg: CodecConfig, seed: int | None = None, *,
           use_bss: bool = True, use_dt: bool = True) -> EncodeResult:
    """Encode a grayscale sequence into a measurement stream plus trace.

    `use_bss` off pins every moving block at the high rate (no budget);
    `use_dt` off freezes the detection threshold at its initial value. Both
    off together is the plain fixed-threshold, fixed-rate baseline. The
    threshold is also frozen when the storage system is off, since the
    update law is driven by the storage balance.
    """
    padded = _prepare_frames(raw_frames, cfg)
    n = len(padded)
    b = cfg.block_size
    l = padded[0].block_count
    op = build_operator(cfg, cfg.seed if seed is None else seed)
    m_high = op.row_count
    k = cut_length(m_high, cfg.cut_fraction)
    sr_high_wire = wire_ratio(cfg.high_sr)
    sr_target_wire = _f32(cfg.target_sr)
    if np.float32(sr_high_wire) <= np.float32(sr_target_wire):
        raise ConfigError("high_sr and target_sr are indistinguishable at wire precision")
    area = l * b * b

    state = initial_state(cfg, l, n) if use_bss else None
    theta = cfg.threshold_init

    blocks0 = frame_to_blocks(padded[0].pixels, b)
    full_prev = measure_blocks(op, blocks0, m_high)
    msets = [MeasurementSet(
        frame_index=0,
        per_block=tuple(np.asarray(v, dtype=np.float32) for v in full_prev),
        block_map=BlockMap(flags=np.ones(l, dtype=bool)),
        sr_m=sr_high_wire,
        threshold_used=_f32(theta),
    )]
    trace = [TraceRow(frame=0, m=l,
                      storage=state.storage if use_bss else 0.0,
                      threshold=theta,
                      sr=msets[0].total_scalars() / area)]

    for i in range(1, n):
        blocks = frame_to_blocks(padded[i].pixels, b)
        full = measure_blocks(op, blocks, m_high)
        det = DetectionInput(prev_cut=tuple(full_prev[:, :k]),
                             curr_cut=tuple(full[:, :k]),
                             threshold=theta)
        bmap = classify(block_scores(det, b), theta)
        m = bmap.moving_count
        theta_used = theta

        if use_bss:
            sr_m, state = allocate(state, m)
            storage_now = state.storage
            if use_dt:
                theta = update_threshold(state, m, state.storage)
                state = replace(state, threshold=theta)
        else:
            sr_m = cfg.high_sr
            storage_now = 0.0

        sr_wire = wire_ratio(sr_m)
        rows_m = quantize_rows(sr_wire, b)
        per_block = tuple(
            np.asarray(full[j, :rows_m], dtype=np.float32)
            if (bmap.flags[j] and rows_m) else np.empty(0, dtype=np.float32)
            for j in range(l))
        mset = MeasurementSet(frame_index=i, per_block=per_block, block_map=bmap,
                              sr_m=sr_wire, threshold_used=_f32(theta_used))
        msets.append(mset)
        trace.append(TraceRow(frame=i, m=m, storage=storage_now,
                              threshold=theta_used,
                              sr=mset.total_scalars() / area))
        full_prev = full

    header = StreamHeader(width=padded[0].width, height=padded[0].height,
                          block_size=b, sr_high=sr_high_wire,
                          sr_target=sr_target_wire, frame_count=n, seed=op.seed)
    stream = write_stream(header, msets)
    return EncodeResult(header=header, msets=tuple(msets), stream=stream,
                        trace=tuple(trace))


def decode(data: bytes, cfg: CodecConfig | None = None) -> DecodeResult:
    """Reconstruct every frame of a stream.

    Solver settings come from `cfg` (defaults when None); the stream header
    overrides everything that must match the encoder: block size, rates,
    seed.
    """
    header, msets = read_stream(data)
    base = cfg if cfg is not None else CodecConfig()
    dcfg = replace(base, block_size=header.block_size, high_sr=header.sr_high,
                   target_sr=header.sr_target, seed=header.seed, frame_count=0)
    op = build_operator(dcfg, header.seed)
    ref = ReferenceBuffer.empty(header.block_count)
    frames = []
    for mset in msets:
        yprime, ref = assemble(ref, mset)
        frames.append(reconstruct(op, yprime, dcfg, header.width, header.height))
    return DecodeResult(header=header, frames=tuple(frames), msets=tuple(msets))


def sequence_metrics(originals, recons) -> list:
    """Per-frame (PSNR, SSIM) pairs for two equal-length sequences."""
    originals, recons = list(originals), list(recons)
    if len(originals) != len(recons):
        raise ValueError(f"sequence lengths differ: {len(originals)} vs {len(recons)}")
    return [(psnr(o, r), ssim(o, r)) for o, r in zip(originals, recons)]


def run(raw_frames, cfg: CodecConfig, seed: int | None = None, *,
        use_bss: bool = True, use_dt: bool = True,
        skip_metrics: bool = False) -> RunReport:
    """encode -> decode -> metrics, summarized as a RunReport.

    With skip_metrics the decode is skipped entirely and the psnr/ssim
    columns stay NaN (useful for pure rate-control studies).
    """
    raw_frames = list(raw_frames)
    enc = encode(raw_frames, cfg, seed, use_bss=use_bss, use_dt=use_dt)
    n = enc.header.frame_count
    area = enc.header.block_count * enc.header.block_size ** 2
    average_sr = sum(m.total_scalars() for m in enc.msets) / (n * area)

    if skip_metrics:
        return RunReport(header=enc.header, stream=enc.stream, trace=enc.trace,
                         average_sr=average_sr, mean_psnr=math.nan,
                         mean_ssim=math.nan, recon=None)

    dec = decode(enc.stream, cfg)
    pairs = sequence_metrics(raw_frames[:n], dec.frames)
    trace = tuple(replace(row, psnr=p, ssim=s)
                  for row, (p, s) in zip(enc.trace, pairs))
    return RunReport(header=enc.header, stream=enc.stream, trace=trace,
                     average_sr=average_sr,
                     mean_psnr=float(np.mean([p for p, _ in pairs])),
                     mean_ssim=float(np.mean([s for _, s in pairs])),
                     recon=dec.frames)


def _num(x) -> str:
    """Shortest round-trip decimal form ('inf'/'nan' pass through)."""
    return repr(float(x))


def trace_csv(trace) -> str:
    """Controller trace as CSV, one row per frame."""
    lines = ["frame,m,storage,threshold,sr,psnr,ssim"]
    for r in trace:
        lines.append(f"{r.frame},{r.m},{_num(r.storage)},{_num(r.threshold)},"
                     f"{_num(r.sr)},{_num(r.psnr)},{_num(r.ssim)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SweepRow:
    target_sr: float
    achieved_sr: float
    mean_psnr: float
    mean_ssim: float


def sweep(raw_frames, cfg: CodecConfig, targets, seed: int | None = None, *,
          high_sr: float | None = None, skip_metrics: bool = False,
          use_bss: bool = True, use_dt: bool = True) -> list:
    """Re-run the codec across target rates; rows come back sorted by target.

    `high_sr` fixes one acquisition rate for the whole sweep; by default each
    target keeps the config's high rate.
    """
    raw_frames = list(raw_frames)
    rows = []
    for t in sorted(targets):
        cfg_t = replace(cfg, target_sr=t,
                        high_sr=cfg.high_sr if high_sr is None else high_sr)
        rep = run(raw_frames, cfg_t, seed, use_bss=use_bss, use_dt=use_dt,
                  skip_metrics=skip_metrics)
        rows.append(SweepRow(target_sr=t, achieved_sr=rep.average_sr,
                             mean_psnr=rep.mean_psnr, mean_ssim=rep.mean_ssim))
    return rows


def sweep_csv(rows) -> str:
    lines = ["target_sr,achieved_sr,mean_psnr,mean_ssim"]
    for r in rows:
        lines.append(f"{_num(r.target_sr)},{_num(r.achieved_sr)},"
                     f"{_num(r.mean_psnr)},{_num(r.mean_ssim)}")
    return "\n".join(lines) + "\n"
