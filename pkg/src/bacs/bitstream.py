"""Bit-exact serialization of adaptive measurement streams.

Layout (all little-endian):

  header:  magic "BACS" | version u8 = 1 | width u16 | height u16 |
           block_size u16 | sr_high f32 | sr_target f32 | frame_count u32 |
           seed u64
  frame:   frame_index u32 | threshold f32 | sr_m f32 |
           block bitmap, ceil(l/8) bytes (bit j%8 of byte j//8, set = moving;
           frame 0 writes all-ones bytes) | moving_count u32 |
           measurements f32, blocks in raster order, transmitted blocks only

Rows per transmitted block are floor(sr_m * B^2) computed from the f32 wire
value, so the payload length is exactly determined by the headers.
Measurement values are raw f32; side information is excluded from the
sampling-rate accounting.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from .model import BacsError, BlockMap, MeasurementSet

MAGIC = b"BACS"
VERSION = 1

_HEADER = struct.Struct("<4sBHHHffIQ")
_FRAME = struct.Struct("<Iff")
_COUNT = struct.Struct("<I")


class StreamError(BacsError):
    """Base class for bitstream failures."""


class StreamMagicError(StreamError):
    pass


class StreamVersionError(StreamError):
    pass


class StreamTruncatedError(StreamError):
    pass


class StreamTrailingError(StreamError):
    pass


class StreamFormatError(StreamError):
    """Internally inconsistent stream (counts, maps, or ranges)."""


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    block_size: int
    sr_high: float
    sr_target: float
    frame_count: int
    seed: int

    @property
    def blocks_across(self) -> int:
        return (self.width + self.block_size - 1) // self.block_size

    @property
    def blocks_down(self) -> int:
        return (self.height + self.block_size - 1) // self.block_size

    @property
    def block_count(self) -> int:
        return self.blocks_across * self.blocks_down

    @property
    def rows_high(self) -> int:
        return rows_for(self.sr_high, self.block_size)


def rows_for(sr: float, block_size: int) -> int:
    """floor(sr * B^2) on the f32 wire value."""
    return int(math.floor(float(np.float32(sr)) * block_size * block_size))


def _bitmap_bytes(block_count: int) -> int:
    return (block_count + 7) // 8


def write_stream(header: StreamHeader, msets) -> bytes:
    """Serialize a measurement stream. Deterministic for identical inputs."""
    msets = list(msets)
    if len(msets) != header.frame_count:
        raise StreamFormatError(
            f"header announces {header.frame_count} frames, got {len(msets)}")
    l = header.block_count
    out = [_HEADER.pack(MAGIC, VERSION, header.width, header.height,
                        header.block_size,
                        np.float32(header.sr_high), np.float32(header.sr_target),
                        header.frame_count, header.seed)]
    for pos, mset in enumerate(msets):
        if mset.frame_index != pos:
            raise StreamFormatError(
                f"frame indices must be contiguous from 0; got {mset.frame_index} at {pos}")
        if mset.block_count != l:
            raise StreamFormatError(
                f"frame {pos} has {mset.block_count} blocks, header dims imply {l}")
        flags = mset.block_map.flags
        rows = rows_for(mset.sr_m, header.block_size)
        if pos == 0:
            if not flags.all():
                raise StreamFormatError("frame 0 must transmit every block")
            if rows != header.rows_high or np.float32(mset.sr_m) != np.float32(header.sr_high):
                raise StreamFormatError("frame 0 must be sampled at the header's high rate")
            bitmap = b"\xff" * _bitmap_bytes(l)
        else:
            bitmap = np.packbits(flags, bitorder="little").tobytes()
            bitmap = bitmap.ljust(_bitmap_bytes(l), b"\x00")
        out.append(_FRAME.pack(mset.frame_index,
                               np.float32(mset.threshold_used),
                               np.float32(mset.sr_m)))
        out.append(bitmap)
        out.append(_COUNT.pack(mset.block_map.moving_count))
        for i, vec in enumerate(mset.per_block):
            expected = rows if flags[i] else 0
            if len(vec) != expected:
                raise StreamFormatError(
                    f"frame {pos} block {i}: expected {expected} rows, got {len(vec)}")
            if expected:
                out.append(np.asarray(vec, dtype="<f4").tobytes())
    return b"".join(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise StreamTruncatedError(f"truncated {what}")
        chunk = self.data[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def done(self) -> bool:
        return self.pos == len(self.data)


def read_stream(data: bytes):
    """Exact inverse of write_stream -> (StreamHeader, [MeasurementSet])."""
    rd = _Reader(data)
    magic, version, width, height, block, sr_h, sr_t, n, seed = \
        _HEADER.unpack(rd.take(_HEADER.size, "header"))
    if magic != MAGIC:
        raise StreamMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise StreamVersionError(f"unsupported version {version}")
    if block < 8:
        raise StreamFormatError(f"block size {block} out of range")
    if width == 0 or height == 0:
        raise StreamFormatError("zero frame dimensions")
    if not 0.0 < sr_h <= 1.0 or not 0.0 < sr_t < 1.0 or sr_h <= sr_t:
        raise StreamFormatError(f"inconsistent rates sr_high={sr_h} sr_target={sr_t}")
    header = StreamHeader(width=width, height=height, block_size=block,
                          sr_high=float(sr_h), sr_target=float(sr_t),
                          frame_count=int(n), seed=int(seed))
    l = header.block_count
    nbytes = _bitmap_bytes(l)
    msets = []
    for pos in range(header.frame_count):
        what = f"frame {pos}"
        idx, theta, sr_m = _FRAME.unpack(rd.take(_FRAME.size, what))
        if idx != pos:
            raise StreamFormatError(f"frame {pos} carries index {idx}")
        if not np.isfinite(sr_m) or not 0.0 <= sr_m <= 1.0 or not np.isfinite(theta):
            raise StreamFormatError(f"frame {pos} has invalid rate or threshold")
        bitmap = rd.take(nbytes, what)
        if pos == 0:
            if bitmap != b"\xff" * nbytes:
                raise StreamFormatError("frame 0 bitmap must be all-ones")
            if np.float32(sr_m) != np.float32(sr_h):
                raise StreamFormatError("frame 0 must be sampled at the header's high rate")
            flags = np.ones(l, dtype=bool)
        else:
            bits = np.unpackbits(np.frombuffer(bitmap, dtype=np.uint8), bitorder="little")
            if bits[l:].any():
                raise StreamFormatError(f"frame {pos} bitmap has padding bits set")
            flags = bits[:l].astype(bool)
        (m,) = _COUNT.unpack(rd.take(_COUNT.size, what))
        if m != int(flags.sum()):
            raise StreamFormatError(
                f"frame {pos} moving count {m} disagrees with its bitmap")
        rows = rows_for(sr_m, block)
        payload = rd.take(4 * m * rows, what)
        values = np.frombuffer(payload, dtype="<f4")
        per_block = []
        taken = 0
        for i in range(l):
            if flags[i] and rows:
                per_block.append(values[taken:taken + rows])
                taken += rows
            else:
                per_block.append(np.empty(0, dtype=np.float32))
        msets.append(MeasurementSet(
            frame_index=pos,
            per_block=tuple(per_block),
            block_map=BlockMap(flags=flags),
            sr_m=float(sr_m),
            threshold_used=float(theta),
        ))
    if not rd.done():
        raise StreamTrailingError(
            f"{len(data) - rd.pos} trailing bytes after frame {header.frame_count - 1}")
    return header, msets


def audit_sr(data: bytes) -> float:
    """Achieved average SR from the bytes alone: scalars / (n * l * B^2)."""
    header, msets = read_stream(data)
    if header.frame_count == 0:
        raise StreamFormatError("cannot audit an empty stream")
    total = sum(m.total_scalars() for m in msets)
    denom = header.frame_count * header.block_count * header.block_size ** 2
    return total / denom
