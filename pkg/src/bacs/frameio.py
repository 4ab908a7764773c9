"""Reading and writing grayscale video as PGM directories or planar raw files.

Two on-disk forms are supported:

  pgm  -- a directory of binary 8-bit PGM (P5) files, frames in lexicographic
          filename order
  raw  -- a single file of concatenated 8-bit luma planes (row-major), frame
          dimensions supplied out of band
"""

import os

import numpy as np

from .model import BacsError


class VideoIOError(BacsError):
    """Unreadable, malformed, or inconsistent video input/output."""


_WS = b" \t\r\n"


def _parse_pgm(data: bytes, name: str) -> np.ndarray:
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            if data[pos] in _WS:
                pos += 1
            elif data[pos:pos + 1] == b"#":
                nl = data.find(b"\n", pos)
                pos = len(data) if nl < 0 else nl + 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos] not in _WS and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise VideoIOError(f"{name}: truncated PGM header")
        return data[start:pos]

    if data[:2] != b"P5":
        raise VideoIOError(f"{name}: not a binary PGM (P5) file")
    pos = 2
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError:
        raise VideoIOError(f"{name}: non-numeric PGM header field") from None
    if width <= 0 or height <= 0:
        raise VideoIOError(f"{name}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise VideoIOError(f"{name}: only 8-bit PGM supported (maxval {maxval})")
    if pos >= len(data) or data[pos] not in _WS:
        raise VideoIOError(f"{name}: missing whitespace after PGM header")
    pos += 1
    pixels = data[pos:pos + width * height]
    if len(pixels) < width * height:
        raise VideoIOError(f"{name}: pixel data truncated")
    if len(data) - pos > width * height:
        raise VideoIOError(f"{name}: trailing bytes after pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width)


def read_pgm(path: str) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc
    return _parse_pgm(data, path)


def write_pgm(path: str, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 2:
        raise VideoIOError(f"{path}: can only write 2d grayscale images")
    data = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    header = f"P5\n{data.shape[1]} {data.shape[0]}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(data.tobytes())
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc


def read_pgm_dir(path: str, count: int = 0) -> list:
    """All *.pgm files under `path` in lexicographic order, as uint8 arrays.

    Every frame must share the dimensions of the first; a mismatch is
    reported against the offending file. `count` > 0 keeps only the first
    `count` frames.
    """
    try:
        names = sorted(n for n in os.listdir(path) if n.lower().endswith(".pgm"))
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc
    if not names:
        raise VideoIOError(f"{path}: no .pgm files found")
    if count:
        names = names[:count]
    frames = []
    for name in names:
        img = read_pgm(os.path.join(path, name))
        if frames and img.shape != frames[0].shape:
            raise VideoIOError(
                f"{os.path.join(path, name)}: frame size {img.shape[1]}x{img.shape[0]} "
                f"differs from first frame {frames[0].shape[1]}x{frames[0].shape[0]}")
        frames.append(img)
    return frames


def write_pgm_dir(path: str, frames) -> list:
    """Write frames as frame_0000.pgm, frame_0001.pgm, ... under `path`."""
    os.makedirs(path, exist_ok=True)
    written = []
    for i, frame in enumerate(frames):
        name = os.path.join(path, f"frame_{i:04d}.pgm")
        write_pgm(name, frame)
        written.append(name)
    return written


def read_raw(path: str, width: int, height: int, count: int = 0) -> list:
    """Planar 8-bit luma frames from a single raw file.

    The file length must be an exact multiple of width*height. `count` > 0
    keeps only the first `count` frames (and it is an error to ask for more
    than the file holds).
    """
    if width <= 0 or height <= 0:
        raise VideoIOError(f"{path}: raw input needs positive --width/--height")
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc
    fsize = width * height
    if len(data) == 0 or len(data) % fsize:
        raise VideoIOError(
            f"{path}: size {len(data)} is not a multiple of {width}x{height}")
    have = len(data) // fsize
    if count > have:
        raise VideoIOError(f"{path}: asked for {count} frames, file holds {have}")
    n = count if count else have
    plane = np.frombuffer(data[: n * fsize], dtype=np.uint8)
    return [plane[i * fsize:(i + 1) * fsize].reshape(height, width) for i in range(n)]


def write_raw(path: str, frames) -> None:
    try:
        with open(path, "wb") as fh:
            for frame in frames:
                data = np.clip(np.rint(np.asarray(frame)), 0, 255).astype(np.uint8)
                fh.write(data.tobytes())
    except OSError as exc:
        raise VideoIOError(f"{path}: {exc.strerror or exc}") from exc


def read_frames(path: str, fmt: str = "pgm", width: int = 0, height: int = 0,
                count: int = 0) -> list:
    """Dispatch on format name; see read_pgm_dir / read_raw."""
    if fmt == "pgm":
        return read_pgm_dir(path, count=count)
    if fmt == "raw":
        return read_raw(path, width, height, count=count)
    raise VideoIOError(f"unknown input format {fmt!r}")
