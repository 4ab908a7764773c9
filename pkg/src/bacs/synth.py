"""Deterministic synthetic test sequences: textured squares over a still scene.

The generator is seeded end to end, so a (seed, parameter) pair always yields
byte-identical frames. Squares carry their own texture and bounce off the
frame edges; an optional move/pause schedule freezes them periodically, and
per-frame dither emulates sensor noise on the otherwise static background.
"""

import numpy as np
from scipy import ndimage


def _background(height: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """Smooth mid-gray field with coarse and fine texture."""
    coarse = ndimage.gaussian_filter(rng.standard_normal((height, width)), sigma=12.0)
    fine = ndimage.gaussian_filter(rng.standard_normal((height, width)), sigma=2.0)
    yy, xx = np.mgrid[0:height, 0:width]
    ramp = np.cos(2.0 * np.pi * xx / max(width, 1) * 1.3) \
        + np.sin(2.0 * np.pi * yy / max(height, 1) * 0.7)

    def unit(a):
        lo, hi = a.min(), a.max()
        return (a - lo) / (hi - lo) if hi > lo else np.zeros_like(a)

    img = 90.0 + 80.0 * unit(coarse) + 18.0 * (unit(fine) - 0.5) + 10.0 * ramp
    return np.clip(img, 0.0, 255.0)


def _square_texture(size: int, rng: np.random.Generator) -> np.ndarray:
    base = rng.uniform(30.0, 225.0)
    yy, xx = np.mgrid[0:size, 0:size]
    grad = 60.0 * (xx + yy) / max(2 * (size - 1), 1) - 30.0
    grain = ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma=1.5)
    grain = 25.0 * grain / max(np.abs(grain).max(), 1e-9)
    return np.clip(base + grad + grain, 0.0, 255.0)


def _fold(q: float, limit: float) -> float:
    """Reflect an unbounded coordinate into [0, limit] (bouncing motion)."""
    if limit <= 0.0:
        return 0.0
    period = 2.0 * limit
    q = q % period
    return period - q if q > limit else q


def motion_steps(frame: int, move_frames: int, pause_frames: int) -> int:
    """Effective motion steps taken by frame `frame` under a move/pause cycle.

    move_frames <= 0 means continuous motion. A cycle is `move_frames` moving
    frames followed by `pause_frames` frozen ones.
    """
    if move_frames <= 0 or pause_frames <= 0:
        return frame
    cycle = move_frames + pause_frames
    full, rem = divmod(frame, cycle)
    return full * move_frames + min(rem, move_frames)


def synthetic_video(width: int = 128, height: int = 128, frames: int = 60,
                    seed: int = 7, squares: int = 2, square_size: int = 32,
                    speed: float = 4.0, dither: float = 1.25,
                    move_frames: int = 0, pause_frames: int = 0) -> np.ndarray:
    """Render a (frames, height, width) uint8 sequence.

    dither is the half-width, in gray levels, of uniform per-pixel noise added
    to every frame; 0 disables it and makes non-moving content bit-static.
    """
    if width < 8 or height < 8:
        raise ValueError("frame too small to synthesize")
    if frames < 1:
        raise ValueError("need at least one frame")
    if squares < 0 or square_size < 1:
        raise ValueError("bad square parameters")
    square_size = min(square_size, width, height)

    rng = np.random.default_rng(seed)
    scene = _background(height, width, rng)

    sprites = []
    for _ in range(squares):
        tex = _square_texture(square_size, rng)
        x0 = rng.uniform(0, max(width - square_size, 1))
        y0 = rng.uniform(0, max(height - square_size, 1))
        angle = rng.uniform(0.0, 2.0 * np.pi)
        sprites.append((tex, x0, y0, speed * np.cos(angle), speed * np.sin(angle)))

    out = np.empty((frames, height, width), dtype=np.uint8)
    for t in range(frames):
        steps = motion_steps(t, move_frames, pause_frames)
        img = scene.copy()
        for tex, x0, y0, vx, vy in sprites:
            x = int(round(_fold(x0 + vx * steps, width - square_size)))
            y = int(round(_fold(y0 + vy * steps, height - square_size)))
            img[y:y + square_size, x:x + square_size] = tex
        if dither > 0.0:
            img = img + rng.uniform(-dither, dither, size=img.shape)
        out[t] = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    return out
