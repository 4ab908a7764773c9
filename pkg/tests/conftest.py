import numpy as np
import pytest

from bacs import CodecConfig, build_operator, synthetic_video


@pytest.fixture(scope="session")
def cfg32():
    """Surveillance-style defaults: B=32, SR_h=0.2."""
    return CodecConfig(block_size=32, high_sr=0.2, target_sr=0.01)


@pytest.fixture(scope="session")
def op32(cfg32):
    return build_operator(cfg32, seed=9)


@pytest.fixture(scope="session")
def cfg16():
    """Small-block config that keeps per-test linear algebra cheap."""
    return CodecConfig(block_size=16, high_sr=0.25, target_sr=0.05)


@pytest.fixture(scope="session")
def op16(cfg16):
    return build_operator(cfg16, seed=5)


@pytest.fixture(scope="session")
def tiny_video():
    """8 frames of 64x64 with one moving square and mild dither."""
    return list(synthetic_video(width=64, height=64, frames=8, seed=3, squares=1,
                                square_size=24, speed=5.0, dither=1.25))


@pytest.fixture(scope="session")
def static_video():
    """10 bit-identical 64x64 frames (no dither, no motion)."""
    frame = synthetic_video(width=64, height=64, frames=1, seed=6, squares=2,
                            square_size=20, speed=0.0, dither=0.0)[0]
    return [frame.copy() for _ in range(10)]


def rng(seed: int = 0) -> np.random.Generator:
    return np.random.default_rng(seed)
