"""PSNR and SSIM on the unpadded frame region."""

import math

import numpy as np
from scipy.ndimage import correlate1d

from .model import Frame

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_K1 = 0.01
_K2 = 0.03
_L = 255.0


def _as_image(x) -> np.ndarray:
    if isinstance(x, Frame):
        return np.asarray(x.original_region(), dtype=np.float64)
    return np.asarray(x, dtype=np.float64)


def psnr(ref, test) -> float:
    """10*log10(255^2 / MSE); +inf for identical images."""
    a, b = _as_image(ref), _as_image(test)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(_L * _L / mse)


def _gaussian_taps() -> np.ndarray:
    half = _SSIM_WINDOW // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    taps = np.exp(-(x * x) / (2.0 * _SSIM_SIGMA ** 2))
    return taps / taps.sum()


_TAPS = _gaussian_taps()


def _windowed(img: np.ndarray) -> np.ndarray:
    half = _SSIM_WINDOW // 2
    out = correlate1d(img, _TAPS, axis=0, mode="constant")
    out = correlate1d(out, _TAPS, axis=1, mode="constant")
    return out[half:-half, half:-half]


def ssim(ref, test) -> float:
    """Mean structural similarity, 11x11 Gaussian window (sigma 1.5), L=255."""
    a, b = _as_image(ref), _as_image(test)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if min(a.shape) < _SSIM_WINDOW:
        raise ValueError(f"image smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} SSIM window")
    c1 = (_K1 * _L) ** 2
    c2 = (_K2 * _L) ** 2
    mu_a = _windowed(a)
    mu_b = _windowed(b)
    var_a = _windowed(a * a) - mu_a * mu_a
    var_b = _windowed(b * b) - mu_b * mu_b
    cov = _windowed(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))
