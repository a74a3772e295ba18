"""Sample-sequence and image containers plus window/patch extraction.

All containers are immutable value objects: construction copies the data
into a read-only float64 array, so instances can be shared freely between
threads. The extraction helpers use a zero-padding convention for indices
that fall outside the data (the recursions downstream stay well defined
from sample 0).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate as _correlate2d
from scipy.signal import lfilter

from .errors import ContractViolationError


def _frozen_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ContractViolationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ContractViolationError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ContractViolationError(f"{name} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal1D:
    """Finite real-valued sample sequence; sample_rate is metadata only."""

    samples: np.ndarray
    sample_rate: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "samples", _frozen_array(self.samples, "samples", 1))
        if self.sample_rate is not None and int(self.sample_rate) < 1:
            raise ContractViolationError(f"sample_rate must be positive, got {self.sample_rate}")

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True, eq=False)
class Image2D:
    """Row-major real-valued grayscale grid."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _frozen_array(self.pixels, "pixels", 2))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class FilterTaps1D:
    """FIR coefficients; tap 0 multiplies the current sample, tap k the
    sample k steps in the past."""

    taps: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "taps", _frozen_array(self.taps, "taps", 1))

    def __len__(self) -> int:
        return self.taps.size


@dataclass(frozen=True, eq=False)
class Kernel2D:
    """Center-anchored 2-D filter weights; both dimensions must be odd."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen_array(self.weights, "weights", 2))
        rows, cols = self.weights.shape
        if rows % 2 == 0 or cols % 2 == 0:
            raise ContractViolationError(f"kernel dimensions must be odd, got {rows}x{cols}")

    @property
    def rows(self) -> int:
        return self.weights.shape[0]

    @property
    def cols(self) -> int:
        return self.weights.shape[1]


def window_at(x1: Signal1D, n: int, L: int) -> np.ndarray:
    """Tap-ordered window ending at sample n.

    Element k of the result is sample x1(n-k), so it lines up with tap k of
    a FilterTaps1D. Samples before index 0 read as zero.
    """
    if L < 1:
        raise ContractViolationError(f"window length must be >= 1, got {L}")
    x = x1.samples
    if not 0 <= n < x.size:
        raise IndexError(f"sample index {n} out of range for signal of length {x.size}")
    out = np.zeros(L)
    avail = min(L, n + 1)
    out[:avail] = x[n - avail + 1 : n + 1][::-1]
    return out


def patch_at(img: Image2D, n: int, m: int, M: int, N: int) -> np.ndarray:
    """M x N neighborhood centered at pixel (n, m), zero outside the image.

    Rows span n-(M-1)/2 .. n+(M-1)/2 and columns m-(N-1)/2 .. m+(N-1)/2;
    M always counts rows and N columns, matching Kernel2D.
    """
    if M < 1 or N < 1 or M % 2 == 0 or N % 2 == 0:
        raise ContractViolationError(f"patch dimensions must be odd and positive, got {M}x{N}")
    p = img.pixels
    out = np.zeros((M, N))
    r0 = n - (M - 1) // 2
    c0 = m - (N - 1) // 2
    rs, re = max(r0, 0), min(r0 + M, p.shape[0])
    cs, ce = max(c0, 0), min(c0 + N, p.shape[1])
    if rs < re and cs < ce:
        out[rs - r0 : re - r0, cs - c0 : ce - c0] = p[rs:re, cs:ce]
    return out


def apply_taps(x: Signal1D, taps: FilterTaps1D) -> Signal1D:
    """Causal FIR filtering y(n) = sum_k h(k) x(n-k), zero initial state."""
    y = lfilter(taps.taps, [1.0], x.samples)
    return Signal1D(y, sample_rate=x.sample_rate)


def apply_kernel(img: Image2D, kernel: Kernel2D) -> Image2D:
    """Center-anchored 2-D correlation with zero padding at the borders.

    Output pixel (n, m) is the inner product of the kernel with
    patch_at(img, n, m, rows, cols).
    """
    out = _correlate2d(img.pixels, kernel.weights, mode="constant", cval=0.0)
    return Image2D(out)
