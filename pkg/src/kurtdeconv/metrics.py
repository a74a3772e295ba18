"""Restoration scoring: correlations and parameter-recovery errors.

Blind deconvolution recovers the source only up to gain, sign, and shift.
Correlation is affine-invariant by construction; parameter comparisons
first normalize the estimated filter so its largest-magnitude tap becomes
+1 (and, for kernels, sits at the center).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .degrade import DegradeSpec
from .errors import ContractViolationError, DegenerateInputError
from .signals import FilterTaps1D, Image2D, Kernel2D, Signal1D


def _flat(values) -> np.ndarray:
    if isinstance(values, Signal1D):
        return values.samples
    if isinstance(values, Image2D):
        return values.pixels.ravel()
    return np.asarray(values, dtype=np.float64).ravel()


def normalized_correlation(a, b) -> float:
    """Zero-lag Pearson correlation of mean-removed flattened values."""
    av, bv = _flat(a), _flat(b)
    if av.size != bv.size:
        raise ContractViolationError(f"size mismatch: {av.size} vs {bv.size}")
    av = av - av.mean()
    bv = bv - bv.mean()
    den = np.sqrt((av @ av) * (bv @ bv))
    if den <= 0.0:
        raise DegenerateInputError("zero-variance input")
    return float(np.clip(av @ bv / den, -1.0, 1.0))


class AlignedCorrelation(NamedTuple):
    rho: float
    lag: int
    sign: int


def aligned_correlation(a: Signal1D, b: Signal1D, max_lag: int) -> AlignedCorrelation:
    """Best Pearson correlation over integer lags in [-max_lag, max_lag].

    Positive lag means b is delayed relative to a (b(n) lines up with
    a(n - lag)). Returns the signed correlation at the lag maximizing
    |rho|, together with that lag and the sign of rho.
    """
    if max_lag < 0:
        raise ContractViolationError(f"max_lag must be >= 0, got {max_lag}")
    av, bv = _flat(a), _flat(b)
    if av.size != bv.size:
        raise ContractViolationError(f"size mismatch: {av.size} vs {bv.size}")
    best = None
    for lag in range(-max_lag, max_lag + 1):
        if lag >= 0:
            aa, bb = av[: av.size - lag], bv[lag:]
        else:
            aa, bb = av[-lag:], bv[: bv.size + lag]
        if aa.size < 2:
            continue
        aa = aa - aa.mean()
        bb = bb - bb.mean()
        den = np.sqrt((aa @ aa) * (bb @ bb))
        if den <= 0.0:
            continue
        rho = float(np.clip(aa @ bb / den, -1.0, 1.0))
        if best is None or abs(rho) > abs(best[0]):
            best = (rho, lag)
    if best is None:
        raise DegenerateInputError("no lag produced a usable overlap")
    rho, lag = best
    return AlignedCorrelation(rho, lag, 1 if rho >= 0.0 else -1)


def normalize_taps(taps: FilterTaps1D) -> FilterTaps1D:
    """Scale so the largest-magnitude tap becomes exactly +1."""
    t = taps.taps
    peak = t[np.argmax(np.abs(t))]
    if peak == 0.0:
        raise DegenerateInputError("all-zero filter cannot be normalized")
    return FilterTaps1D(t / peak)


def normalize_kernel(kernel: Kernel2D) -> Kernel2D:
    """Scale the largest-|w| weight to +1 and roll it to the center."""
    w = kernel.weights
    r, c = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    peak = w[r, c]
    if peak == 0.0:
        raise DegenerateInputError("all-zero kernel cannot be normalized")
    centered = np.roll(w / peak, ((kernel.rows - 1) // 2 - r, (kernel.cols - 1) // 2 - c), axis=(0, 1))
    return Kernel2D(centered)


def true_parameters(spec: DegradeSpec) -> dict[str, float]:
    """Identification targets the estimated filter is scored against."""
    if spec.kind in ("ar2_iir", "echo_iir"):
        return {"a1": spec.a1, "a2": spec.a2}
    if spec.kind == "fir2":
        s, p = spec.a1 + spec.a2, spec.a1 * spec.a2
        return {"h1": -s, "h2": spec.a1**2 + p + spec.a2**2}
    if spec.kind == "image_iir2":
        return {"a1": spec.a1, "a2": spec.a2}
    if spec.kind == "image_iir3":
        return {"a1": spec.a1, "a2": spec.a2, "a3": spec.a3}
    raise ContractViolationError(f"{spec.kind} has no parameter mapping")


def extract_parameters(spec: DegradeSpec, estimated) -> dict[str, float]:
    """Read identified parameters off a (normalized) estimated filter.

    Tap positions follow the analytic inverse of the spec kind; for fir2
    the identified quantities are the inverse-filter taps h(1), h(2)
    themselves.
    """
    if isinstance(estimated, FilterTaps1D):
        t = normalize_taps(estimated).taps
        if spec.kind == "ar2_iir":
            if t.size < 3:
                raise ContractViolationError("AR(2) readout needs at least 3 taps")
            return {"a1": -t[1], "a2": -t[2]}
        if spec.kind == "echo_iir":
            if t.size < 2 * spec.delay + 1:
                raise ContractViolationError(f"echo readout needs at least {2 * spec.delay + 1} taps")
            return {"a1": -t[spec.delay], "a2": -t[2 * spec.delay]}
        if spec.kind == "fir2":
            if t.size < 3:
                raise ContractViolationError("fir2 readout needs at least 3 taps")
            return {"h1": t[1], "h2": t[2]}
        raise ContractViolationError(f"{spec.kind} does not describe a 1-D system")
    if isinstance(estimated, Kernel2D):
        if spec.kind not in ("image_iir2", "image_iir3"):
            raise ContractViolationError(f"{spec.kind} does not describe a 2-D system")
        w = normalize_kernel(estimated).weights
        cr, cc = (w.shape[0] - 1) // 2, (w.shape[1] - 1) // 2
        out = {"a1": -w[cr - 1, cc], "a2": -w[cr, cc - 1]}
        if spec.kind == "image_iir3":
            out["a3"] = -w[cr - 1, cc - 1]
        return out
    raise ContractViolationError(f"unsupported estimate type {type(estimated).__name__}")


def parameter_error(spec: DegradeSpec, estimated) -> dict[str, float]:
    """Per-coefficient absolute error |est - true| after normalization."""
    true = true_parameters(spec)
    est = extract_parameters(spec, estimated)
    return {name: abs(est[name] - true[name]) for name in true}
