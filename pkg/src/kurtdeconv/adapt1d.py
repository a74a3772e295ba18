"""Online gradient-ascent maximum-kurtosis adaptive filtering (1-D).

Each step filters the current window, advances the running moment
estimates, and nudges the taps along feedback * window:

    y(n)    = h' x(n..n-L+1)
    h(n+1)  = h(n) + mu * f(n) * window

with f(n) the instantaneous kurtosis-gradient feedback from stats. The
sign of mu selects whether kurtosis is pushed up (super-gaussian sources)
or down (sub-gaussian sources).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.signal import lfilter

from .errors import ContractViolationError, DegenerateInputError, DivergenceError, NearSingularMomentError
from .signals import FilterTaps1D, Signal1D, apply_taps, window_at
from .stats import M2_GUARD, MomentState, feedback, init_moments, kurtosis_excess, update_moments

#: Magnitude above which any tap is treated as numeric blow-up.
TAP_LIMIT = 1e6


class SourceClass(Enum):
    SUPER_GAUSSIAN = "super_gaussian"
    SUB_GAUSSIAN = "sub_gaussian"


def choose_mu_sign(source_class: SourceClass) -> int:
    """+1 for super-gaussian sources (speech-like), -1 for sub-gaussian
    (image-like)."""
    return 1 if source_class is SourceClass.SUPER_GAUSSIAN else -1


@dataclass(frozen=True)
class AdaptConfig:
    """Knobs for run_adapt.

    taps: filter length L. mu: signed step size (mu = 0 degenerates to a
    pure filtering pass). beta: moment smoothing. warmup: samples used to
    seed the moment estimates before any tap update. passes: sweeps over
    the signal; taps and moments persist across passes.
    """

    taps: int
    mu: float = 1e-3
    beta: float = 0.99
    warmup: int = 256
    passes: int = 1

    def __post_init__(self):
        if self.taps < 1:
            raise ContractViolationError(f"taps must be >= 1, got {self.taps}")
        if not np.isfinite(self.mu):
            raise ContractViolationError("mu must be finite")
        if not 0.0 < self.beta < 1.0:
            raise ContractViolationError(f"beta must lie in (0, 1), got {self.beta}")
        if self.warmup < 0:
            raise ContractViolationError(f"warmup must be >= 0, got {self.warmup}")
        if self.passes < 1:
            raise ContractViolationError(f"passes must be >= 1, got {self.passes}")


@dataclass(frozen=True, eq=False)
class AdaptResult:
    filter: FilterTaps1D
    output: Signal1D
    final_kurtosis: float
    kurtosis_trace: tuple[float, ...]


def init_filter(L: int) -> FilterTaps1D:
    """Unit-impulse (pass-through) starting filter."""
    if L < 1:
        raise ContractViolationError(f"L must be >= 1, got {L}")
    taps = np.zeros(L)
    taps[0] = 1.0
    return FilterTaps1D(taps)


def adapt_step(h: FilterTaps1D, state: MomentState, window: np.ndarray, mu: float):
    """One adaptive update; returns (y, new taps, new state).

    The moment state always advances; the tap update is skipped when the
    second moment is still under the singularity guard.
    """
    w = np.asarray(window, dtype=np.float64)
    if w.ndim != 1 or w.size != len(h):
        raise ContractViolationError(f"window shape {w.shape} does not match {len(h)} taps")
    y = float(h.taps @ w)
    state = update_moments(state, y)
    try:
        f = feedback(state, y)
    except NearSingularMomentError:
        return y, h, state
    return y, FilterTaps1D(h.taps + (mu * f) * w), state


def run_adapt(x1: Signal1D, cfg: AdaptConfig) -> AdaptResult:
    """Adapt over the signal and return the converged filter and output.

    The first cfg.warmup samples only seed the moment estimates (filter
    output under the initial identity taps is the signal itself); every
    pass then updates over samples warmup..end, with taps and moments
    carried across passes. The returned output is one pure filtering pass
    of x1 with the final taps; the trace holds its excess kurtosis after
    each pass.
    """
    x = x1.samples
    n_total = x.size
    L, mu, beta = cfg.taps, cfg.mu, cfg.beta
    if n_total <= cfg.warmup + L:
        raise DegenerateInputError(f"signal length {n_total} too short for warmup {cfg.warmup} and {L} taps")

    h = np.zeros(L)
    h[0] = 1.0
    if cfg.warmup > 0:
        block = x[: cfg.warmup]
        b2 = block * block
        m2, m4 = float(b2.mean()), float((b2 * b2).mean())
    else:
        m2 = m4 = 0.0

    omb = 1.0 - beta
    trace = []
    for pass_index in range(cfg.passes):
        for n in range(cfg.warmup, n_total):
            if n + 1 >= L:
                w = x[n - L + 1 : n + 1][::-1]
            else:
                w = window_at(x1, n, L)
            y = float(h @ w)
            y2 = y * y
            m2 = beta * m2 + omb * y2
            m4 = beta * m4 + omb * y2 * y2
            if m2 > M2_GUARD:
                f = 4.0 * ((m2 * y2 - m4) * y) / (m2 * m2 * m2)
                h += (mu * f) * w
                # negated form so NaN taps also trip the guard
                if not np.all(np.abs(h) <= TAP_LIMIT):
                    raise DivergenceError(
                        f"tap magnitude exceeded {TAP_LIMIT:g} at pass {pass_index}, sample {n}",
                        pass_index=pass_index,
                        sample_index=n,
                    )
        trace.append(kurtosis_excess(lfilter(h, [1.0], x)))

    taps = FilterTaps1D(h)
    output = apply_taps(x1, taps)
    return AdaptResult(taps, output, trace[-1], tuple(trace))


@dataclass(frozen=True, eq=False)
class SurfaceResult:
    surface: np.ndarray
    argmax: tuple[float, float]


def kurtosis_surface(x1: Signal1D, grid_a1, grid_a2) -> SurfaceResult:
    """|excess kurtosis| of [1, -a1, -a2]-filtered x1 over a parameter grid.

    surface[i, j] corresponds to (grid_a1[i], grid_a2[j]); cells whose
    filtered output is degenerate are NaN and excluded from the argmax.
    """
    g1 = np.asarray(grid_a1, dtype=np.float64)
    g2 = np.asarray(grid_a2, dtype=np.float64)
    if g1.size == 0 or g2.size == 0:
        raise ContractViolationError("grids must be nonempty")
    if not (np.all(np.isfinite(g1)) and np.all(np.isfinite(g2))):
        raise ContractViolationError("grids contain non-finite values")
    x = x1.samples
    if x.size < 3:
        raise DegenerateInputError("need at least 3 samples")
    xm1 = np.concatenate(([0.0], x[:-1]))
    xm2 = np.concatenate(([0.0, 0.0], x[:-2]))
    surface = np.full((g1.size, g2.size), np.nan)
    for i, a1 in enumerate(g1):
        base = x - a1 * xm1
        for j, a2 in enumerate(g2):
            y = base - a2 * xm2
            try:
                surface[i, j] = abs(kurtosis_excess(y))
            except DegenerateInputError:
                continue
    if np.all(np.isnan(surface)):
        raise DegenerateInputError("every grid cell produced a degenerate output")
    i, j = np.unravel_index(np.nanargmax(surface), surface.shape)
    return SurfaceResult(surface, (float(g1[i]), float(g2[j])))
