"""Experiment harness: source -> degrade -> whiten -> adapt -> score.

Configs are line-oriented ``section.key = value`` files (see parse_config)
and every synthetic source is seeded, so a config fully determines its
report. CSV reports deliberately exclude wall time: two runs of the same
config must be byte-identical.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .adapt1d import AdaptConfig, run_adapt
from .adapt2d import Adapt2dConfig, run_adapt2d
from .degrade import DegradeSpec, apply_degradation
from .errors import ContractViolationError, DivergenceError, FormatError, KurtdeconvError
from .fileio import read_image, read_wav
from .metrics import extract_parameters, normalized_correlation, parameter_error, true_parameters
from .signals import Image2D, Signal1D, apply_kernel, apply_taps
from .stats import kurtosis_excess
from .whitening import fit_lpc, highpass_whiten, highpass_whiten_2d, lpc_whiten

SYNTHETIC_KINDS = ("laplace", "uniform", "gaussian", "integrated_laplace", "integrated_uniform")
WHITEN_KINDS = ("none", "highpass", "lpc")


@dataclass(frozen=True)
class SourceSpec:
    """Either a synthetic generator (kind + size + seed) or a file path."""

    kind: str
    seed: int | None = None
    length: int | None = None
    height: int | None = None
    width: int | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind == "file":
            if not self.path:
                raise ContractViolationError("file sources need a nonempty path")
            return
        if self.kind not in SYNTHETIC_KINDS:
            raise ContractViolationError(f"unknown source kind {self.kind!r}")
        if self.seed is None:
            raise ContractViolationError("synthetic sources require a seed")
        if self.is_image:
            if not (self.height and self.width and self.height > 0 and self.width > 0):
                raise ContractViolationError("2-D synthetic sources need positive height and width")
        elif not (self.length and self.length > 0):
            raise ContractViolationError("1-D synthetic sources need a positive length")

    @property
    def is_image(self) -> bool:
        if self.kind == "file":
            return str(self.path).lower().endswith(".pgm")
        return self.height is not None or self.width is not None


@dataclass(frozen=True)
class WhitenSpec:
    kind: str = "none"
    order: int = 5

    def __post_init__(self):
        if self.kind not in WHITEN_KINDS:
            raise ContractViolationError(f"unknown whitening kind {self.kind!r}")
        if self.kind == "lpc" and self.order < 1:
            raise ContractViolationError(f"lpc order must be >= 1, got {self.order}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    source: SourceSpec
    adapt: AdaptConfig | Adapt2dConfig
    degrade: DegradeSpec | None = None
    whiten: WhitenSpec = field(default_factory=WhitenSpec)
    report_path: str | None = None

    def __post_init__(self):
        if not self.experiment_id:
            raise ContractViolationError("experiment id must be nonempty")
        want_2d = isinstance(self.adapt, Adapt2dConfig)
        if self.source.is_image != want_2d:
            raise ContractViolationError("source dimensionality does not match the adapt configuration")
        if self.degrade is not None:
            image_kind = self.degrade.kind.startswith("image_")
            if image_kind != want_2d:
                raise ContractViolationError(f"degradation {self.degrade.kind} does not match the adapt configuration")


def make_source(spec: SourceSpec):
    """Materialize a SourceSpec into a Signal1D or Image2D."""
    if spec.kind == "file":
        return read_image(spec.path) if spec.is_image else read_wav(spec.path)
    rng = np.random.default_rng(spec.seed)
    if not spec.is_image:
        n = spec.length
        if spec.kind == "laplace":
            return Signal1D(rng.laplace(0.0, 1.0 / np.sqrt(2.0), n))
        if spec.kind == "uniform":
            return Signal1D(rng.uniform(-1.0, 1.0, n))
        if spec.kind == "gaussian":
            return Signal1D(rng.standard_normal(n))
        # integrated kinds: random walks whose first difference is exactly
        # the i.i.d. draw, i.e. correlated speech/texture stand-ins. Pure
        # scaling only; an offset would plant an outlier at the whitened
        # boundary.
        if spec.kind == "integrated_laplace":
            return Signal1D(np.cumsum(rng.laplace(0.0, 1.0 / np.sqrt(2.0), n)) / np.sqrt(n))
        return Signal1D(np.cumsum(rng.uniform(-1.0, 1.0, n)) / np.sqrt(n))
    shape = (spec.height, spec.width)
    if spec.kind == "uniform":
        return Image2D(rng.random(shape))
    if spec.kind == "gaussian":
        return Image2D(_unit_range(rng.standard_normal(shape)))
    if spec.kind == "laplace":
        return Image2D(_unit_range(rng.laplace(0.0, 1.0, shape)))
    if spec.kind == "integrated_laplace":
        noise = rng.laplace(0.0, 1.0 / np.sqrt(2.0), shape)
    else:
        noise = rng.uniform(-1.0, 1.0, shape)
    field2d = np.cumsum(np.cumsum(noise, axis=0), axis=1)
    return Image2D(field2d / np.sqrt(shape[0] * shape[1]))


def _unit_range(arr: np.ndarray) -> np.ndarray:
    lo, hi = arr.min(), arr.max()
    return (arr - lo) / (hi - lo) if hi > lo else np.zeros_like(arr)


@dataclass(frozen=True)
class ParameterRow:
    name: str
    true: float
    est: float
    err: float


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    experiment_id: str
    mode: str
    source_desc: str
    seed: int | None
    size_desc: str
    degrade_desc: str
    whiten_desc: str
    filter_desc: str
    mu: float
    beta: float
    warmup: int
    passes: int
    parameters: tuple[ParameterRow, ...]
    kurt_source: float
    kurt_degraded: float
    kurt_restored: float
    rho_sx: float
    rho_restored: float
    wall_time_s: float
    estimate: np.ndarray  # converged taps (1-D) or kernel weights (2-D)

    CSV_HEADER = (
        "id,mode,source,seed,size,degrade,whiten,filter,mu,beta,warmup,passes,"
        "p1_name,p1_true,p1_est,p1_err,p2_name,p2_true,p2_est,p2_err,"
        "p3_name,p3_true,p3_est,p3_err,"
        "kurt_source,kurt_degraded,kurt_restored,rho_sx,rho_restored"
    )

    def csv_row(self) -> str:
        cells = [
            self.experiment_id,
            self.mode,
            self.source_desc,
            "" if self.seed is None else str(self.seed),
            self.size_desc,
            self.degrade_desc,
            self.whiten_desc,
            self.filter_desc,
            _fmt(self.mu),
            _fmt(self.beta),
            str(self.warmup),
            str(self.passes),
        ]
        rows = list(self.parameters) + [None] * (3 - len(self.parameters))
        for row in rows[:3]:
            if row is None:
                cells += ["", "", "", ""]
            else:
                cells += [row.name, _fmt(row.true), _fmt(row.est), _fmt(row.err)]
        cells += [
            _fmt(self.kurt_source),
            _fmt(self.kurt_degraded),
            _fmt(self.kurt_restored),
            _fmt(self.rho_sx),
            _fmt(self.rho_restored),
        ]
        return ",".join(cells)

    def text(self) -> str:
        lines = [
            f"experiment      {self.experiment_id}",
            f"mode            {self.mode}",
            f"source          {self.source_desc} seed={self.seed} size={self.size_desc}",
            f"degradation     {self.degrade_desc}",
            f"whitening       {self.whiten_desc}",
            f"filter          {self.filter_desc} mu={self.mu:g} beta={self.beta:g} "
            f"warmup={self.warmup} passes={self.passes}",
        ]
        for row in self.parameters:
            lines.append(f"  {row.name}: true={row.true:+.4f} est={row.est:+.4f} err={row.err:.4f}")
        lines += [
            f"kurtosis        source={self.kurt_source:.4f} degraded={self.kurt_degraded:.4f} "
            f"restored={self.kurt_restored:.4f}",
            f"correlation     rho_sx={self.rho_sx:.4f} rho_restored={self.rho_restored:.4f}",
            f"wall time       {self.wall_time_s:.2f} s",
        ]
        return "\n".join(lines)


def _fmt(v: float) -> str:
    if v is None or (isinstance(v, float) and not np.isfinite(v)):
        return ""
    return repr(float(v))


def _degrade_desc(spec: DegradeSpec | None) -> str:
    if spec is None:
        return "none"
    parts = [spec.kind, f"a1={spec.a1:g}", f"a2={spec.a2:g}"]
    if spec.kind == "image_iir3":
        parts.append(f"a3={spec.a3:g}")
    if spec.kind == "echo_iir":
        parts.append(f"D={spec.delay}")
    return " ".join(parts)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute the full pipeline for one config."""
    t0 = time.perf_counter()
    source = make_source(cfg.source)
    if isinstance(cfg.adapt, Adapt2dConfig):
        return _run_2d(cfg, source, t0)
    return _run_1d(cfg, source, t0)


def _run_1d(cfg: ExperimentConfig, s: Signal1D, t0: float) -> ExperimentReport:
    x = apply_degradation(cfg.degrade, s) if cfg.degrade is not None else s

    if cfg.whiten.kind == "highpass":
        x1 = highpass_whiten(x)
        whiten_desc = "highpass"
    elif cfg.whiten.kind == "lpc":
        model = fit_lpc(x, cfg.whiten.order)
        x1 = lpc_whiten(x, model)
        whiten_desc = f"lpc({cfg.whiten.order})"
    else:
        x1 = x
        whiten_desc = "none"

    result = run_adapt(x1, cfg.adapt)
    # The inverse is identified on the whitened domain but, because the
    # whitener and the degradation are both LTI, it restores the raw
    # observation directly.
    s_est = apply_taps(x, result.filter)

    parameters = _parameter_rows(cfg.degrade, result.filter)
    return ExperimentReport(
        experiment_id=cfg.experiment_id,
        mode="1d",
        source_desc=cfg.source.kind if cfg.source.kind != "file" else str(cfg.source.path),
        seed=cfg.source.seed,
        size_desc=str(len(s)),
        degrade_desc=_degrade_desc(cfg.degrade),
        whiten_desc=whiten_desc,
        filter_desc=str(cfg.adapt.taps),
        mu=cfg.adapt.mu,
        beta=cfg.adapt.beta,
        warmup=cfg.adapt.warmup,
        passes=cfg.adapt.passes,
        parameters=parameters,
        kurt_source=kurtosis_excess(s.samples),
        kurt_degraded=kurtosis_excess(x.samples),
        kurt_restored=kurtosis_excess(s_est.samples),
        rho_sx=normalized_correlation(s, x),
        rho_restored=normalized_correlation(s, s_est),
        wall_time_s=time.perf_counter() - t0,
        estimate=result.filter.taps,
    )


def _run_2d(cfg: ExperimentConfig, f: Image2D, t0: float) -> ExperimentReport:
    if cfg.degrade is not None:
        g = apply_degradation(cfg.degrade, f)
        peak = float(np.max(np.abs(g.pixels)))
        if peak > 1e9:
            raise DivergenceError(f"degraded image peak {peak:g} indicates an unstable 2-D recursion")
    else:
        g = f

    if cfg.whiten.kind == "highpass":
        d = highpass_whiten_2d(g)
        whiten_desc = "highpass"
    elif cfg.whiten.kind == "lpc":
        raise ContractViolationError("lpc whitening is not defined for images")
    else:
        d = g
        whiten_desc = "none"

    result = run_adapt2d(d, cfg.adapt)
    s_est = apply_kernel(g, result.kernel)

    parameters = _parameter_rows(cfg.degrade, result.kernel)
    return ExperimentReport(
        experiment_id=cfg.experiment_id,
        mode="2d",
        source_desc=cfg.source.kind if cfg.source.kind != "file" else str(cfg.source.path),
        seed=cfg.source.seed,
        size_desc=f"{f.height}x{f.width}",
        degrade_desc=_degrade_desc(cfg.degrade),
        whiten_desc=whiten_desc,
        filter_desc=f"{cfg.adapt.rows}x{cfg.adapt.cols}",
        mu=cfg.adapt.mu,
        beta=cfg.adapt.beta,
        warmup=cfg.adapt.warmup,
        passes=cfg.adapt.passes,
        parameters=parameters,
        kurt_source=kurtosis_excess(f.pixels),
        kurt_degraded=kurtosis_excess(g.pixels),
        kurt_restored=kurtosis_excess(s_est.pixels),
        rho_sx=normalized_correlation(f, g),
        rho_restored=normalized_correlation(f, s_est),
        wall_time_s=time.perf_counter() - t0,
        estimate=result.kernel.weights,
    )


def _parameter_rows(spec: DegradeSpec | None, estimated) -> tuple[ParameterRow, ...]:
    if spec is None:
        return ()
    est = extract_parameters(spec, estimated)
    err = parameter_error(spec, estimated)
    true = true_parameters(spec)
    return tuple(ParameterRow(k, float(true[k]), float(est[k]), float(err[k])) for k in true)


def write_report_csv(path, reports) -> None:
    """Write reports as one fixed-header CSV (LF endings, atomic replace)."""
    lines = [ExperimentReport.CSV_HEADER] + [r.csv_row() for r in reports]
    body = "\n".join(lines) + "\n"
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="ascii", newline="") as fh:
        fh.write(body)
    os.replace(tmp, path)


# --- config file parsing ---------------------------------------------------

_INT_KEYS = {
    "source.seed", "source.length", "source.height", "source.width",
    "whiten.order", "adapt.taps", "adapt.rows", "adapt.cols",
    "adapt.warmup", "adapt.passes", "degrade.delay",
}
_FLOAT_KEYS = {"degrade.a1", "degrade.a2", "degrade.a3", "adapt.mu", "adapt.beta"}
_STR_KEYS = {"experiment.id", "source.kind", "source.path", "degrade.kind", "whiten.kind", "report.path"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse a line-oriented ``section.key = value`` experiment config.

    Blank lines and lines starting with '#' are ignored; later keys
    override earlier ones.
    """
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _INT_KEYS | _FLOAT_KEYS | _STR_KEYS:
            raise FormatError(f"config line {lineno}: unknown key {key!r}")
        kv[key] = value

    def pick(key, default=None):
        if key not in kv:
            return default
        value = kv[key]
        try:
            if key in _INT_KEYS:
                return int(value)
            if key in _FLOAT_KEYS:
                return float(value)
        except ValueError:
            raise FormatError(f"config key {key}: invalid number {value!r}") from None
        return value

    try:
        source = SourceSpec(
            kind=pick("source.kind", "laplace"),
            seed=pick("source.seed"),
            length=pick("source.length"),
            height=pick("source.height"),
            width=pick("source.width"),
            path=pick("source.path"),
        )
        degrade_kind = pick("degrade.kind", "none")
        degrade = None
        if degrade_kind != "none":
            degrade = DegradeSpec(
                kind=degrade_kind,
                a1=pick("degrade.a1", 0.0),
                a2=pick("degrade.a2", 0.0),
                a3=pick("degrade.a3", 0.0),
                delay=pick("degrade.delay", 1),
            )
        whiten = WhitenSpec(kind=pick("whiten.kind", "none"), order=pick("whiten.order", 5))
        common = dict(
            mu=pick("adapt.mu", 1e-3),
            beta=pick("adapt.beta", 0.99),
            warmup=pick("adapt.warmup", 256),
            passes=pick("adapt.passes", 1),
        )
        if source.is_image:
            adapt = Adapt2dConfig(rows=pick("adapt.rows", 3), cols=pick("adapt.cols", 3), **common)
        else:
            adapt = AdaptConfig(taps=pick("adapt.taps", 3), **common)
        return ExperimentConfig(
            experiment_id=pick("experiment.id", "experiment"),
            source=source,
            adapt=adapt,
            degrade=degrade,
            whiten=whiten,
            report_path=pick("report.path"),
        )
    except KurtdeconvError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid config: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
