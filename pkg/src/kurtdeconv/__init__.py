"""Blind deconvolution by maximum-kurtosis adaptive filtering.

Identifies an unknown LTI degrading system by driving an adaptive inverse
filter to maximize the magnitude of the excess kurtosis of the whitened
observation, for 1-D signals and grayscale images, and ships synthetic
degradation engines plus an experiment harness for parameter-recovery
studies.
"""

from .adapt1d import (
    AdaptConfig,
    AdaptResult,
    SourceClass,
    SurfaceResult,
    adapt_step,
    choose_mu_sign,
    init_filter,
    kurtosis_surface,
    run_adapt,
)
from .adapt2d import Adapt2dConfig, Adapt2dResult, adapt2d_step, identity_kernel, row_chain, run_adapt2d
from .degrade import (
    DegradeSpec,
    apply_degradation,
    ar2_iir,
    echo_iir,
    fir_degrade,
    image_iir,
    inverse_fir_taps,
    inverse_kernel_2d,
    stability_check,
    true_inverse_kernel,
    true_inverse_taps,
)
from .errors import (
    ContractViolationError,
    DegenerateInputError,
    DivergenceError,
    FormatError,
    KurtdeconvError,
    NearSingularMomentError,
)
from .experiment import (
    ExperimentConfig,
    ExperimentReport,
    SourceSpec,
    WhitenSpec,
    load_config,
    make_source,
    parse_config,
    run_experiment,
    write_report_csv,
)
from .fileio import read_image, read_wav, rescale_unit, write_image, write_wav
from .metrics import (
    AlignedCorrelation,
    aligned_correlation,
    extract_parameters,
    normalize_kernel,
    normalize_taps,
    normalized_correlation,
    parameter_error,
    true_parameters,
)
from .signals import (
    FilterTaps1D,
    Image2D,
    Kernel2D,
    Signal1D,
    apply_kernel,
    apply_taps,
    patch_at,
    window_at,
)
from .stats import (
    M2_GUARD,
    MomentState,
    batch_gradient,
    batch_kurtosis,
    feedback,
    init_moments,
    kurtosis_excess,
    update_moments,
)
from .whitening import LpcModel, fit_lpc, highpass_whiten, highpass_whiten_2d, lpc_whiten

__version__ = "0.1.0"
