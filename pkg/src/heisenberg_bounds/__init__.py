"""Heisenberg-group integral operators, mixed radial-angular norms and their sharp constants."""

from .errors import (
    AccuracyError, DivergenceError, DomainError, HeisenbergError, InvalidArgumentError,
)
from .group import (
    BallVolume, GroupPoint, HeisenbergSpace, PolarPoint, distance, dilate, group_mul, inverse,
    koranyi_norm, polar_compose, polar_decompose, rotate_horizontal, sample_ball,
    unit_ball_volume,
)
from .mixed_norm import (
    MixedNormParams, TestFunction, extremizer_family, general_function, indicator_ball,
    mixed_norm, product_function, radial_function, radialize,
)
from .operators import (
    KernelSpec, apply_general, apply_mlinear, apply_radial, custom_kernel, hilbert_kernel,
    hlp_kernel, mlinear_kernel, operator_ratio,
)
from .constants import (
    ConstantRequest, I_m, SharpConstantReport, constant_Dm, constant_E, constant_G,
    sharp_constant,
)
from .experiments import (
    ExperimentConfig, RatioSweep, emit_report, run_property_suite, run_ratio_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "BallVolume", "ConstantRequest", "DivergenceError", "DomainError",
    "ExperimentConfig", "GroupPoint", "HeisenbergError", "HeisenbergSpace", "I_m",
    "InvalidArgumentError", "KernelSpec", "MixedNormParams", "PolarPoint", "RatioSweep",
    "SharpConstantReport", "TestFunction", "apply_general", "apply_mlinear",
    "apply_radial", "constant_Dm", "constant_E", "constant_G", "custom_kernel", "dilate",
    "distance", "emit_report", "extremizer_family", "general_function", "group_mul",
    "hilbert_kernel", "hlp_kernel", "indicator_ball", "inverse", "koranyi_norm",
    "mixed_norm", "mlinear_kernel", "operator_ratio", "polar_compose", "polar_decompose",
    "product_function", "radial_function", "radialize", "rotate_horizontal",
    "run_property_suite", "run_ratio_sweep", "sample_ball", "sharp_constant",
    "unit_ball_volume",
]
