"""Parametric balanced truncation through truncated power series.

The pipeline expands every quantity of classical balanced truncation
(Gramians, their factors, the SVD of the factor product, the balancing
transformation and the balanced system) in powers of a scalar parameter
``m`` and truncates at order 2.
"""

from .analysis import FrequencyGrid, compare_responses, error_report, frequency_response
from .balancing import BalancedSeries, ReducedModel, truncate
from .errors import ConfigError, NumericalError, ParamBTError
from .ltimodel import (
    MassSpringConfig,
    NumericLTI,
    ParametricLTI,
    build_mass_spring,
    mass_spring_numeric,
    validate_stability,
)
from .oracle import balance_exact, hankel_singular_values, reduce_exact, sign_alignment
from .pipeline import PipelineResult, run_pipeline
from .series import MatrixSeries, series_eval, series_inverse, series_product
from .tolerances import DEFAULT, Tolerances
from .validate import inject_fault, validate_pipeline

__version__ = "0.1.0"

__all__ = [
    "FrequencyGrid", "compare_responses", "error_report", "frequency_response",
    "BalancedSeries", "ReducedModel", "truncate",
    "ConfigError", "NumericalError", "ParamBTError",
    "MassSpringConfig", "NumericLTI", "ParametricLTI", "build_mass_spring",
    "mass_spring_numeric", "validate_stability",
    "balance_exact", "hankel_singular_values", "reduce_exact", "sign_alignment",
    "PipelineResult", "run_pipeline",
    "MatrixSeries", "series_eval", "series_inverse", "series_product",
    "DEFAULT", "Tolerances",
    "inject_fault", "validate_pipeline",
]
