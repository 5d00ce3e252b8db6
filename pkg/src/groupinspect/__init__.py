"""Group-sparse high-dimensional mean change-point detection."""

__version__ = "0.1.0"

from .baselines import BaselineResult, inspect_single, l2_aggregate, linf_aggregate
from .cusum import cusum_transform
from .fw_solver import FwConfig, solve_penalized_fw
from .groupnorm import (PenalizedSolution, dual_witness, group_dual_norm, group_norm,
                        group_soft_threshold, penalized_objective)
from .locate import SingleCpResult, estimate_direction, single_changepoint, split_changepoint
from .metrics import EvaluationReport, adjusted_rand_index, location_error, sin_angle_loss
from .model import (ChangeScenario, Grouping, GroupingError, ScenarioError, generate_data,
                    make_theta)
from .preprocess import ConstantRowError, estimate_row_sd, standardize
from .projection import ProjectionEstimate, leading_left_singular_vector
from .segment import (Segmentation, WbsConfig, calibrate_threshold, draw_intervals,
                      wbs_detect)
from .tuning import inspect_lambda, practical_lambda, resolve_lambda, theoretical_lambda

__all__ = [
    "BaselineResult", "ChangeScenario", "ConstantRowError", "EvaluationReport", "FwConfig",
    "Grouping", "GroupingError", "PenalizedSolution", "ProjectionEstimate", "ScenarioError",
    "Segmentation", "SingleCpResult", "WbsConfig", "adjusted_rand_index",
    "calibrate_threshold", "cusum_transform", "draw_intervals", "dual_witness",
    "estimate_direction", "estimate_row_sd", "generate_data", "group_dual_norm",
    "group_norm", "group_soft_threshold", "inspect_lambda", "inspect_single",
    "l2_aggregate", "leading_left_singular_vector", "linf_aggregate", "location_error",
    "make_theta", "penalized_objective", "practical_lambda", "resolve_lambda",
    "sin_angle_loss", "single_changepoint", "solve_penalized_fw", "split_changepoint",
    "standardize", "theoretical_lambda", "wbs_detect",
]
