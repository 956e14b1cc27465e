"""Nonlocal double integrals on grids: envelopes, Cartesian pieces and relaxation experiments."""
from .conditions import check_minhat_condition, check_ness_condition
from .envelopes import (convex_envelope, diagonalize_function, distance_integrand, grid_min,
                        is_separately_convex, separately_convex_envelope,
                        separately_level_convex_envelope)
from .experiments import (VERIFIERS, gap_experiment_diamond_boundary, gap_scan, verify_cartesian,
                          verify_diamond_boundary, verify_five_point, verify_four_well, verify_indicator)
from .functionals import (check_exact_inclusion, check_relaxed_inclusion, eval_double_integral,
                          eval_indicator, eval_relaxed_indicator)
from .grid import (CartesianPiece, GridFunction, GridSet, PiecewiseConstantField, ScalarGrid,
                   boundary_tainted, default_grid, interpolate, level_set, sample_function)
from .kernels import BACKEND
from .minimize import MinimizationReport, min_bounds, minimize_discrete, minimize_scan
from .rules import (CartesianScRule, ConvexRegion, DistanceRule, PlanarSet, cartesian_square,
                    l1_sphere, well_set)
from .scenario import ConfigError, Scenario, load_scenario, preset, scenario_from_dict
from .sequences import recovery_sequence_cartesian, zigzag_sequence
from .sets import (convex_hull_set, diagonalize_set, maximal_cartesian_subsets,
                   relaxed_cartesian_union, separately_convex_hull_set)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CartesianPiece", "CartesianScRule", "ConfigError", "ConvexRegion", "DistanceRule",
    "GridFunction", "GridSet", "MinimizationReport", "PiecewiseConstantField", "PlanarSet",
    "ScalarGrid", "Scenario", "VERIFIERS", "boundary_tainted", "cartesian_square",
    "check_exact_inclusion", "check_minhat_condition", "check_ness_condition",
    "check_relaxed_inclusion", "convex_envelope", "convex_hull_set", "default_grid",
    "diagonalize_function", "diagonalize_set", "distance_integrand", "eval_double_integral",
    "eval_indicator", "eval_relaxed_indicator", "gap_experiment_diamond_boundary", "gap_scan",
    "grid_min", "interpolate", "is_separately_convex", "l1_sphere", "level_set", "load_scenario",
    "maximal_cartesian_subsets", "min_bounds", "minimize_discrete", "minimize_scan", "preset",
    "recovery_sequence_cartesian", "relaxed_cartesian_union", "sample_function",
    "scenario_from_dict", "separately_convex_envelope", "separately_convex_hull_set",
    "separately_level_convex_envelope", "verify_cartesian", "verify_diamond_boundary",
    "verify_five_point", "verify_four_well", "verify_indicator", "well_set", "zigzag_sequence",
]
