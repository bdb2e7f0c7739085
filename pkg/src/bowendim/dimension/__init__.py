"""Dimension estimates: ball masses, box counting, typical-block families."""

from .balls import (ball_mass, pointwise_dimension_bracket, radius_grid, slice_slopes,
                    stable_ball_mass, unstable_ball_mass)
from .boxcount import BoxCountResult, box_counting
from .experiments import (BracketEntry, DimensionReport, mass_distribution_check,
                          mcm_roots_check, moran_root, product_bracket, measure_dimension_experiment,
                          measure_dimension_target, young_formula_check)
from .katok import EmptyFamilyError, KatokFamily, katok_family

__all__ = [
    "BoxCountResult", "BracketEntry", "DimensionReport", "EmptyFamilyError", "KatokFamily",
    "ball_mass", "box_counting", "katok_family", "mass_distribution_check", "mcm_roots_check",
    "moran_root", "pointwise_dimension_bracket", "product_bracket", "radius_grid",
    "slice_slopes", "stable_ball_mass", "measure_dimension_experiment", "measure_dimension_target",
    "unstable_ball_mass", "young_formula_check",
]
