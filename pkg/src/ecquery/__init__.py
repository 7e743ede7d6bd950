"""Exact workbench for query-complexity measures of small Boolean functions."""

from .boolfn import BooleanFunction, Subcube, family, from_truth_table
from .distmeasures import ProductDistribution, GeneralDistribution, partition_bound
from .ec import WeightScheme, ec_bounds
from .exactlp import LinearProgram, solve_lp
from .measures import measure_report

__all__ = [
    "BooleanFunction",
    "Subcube",
    "family",
    "from_truth_table",
    "ProductDistribution",
    "GeneralDistribution",
    "partition_bound",
    "WeightScheme",
    "ec_bounds",
    "LinearProgram",
    "solve_lp",
    "measure_report",
]
