"""Distance sets of countable universal and Urysohn metric spaces.

Exact rational machinery for deciding which subsets R of [0, inf) carry a
countable homogeneous universal R-metric space, and whether its completion is
the Urysohn space with distance set R.
"""
from .amalgamation import amalgamate, amalgamate_point
from .approximation import classify, completion_age_test, gamma, h_join, hat_map
from .distance_sets import FiniteSet, Interval, IntervalUnion, OmegaSegment, SumClosure
from .errors import InvalidInput, SearchFailure, UrysohnError
from .four_values import check_four_values
from .fraisse import audit_extension, build
from .metric_core import FiniteMetricSpace, PartialIsometry, TypeFunction, validate_space
from .setexpr import parse_setexpr

__version__ = "0.1.0"
