"""Finite metric graph approximations of graph-like spaces.

A space is given as a :class:`RefinementSequence` G_0 ⊆ G_1 ⊆ ... of metric
multigraphs. The package computes effective resistance with certified
limits, brackets for the length measure, intrinsic distances and
pseudo-edge decompositions along such sequences.
"""

from .converge import InvarianceReport, certified_resistance, invariance_suite, resistance_sequence
from .core import (
    Edge,
    EdgePoint,
    HostMetric,
    MetricGraph,
    Vertex,
    build,
    components,
    contract,
    diameter,
    distance,
    shortest_path,
    subdivide,
    with_points,
)
from .decomp import Decomposition, Leftover, PseudoEdge, decompose, exclude_points
from .electrical import (
    Flow,
    contraction_bounds,
    effective_resistance,
    energy,
    path_contraction_transform,
    pseudo_edge_resistance_bounds,
    replace_subnetwork,
    resistance_oracle,
    series_parallel_reduce,
    unit_current,
)
from .errors import *  # noqa: F401,F403
from .measure import (
    CertifiedValue,
    EdgeCut,
    MeasureEstimate,
    MetricSeries,
    d_ell,
    d_f,
    edge_cut_for_delta,
    h_g_delta,
    hausdorff_estimate,
    intrinsic_distance,
)
from .sequence import RefinementSequence, RefinementStep, Tracked, point_at
from .spaces import SpaceSpec, by_name, dumbbell, fat_cantor, gasket_edges, hawaiian

__version__ = "0.1.0"
