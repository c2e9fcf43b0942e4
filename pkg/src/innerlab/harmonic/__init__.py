"""Harmonic measure, Green's functions and the composition operator on measures."""

from .clark import ClarkResult, clark_pushforward
from .domains import (
    BoundaryPartition,
    PolylineJordanDomain,
    cusp_domain,
    disk_polygon,
    radial_graph_domain,
    right_half_disk,
    square,
    upper_half_disk,
)
from .green import green_disk, green_grid, green_quotient_profile
from .maps import diameter_harmonic_measure, half_disk_green, half_disk_oracle
from .wos import HarmonicMeasureEstimate, WalkResult, run_walks, wos_harmonic_measure

__all__ = [
    "BoundaryPartition",
    "ClarkResult",
    "HarmonicMeasureEstimate",
    "PolylineJordanDomain",
    "WalkResult",
    "clark_pushforward",
    "cusp_domain",
    "diameter_harmonic_measure",
    "disk_polygon",
    "green_disk",
    "green_grid",
    "green_quotient_profile",
    "half_disk_green",
    "half_disk_oracle",
    "radial_graph_domain",
    "right_half_disk",
    "run_walks",
    "square",
    "upper_half_disk",
    "wos_harmonic_measure",
]
