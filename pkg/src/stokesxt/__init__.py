"""Unfitted space-time finite elements for the two-phase Stokes interface problem."""

from .mesh import SpatialMesh, SpaceTimeSlab, TimePartition, build_structured_mesh, build_time_partition, slab
from .levelset import (
    CUT,
    NEG,
    POS,
    CutDecomposition,
    DiscreteLevelSet,
    LevelSetField,
    classify_prism,
    decompose_cut_prism,
    interpolate_levelset,
    quadrature_interface,
    quadrature_subdomain,
)
from .quadrature import QuadRule, SurfaceQuadRule, TimeBasis

__all__ = [
    "SpatialMesh", "SpaceTimeSlab", "TimePartition",
    "build_structured_mesh", "build_time_partition", "slab",
    "CUT", "NEG", "POS",
    "CutDecomposition", "DiscreteLevelSet", "LevelSetField",
    "classify_prism", "decompose_cut_prism", "interpolate_levelset",
    "quadrature_interface", "quadrature_subdomain",
    "QuadRule", "SurfaceQuadRule", "TimeBasis",
]

__version__ = "0.1.0"
