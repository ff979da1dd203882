"""Structured simplicial meshes, time partitions and space-time slabs.

Meshes are uniform subdivisions of an axis-aligned box into cubes of side
h = 1/N_S; each square is split into two triangles along the (+,+)
diagonal, each cube into six tetrahedra (Kuhn subdivision).  Objects are
immutable after construction.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .quadrature import simplex_measure

_AXIS_NAMES = ("x", "y", "z")


@dataclass
class SpatialMesh:
    dim: int
    box: np.ndarray          # (d, 2) lower/upper per axis
    n_axis: np.ndarray       # cells per axis
    h: float
    vertices: np.ndarray     # (nv, d)
    simplices: np.ndarray    # (ne, d+1) vertex indices, positively oriented

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_simplices(self):
        return len(self.simplices)

    @property
    def diameter(self):
        return float(np.linalg.norm(self.box[:, 1] - self.box[:, 0]))

    def simplex_coords(self, e=None):
        """Vertex coordinates, (ne, d+1, d) or (d+1, d) for one simplex."""
        if e is None:
            return self.vertices[self.simplices]
        return self.vertices[self.simplices[e]]

    def measures(self):
        return simplex_measure(self.simplex_coords())

    def boundary_vertex_mask(self):
        tol = 1e-12 * self.diameter
        on = np.zeros(self.n_vertices, dtype=bool)
        for ax in range(self.dim):
            on |= np.abs(self.vertices[:, ax] - self.box[ax, 0]) <= tol
            on |= np.abs(self.vertices[:, ax] - self.box[ax, 1]) <= tol
        return on

    def facets(self):
        """All facets as sorted vertex tuples with incidence counts."""
        counts = {}
        for simplex in self.simplices:
            for i in range(self.dim + 1):
                f = tuple(sorted(np.delete(simplex, i)))
                counts[f] = counts.get(f, 0) + 1
        return counts

    def summary(self):
        """JSON-serializable mesh summary for provenance logs."""
        return {
            "dim": self.dim,
            "box": self.box.tolist(),
            "cells_per_axis": self.n_axis.tolist(),
            "h": self.h,
            "n_vertices": int(self.n_vertices),
            "n_simplices": int(self.n_simplices),
            "total_measure": float(self.measures().sum()),
        }


@dataclass
class TimePartition:
    final_time: float
    n_slabs: int
    nodes: np.ndarray

    @property
    def k(self):
        return self.final_time / self.n_slabs


@dataclass
class SpaceTimeSlab:
    """Tensor-product slab: one prism (simplex x I_n) per spatial simplex."""

    mesh: SpatialMesh
    index: int               # 1-based slab index
    t0: float
    t1: float

    @property
    def k(self):
        return self.t1 - self.t0

    @property
    def n_prisms(self):
        return self.mesh.n_simplices

    def prism_measures(self):
        return self.mesh.measures() * self.k


def build_structured_mesh(dim, box, n_s):
    """Uniform simplicial mesh of an axis-aligned box with h = 1/n_s.

    Parameters
    ----------
    dim : 2 or 3
    box : sequence of (lo, hi) per axis
    n_s : cells per unit length; every box extent must be an integer
        multiple of h = 1/n_s.
    """
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if n_s < 1:
        raise ValueError("n_s must be >= 1")
    box = np.asarray(box, dtype=float).reshape(dim, 2)
    h = 1.0 / n_s
    n_axis = np.empty(dim, dtype=int)
    for ax in range(dim):
        extent = box[ax, 1] - box[ax, 0]
        if extent <= 0:
            raise ValueError(f"box extent along {_AXIS_NAMES[ax]} is not positive")
        cells = extent * n_s
        if abs(cells - round(cells)) > 1e-9:
            raise ValueError(
                f"box extent {extent} along axis {_AXIS_NAMES[ax]} is not an "
                f"integer multiple of h = 1/{n_s}"
            )
        n_axis[ax] = int(round(cells))

    axes = [box[ax, 0] + np.arange(n_axis[ax] + 1) / n_s for ax in range(dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    vertices = np.stack([g.ravel() for g in grids], axis=1)
    shape = n_axis + 1

    def vid(idx):
        return np.ravel_multi_index(idx, shape)

    cells = np.stack(
        np.meshgrid(*[np.arange(n) for n in n_axis], indexing="ij"), axis=-1
    ).reshape(-1, dim)

    if dim == 2:
        i, j = cells[:, 0], cells[:, 1]
        v00 = vid((i, j))
        v10 = vid((i + 1, j))
        v01 = vid((i, j + 1))
        v11 = vid((i + 1, j + 1))
        tri1 = np.stack([v00, v10, v11], axis=1)
        tri2 = np.stack([v00, v11, v01], axis=1)
        simplices = np.concatenate([tri1, tri2], axis=0)
    else:
        # Kuhn subdivision: one tet per axis permutation, walking from the
        # low corner to the high corner.
        parts = []
        for perm in permutations(range(3)):
            offs = np.zeros((4, 3), dtype=int)
            for step, ax in enumerate(perm):
                offs[step + 1] = offs[step]
                offs[step + 1, ax] += 1
            idx = [tuple(cells[:, a] + offs[kv, a] for a in range(3)) for kv in range(4)]
            tets = np.stack([vid(ix) for ix in idx], axis=1)
            parts.append(tets)
        simplices = np.concatenate(parts, axis=0)
        # enforce positive orientation
        coords = vertices[simplices]
        det = np.linalg.det(coords[:, 1:] - coords[:, :1])
        flip = det < 0
        simplices[flip, 2], simplices[flip, 3] = (
            simplices[flip, 3].copy(),
            simplices[flip, 2].copy(),
        )

    mesh = SpatialMesh(dim, box, n_axis, h, vertices, simplices)
    return mesh


def build_time_partition(final_time, n):
    """Uniform partition of (0, T) into n slabs."""
    if n < 1:
        raise ValueError("slab count must be >= 1")
    if final_time <= 0:
        raise ValueError("final time must be positive")
    nodes = np.arange(n + 1) * (final_time / n)
    nodes[-1] = final_time
    return TimePartition(final_time, n, nodes)


def slab(mesh, tpart, n):
    """Slab n (1-based) of the tensor-product space-time mesh."""
    if not 1 <= n <= tpart.n_slabs:
        raise ValueError(f"slab index {n} out of range 1..{tpart.n_slabs}")
    return SpaceTimeSlab(mesh, n, float(tpart.nodes[n - 1]), float(tpart.nodes[n]))
