"""Positive-weight quadrature on intervals, simplices and space-time prisms.

Simplex rules are conical-product Gauss-Jacobi rules: they work in any
dimension, all weights are positive, and a rule with ``n`` points per axis
integrates polynomials of total degree ``2n - 1`` exactly.  Space-time
prisms (simplex x interval) use a tensor product of a simplex rule with a
Gauss-Legendre rule in time.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

MAX_ORDER = 40


@dataclass
class QuadRule:
    """Points / weights, optionally tagged with a subdomain side per point.

    ``points`` has shape (n, m) where m is the embedding dimension (d for
    spatial rules, d+1 for space-time rules).  ``sides`` holds +1/-1 tags
    for rules assembled from a cut decomposition, else None.
    """

    points: np.ndarray
    weights: np.ndarray
    sides: np.ndarray | None = None

    def integrate(self, f):
        vals = np.asarray(f(self.points))
        return float(np.dot(self.weights, vals))


@dataclass
class SurfaceQuadRule:
    """Quadrature on interface facets of a cut space-time prism.

    Weights are surface-measure (d-sigma) weights on the space-time
    interface.  ``nu_x`` stores |nu_x|, the norm of the spatial part of the
    unit space-time normal, so that ds dt integrals are
    ``sum(w * nu_x * f)``.  ``normals`` holds the spatial unit normal
    n_Gamma (zero where the facet is purely temporal).
    """

    points: np.ndarray
    weights: np.ndarray
    nu_x: np.ndarray
    normals: np.ndarray
    spacetime_normals: np.ndarray

    def integrate_ds_dt(self, f):
        vals = np.asarray(f(self.points))
        return float(np.sum(self.weights * self.nu_x * vals))


def _check_order(order):
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"quadrature order {order} unsupported; supported range is 1..{MAX_ORDER}")


@lru_cache(maxsize=None)
def gauss_01(order):
    """Gauss-Legendre rule on [0, 1] exact for degree <= order."""
    _check_order(order)
    n = (order + 2) // 2
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def simplex_rule(dim, order):
    """Conical-product rule on the unit simplex in R^dim.

    Exact for polynomials of total degree <= order; weights sum to the
    simplex measure 1/dim!.
    """
    _check_order(order)
    if dim == 0:
        return np.zeros((1, 0)), np.ones(1)
    n = (order + 2) // 2
    pts_1d, wts_1d = [], []
    for axis in range(dim):
        alpha = dim - 1 - axis
        if alpha == 0:
            x, w = roots_legendre(n)
        else:
            x, w = roots_jacobi(n, alpha, 0.0)
        # map [-1,1] with weight (1-x)^alpha to [0,1]
        pts_1d.append((x + 1.0) / 2.0)
        wts_1d.append(w / 2.0 ** (alpha + 1))
    grids = np.meshgrid(*pts_1d, indexing="ij")
    wgrids = np.meshgrid(*wts_1d, indexing="ij")
    xi = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    # Duffy-type map: x_i = xi_i * (1 - x_1 - ... - x_{i-1})
    pts = np.empty_like(xi)
    remaining = np.ones(len(xi))
    for axis in range(dim):
        pts[:, axis] = xi[:, axis] * remaining
        remaining = remaining - pts[:, axis]
    return pts, w


def simplex_measure(verts):
    """Unsigned measure of simplices given as (..., k+1, m) vertex arrays.

    For simplices of dimension k embedded in R^m (k <= m) the Gram
    determinant is used.
    """
    verts = np.asarray(verts, dtype=float)
    edges = verts[..., 1:, :] - verts[..., :1, :]
    k = edges.shape[-2]
    if k == 0:
        return np.ones(verts.shape[:-2])
    if edges.shape[-1] == k:
        det = np.linalg.det(edges)
        return np.abs(det) / factorial(k)
    gram = edges @ np.swapaxes(edges, -1, -2)
    det = np.linalg.det(gram)
    return np.sqrt(np.maximum(det, 0.0)) / factorial(k)


def map_rule_to_simplices(verts, order):
    """Map a reference simplex rule onto simplices (B, k+1, m).

    Returns points (B, n, m) and weights (B, n); weights sum to each
    simplex measure.
    """
    verts = np.asarray(verts, dtype=float)
    k = verts.shape[-2] - 1
    ref_pts, ref_wts = simplex_rule(k, order)
    v0 = verts[..., :1, :]
    edges = verts[..., 1:, :] - v0
    pts = v0 + np.einsum("nk,bkm->bnm", ref_pts, edges)
    meas = simplex_measure(verts)
    wts = ref_wts[None, :] * (meas[:, None] * factorial(k))
    return pts, wts


def prism_rule(simplex_verts, t0, t1, space_order, time_order):
    """Tensor rule on the space-time prism simplex x (t0, t1).

    Exact for (space total degree <= space_order) x (time degree <=
    time_order).  Returns a QuadRule with space-time points (n, d+1),
    time as the last coordinate.
    """
    simplex_verts = np.asarray(simplex_verts, dtype=float)
    d = simplex_verts.shape[-1]
    sp, sw = simplex_rule(d, space_order)
    v0 = simplex_verts[0]
    edges = simplex_verts[1:] - v0
    xs = v0 + sp @ edges
    ws = sw * (simplex_measure(simplex_verts[None])[0] * factorial(d))
    tp, tw = gauss_01(time_order)
    ts = t0 + (t1 - t0) * tp
    wt = tw * (t1 - t0)
    pts = np.concatenate(
        [np.repeat(xs, len(ts), axis=0), np.tile(ts, len(xs))[:, None]], axis=1
    )
    wts = (ws[:, None] * wt[None, :]).ravel()
    return QuadRule(pts, wts)


def lagrange_time_basis(nodes):
    """Coefficient matrix of the Lagrange basis on given nodes.

    Returns C of shape (q+1, q+1) with L_m(tau) = sum_j C[j, m] tau^j.
    """
    nodes = np.asarray(nodes, dtype=float)
    v = np.vander(nodes, increasing=True)
    return np.linalg.inv(v)


@lru_cache(maxsize=None)
def radau_right_nodes(q):
    """Nodes of the right-endpoint Gauss-Radau rule on [0, 1], q+1 points."""
    if q < 0:
        raise ValueError("temporal degree must be >= 0")
    if q == 0:
        return (1.0,)
    x, _ = roots_jacobi(q, 1.0, 0.0)
    nodes = np.concatenate([(x + 1.0) / 2.0, [1.0]])
    return tuple(np.sort(nodes))


@dataclass
class TimeBasis:
    """Lagrange basis in time on [0, 1] with the right endpoint as a node."""

    q: int
    nodes: np.ndarray = field(init=False)
    coeffs: np.ndarray = field(init=False)

    def __post_init__(self):
        self.nodes = np.array(radau_right_nodes(self.q))
        self.coeffs = lagrange_time_basis(self.nodes)

    @property
    def n_modes(self):
        return self.q + 1

    def eval(self, tau):
        """Values L_m(tau), shape (..., q+1)."""
        tau = np.asarray(tau, dtype=float)
        powers = tau[..., None] ** np.arange(self.q + 1)
        return powers @ self.coeffs

    def eval_deriv(self, tau):
        """Derivatives L_m'(tau) with respect to tau, shape (..., q+1)."""
        tau = np.asarray(tau, dtype=float)
        j = np.arange(self.q + 1)
        dpow = np.zeros(tau.shape + (self.q + 1,))
        if self.q >= 1:
            dpow[..., 1:] = j[1:] * tau[..., None] ** (j[1:] - 1)
        return dpow @ self.coeffs
