"""Tensor-product space-time finite element spaces on structured meshes.

Spatial spaces are total-degree Lagrange elements on simplices; their
nodes live on the global lattice of spacing h/r, which makes global dof
identification on structured meshes exact integer arithmetic.  Temporal
bases are Lagrange on right-endpoint Radau nodes, so the trace at the
slab end is a coefficient slice.  Pressure spaces can be XFEM-enriched:
on cut elements every base dof whose space-time support meets both
discrete subdomains is duplicated, one copy per side, each multiplied by
the side indicator of the discrete level set.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from .levelset import CUT, NEG, POS, locate_simplices
from .quadrature import TimeBasis, simplex_measure


def _multi_indices(dim, degree):
    out = [alpha for alpha in product(range(degree + 1), repeat=dim)
           if sum(alpha) <= degree]
    out.sort()
    return np.array(out, dtype=int)


@lru_cache(maxsize=None)
def simplex_element(dim, degree):
    return SimplexElement(dim, degree)


class SimplexElement:
    """Lagrange basis of total degree r on the unit d-simplex."""

    def __init__(self, dim, degree):
        self.dim = dim
        self.degree = degree
        self.exponents = _multi_indices(dim, degree)
        self.ref_nodes = self.exponents / degree if degree > 0 else \
            np.zeros((1, dim))
        vander = self._monomials(self.ref_nodes)
        self.coeffs = np.linalg.inv(vander)

    @property
    def n_nodes(self):
        return len(self.ref_nodes)

    def _monomials(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.prod(pts[..., None, :] ** self.exponents[None, :, :], axis=-1)

    def eval(self, pts):
        """Basis values at reference points, shape (..., n_nodes)."""
        return self._monomials(pts) @ self.coeffs

    def eval_grad(self, pts):
        """Reference gradients, shape (..., n_nodes, dim)."""
        pts = np.asarray(pts, dtype=float)
        grads = np.empty(pts.shape[:-1] + (self.n_nodes, self.dim))
        for ax in range(self.dim):
            expo = self.exponents.copy()
            coef = expo[:, ax].astype(float)
            expo[:, ax] = np.maximum(expo[:, ax] - 1, 0)
            mono = np.prod(pts[..., None, :] ** expo[None, :, :], axis=-1) * coef
            grads[..., ax] = mono @ self.coeffs
        return grads


@dataclass
class DofMap:
    """Scalar or vector space-time dof layout on one slab.

    Dof index layout: ((node * ncomp + comp) * n_modes + mode).  Spatial
    continuity is encoded by shared lattice nodes; temporal modes couple
    nothing across slabs (broken in time).
    """

    slab: object
    ncomp: int
    degree: int
    q: int
    element: SimplexElement
    time_basis: TimeBasis
    node_coords: np.ndarray          # (n_nodes, d)
    conn: np.ndarray                 # (n_el, n_loc) global node ids
    boundary_nodes: np.ndarray       # bool mask over nodes
    lattice_shape: tuple

    @property
    def n_nodes(self):
        return len(self.node_coords)

    @property
    def n_modes(self):
        return self.q + 1

    @property
    def n_dofs(self):
        return self.n_nodes * self.ncomp * self.n_modes

    def dof_index(self, node, comp=0, mode=0):
        return (np.asarray(node) * self.ncomp + comp) * self.n_modes + mode

    def element_dofs(self, e):
        """Global dof indices of element e, shape (n_loc*ncomp*n_modes,)."""
        nodes = self.conn[e]
        idx = (nodes[:, None, None] * self.ncomp
               + np.arange(self.ncomp)[None, :, None]) * self.n_modes \
            + np.arange(self.n_modes)[None, None, :]
        return idx.reshape(-1)

    def dirichlet_mask(self):
        """Mask over all dofs flagging boundary nodes (all comps, modes)."""
        mask = np.zeros(self.n_dofs, dtype=bool)
        nodes = np.where(self.boundary_nodes)[0]
        for c in range(self.ncomp):
            for m in range(self.n_modes):
                mask[self.dof_index(nodes, c, m)] = True
        return mask

    def mode_times(self):
        """Physical times of the temporal Lagrange nodes."""
        return self.slab.t0 + self.time_basis.nodes * self.slab.k

    def interpolate(self, func):
        """Nodal interpolation of func(x, t) -> (..., ncomp) onto dofs."""
        vals = np.zeros(self.n_dofs)
        for m, t in enumerate(self.mode_times()):
            f = np.asarray(func(self.node_coords, t), dtype=float)
            f = f.reshape(self.n_nodes, self.ncomp)
            for c in range(self.ncomp):
                vals[self.dof_index(np.arange(self.n_nodes), c, m)] = f[:, c]
        return vals


def _build_dofmap(slab_, ncomp, degree, q):
    mesh = slab_.mesh
    d = mesh.dim
    r = degree
    elem = simplex_element(d, r)
    tb = TimeBasis(q)
    shape = tuple(mesh.n_axis * r + 1)
    # lattice coordinates of element vertices (integer, scaled by r)
    verts_lat = np.rint((mesh.vertices - mesh.box[:, 0]) / (mesh.h / r)).astype(int)
    simplex_lat = verts_lat[mesh.simplices]           # (ne, d+1, d)
    v0 = simplex_lat[:, :1, :]
    edges = (simplex_lat[:, 1:, :] - v0) // r          # unit integer edge vectors
    beta = _multi_indices(d, r)                         # matches element node order
    node_lat = v0 + np.einsum("nk,ekm->enm", beta, edges)
    conn = np.ravel_multi_index(tuple(node_lat.reshape(-1, d).T), shape)
    conn = conn.reshape(mesh.n_simplices, elem.n_nodes)

    axes = [mesh.box[ax, 0] + np.arange(shape[ax]) * (mesh.h / r)
            for ax in range(d)]
    grids = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)

    bmask = np.zeros(shape, dtype=bool)
    for ax in range(d):
        sl = [slice(None)] * d
        sl[ax] = 0
        bmask[tuple(sl)] = True
        sl[ax] = shape[ax] - 1
        bmask[tuple(sl)] = True

    return DofMap(slab_, ncomp, r, q, elem, tb, coords, conn,
                  bmask.ravel(), shape)


def build_velocity_space(slab_, r=2, q=1):
    """Continuous P_r^d x P_q(time) space with Dirichlet flags on the box."""
    if r < 2:
        raise ValueError("velocity degree must be >= 2 (Hood-Taylor pair)")
    if q < 0:
        raise ValueError("temporal degree must be >= 0")
    return _build_dofmap(slab_, slab_.mesh.dim, r, q)


def build_pressure_space(slab_, r_p=1, q=1):
    """Continuous scalar P_{r-1} x P_q(time) space, no Dirichlet flags."""
    if r_p < 1:
        raise ValueError("pressure degree must be >= 1")
    dm = _build_dofmap(slab_, 1, r_p, q)
    dm.boundary_nodes = np.zeros(dm.n_nodes, dtype=bool)
    return dm


@dataclass
class XfemDofMap:
    """Pressure dof layout with per-side duplication on cut supports.

    Base slots act on the POS side for duplicated nodes; appended extra
    slots act on the NEG side.  ``node_sides`` marks which discrete
    subdomains intersect each node's space-time support,
    ``side_measures`` their measures and ``side_grams`` the temporal
    Gram matrices int_{side cap supp} L_m L_n of the side regions (both
    feed the small-cut filter).
    """

    base: DofMap
    dls: object
    node_sides: np.ndarray           # (n_nodes, 2) bool: [NEG, POS]
    side_measures: np.ndarray        # (n_nodes, 2) float
    duplicated: np.ndarray           # bool mask over nodes
    extra_slot: np.ndarray           # node -> extra dof block start or -1
    n_dofs: int
    side_grams: np.ndarray = field(default=None)    # (n_nodes, 2, nm, nm)
    theta: float = 0.0
    deactivated: np.ndarray = field(default=None)   # (n_deact,) node ids

    @property
    def n_modes(self):
        return self.base.n_modes

    @property
    def n_extra(self):
        return self.n_dofs - self.base.n_dofs

    def dof_for(self, node, side, mode=0):
        """Dof index of (node, mode) acting on the given side."""
        node = int(node)
        if self.duplicated[node] and side == NEG:
            return self.extra_slot[node] + mode
        return self.base.dof_index(node, 0, mode)

    def dofs_for_nodes(self, nodes, side, mode):
        nodes = np.asarray(nodes)
        base_idx = self.base.dof_index(nodes, 0, mode)
        if side == NEG:
            dup = self.duplicated[nodes]
            out = np.where(dup, self.extra_slot[nodes] + mode, base_idx)
            return out
        return base_idx

    def element_dofs(self, e, side):
        nodes = self.base.conn[e]
        idx = np.stack([self.dofs_for_nodes(nodes, side, m)
                        for m in range(self.n_modes)], axis=1)
        return idx.reshape(-1)


def enrich_pressure_xfem(pmap, dls, decomps=None):
    """Duplicate pressure dofs whose support meets both discrete subdomains.

    ``decomps`` maps cut prism ids to decompositions (used for side
    measures and temporal Grams); it is computed on demand when omitted.
    """
    from math import factorial as _factorial

    from .levelset import decompositions_for_slab
    from .quadrature import gauss_01, map_rule_to_simplices, simplex_rule

    mesh = pmap.slab.mesh
    slab_ = pmap.slab
    tb = pmap.time_basis
    nm = pmap.n_modes
    cls = dls.classify()
    if decomps is None and np.any(cls == CUT):
        decomps = decompositions_for_slab(dls)
    decomps = decomps or {}

    n_nodes = pmap.n_nodes
    sides = np.zeros((n_nodes, 2), dtype=bool)       # columns: [NEG, POS]
    meas = np.zeros((n_nodes, 2))
    grams = np.zeros((n_nodes, 2, nm, nm))
    prism_meas = mesh.measures() * slab_.k
    d = mesh.dim
    elem = pmap.element

    # N_b^2-weighted temporal Grams: int_{side cap supp} N_b^2 L_m L_n,
    # the mass of the side copy resolved per temporal mode pair
    order = 2 * pmap.degree + max(1, 2 * pmap.q)
    tq, tw = gauss_01(max(1, 2 * pmap.q))
    lt = tb.eval(tq)
    sp_pts, sp_w = simplex_rule(d, 2 * pmap.degree)
    n_ref = elem.eval(sp_pts)
    g_time = np.einsum("t,tm,tn->mn", tw * slab_.k, lt, lt)
    mass_ref = np.einsum("q,qa,qa->a", sp_w, n_ref, n_ref)   # reference N^2
    ref_meas = 1.0 / _factorial(d)

    # uncut elements in bulk
    all_meas = mesh.measures()
    for c_val, idx in ((NEG, 0), (POS, 1)):
        els = np.where(cls == c_val)[0]
        if len(els) == 0:
            continue
        conn = pmap.conn[els]
        np.add.at(sides[:, idx], conn.ravel(), True)
        np.add.at(meas[:, idx], conn.ravel(),
                  np.repeat(prism_meas[els], conn.shape[1]))
        contrib = (mass_ref[None, :, None, None]
                   * (all_meas[els] / ref_meas)[:, None, None, None]
                   * g_time[None, None])
        np.add.at(grams[:, idx], conn.ravel(),
                  contrib.reshape(-1, nm, nm))

    for e, dec in decomps.items():
        nodes = pmap.conn[e]
        verts = mesh.simplex_coords(e)
        inv_jac = np.linalg.inv((verts[1:] - verts[:1]).T)
        for sign, idx in ((NEG, 0), (POS, 1)):
            sel = dec.sub_simplices[dec.sub_signs == sign]
            if len(sel) == 0:
                continue
            pts, wts = map_rule_to_simplices(sel, order)
            w_flat = wts.ravel()
            flat = pts.reshape(-1, d + 1)
            sides[nodes, idx] = True
            meas[nodes, idx] += float(w_flat.sum())
            ref = (flat[:, :d] - verts[0]) @ inv_jac.T
            n_c = elem.eval(ref)
            lt_c = tb.eval((flat[:, d] - slab_.t0) / slab_.k)
            grams[nodes, idx] += np.einsum("q,qa,qm,qn->amn", w_flat,
                                           n_c ** 2, lt_c, lt_c)

    duplicated = sides.all(axis=1)
    extra_slot = np.full(n_nodes, -1, dtype=int)
    dup_nodes = np.where(duplicated)[0]
    extra_slot[dup_nodes] = pmap.n_dofs + np.arange(len(dup_nodes)) * nm
    n_dofs = pmap.n_dofs + len(dup_nodes) * nm
    return XfemDofMap(pmap, dls, sides, meas, duplicated, extra_slot, n_dofs,
                      side_grams=grams)


def small_cut_filter(xmap, theta):
    """Deactivate duplicated dofs whose side support is too small.

    A copy is removed when the space-time measure of (its side cap its
    support) is below theta x measure(support), or when the smallest
    eigenvalue of the side's temporal Gram falls below theta x that of
    the full support (a side that is thin in time leaves one temporal
    mode uncontrolled even when its measure is moderate).  A deactivated
    copy is merged into the surviving side's dof, restoring the
    unenriched basis function there; the larger side always survives.
    """
    if not 0.0 <= theta < 1.0:
        raise ValueError("theta must be in [0, 1)")
    if theta == 0.0 or not xmap.duplicated.any():
        return xmap
    total = xmap.side_measures.sum(axis=1)
    frac = xmap.side_measures / np.where(total == 0, 1.0, total)[:, None]
    ok = frac >= theta
    if xmap.side_grams is not None:
        g_tot = xmap.side_grams.sum(axis=1)
        lam_tot = np.linalg.eigvalsh(g_tot)[:, 0]
        lam_side = np.linalg.eigvalsh(xmap.side_grams)[..., 0]
        ok &= lam_side >= theta * np.maximum(lam_tot, 0.0)[:, None]
    keep_dup = xmap.duplicated & np.all(ok, axis=1)
    new = enrich_like(xmap, keep_dup)
    new.theta = theta
    new.deactivated = np.where(xmap.duplicated & ~keep_dup)[0]
    return new


def enrich_like(xmap, duplicated):
    n_nodes = xmap.base.n_nodes
    extra_slot = np.full(n_nodes, -1, dtype=int)
    dup_nodes = np.where(duplicated)[0]
    extra_slot[dup_nodes] = xmap.base.n_dofs + np.arange(len(dup_nodes)) * xmap.n_modes
    n_dofs = xmap.base.n_dofs + len(dup_nodes) * xmap.n_modes
    return XfemDofMap(xmap.base, xmap.dls, xmap.node_sides, xmap.side_measures,
                      duplicated, extra_slot, n_dofs, side_grams=xmap.side_grams)


def evaluate_basis(dofmap, e, x, t, dls=None):
    """Per-dof (value, spatial gradient, time derivative) at one point.

    For an XfemDofMap the values of side copies are multiplied by the
    side indicator of the discrete level set at the point.  Points must
    lie in the closure of prism e.
    """
    xmap = None
    if isinstance(dofmap, XfemDofMap):
        xmap = dofmap
        dofmap = dofmap.base
        dls = dls if dls is not None else xmap.dls
    mesh = dofmap.slab.mesh
    verts = mesh.vertices[mesh.simplices[e]]
    v0 = verts[0]
    jac = (verts[1:] - v0).T
    ref = np.linalg.solve(jac, np.asarray(x, dtype=float) - v0)
    tol = 1e-10
    if np.any(ref < -tol) or ref.sum() > 1 + tol:
        raise ValueError("point outside prism (spatial part)")
    tau = (t - dofmap.slab.t0) / dofmap.slab.k
    if not -tol <= tau <= 1 + tol:
        raise ValueError("point outside prism (temporal part)")

    n = dofmap.element.eval(ref[None])[0]
    dn_ref = dofmap.element.eval_grad(ref[None])[0]
    dn = dn_ref @ np.linalg.inv(jac)
    lt = dofmap.time_basis.eval(tau)
    dlt = dofmap.time_basis.eval_deriv(tau) / dofmap.slab.k

    if xmap is None:
        ncomp, nm = dofmap.ncomp, dofmap.n_modes
        nloc = dofmap.element.n_nodes
        dofs = dofmap.element_dofs(e)
        values = np.zeros((nloc * ncomp * nm, ncomp))
        grads = np.zeros((nloc * ncomp * nm, ncomp, mesh.dim))
        dts = np.zeros((nloc * ncomp * nm, ncomp))
        i = 0
        for a in range(nloc):
            for c in range(ncomp):
                for m in range(nm):
                    values[i, c] = n[a] * lt[m]
                    grads[i, c] = dn[a] * lt[m]
                    dts[i, c] = n[a] * dlt[m]
                    i += 1
        return dofs, values, grads, dts

    # XFEM scalar basis with side indicator
    side_here = POS if dls.evaluate_in_prism(np.array([e]), np.asarray(x)[None],
                                             np.array([tau]))[0] >= 0 else NEG
    nodes = dofmap.conn[e]
    dofs, values, grads, dts = [], [], [], []
    for a, node in enumerate(nodes):
        copies = ((POS, 1.0 if side_here == POS else 0.0),
                  (NEG, 1.0 if side_here == NEG else 0.0)) \
            if xmap.duplicated[node] else ((POS, 1.0),)
        for side, indicator in copies:
            for m in range(dofmap.n_modes):
                dofs.append(xmap.dof_for(node, side, m))
                values.append(n[a] * lt[m] * indicator)
                grads.append(dn[a] * lt[m] * indicator)
                dts.append(n[a] * dlt[m] * indicator)
    return (np.array(dofs), np.array(values), np.array(grads), np.array(dts))


def element_dof_matrix(dofmap):
    """Global dof indices of every element, shape (ne, nloc*ncomp*n_modes)."""
    conn = dofmap.conn
    idx = (conn[:, :, None, None] * dofmap.ncomp
           + np.arange(dofmap.ncomp)[None, None, :, None]) * dofmap.n_modes \
        + np.arange(dofmap.n_modes)[None, None, None, :]
    return idx.reshape(conn.shape[0], -1)


def xfem_side_dof_matrix(xmap, side):
    """Per-element pressure dof indices acting on one side, (ne, nloc*nm)."""
    conn = xmap.base.conn
    nm = xmap.n_modes
    base_idx = conn[:, :, None] * nm + np.arange(nm)[None, None, :]
    if side == NEG:
        dup = xmap.duplicated[conn]
        extra = xmap.extra_slot[conn][:, :, None] + np.arange(nm)[None, None, :]
        base_idx = np.where(dup[:, :, None], extra, base_idx)
    return base_idx.reshape(conn.shape[0], -1)


def affine_inverse_maps(mesh):
    """Per-simplex affine maps x -> ref coordinates, vectorized.

    Returns (inv_jac (ne, d, d), v0 (ne, d)); ref = (x - v0) @ inv_jac^T.
    """
    coords = mesh.simplex_coords()
    v0 = coords[:, 0, :]
    jac = np.swapaxes(coords[:, 1:, :] - coords[:, :1, :], 1, 2)
    inv = np.linalg.inv(jac)
    return inv, v0
