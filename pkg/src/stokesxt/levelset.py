"""Level-set interpolation, cut classification and space-time cut geometry.

A slab-local discrete level set is the nodal interpolant of an analytic
level-set field: linear in space on each simplex, linear in time on each
prism.  Cut prisms are first split into (d+1)-simplices (the level set is
re-interpolated linearly on each), then every cut simplex is decomposed
into signed sub-simplices plus interface facets by a dimension-generic
recursive clipping of the zero set of the linear interpolant.
"""

from dataclasses import dataclass, field

import numpy as np

from .quadrature import (
    QuadRule,
    SurfaceQuadRule,
    map_rule_to_simplices,
    prism_rule,
    simplex_measure,
)

NEG, CUT, POS = -1, 0, 1

SNAP_REL_TOL = 1e-12
MEASURE_REL_TOL = 1e-10


class GeometryError(RuntimeError):
    pass


@dataclass
class LevelSetField:
    """Analytic scalar level set phi(x, t) with optional derivatives.

    ``phi`` maps (points (..., d), t) -> (...,); ``grad`` returns
    (..., d); ``dt`` the time derivative.  Points may also carry time as
    the last coordinate when calling ``at_spacetime``.
    """

    phi: callable
    grad: callable = None
    dt: callable = None

    def __call__(self, x, t):
        return self.phi(np.asarray(x, dtype=float), t)

    def at_spacetime(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.phi(pts[..., :-1], pts[..., -1])

    def spatial_normal(self, x, t):
        g = np.asarray(self.grad(np.asarray(x, dtype=float), t))
        norm = np.linalg.norm(g, axis=-1, keepdims=True)
        return g / np.where(norm == 0.0, 1.0, norm)

    def validate_nondegenerate(self, box, final_time, n_sample=20, band=0.1):
        """Sample the zero-level band and check |grad phi| > 0 there."""
        box = np.asarray(box, dtype=float)
        axes = [np.linspace(lo, hi, n_sample) for lo, hi in box]
        grids = np.meshgrid(*axes, indexing="ij")
        x = np.stack([g.ravel() for g in grids], axis=1)
        scale = float(np.max(np.abs(box)))
        for t in np.linspace(0.0, final_time, n_sample):
            vals = self(x, t)
            near = np.abs(vals) < band * scale
            if not near.any():
                continue
            g = np.asarray(self.grad(x[near], t))
            if np.min(np.linalg.norm(g, axis=-1)) <= 0.0:
                raise GeometryError("level set gradient vanishes near the interface")
        return True


def mean_curvature(ls, x, t, eps=1e-5):
    """kappa = div(grad phi / |grad phi|) by central differences.

    For a circle of radius R this is 1/R, for a sphere 2/R.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    kappa = np.zeros(x.shape[:-1])
    for ax in range(d):
        step = np.zeros(d)
        step[ax] = eps
        np_ = ls.spatial_normal(x + step, t)[..., ax]
        nm = ls.spatial_normal(x - step, t)[..., ax]
        kappa = kappa + (np_ - nm) / (2 * eps)
    return kappa


@dataclass
class DiscreteLevelSet:
    """Nodal values of phi at the slab's bottom and top time levels."""

    slab: object
    bottom: np.ndarray       # (n_vertices,)
    top: np.ndarray          # (n_vertices,)
    _classes: np.ndarray = field(default=None, repr=False)

    def prism_values(self, e=None):
        """Nodal values per prism, shape (ne, 2, d+1): [bottom; top]."""
        tri = self.slab.mesh.simplices if e is None else self.slab.mesh.simplices[e]
        return np.stack([self.bottom[tri], self.top[tri]], axis=-2)

    def classify(self):
        """Per-prism classification in {NEG, CUT, POS}.

        POS iff all nodal values > 0, NEG iff all < 0, CUT otherwise
        (an exact zero counts as CUT).
        """
        if self._classes is None:
            vals = self.prism_values().reshape(self.slab.n_prisms, -1)
            cls = np.zeros(self.slab.n_prisms, dtype=np.int8)
            cls[np.all(vals > 0.0, axis=1)] = POS
            cls[np.all(vals < 0.0, axis=1)] = NEG
            self._classes = cls
        return self._classes

    def evaluate(self, x, t):
        """Bilinear (space x time) interpolant at points inside the slab."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        e = locate_simplices(self.slab.mesh, x)
        tau = (np.asarray(t, dtype=float) - self.slab.t0) / self.slab.k
        return self.evaluate_in_prism(e, x, np.broadcast_to(tau, x.shape[:-1]))

    def evaluate_in_prism(self, e, x, tau):
        """Interpolant at points known to lie in prisms ``e``; tau in [0,1]."""
        mesh = self.slab.mesh
        tri = mesh.simplices[e]
        verts = mesh.vertices[tri]
        lam = barycentric_coordinates(verts, x)
        vb = np.einsum("...k,...k->...", lam, self.bottom[tri])
        vt = np.einsum("...k,...k->...", lam, self.top[tri])
        return vb * (1.0 - tau) + vt * tau


def interpolate_levelset(ls, slab_):
    """Nodal interpolation of the analytic level set on one slab."""
    verts = slab_.mesh.vertices
    return DiscreteLevelSet(slab_, np.asarray(ls(verts, slab_.t0), dtype=float),
                            np.asarray(ls(verts, slab_.t1), dtype=float))


def classify_prism(dls, e):
    return int(dls.classify()[e])


def barycentric_coordinates(verts, x):
    """Barycentric coordinates of x (..., d) in simplices verts (..., d+1, d)."""
    v0 = verts[..., 0, :]
    edges = np.swapaxes(verts[..., 1:, :] - verts[..., :1, :], -1, -2)
    rhs = (x - v0)[..., None]
    lam_rest = np.linalg.solve(edges, rhs)[..., 0]
    lam0 = 1.0 - lam_rest.sum(axis=-1, keepdims=True)
    return np.concatenate([lam0, lam_rest], axis=-1)


def locate_simplices(mesh, x, tol=1e-10):
    """Indices of simplices containing points x (structured lookup)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    cell = np.floor((x - mesh.box[:, 0]) / mesh.h).astype(int)
    cell = np.clip(cell, 0, mesh.n_axis - 1)
    flat_cell = np.ravel_multi_index(tuple(cell.T), tuple(mesh.n_axis))
    n_cells = int(np.prod(mesh.n_axis))
    n_per_cell = mesh.n_simplices // n_cells
    out = np.full(len(x), -1, dtype=int)
    for j in range(n_per_cell):
        cand = flat_cell + j * n_cells
        need = out < 0
        if not need.any():
            break
        verts = mesh.vertices[mesh.simplices[cand[need]]]
        lam = barycentric_coordinates(verts, x[need])
        inside = np.all(lam >= -tol, axis=-1)
        idx = np.where(need)[0][inside]
        out[idx] = cand[need][inside]
    if (out < 0).any():
        raise GeometryError("point outside mesh")
    return out


# ---------------------------------------------------------------------------
# generic cut kernel


def _snap(vals, tol):
    vals = np.array(vals, dtype=float)
    scale = np.max(np.abs(vals))
    if scale == 0.0:
        return vals
    vals[np.abs(vals) <= tol * scale] = 0.0
    return vals


def cut_simplex(verts, vals, drop_tol=1e-13):
    """Cut a k-simplex by the zero set of its linear vertex interpolant.

    Parameters
    ----------
    verts : (k+1, m) vertex coordinates (k <= m)
    vals : (k+1,) vertex values, exact zeros allowed

    Returns
    -------
    neg, pos : lists of (k+1, m) sub-simplex vertex arrays
    iface : list of (k, m) interface facet vertex arrays; facets lying on
        a face of the simplex are attributed to the side with a strictly
        negative vertex so shared facets are emitted exactly once.
    """
    verts = np.asarray(verts, dtype=float)
    vals = np.asarray(vals, dtype=float)
    k = len(verts) - 1
    diam = float(np.max(np.linalg.norm(verts - verts[0], axis=1)))

    neg_mask = vals < 0.0
    pos_mask = vals > 0.0
    if not neg_mask.any():
        return [], [verts], []
    if not pos_mask.any():
        iface = []
        zeros = np.where(vals == 0.0)[0]
        if len(zeros) == k and k >= 1:
            f = verts[zeros]
            if simplex_measure(f[None])[0] > drop_tol * diam ** (k - 1):
                iface.append(f)
        return [verts], [], iface

    if k == 1:
        # both signs strict here; zero-valued endpoints are caught above
        a, b = verts
        va, vb = vals
        s = va / (va - vb)
        p = a + s * (b - a)
        neg_edge = np.stack([a, p]) if va < 0 else np.stack([p, b])
        pos_edge = np.stack([p, b]) if va < 0 else np.stack([a, p])
        return [neg_edge], [pos_edge], [p[None]]

    # cut all facets one dimension down
    bnd_neg, bnd_pos, bnd_iface = [], [], []
    for i in range(k + 1):
        keep = [j for j in range(k + 1) if j != i]
        fn, fp, fi = cut_simplex(verts[keep], vals[keep], drop_tol)
        bnd_neg += fn
        bnd_pos += fp
        bnd_iface += fi

    def cone(apex, base_list, min_measure):
        if not base_list:
            return []
        pieces = np.concatenate(
            [np.broadcast_to(apex, (len(base_list), 1, len(apex))),
             np.stack(base_list)], axis=1)
        meas = simplex_measure(pieces)
        return [pieces[i] for i in np.where(meas > min_measure)[0]]

    # triangulate the interface polytope by coning from one cut point;
    # cones over pieces containing the apex are degenerate and dropped
    iface = []
    if bnd_iface:
        apex_i = bnd_iface[0][0]
        iface = cone(apex_i, bnd_iface, drop_tol * diam ** (k - 1))

    min_meas = drop_tol * diam ** k
    apex_n = verts[int(np.argmin(vals))]
    apex_p = verts[int(np.argmax(vals))]
    neg = cone(apex_n, bnd_neg + iface, min_meas)
    pos = cone(apex_p, bnd_pos + iface, min_meas)
    return neg, pos, iface


@dataclass
class CutDecomposition:
    """Signed sub-simplices and interface facets of one space-time prism."""

    prism: int
    classification: int
    slab: object
    sub_simplices: np.ndarray      # (n, d+2, d+1) space-time simplices
    sub_signs: np.ndarray          # (n,) in {NEG, POS}
    iface: np.ndarray              # (nf, d+1, d+1) interface facets
    iface_normals: np.ndarray      # (nf, d+1) unit space-time normals, NEG->POS
    iface_measures: np.ndarray     # (nf,) surface (d-sigma) measures

    def side_measures(self):
        meas = simplex_measure(self.sub_simplices) if len(self.sub_simplices) else np.zeros(0)
        return (
            float(meas[self.sub_signs == NEG].sum()),
            float(meas[self.sub_signs == POS].sum()),
        )


def prism_spacetime_simplices(slab_, e):
    """Staircase split of prism e into d+1 space-time simplices.

    Returns (d+1, d+2, d+1) vertex arrays and (d+1, d+2) level-set slot
    indices into the prism's (2, d+1) nodal value array.
    """
    mesh = slab_.mesh
    d = mesh.dim
    verts = mesh.vertices[mesh.simplices[e]]
    bottom = np.concatenate([verts, np.full((d + 1, 1), slab_.t0)], axis=1)
    top = np.concatenate([verts, np.full((d + 1, 1), slab_.t1)], axis=1)
    simplices = []
    slots = []
    for j in range(d + 1):
        vs = [bottom[i] for i in range(j + 1)] + [top[i] for i in range(j, d + 1)]
        sl = [(0, i) for i in range(j + 1)] + [(1, i) for i in range(j, d + 1)]
        simplices.append(np.stack(vs))
        slots.append(sl)
    return np.stack(simplices), slots


def _linear_gradient(verts, vals):
    """Gradient of the affine interpolant on a nondegenerate simplex."""
    a = np.concatenate([verts, np.ones((len(verts), 1))], axis=1)
    coef = np.linalg.solve(a, vals)
    return coef[:-1]


def decompose_cut_prism(dls, e, snap_tol=SNAP_REL_TOL):
    """Decompose a cut prism into signed sub-simplices + interface facets.

    The prism is split into (d+1)-simplices; on each, the level set is
    re-interpolated linearly from its vertex values and cut by the plane
    {phi_lin = 0}.  Nodal values within ``snap_tol`` (relative to the max
    nodal magnitude on the prism) of zero are snapped to zero.
    """
    slab_ = dls.slab
    d = slab_.mesh.dim
    nodal = dls.prism_values(e)            # (2, d+1)
    nodal = _snap(nodal, snap_tol)
    simplices, slots = prism_spacetime_simplices(slab_, e)

    subs, signs, faces, normals = [], [], [], []
    for verts, sl in zip(simplices, slots):
        vals = np.array([nodal[a, b] for (a, b) in sl])
        if np.all(vals > 0.0):
            subs.append(verts)
            signs.append(POS)
            continue
        if np.all(vals < 0.0):
            subs.append(verts)
            signs.append(NEG)
            continue
        neg, pos, iface = cut_simplex(verts, vals)
        subs += neg + pos
        signs += [NEG] * len(neg) + [POS] * len(pos)
        if iface:
            grad = _linear_gradient(verts, vals)
            for f in iface:
                faces.append(f)
                normals.append(_facet_normal(f, grad))

    subs = np.array(subs) if subs else np.zeros((0, d + 2, d + 1))
    signs = np.array(signs, dtype=np.int8) if signs else np.zeros(0, dtype=np.int8)
    faces_arr = np.array(faces) if faces else np.zeros((0, d + 1, d + 1))
    normals_arr = np.array(normals) if normals else np.zeros((0, d + 1))
    meas = simplex_measure(faces_arr) if len(faces_arr) else np.zeros(0)

    dec = CutDecomposition(
        prism=e,
        classification=CUT,
        slab=slab_,
        sub_simplices=subs,
        sub_signs=signs,
        iface=faces_arr,
        iface_normals=normals_arr,
        iface_measures=meas,
    )
    prism_measure = simplex_measure(slab_.mesh.simplex_coords(e)[None])[0] * slab_.k
    total = float(simplex_measure(subs).sum()) if len(subs) else 0.0
    if abs(total - prism_measure) > MEASURE_REL_TOL * prism_measure:
        raise GeometryError(
            f"cut decomposition of prism {e} lost measure: "
            f"{total} vs {prism_measure}"
        )
    return dec


def uncut_decomposition(dls, e):
    """Trivial decomposition record for an uncut prism."""
    cls = classify_prism(dls, e)
    d = dls.slab.mesh.dim
    return CutDecomposition(
        prism=e,
        classification=cls,
        slab=dls.slab,
        sub_simplices=np.zeros((0, d + 2, d + 1)),
        sub_signs=np.zeros(0, dtype=np.int8),
        iface=np.zeros((0, d + 1, d + 1)),
        iface_normals=np.zeros((0, d + 1)),
        iface_measures=np.zeros(0),
    )


def _facet_normal(facet, grad_phi):
    """Unit normal of a d-simplex facet in R^{d+1}, oriented along grad phi."""
    edges = facet[1:] - facet[0]
    # null space of the edge matrix
    _, _, vt = np.linalg.svd(edges)
    n = vt[-1]
    s = np.dot(n, grad_phi)
    if s < 0:
        n = -n
    return n


def quadrature_subdomain(dec, sign, order):
    """Composite rule over the subdomain of one prism with the given sign.

    On uncut prisms this is a tensor Gauss(time) x simplex(space) rule
    exact for space and time degree <= order; on cut prisms the
    sub-simplices carry simplex rules of total space-time degree 2*order.
    """
    if sign not in (NEG, POS):
        raise ValueError("sign must be NEG or POS")
    slab_ = dec.slab
    if dec.classification != CUT:
        if dec.classification != sign:
            d = slab_.mesh.dim
            return QuadRule(np.zeros((0, d + 1)), np.zeros(0), np.zeros(0, dtype=np.int8))
        rule = prism_rule(slab_.mesh.simplex_coords(dec.prism), slab_.t0, slab_.t1,
                          order, order)
        rule.sides = np.full(len(rule.weights), sign, dtype=np.int8)
        return rule
    return subdomain_rule_from_simplices(dec, sign, 2 * order)


def subdomain_rule_from_simplices(dec, sign, total_order):
    d = dec.slab.mesh.dim
    sel = dec.sub_simplices[dec.sub_signs == sign]
    if len(sel) == 0:
        return QuadRule(np.zeros((0, d + 1)), np.zeros(0), np.zeros(0, dtype=np.int8))
    pts, wts = map_rule_to_simplices(sel, total_order)
    rule = QuadRule(pts.reshape(-1, d + 1), wts.ravel())
    rule.sides = np.full(len(rule.weights), sign, dtype=np.int8)
    return rule


def quadrature_interface(dec, order):
    """Surface rule over the prism's interface facets.

    The weights are d-sigma weights; sum(w * |nu_x| * f) approximates the
    ds dt integral of f over the space-time interface piece.
    """
    d = dec.slab.mesh.dim
    if len(dec.iface) == 0:
        z = np.zeros(0)
        return SurfaceQuadRule(np.zeros((0, d + 1)), z, z, np.zeros((0, d)), np.zeros((0, d + 1)))
    pts, wts = map_rule_to_simplices(dec.iface, order)
    npts = pts.shape[1]
    points = pts.reshape(-1, d + 1)
    weights = wts.ravel()
    nu = np.repeat(dec.iface_normals, npts, axis=0)
    nu_x = np.linalg.norm(nu[:, :d], axis=1)
    normals = np.zeros((len(points), d))
    nz = nu_x > 1e-14
    normals[nz] = nu[nz, :d] / nu_x[nz, None]
    return SurfaceQuadRule(points, weights, nu_x, normals, nu)


def decompositions_for_slab(dls, snap_tol=SNAP_REL_TOL):
    """Decompositions of every cut prism, keyed by prism index.

    ``snap_tol`` is relative to the max nodal |phi| per prism; since that
    scale is O(h |grad phi|) near the interface, a constant relative
    tolerance perturbs the interface by O(h^2) only, and a fat value
    (~1e-2) doubles as a sliver guard.
    """
    cls = dls.classify()
    return {int(e): decompose_cut_prism(dls, int(e), snap_tol)
            for e in np.where(cls == CUT)[0]}


def cut_spatial_simplex(verts, vals, order, drop_tol=1e-13):
    """Signed spatial quadrature for a d-simplex cut by linear nodal values.

    Used for slab-bottom (upwind) integrals.  Returns a list of
    (sign, points, weights).
    """
    vals = _snap(vals, SNAP_REL_TOL)
    if np.all(vals > 0.0):
        pts, wts = map_rule_to_simplices(verts[None], order)
        return [(POS, pts[0], wts[0])]
    if np.all(vals < 0.0):
        pts, wts = map_rule_to_simplices(verts[None], order)
        return [(NEG, pts[0], wts[0])]
    neg, pos, _ = cut_simplex(verts, vals, drop_tol)
    out = []
    for sign, group in ((NEG, neg), (POS, pos)):
        if group:
            pts, wts = map_rule_to_simplices(np.array(group), order)
            out.append((sign, pts.reshape(-1, verts.shape[1]), wts.ravel()))
    return out


def decomposition_debug_dump(dec):
    """JSON-serializable dump of a decomposition for external viewers."""
    return {
        "prism": int(dec.prism),
        "classification": int(dec.classification),
        "sub_simplices": dec.sub_simplices.tolist(),
        "sub_signs": dec.sub_signs.tolist(),
        "interface_facets": dec.iface.tolist(),
        "interface_normals": dec.iface_normals.tolist(),
    }
