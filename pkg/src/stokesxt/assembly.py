"""Per-slab saddle-point assembly for the two-phase space-time scheme.

One slab's system couples velocity, pressure and mean-constraint
multiplier unknowns:

    (rho du/dt, v) + (rho(t0) u(t0+), v(t0+)) + int mu D(u):D(v)
        [+ (rho w . grad u, v)]  - int (p, div v)   = F(v) + upwind RHS
    int (q, div u)                                   = 0
    int int p_h L_m(t)                               = 0    per mode m

with D(u) = grad u + grad u^T and phase coefficients decided by the sign
of the discrete level set.  Uncut prisms share reference element blocks
per mesh orientation class and are assembled in bulk; cut prisms get
sub-simplex quadrature from their decompositions.
"""

from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.sparse as sp

from .levelset import (
    CUT,
    NEG,
    POS,
    cut_spatial_simplex,
    decompositions_for_slab,
    quadrature_interface,
    subdomain_rule_from_simplices,
)
from .quadrature import gauss_01, simplex_rule
from .spaces import XfemDofMap


class AssemblyError(ValueError):
    pass


@dataclass
class ProblemCoefficients:
    """Two-phase coefficients and data; subscript pos is the phi>0 phase."""

    levelset: object
    rho: tuple = (1.0, 1.0)          # (pos, neg)
    mu: tuple = (1.0, 1.0)
    tau: float = 0.0
    body_force: callable = None      # (points_xt, side) -> (n, d)
    interface_force: callable = None  # (points_xt) -> (n, d), ds dt density
    curvature: callable = None       # (x, t) -> (n,)
    convection: callable = None      # (x, t_scalar_or_array) -> (n, d)
    dirichlet: callable = None       # (x, t) -> (n, d); None = homogeneous

    def __post_init__(self):
        if self.rho[0] <= 0 or self.rho[1] <= 0:
            raise ValueError("densities must be positive")
        if self.mu[0] <= 0 or self.mu[1] <= 0:
            raise ValueError("viscosities must be positive")
        if self.tau < 0:
            raise ValueError("surface tension coefficient must be >= 0")

    def phase(self, pair, side):
        return pair[0] if side == POS else pair[1]


@dataclass
class SystemLayout:
    n_u: int
    n_p: int
    n_lam: int

    @property
    def n_total(self):
        return self.n_u + self.n_p + self.n_lam

    @property
    def p_offset(self):
        return self.n_u

    @property
    def lam_offset(self):
        return self.n_u + self.n_p


@dataclass
class SlabSystem:
    matrix: sp.csc_matrix
    rhs: np.ndarray
    layout: SystemLayout
    vmap: object
    pmap: object
    dirichlet_mask: np.ndarray
    dirichlet_values: np.ndarray
    div_matrix: sp.csr_matrix = field(default=None, repr=False)
    blocks: dict = field(default=None, repr=False)

    def export_coo(self, path):
        """Write the matrix in MatrixMarket coordinate text format."""
        from scipy.io import mmwrite

        mmwrite(path, self.matrix.tocoo())

    def divergence_block(self):
        """Unconstrained divergence rows: (q_h, div u_h) tested per p-dof."""
        return self.div_matrix


def _pressure_element_dofs(pmap, e, side):
    if isinstance(pmap, XfemDofMap):
        return pmap.element_dofs(e, side)
    return pmap.element_dofs(e)


def _pressure_base(pmap):
    return pmap.base if isinstance(pmap, XfemDofMap) else pmap


def interface_force_density(coeff, points, d):
    """Effective ds dt force density at interface quadrature points.

    A general provider wins; otherwise the surface-tension functional
    -tau kappa n_Gamma with kappa and n_Gamma evaluated analytically from
    the level set.  None when the problem carries no interface force.
    """
    if coeff.interface_force is not None:
        return np.asarray(coeff.interface_force(points), dtype=float)
    if coeff.tau != 0.0:
        if coeff.curvature is None:
            raise AssemblyError(
                "surface tension requested (tau != 0) but no curvature "
                "provider is available")
        x, t = points[:, :d], points[:, d]
        kap = np.asarray(coeff.curvature(x, t), dtype=float)
        normals = coeff.levelset.spatial_normal(x, t)
        return -coeff.tau * kap[:, None] * normals
    return None


@dataclass
class _RefData:
    """Per-orientation reference arrays shared by all uncut prisms."""

    els: np.ndarray
    inv_jac: np.ndarray
    jac: np.ndarray
    n: np.ndarray            # (nq_s, nloc_v)
    dn: np.ndarray           # (nq_s, nloc_v, d) physical gradients
    np_: np.ndarray          # (nq_s, nloc_p)
    w_s: np.ndarray          # physical spatial weights
    pts_ref: np.ndarray


def _orientation_classes(mesh):
    n_cells = int(np.prod(mesh.n_axis))
    n_cls = mesh.n_simplices // n_cells
    return [np.arange(c * n_cells, (c + 1) * n_cells) for c in range(n_cls)], n_cells


def _expand_delta(block, nloc, nm, d):
    """Lift a scalar (node, mode) block to vector dofs with identity coupling."""
    b4 = block.reshape(nloc, nm, nloc, nm)
    out = np.zeros((nloc, d, nm, nloc, d, nm))
    for i in range(d):
        out[:, i, :, :, i, :] = b4
    return out.reshape(nloc * d * nm, nloc * d * nm)


def assemble_slab_system(slab_, vmap, pmap, coeff, prev_trace=None, dls=None,
                         decomps=None, space_order=None, time_order=None,
                         keep_blocks=False, mean_mode="multiplier"):
    """Assemble one slab's saddle-point system.

    ``prev_trace`` is the nodal velocity trace from the previous slab at
    t_{n-1}-, shape (n_nodes, d); None means zero (first slab).

    ``mean_mode`` selects how the pressure constant-per-mode nullspace is
    removed: "multiplier" borders the system with the zero-mean rows
    (one Lagrange multiplier per temporal mode); "pin" replaces the
    redundant divergence rows of one pressure node by identities, which
    keeps the factorization sparse -- the mean-zero representative is then
    recovered by post-projection (see solver.project_pressure_zero_mean).
    """
    mesh = slab_.mesh
    d = mesh.dim
    k = slab_.k
    r = vmap.degree
    q = vmap.q
    if dls is None:
        from .levelset import interpolate_levelset

        dls = interpolate_levelset(coeff.levelset, slab_)
    cls = dls.classify()
    if decomps is None:
        decomps = decompositions_for_slab(dls) if np.any(cls == CUT) else {}

    space_order = 2 * r if space_order is None else space_order
    time_order = 2 * q + 1 if time_order is None else time_order
    if space_order < 2 * r or time_order < 2 * q:
        raise AssemblyError(
            f"quadrature orders ({space_order},{time_order}) insufficient "
            f"for degrees r={r}, q={q}")
    total_order = space_order + time_order

    elem_v = vmap.element
    base_p = _pressure_base(pmap)
    elem_p = base_p.element
    tb = vmap.time_basis
    nm = q + 1
    nloc_v = elem_v.n_nodes
    nloc_p = elem_p.n_nodes
    nv_full = nloc_v * d * nm
    np_full = nloc_p * nm

    # time rule and blocks on [0, 1], weights scaled to I_n
    tq, tw = gauss_01(time_order)
    lt = tb.eval(tq)
    dlt = tb.eval_deriv(tq) / k
    w_t = tw * k
    t_mass = np.einsum("t,tm,tn->mn", w_t, lt, lt)
    t_dt = np.einsum("t,tm,tn->mn", w_t, lt, dlt)       # (test m, trial n)
    l0 = tb.eval(0.0)

    # spatial reference rule and orientation classes
    sp_pts, sp_w = simplex_rule(d, space_order)
    n_ref = elem_v.eval(sp_pts)
    dn_ref = elem_v.eval_grad(sp_pts)
    np_ref = elem_p.eval(sp_pts)
    classes, n_cells = _orientation_classes(mesh)
    refs = []
    for els in classes:
        verts = mesh.simplex_coords(els[0])
        jac = (verts[1:] - verts[:1]).T
        inv_jac = np.linalg.inv(jac)
        det = abs(np.linalg.det(jac))
        refs.append(_RefData(els, inv_jac, jac, n_ref, dn_ref @ inv_jac,
                             np_ref, sp_w * det, sp_pts))

    if mean_mode not in ("multiplier", "pin"):
        raise ValueError("mean_mode must be 'multiplier' or 'pin'")
    layout = SystemLayout(vmap.n_dofs, pmap.n_dofs,
                          nm if mean_mode == "multiplier" else 0)
    rows, cols, data = [], [], []
    div_rows, div_cols, div_data = [], [], []
    rhs = np.zeros(layout.n_total)
    blocks = {key: ([], [], []) for key in
              ("time", "visc", "upwind", "div")} if keep_blocks else None

    def push(r_idx, c_idx, vals, block=None):
        r_idx = np.asarray(r_idx).ravel()
        c_idx = np.asarray(c_idx).ravel()
        vals = np.asarray(vals).ravel()
        rows.append(r_idx)
        cols.append(c_idx)
        data.append(vals)
        if block == "div":
            div_rows.append(r_idx - layout.p_offset)
            div_cols.append(c_idx.copy())
            div_data.append(vals.copy())
        if blocks is not None and block is not None:
            br, bc, bd = blocks[block]
            br.append(r_idx.copy())
            bc.append(c_idx.copy())
            bd.append(vals.copy())

    eye_d = np.eye(d)

    # --- per-class unit blocks (coefficient value 1) ------------------------
    unit = []
    for rd in refs:
        s_mass = np.einsum("q,qa,qb->ab", rd.w_s, rd.n, rd.n)
        s_grad = np.einsum("q,qap,qbp->ab", rd.w_s, rd.dn, rd.dn)
        s_gji = np.einsum("q,qaj,qbi->jiab", rd.w_s, rd.dn, rd.dn)
        visc = (np.einsum("ab,ij,mn->aimbjn", 2.0 * s_grad, eye_d, t_mass)
                + np.einsum("jiab,mn->aimbjn", 2.0 * s_gji, t_mass))
        visc = visc.reshape(nv_full, nv_full)
        tder = np.einsum("ab,ij,mn->aimbjn", s_mass, eye_d, t_dt) \
            .reshape(nv_full, nv_full)
        upw = np.einsum("ab,ij,m,n->aimbjn", s_mass, eye_d, l0, l0) \
            .reshape(nv_full, nv_full)
        # divergence entry: int N_p L_n  d_i N_a L_m
        s_pdiv = np.einsum("q,qp,qai->pai", rd.w_s, rd.np_, rd.dn)
        div = np.einsum("pai,mn->aimpn", s_pdiv, t_mass).reshape(nv_full, np_full)
        p_int = np.einsum("q,qp->p", rd.w_s, rd.np_)
        unit.append({"mass": s_mass, "visc": visc, "tder": tder, "upw": upw,
                     "div": div, "p_int": p_int})

    rho_pos, rho_neg = coeff.rho
    mu_pos, mu_neg = coeff.mu
    from .spaces import element_dof_matrix, xfem_side_dof_matrix

    vdofs_all = element_dof_matrix(vmap)
    if isinstance(pmap, XfemDofMap):
        pdofs_side = {NEG: xfem_side_dof_matrix(pmap, NEG),
                      POS: xfem_side_dof_matrix(pmap, POS)}
    else:
        pdofs_side = None
        pdofs_plain = element_dof_matrix(pmap)

    # --- uncut prisms, batched per orientation class ------------------------
    for rd, ub in zip(refs, unit):
        els = rd.els[cls[rd.els] != CUT]
        if len(els) == 0:
            continue
        side = cls[els]
        rho_e = np.where(side == POS, rho_pos, rho_neg)
        mu_e = np.where(side == POS, mu_pos, mu_neg)
        vdofs = vdofs_all[els]
        tder_l = rho_e[:, None, None] * ub["tder"][None]
        visc_l = mu_e[:, None, None] * ub["visc"][None]
        local = tder_l + visc_l
        shape = local.shape
        r_idx = np.broadcast_to(vdofs[:, :, None], shape)
        c_idx = np.broadcast_to(vdofs[:, None, :], shape)
        push(r_idx, c_idx, local)
        if blocks is not None:
            for name, arr in (("time", tder_l), ("visc", visc_l)):
                br, bc, bd = blocks[name]
                br.append(r_idx.ravel().copy())
                bc.append(c_idx.ravel().copy())
                bd.append(arr.ravel())

        if pdofs_side is not None:
            pdofs = np.where((side == NEG)[:, None], pdofs_side[NEG][els],
                             pdofs_side[POS][els]) + layout.p_offset
        else:
            pdofs = pdofs_plain[els] + layout.p_offset
        dshape = (len(els), nv_full, np_full)
        r1 = np.broadcast_to(vdofs[:, :, None], dshape)
        c1 = np.broadcast_to(pdofs[:, None, :], dshape)
        dloc = np.broadcast_to(ub["div"][None], dshape)
        push(r1, c1, -dloc)
        push(c1, r1, dloc, block="div")

        if layout.n_lam:
            # mean constraint: row mode m, col dof (p-node, n-mode)
            c_ent = np.einsum("p,mn->mpn", ub["p_int"], t_mass)
            cshape = (len(els), nm, nloc_p * nm)
            c_rows = np.broadcast_to(
                np.arange(nm)[None, :, None] + layout.lam_offset, cshape)
            c_cols = np.broadcast_to(pdofs[:, None, :], cshape)
            c_vals = np.broadcast_to(c_ent.reshape(1, nm, -1), cshape)
            push(c_rows, c_cols, c_vals)
            push(c_cols, c_rows, c_vals)

        if coeff.body_force is not None:
            verts0 = mesh.simplex_coords(els)[:, 0, :]
            xs = verts0[:, None, :] + rd.pts_ref @ rd.jac.T      # (ne, nq, d)
            for side_val in (POS, NEG):
                mask = side == side_val
                if not mask.any():
                    continue
                ne_m = int(mask.sum())
                rhs_loc = np.zeros((ne_m, nloc_v, d, nm))
                for it in range(len(tq)):
                    t_phys = slab_.t0 + tq[it] * k
                    pts = np.concatenate(
                        [xs[mask].reshape(-1, d),
                         np.full((ne_m * len(sp_pts), 1), t_phys)], axis=1)
                    g = np.asarray(coeff.body_force(pts, side_val))
                    g = g.reshape(ne_m, len(sp_pts), d)
                    contrib = np.einsum("eqi,qa,q->eai", g, rd.n, rd.w_s) * w_t[it]
                    rhs_loc += contrib[..., None] * lt[it][None, None, None, :]
                np.add.at(rhs, vdofs[mask].reshape(ne_m, -1),
                          rhs_loc.reshape(ne_m, -1))

        if coeff.convection is not None:
            verts0 = mesh.simplex_coords(els)[:, 0, :]
            xs = verts0[:, None, :] + rd.pts_ref @ rd.jac.T
            conv = np.zeros((len(els), nv_full, nv_full))
            for it in range(len(tq)):
                t_phys = slab_.t0 + tq[it] * k
                w_field = np.asarray(coeff.convection(
                    xs.reshape(-1, d), t_phys)).reshape(len(els), len(sp_pts), d)
                wgrad = np.einsum("eqp,qbp->eqb", w_field, rd.dn)
                cblk = np.einsum("q,qa,eqb->eab", rd.w_s, rd.n, wgrad)
                tmat = np.outer(lt[it], lt[it]) * w_t[it]
                conv += np.einsum("eab,ij,mn->eaimbjn", cblk, eye_d, tmat) \
                    .reshape(len(els), nv_full, nv_full)
            conv *= rho_e[:, None, None]
            push(np.broadcast_to(vdofs[:, :, None], conv.shape),
                 np.broadcast_to(vdofs[:, None, :], conv.shape), conv)

    # --- cut prisms ----------------------------------------------------------
    # local blocks are Gram matrices of per-point basis tables, so the cost
    # per prism is a handful of (nq x nloc*nm) matmuls
    for e, dec in decomps.items():
        rd = refs[e // n_cells]
        verts = mesh.simplex_coords(e)
        vdofs = vdofs_all[e]
        for side in (NEG, POS):
            rule = subdomain_rule_from_simplices(dec, side, total_order)
            if len(rule.weights) == 0:
                continue
            rho_s = coeff.phase(coeff.rho, side)
            mu_s = coeff.phase(coeff.mu, side)
            xs, ts = rule.points[:, :d], rule.points[:, d]
            ref = (xs - verts[0]) @ rd.inv_jac.T
            taus = (ts - slab_.t0) / k
            n_v = elem_v.eval(ref)
            dn_v = elem_v.eval_grad(ref) @ rd.inv_jac
            np_c = elem_p.eval(ref)
            lt_c = tb.eval(taus)
            dlt_c = tb.eval_deriv(taus) / k
            w = rule.weights

            # basis tables: (nq, nloc*nm) and (nq, nloc*d*nm)
            phi = (n_v[:, :, None] * lt_c[:, None, :]).reshape(len(w), -1)
            phi_dt = (n_v[:, :, None] * dlt_c[:, None, :]).reshape(len(w), -1)
            grad_tab = (dn_v[:, :, :, None] * lt_c[:, None, None, :]) \
                .reshape(len(w), -1)                       # index (a, j, m)
            wphi = w[:, None] * phi

            tder = _expand_delta(wphi.T @ phi_dt, nloc_v, nm, d) * rho_s
            gram = grad_tab.T @ (w[:, None] * grad_tab)
            gram = gram.reshape(nloc_v, d, nm, nloc_v, d, nm)
            visc = _expand_delta(
                np.einsum("apmbpn->ambn", gram).reshape(nloc_v * nm, nloc_v * nm),
                nloc_v, nm, d)
            visc += gram.transpose(0, 4, 2, 3, 1, 5).reshape(nv_full, nv_full)
            visc *= 2.0 * mu_s
            local = tder + visc
            if coeff.convection is not None:
                w_field = np.asarray(coeff.convection(xs, ts))
                wgrad = np.einsum("qp,qbp->qb", w_field, dn_v)
                conv_tab = (wgrad[:, :, None] * lt_c[:, None, :]).reshape(len(w), -1)
                local = local + rho_s * _expand_delta(wphi.T @ conv_tab,
                                                      nloc_v, nm, d)
            r_idx = np.broadcast_to(vdofs[:, None], (nv_full, nv_full))
            c_idx = np.broadcast_to(vdofs[None, :], (nv_full, nv_full))
            push(r_idx, c_idx, local)
            if blocks is not None:
                for name, arr in (("time", tder), ("visc", visc)):
                    br, bc, bd = blocks[name]
                    br.append(r_idx.ravel().copy())
                    bc.append(c_idx.ravel().copy())
                    bd.append(arr.ravel().copy())

            pdofs = _pressure_element_dofs(pmap, e, side) + layout.p_offset
            p_tab = (np_c[:, :, None] * lt_c[:, None, :]).reshape(len(w), -1)
            div_tab = (dn_v[:, :, :, None] * lt_c[:, None, None, :]) \
                .reshape(len(w), -1)                       # index (a, i, m)
            dloc = div_tab.T @ (w[:, None] * p_tab)        # (aim, pn)
            r_div = np.broadcast_to(vdofs[:, None], dloc.shape)
            c_div = np.broadcast_to(pdofs[None, :], dloc.shape)
            push(r_div, c_div, -dloc)
            push(c_div, r_div, dloc, block="div")

            if layout.n_lam:
                c_ent = lt_c.T @ (w[:, None] * p_tab)      # (m, pn)
                c_rows = np.broadcast_to(
                    np.arange(nm)[:, None] + layout.lam_offset, (nm, np_full))
                c_cols = np.broadcast_to(pdofs[None, :], (nm, np_full))
                push(c_rows, c_cols, c_ent)
                push(c_cols, c_rows, c_ent)

            if coeff.body_force is not None:
                g = np.asarray(coeff.body_force(rule.points, side))
                rhs_loc = np.einsum("qi,qam->aim", w[:, None] * g,
                                    phi.reshape(len(w), nloc_v, nm))
                np.add.at(rhs, vdofs, rhs_loc.ravel())

        iface_rule = quadrature_interface(dec, total_order)
        surface_tension_rhs(iface_rule, coeff, vmap, e, rhs)

    # --- upwind coupling at the slab bottom ----------------------------------
    _assemble_upwind(slab_, vmap, coeff, dls, prev_trace, refs, unit,
                     vdofs_all, space_order, l0, push, rhs)

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.concatenate(data)

    # --- Dirichlet rows and columns ------------------------------------------
    dir_mask = np.zeros(layout.n_total, dtype=bool)
    dir_mask[: layout.n_u] = vmap.dirichlet_mask()
    dir_values = np.zeros(layout.n_total)
    if coeff.dirichlet is not None:
        vals_u = vmap.interpolate(coeff.dirichlet)
        dir_values[: layout.n_u] = np.where(dir_mask[: layout.n_u], vals_u, 0.0)
    if mean_mode == "pin":
        # two of the divergence rows are redundant (constants per temporal
        # mode annihilate them); pin one pressure node instead
        for m in range(nm):
            dir_mask[layout.p_offset + base_p.dof_index(0, 0, m)] = True

    col_constrained = dir_mask[cols]
    move = col_constrained & ~dir_mask[rows]
    if move.any():
        np.subtract.at(rhs, rows[move], data[move] * dir_values[cols[move]])
    keep = ~(dir_mask[rows] | col_constrained)
    rows, cols, data = rows[keep], cols[keep], data[keep]
    diag = np.where(dir_mask)[0]
    rows = np.concatenate([rows, diag])
    cols = np.concatenate([cols, diag])
    data = np.concatenate([data, np.ones(len(diag))])
    rhs[diag] = dir_values[diag]

    mat = sp.coo_matrix((data, (rows, cols)),
                        shape=(layout.n_total, layout.n_total)).tocsc()
    div_mat = sp.coo_matrix(
        (np.concatenate(div_data),
         (np.concatenate(div_rows), np.concatenate(div_cols))),
        shape=(layout.n_p, layout.n_u)).tocsr()
    out_blocks = None
    if blocks is not None:
        out_blocks = {}
        for name, (br, bc, bd) in blocks.items():
            if br:
                out_blocks[name] = sp.coo_matrix(
                    (np.concatenate(bd), (np.concatenate(br), np.concatenate(bc))),
                    shape=(layout.n_total, layout.n_total)).tocsr()
    return SlabSystem(mat, rhs, layout, vmap, pmap, dir_mask, dir_values,
                      div_mat, out_blocks)


def _assemble_upwind(slab_, vmap, coeff, dls, prev_trace, refs, unit,
                     vdofs_all, space_order, l0, push, rhs):
    """(rho(t0) u(t0+), v(t0+)) plus the previous-trace right-hand side.

    The phase of rho(t_{n-1}) is decided by this slab's bottom-face
    discrete level set; cut faces are split by the generic spatial cut.
    """
    mesh = slab_.mesh
    d = mesh.dim
    nm = vmap.n_modes
    nloc_v = vmap.element.n_nodes
    nv_full = nloc_v * d * nm
    rho_pos, rho_neg = coeff.rho
    elem_v = vmap.element
    eye_d = np.eye(d)

    bott = dls.bottom[mesh.simplices]          # (ne, d+1)
    face_pos = np.all(bott > 0.0, axis=1)
    face_neg = np.all(bott < 0.0, axis=1)
    face_cut = ~(face_pos | face_neg)

    if prev_trace is not None:
        prev_trace = np.asarray(prev_trace, dtype=float).reshape(vmap.n_nodes, d)

    for rd, ub in zip(refs, unit):
        els = rd.els[~face_cut[rd.els]]
        if len(els) == 0:
            continue
        rho_e = np.where(face_pos[els], rho_pos, rho_neg)
        vdofs = vdofs_all[els]
        local = rho_e[:, None, None] * ub["upw"][None]
        push(np.broadcast_to(vdofs[:, :, None], local.shape),
             np.broadcast_to(vdofs[:, None, :], local.shape), local,
             block="upwind")
        if prev_trace is not None:
            uprev = prev_trace[vmap.conn[els]]            # (ne, nloc, d)
            m_u = np.einsum("ab,ebi->eai", ub["mass"], uprev)
            rhs_loc = rho_e[:, None, None, None] * m_u[..., None] * l0
            np.add.at(rhs, vdofs.reshape(len(els), -1),
                      rhs_loc.reshape(len(els), -1))

    n_cells = len(refs[0].els)
    for e in np.where(face_cut)[0]:
        rd = refs[e // n_cells]
        verts = mesh.simplex_coords(e)
        vdofs = vdofs_all[e]
        for side, pts, w in cut_spatial_simplex(verts, bott[e], space_order):
            rho_s = coeff.phase(coeff.rho, side)
            ref = (pts - verts[0]) @ rd.inv_jac.T
            n_v = elem_v.eval(ref)
            s_mass = np.einsum("q,qa,qb->ab", w, n_v, n_v)
            local = np.einsum("ab,ij,m,n->aimbjn", rho_s * s_mass, eye_d, l0, l0) \
                .reshape(nv_full, nv_full)
            push(np.broadcast_to(vdofs[:, None], local.shape),
                 np.broadcast_to(vdofs[None, :], local.shape), local,
                 block="upwind")
            if prev_trace is not None:
                uprev = prev_trace[vmap.conn[e]]
                m_u = np.einsum("ab,bi->ai", s_mass, uprev)
                rhs_loc = rho_s * m_u[..., None] * l0
                np.add.at(rhs, vdofs, rhs_loc.ravel())


def surface_tension_rhs(iface_rule, coeff, vmap, e, out):
    """Add one cut prism's interface force into the rhs vector ``out``.

    Covers both the -tau kappa n_Gamma functional (kappa and n_Gamma from
    the analytic level set, weighted by the geometric |nu_x| factor) and a
    general manufactured force density.
    """
    if len(iface_rule.weights) == 0:
        return
    d = vmap.slab.mesh.dim
    f = interface_force_density(coeff, iface_rule.points, d)
    if f is None:
        return
    mesh = vmap.slab.mesh
    verts = mesh.simplex_coords(e)
    inv_jac = np.linalg.inv((verts[1:] - verts[:1]).T)
    xs, ts = iface_rule.points[:, :d], iface_rule.points[:, d]
    ref = (xs - verts[0]) @ inv_jac.T
    n_v = vmap.element.eval(ref)
    lt = vmap.time_basis.eval((ts - vmap.slab.t0) / vmap.slab.k)
    wf = iface_rule.weights * iface_rule.nu_x
    rhs_loc = np.einsum("q,qi,qa,qm->aim", wf, f, n_v, lt)
    np.add.at(out, vmap.element_dofs(e), rhs_loc.ravel())


def body_force_rhs(rule, coeff, vmap, e, out, side):
    """Add one prism's phase-wise body-force contribution into ``out``."""
    if len(rule.weights) == 0 or coeff.body_force is None:
        return
    d = vmap.slab.mesh.dim
    mesh = vmap.slab.mesh
    verts = mesh.simplex_coords(e)
    inv_jac = np.linalg.inv((verts[1:] - verts[:1]).T)
    xs, ts = rule.points[:, :d], rule.points[:, d]
    ref = (xs - verts[0]) @ inv_jac.T
    n_v = vmap.element.eval(ref)
    lt = vmap.time_basis.eval((ts - vmap.slab.t0) / vmap.slab.k)
    g = np.asarray(coeff.body_force(rule.points, side))
    rhs_loc = np.einsum("q,qi,qa,qm->aim", rule.weights, g, n_v, lt)
    np.add.at(out, vmap.element_dofs(e), rhs_loc.ravel())


def mean_constraint(pmap, dls, decomps=None, space_order=None, time_order=None):
    """Constraint rows: zero spatial mean tested against each temporal mode.

    Returns a dense (q+1, n_p) matrix C with rows int int N_b chi L_n L_m;
    C p = 0 forces the spatial mean of p_h(., t) to vanish identically in t.
    """
    base = _pressure_base(pmap)
    slab_ = base.slab
    mesh = slab_.mesh
    d = mesh.dim
    k = slab_.k
    nm = base.n_modes
    space_order = 2 * base.degree if space_order is None else space_order
    time_order = 2 * base.q + 1 if time_order is None else time_order
    cls = dls.classify()
    if decomps is None:
        decomps = decompositions_for_slab(dls) if np.any(cls == CUT) else {}

    tq, tw = gauss_01(time_order)
    lt = base.time_basis.eval(tq)
    t_mass = np.einsum("t,tm,tn->mn", tw * k, lt, lt)

    sp_pts, sp_w = simplex_rule(d, space_order)
    np_ref = base.element.eval(sp_pts)
    p_int_ref = np_ref.T @ sp_w
    ref_meas = 1.0 / factorial(d)
    meas = mesh.measures()

    c = np.zeros((nm, pmap.n_dofs))
    uncut = np.where(cls != CUT)[0]
    if len(uncut):
        pdofs = np.stack([_pressure_element_dofs(pmap, int(e), cls[e])
                          for e in uncut])
        ent = np.einsum("e,p,mn->empn", meas[uncut] / ref_meas,
                        p_int_ref, t_mass)
        for m in range(nm):
            np.add.at(c[m], pdofs.ravel(),
                      ent[:, m].reshape(len(uncut), -1).ravel())
    for e, dec in decomps.items():
        verts = mesh.simplex_coords(e)
        inv_jac = np.linalg.inv((verts[1:] - verts[:1]).T)
        for side in (NEG, POS):
            rule = subdomain_rule_from_simplices(dec, side,
                                                 space_order + time_order)
            if len(rule.weights) == 0:
                continue
            ref = (rule.points[:, :d] - verts[0]) @ inv_jac.T
            np_c = base.element.eval(ref)
            lt_c = base.time_basis.eval((rule.points[:, d] - slab_.t0) / k)
            ent = np.einsum("q,qp,qn,qm->mpn", rule.weights, np_c, lt_c, lt_c)
            pdofs = _pressure_element_dofs(pmap, int(e), side)
            for m in range(nm):
                np.add.at(c[m], pdofs, ent[m].ravel())
    return c
