"""Space-time error norms, estimated orders of convergence and tables.

Velocity errors are measured in the L2(time) x H1-seminorm(space) norm,
pressure errors in L2 x L2.  On prisms crossed by the analytic interface
the quadrature resolves the interface by recursive longest-edge bisection
of the prism's space-time simplices followed by a linear cut, so that the
exact solution is always evaluated on its own side; the discrete pressure
side follows the discrete level set at each quadrature point.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .levelset import NEG, POS, cut_simplex, prism_spacetime_simplices, _snap
from .quadrature import gauss_01, map_rule_to_simplices, simplex_rule
from .spaces import XfemDofMap


@dataclass
class ExactSolution:
    """Exact fields of a benchmark case, phase-wise where discontinuous.

    ``velocity(x, t, side)`` maps (n, d) points and scalar-or-array t to
    (n, d); ``velocity_gradient`` to (n, d, d) with entries du_i/dx_j;
    ``pressure`` to (n,).  ``velocity_smooth`` marks a velocity that is the
    same smooth field on both sides.
    """

    name: str
    levelset: object
    velocity: callable
    velocity_gradient: callable
    pressure: callable
    velocity_smooth: bool = True


def _classify_prisms_analytic(slab_, phi):
    """Per-prism sign of the analytic level set: NEG/POS/0 (crossed).

    Sampled at vertices, edge midpoints and centroid at three time levels.
    """
    mesh = slab_.mesh
    verts = mesh.simplex_coords()                       # (ne, d+1, d)
    pts = [verts]
    d1 = verts.shape[1]
    for i in range(d1):
        for j in range(i + 1, d1):
            pts.append(0.5 * (verts[:, i:i + 1] + verts[:, j:j + 1]))
    pts.append(verts.mean(axis=1, keepdims=True))
    pts = np.concatenate(pts, axis=1)                   # (ne, ns, d)
    cls = np.zeros(mesh.n_simplices, dtype=np.int8)
    pos = np.ones(mesh.n_simplices, dtype=bool)
    neg = np.ones(mesh.n_simplices, dtype=bool)
    for t in (slab_.t0, 0.5 * (slab_.t0 + slab_.t1), slab_.t1):
        vals = phi(pts.reshape(-1, mesh.dim), t).reshape(pts.shape[:2])
        pos &= np.all(vals > 0.0, axis=1)
        neg &= np.all(vals < 0.0, axis=1)
    cls[pos] = POS
    cls[neg] = NEG
    return cls


def resolve_prism_leaves(slab_, e, phi, depth):
    """Split prism e into signed space-time simplices against analytic phi.

    Still-crossed simplices are bisected along their longest edge
    ``depth`` times, then cut linearly from vertex values.  Returns
    (simplices (n, d+2, d+1), sides (n,)).
    """
    sims, _ = prism_spacetime_simplices(slab_, e)
    nv = sims.shape[1]
    pairs = np.array([(i, j) for i in range(nv) for j in range(i + 1, nv)])
    out_v, out_s = [], []
    active = sims
    for level in range(depth + 1):
        if len(active) == 0:
            break
        mids = 0.5 * (active[:, pairs[:, 0]] + active[:, pairs[:, 1]])
        samples = np.concatenate(
            [active, mids, active.mean(axis=1, keepdims=True)], axis=1)
        vals = phi.at_spacetime(samples.reshape(-1, samples.shape[-1]))
        vals = vals.reshape(samples.shape[:2])
        pos = np.all(vals > 0.0, axis=1)
        neg = np.all(vals < 0.0, axis=1)
        if pos.any():
            out_v.append(active[pos])
            out_s.append(np.full(int(pos.sum()), POS, dtype=np.int8))
        if neg.any():
            out_v.append(active[neg])
            out_s.append(np.full(int(neg.sum()), NEG, dtype=np.int8))
        rem = active[~(pos | neg)]
        if len(rem) == 0:
            active = rem
            break
        if level == depth:
            for verts in rem:
                vvals = _snap(phi.at_spacetime(verts), 1e-12)
                if np.all(vvals >= 0.0) or np.all(vvals <= 0.0):
                    centroid_val = phi.at_spacetime(verts.mean(axis=0)[None])[0]
                    side = POS if centroid_val >= 0 else NEG
                    out_v.append(verts[None])
                    out_s.append(np.full(1, side, dtype=np.int8))
                    continue
                negs, poss, _ = cut_simplex(verts, vvals)
                if negs:
                    out_v.append(np.stack(negs))
                    out_s.append(np.full(len(negs), NEG, dtype=np.int8))
                if poss:
                    out_v.append(np.stack(poss))
                    out_s.append(np.full(len(poss), POS, dtype=np.int8))
            active = rem[:0]
            break
        # bisect the longest edge of every remaining simplex
        edges = rem[:, pairs[:, 0]] - rem[:, pairs[:, 1]]
        longest = np.argmax(np.einsum("sem,sem->se", edges, edges), axis=1)
        i_idx, j_idx = pairs[longest, 0], pairs[longest, 1]
        mid = 0.5 * (rem[np.arange(len(rem)), i_idx]
                     + rem[np.arange(len(rem)), j_idx])
        child_a = rem.copy()
        child_a[np.arange(len(rem)), i_idx] = mid
        child_b = rem.copy()
        child_b[np.arange(len(rem)), j_idx] = mid
        active = np.concatenate([child_a, child_b])
    if not out_v:
        d1 = sims.shape[-1]
        return np.zeros((0, nv, d1)), np.zeros(0, dtype=np.int8)
    return np.concatenate(out_v), np.concatenate(out_s)


def _gather_velocity(slab_sol, e):
    vm = slab_sol.vmap
    return slab_sol.u_coef[vm.element_dofs(e)].reshape(
        vm.element.n_nodes, vm.ncomp, vm.n_modes)


def _pressure_coef_sides(slab_sol, e):
    """Pressure element coefficients per side: (neg (nloc,nm), pos)."""
    pm = slab_sol.pmap
    if isinstance(pm, XfemDofMap):
        base = pm.base
        c_neg = slab_sol.p_coef[pm.element_dofs(e, NEG)]
        c_pos = slab_sol.p_coef[pm.element_dofs(e, POS)]
        shape = (base.element.n_nodes, base.n_modes)
        return c_neg.reshape(shape), c_pos.reshape(shape)
    c = slab_sol.p_coef[pm.element_dofs(e)].reshape(
        pm.element.n_nodes, pm.n_modes)
    return c, c


def error_L2H1(solution, exact, space_order=None, time_order=None,
               bisect_depth=4, leaf_order=5):
    """L2(time) x H1-seminorm(space) velocity error against an exact field."""
    return np.sqrt(_accumulate_error(solution, exact, "grad", space_order,
                                     time_order, bisect_depth, leaf_order))


def error_L2L2_pressure(solution, exact, space_order=None, time_order=None,
                        bisect_depth=4, leaf_order=5):
    """L2 x L2 pressure error; exact side by analytic phi, discrete by dls."""
    return np.sqrt(_accumulate_error(solution, exact, "pressure", space_order,
                                     time_order, bisect_depth, leaf_order))


def error_L2L2_velocity(solution, exact, space_order=None, time_order=None,
                        bisect_depth=4, leaf_order=5):
    """L2 x L2 velocity error (diagnostic)."""
    return np.sqrt(_accumulate_error(solution, exact, "value", space_order,
                                     time_order, bisect_depth, leaf_order))


def _accumulate_error(solution, exact, kind, space_order, time_order,
                      bisect_depth, leaf_order=5):
    total = 0.0
    for slab_sol in solution.slabs:
        total += _slab_error(slab_sol, exact, kind, space_order, time_order,
                             bisect_depth, leaf_order)
    return total


def _slab_error(slab_sol, exact, kind, space_order, time_order, bisect_depth,
                leaf_order=5):
    slab_ = slab_sol.slab
    mesh = slab_.mesh
    d = mesh.dim
    vm = slab_sol.vmap
    so = 2 * vm.degree + 2 if space_order is None else space_order
    to = 2 * vm.q + 2 if time_order is None else time_order
    phi = exact.levelset

    cls_a = _classify_prisms_analytic(slab_, phi)
    cls_d = slab_sol.dls.classify()
    if kind == "pressure":
        needs_resolution = (cls_a == 0) | (cls_d == 0)
    elif exact.velocity_smooth:
        needs_resolution = np.zeros(mesh.n_simplices, dtype=bool)
    else:
        needs_resolution = cls_a == 0

    total = 0.0
    total += _batched_error(slab_sol, exact, kind, ~needs_resolution, cls_a,
                            cls_d, so, to)
    for e in np.where(needs_resolution)[0]:
        total += _resolved_error(slab_sol, exact, kind, int(e), leaf_order,
                                 bisect_depth)
    return total


def _batched_error(slab_sol, exact, kind, mask, cls_a, cls_d, so, to):
    slab_ = slab_sol.slab
    mesh = slab_.mesh
    d = mesh.dim
    vm = slab_sol.vmap
    tb = vm.time_basis
    sp_pts, sp_w = simplex_rule(d, so)
    tq, tw = gauss_01(to)
    lt = tb.eval(tq)
    n_cells = int(np.prod(mesh.n_axis))
    n_cls = mesh.n_simplices // n_cells
    total = 0.0
    for c in range(n_cls):
        els = np.arange(c * n_cells, (c + 1) * n_cells)[mask[c * n_cells:
                                                             (c + 1) * n_cells]]
        if len(els) == 0:
            continue
        verts = mesh.simplex_coords(els)
        jac = (mesh.simplex_coords(els[0])[1:]
               - mesh.simplex_coords(els[0])[:1]).T
        inv_jac = np.linalg.inv(jac)
        det = abs(np.linalg.det(jac))
        w_s = sp_w * det
        xs = verts[:, 0, None, :] + sp_pts @ jac.T          # (ne, nq, d)
        side_a = np.where(cls_a[els] == NEG, NEG, POS)

        if kind == "pressure":
            pm = slab_sol.pmap
            base = pm.base if isinstance(pm, XfemDofMap) else pm
            np_ref = base.element.eval(sp_pts)
            shape = (len(els), base.element.n_nodes, base.n_modes)
            if isinstance(pm, XfemDofMap):
                from .spaces import xfem_side_dof_matrix

                idx_neg = xfem_side_dof_matrix(pm, NEG)[els]
                idx_pos = xfem_side_dof_matrix(pm, POS)[els]
                c_neg = slab_sol.p_coef[idx_neg].reshape(shape)
                c_pos = slab_sol.p_coef[idx_pos].reshape(shape)
            else:
                from .spaces import element_dof_matrix

                idx = element_dof_matrix(pm)[els]
                c_neg = c_pos = slab_sol.p_coef[idx].reshape(shape)
            side_d = np.where(cls_d[els] == NEG, NEG, POS)
            c_h = np.where((side_d == NEG)[:, None, None], c_neg, c_pos)
            for it in range(len(tq)):
                t_phys = slab_.t0 + tq[it] * slab_.k
                ph = np.einsum("qa,eam,m->eq", np_ref, c_h, lt[it])
                flat = xs.reshape(-1, d)
                pe = np.empty(len(flat))
                for s_val in (NEG, POS):
                    m = np.repeat(side_a == s_val, xs.shape[1])
                    if m.any():
                        pe[m] = exact.pressure(flat[m], t_phys, s_val)
                diff2 = (pe.reshape(len(els), -1) - ph) ** 2
                total += tw[it] * slab_.k * np.einsum("q,eq->", w_s, diff2)
        else:
            from .spaces import element_dof_matrix

            dn_ref = vm.element.eval_grad(sp_pts) @ inv_jac
            n_ref = vm.element.eval(sp_pts)
            idx = element_dof_matrix(vm)[els]
            coefs = slab_sol.u_coef[idx].reshape(
                len(els), vm.element.n_nodes, d, vm.n_modes)
            for it in range(len(tq)):
                t_phys = slab_.t0 + tq[it] * slab_.k
                flat = xs.reshape(-1, d)
                if kind == "grad":
                    gh = np.einsum("qaj,eaim,m->eqij", dn_ref, coefs, lt[it])
                    ge = np.empty((len(flat), d, d))
                    for s_val in (NEG, POS):
                        m = np.repeat(side_a == s_val, xs.shape[1])
                        if m.any():
                            ge[m] = exact.velocity_gradient(flat[m], t_phys, s_val)
                    diff2 = np.sum((ge.reshape(len(els), -1, d, d) - gh) ** 2,
                                   axis=(2, 3))
                else:
                    vh = np.einsum("qa,eaim,m->eqi", n_ref, coefs, lt[it])
                    ve = np.empty((len(flat), d))
                    for s_val in (NEG, POS):
                        m = np.repeat(side_a == s_val, xs.shape[1])
                        if m.any():
                            ve[m] = exact.velocity(flat[m], t_phys, s_val)
                    diff2 = np.sum((ve.reshape(len(els), -1, d) - vh) ** 2,
                                   axis=2)
                total += tw[it] * slab_.k * np.einsum("q,eq->", w_s, diff2)
    return total


def _resolved_error(slab_sol, exact, kind, e, total_order, depth):
    slab_ = slab_sol.slab
    mesh = slab_.mesh
    d = mesh.dim
    vm = slab_sol.vmap
    verts_e = mesh.simplex_coords(e)
    inv_jac = np.linalg.inv((verts_e[1:] - verts_e[:1]).T)
    sims, sides = resolve_prism_leaves(slab_, e, exact.levelset, depth)
    if len(sims) == 0:
        return 0.0
    pts, wts = map_rule_to_simplices(sims, total_order)
    nq = pts.shape[1]
    flat = pts.reshape(-1, d + 1)
    w_flat = wts.ravel()
    side_flat = np.repeat(sides, nq)
    xs, ts = flat[:, :d], flat[:, d]
    ref = (xs - verts_e[0]) @ inv_jac.T
    taus = (ts - slab_.t0) / slab_.k
    lt = vm.time_basis.eval(taus)

    if kind == "pressure":
        pm = slab_sol.pmap
        base = pm.base if isinstance(pm, XfemDofMap) else pm
        np_c = base.element.eval(ref)
        c_neg, c_pos = _pressure_coef_sides(slab_sol, e)
        ph_neg = np.einsum("qa,am,qm->q", np_c, c_neg, lt)
        ph_pos = np.einsum("qa,am,qm->q", np_c, c_pos, lt)
        if isinstance(pm, XfemDofMap):
            dvals = slab_sol.dls.evaluate_in_prism(
                np.full(len(flat), e), xs, taus)
            ph = np.where(dvals >= 0.0, ph_pos, ph_neg)
        else:
            ph = ph_pos
        pe = np.empty(len(flat))
        for s_val in (NEG, POS):
            m = side_flat == s_val
            if m.any():
                pe[m] = exact.pressure(xs[m], ts[m], s_val)
        return float(np.sum(w_flat * (pe - ph) ** 2))

    coefs = _gather_velocity(slab_sol, e)
    if kind == "grad":
        dn = vm.element.eval_grad(ref) @ inv_jac
        gh = np.einsum("qaj,aim,qm->qij", dn, coefs, lt)
        ge = np.empty_like(gh)
        for s_val in (NEG, POS):
            m = side_flat == s_val
            if m.any():
                ge[m] = exact.velocity_gradient(xs[m], ts[m], s_val)
        return float(np.sum(w_flat * np.sum((ge - gh) ** 2, axis=(1, 2))))
    n_c = vm.element.eval(ref)
    vh = np.einsum("qa,aim,qm->qi", n_c, coefs, lt)
    ve = np.empty_like(vh)
    for s_val in (NEG, POS):
        m = side_flat == s_val
        if m.any():
            ve[m] = exact.velocity(xs[m], ts[m], s_val)
    return float(np.sum(w_flat * np.sum((ve - vh) ** 2, axis=1)))


# ---------------------------------------------------------------------------
# orders of convergence and tables


def eoc(e_coarse, e_fine, factor=2.0):
    """log_factor(e_coarse / e_fine); None when a value is nonpositive."""
    if e_coarse is None or e_fine is None or e_coarse <= 0 or e_fine <= 0:
        return None
    return float(np.log(e_coarse / e_fine) / np.log(factor))


def _fmt(v, places=5):
    return "" if v is None else f"{v:.{places}f}"


@dataclass
class ErrorTable:
    """Grid of errors over refinement rows N_S and columns N.

    The EOC_S column is computed from the last column, the EOC_T row from
    the last row, each from adjacent refinements by factor 2.
    """

    ns_values: list
    n_values: list
    values: np.ndarray              # (len(ns), len(n))
    title: str = ""

    def eoc_s(self):
        last = self.values[:, -1]
        return [None] + [eoc(last[i - 1], last[i])
                         for i in range(1, len(self.ns_values))]

    def eoc_t(self):
        last = self.values[-1, :]
        return [None] + [eoc(last[j - 1], last[j])
                         for j in range(1, len(self.n_values))]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["NS"] + [str(n) for n in self.n_values] + ["EOC_S"])
        es = self.eoc_s()
        for i, ns in enumerate(self.ns_values):
            w.writerow([str(ns)] + [_fmt(v) for v in self.values[i]]
                       + [_fmt(es[i])])
        w.writerow(["EOC_T"] + [_fmt(v) for v in self.eoc_t()] + [""])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, title=""):
        rows = list(csv.reader(io.StringIO(text)))
        n_values = [int(v) for v in rows[0][1:-1]]
        ns_values = [int(r[0]) for r in rows[1:-1]]
        values = np.array([[float(v) for v in r[1:len(n_values) + 1]]
                           for r in rows[1:-1]])
        return cls(ns_values, n_values, values, title)

    def to_markdown(self, places=5):
        head = ["NS \\ N"] + [str(n) for n in self.n_values] + ["EOC_S"]
        lines = ["| " + " | ".join(head) + " |",
                 "|" + "---|" * len(head)]
        es = self.eoc_s()
        for i, ns in enumerate(self.ns_values):
            cells = [str(ns)] + [_fmt(v, places) for v in self.values[i]] \
                + [_fmt(es[i], places)]
            lines.append("| " + " | ".join(cells) + " |")
        cells = ["EOC_T"] + [_fmt(v, places) for v in self.eoc_t()] + [""]
        lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines)


@dataclass
class DiagonalStudy:
    """Simultaneous space-time refinement results along (N_S, N) pairs."""

    pairs: list
    errors: list
    title: str = ""

    def eocs(self):
        return [eoc(self.errors[i - 1], self.errors[i])
                for i in range(1, len(self.errors))]

    def last_eoc(self):
        es = self.eocs()
        return es[-1] if es else None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["NS", "N", "error", "EOC"])
        es = [None] + self.eocs()
        for (ns, n), err, e in zip(self.pairs, self.errors, es):
            w.writerow([ns, n, _fmt(err), _fmt(e)])
        return buf.getvalue()

    def to_markdown(self, places=5):
        lines = ["| NS | N | error | EOC |", "|---|---|---|---|"]
        es = [None] + self.eocs()
        for (ns, n), err, e in zip(self.pairs, self.errors, es):
            lines.append(f"| {ns} | {n} | {_fmt(err, places)} | {_fmt(e, places)} |")
        return "\n".join(lines)
