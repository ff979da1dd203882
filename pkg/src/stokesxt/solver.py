"""Direct slab solves and sequential time marching."""

import time as _time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .assembly import assemble_slab_system
from .levelset import (
    CUT,
    NEG,
    POS,
    decompositions_for_slab,
    interpolate_levelset,
    locate_simplices,
)
from .mesh import slab as make_slab
from .spaces import (
    build_pressure_space,
    build_velocity_space,
    enrich_pressure_xfem,
    small_cut_filter,
)


class SolverError(RuntimeError):
    pass


def solve_slab(system, residual_tol=1e-9):
    """Sparse direct solve of one slab system with a residual check."""
    mat = system.matrix
    try:
        lu = spla.splu(mat)
        x = lu.solve(system.rhs)
    except RuntimeError as exc:
        raise SolverError(
            f"sparse factorization failed ({exc}); the cut configuration may "
            "be near-degenerate - consider enabling small-cut filtering "
            "(theta > 0)") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError(
            "solution contains non-finite entries; consider enabling "
            "small-cut filtering (theta > 0)")
    denom = max(float(np.abs(system.rhs).max()), 1e-300)
    residual = float(np.abs(mat @ x - system.rhs).max()) / denom
    if residual > residual_tol:
        raise SolverError(
            f"slab solve residual {residual:.3e} exceeds {residual_tol:.1e}; "
            "consider enabling small-cut filtering (theta > 0)")
    return x, residual


@dataclass
class SlabSolution:
    slab: object
    vmap: object
    pmap: object
    dls: object
    u_coef: np.ndarray
    p_coef: np.ndarray
    stats: dict

    def trace_end(self):
        """Nodal velocity at t_n- (exact: the endpoint is a temporal node)."""
        vm = self.vmap
        nodes = np.arange(vm.n_nodes)
        out = np.empty((vm.n_nodes, vm.ncomp))
        for c in range(vm.ncomp):
            out[:, c] = self.u_coef[vm.dof_index(nodes, c, vm.q)]
        return out


@dataclass
class SpaceTimeSolution:
    mesh: object
    tpart: object
    slabs: list = field(default_factory=list)
    provenance: list = field(default_factory=list)

    def slab_index_for(self, t):
        """Slab owning time t; slabs own (t_{n-1}, t_n], t=0 maps to slab 1."""
        nodes = self.tpart.nodes
        n = int(np.searchsorted(nodes, t, side="left"))
        return min(max(n, 1), self.tpart.n_slabs)

    def velocity(self, x, t):
        """u_h at points x (m, d); continuous in space and within-slab time."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        sol = self.slabs[self.slab_index_for(t) - 1]
        vm = sol.vmap
        els = locate_simplices(self.mesh, x)
        tau = (t - sol.slab.t0) / sol.slab.k
        lt = vm.time_basis.eval(tau)
        out = np.empty((len(x), vm.ncomp))
        for i, (e, xi) in enumerate(zip(els, x)):
            verts = self.mesh.simplex_coords(int(e))
            ref = np.linalg.solve((verts[1:] - verts[:1]).T, xi - verts[0])
            n_v = vm.element.eval(ref[None])[0]
            coefs = sol.u_coef[vm.element_dofs(int(e))].reshape(
                vm.element.n_nodes, vm.ncomp, vm.n_modes)
            out[i] = np.einsum("a,acm,m->c", n_v, coefs, lt)
        return out

    def pressure(self, x, t):
        """p_h at points; the XFEM side follows the discrete level set."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        sol = self.slabs[self.slab_index_for(t) - 1]
        pm = sol.pmap
        from .spaces import XfemDofMap

        base = pm.base if isinstance(pm, XfemDofMap) else pm
        els = locate_simplices(self.mesh, x)
        tau = (t - sol.slab.t0) / sol.slab.k
        lt = base.time_basis.eval(tau)
        out = np.empty(len(x))
        for i, (e, xi) in enumerate(zip(els, x)):
            verts = self.mesh.simplex_coords(int(e))
            ref = np.linalg.solve((verts[1:] - verts[:1]).T, xi - verts[0])
            n_p = base.element.eval(ref[None])[0]
            if isinstance(pm, XfemDofMap):
                val = sol.dls.evaluate_in_prism(np.array([int(e)]), xi[None],
                                                np.array([tau]))[0]
                side = POS if val >= 0 else NEG
                dofs = pm.element_dofs(int(e), side)
            else:
                dofs = pm.element_dofs(int(e))
            coefs = sol.p_coef[dofs].reshape(base.element.n_nodes, base.n_modes)
            out[i] = np.einsum("a,am,m->", n_p, coefs, lt)
        return out


def project_pressure_zero_mean(p_coef, pmap, dls, decomps=None):
    """Shift a slab pressure by constants-per-mode to zero spatial mean.

    Returns the corrected coefficients; the shift solves the small Gram
    system of the mean functionals tested against constant modes.
    """
    from .assembly import mean_constraint
    from .spaces import XfemDofMap

    c = mean_constraint(pmap, dls, decomps)
    base = pmap.base if isinstance(pmap, XfemDofMap) else pmap
    nm = base.n_modes
    ones = np.zeros((nm, pmap.n_dofs))
    nodes = np.arange(base.n_nodes)
    for m in range(nm):
        ones[m, base.dof_index(nodes, 0, m)] = 1.0
        if isinstance(pmap, XfemDofMap) and pmap.duplicated.any():
            dup = np.where(pmap.duplicated)[0]
            ones[m, [pmap.dof_for(n, -1, m) for n in dup]] = 1.0
    gram = c @ ones.T
    alpha = np.linalg.solve(gram, c @ p_coef)
    return p_coef - ones.T @ alpha


def march(coeff, mesh, tpart, r=2, q=1, pressure_space="xfem", theta=0.0,
          space_order=None, time_order=None, u0=None, residual_tol=1e-9,
          keep_blocks=False, verbose=False, mean_mode="pin"):
    """Solve slab by slab over the whole time partition.

    ``pressure_space`` selects the plain Hood-Taylor pressure ("standard")
    or its two-sided enrichment ("xfem").  ``u0`` is an optional initial
    velocity field (x -> (n, d)); the default starts from zero.  The
    zero-mean pressure condition is enforced by pinning plus
    post-projection by default ("pin"); "multiplier" borders the system
    with the mean rows instead (denser factorization, same solution).
    """
    if pressure_space not in ("standard", "xfem"):
        raise ValueError("pressure_space must be 'standard' or 'xfem'")
    solution = SpaceTimeSolution(mesh, tpart)
    prev_trace = None
    if u0 is not None:
        prev_trace = np.asarray(u0(mesh_nodes(mesh, r)), dtype=float)

    for n in range(1, tpart.n_slabs + 1):
        t_start = _time.perf_counter()
        try:
            slab_ = make_slab(mesh, tpart, n)
            dls = interpolate_levelset(coeff.levelset, slab_)
            cls = dls.classify()
            decomps = decompositions_for_slab(dls) if np.any(cls == CUT) else {}
            vmap = build_velocity_space(slab_, r, q)
            pmap = build_pressure_space(slab_, r - 1, q)
            if pressure_space == "xfem":
                pmap = enrich_pressure_xfem(pmap, dls, decomps)
                if theta > 0.0:
                    pmap = small_cut_filter(pmap, theta)
            t_geom = _time.perf_counter()
            system = assemble_slab_system(
                slab_, vmap, pmap, coeff, prev_trace=prev_trace, dls=dls,
                decomps=decomps, space_order=space_order,
                time_order=time_order, keep_blocks=keep_blocks,
                mean_mode=mean_mode)
            t_asm = _time.perf_counter()
            x, residual = solve_slab(system, residual_tol)
            t_solve = _time.perf_counter()
        except Exception as exc:
            raise type(exc)(f"slab {n}: {exc}") from exc

        n_u, n_p = system.layout.n_u, system.layout.n_p
        u_coef = x[:n_u]
        p_coef = x[n_u:n_u + n_p]
        if mean_mode == "pin":
            p_coef = project_pressure_zero_mean(p_coef, pmap, dls, decomps)
        div_rows = system.divergence_block()
        u_norm = max(float(np.abs(u_coef).max()), 1e-300)
        div_residual = float(np.abs(div_rows @ u_coef).max())
        stats = {
            "slab": n,
            "n_dofs": system.layout.n_total,
            "n_velocity_dofs": n_u,
            "n_pressure_dofs": n_p,
            "n_pressure_extra": getattr(pmap, "n_extra", 0),
            "n_cut_prisms": int(np.sum(cls == CUT)),
            "nnz": int(system.matrix.nnz),
            "residual": residual,
            "div_residual": div_residual,
            "div_residual_rel": div_residual / u_norm,
            "t_geometry": t_geom - t_start,
            "t_assemble": t_asm - t_geom,
            "t_solve": t_solve - t_asm,
        }
        sol = SlabSolution(slab_, vmap, pmap, dls, u_coef, p_coef, stats)
        if keep_blocks:
            sol.stats["blocks"] = system.blocks
        solution.slabs.append(sol)
        solution.provenance.append(stats)
        prev_trace = sol.trace_end()
        if verbose:
            print(f"slab {n:3d}: dofs={stats['n_dofs']:7d} "
                  f"cut={stats['n_cut_prisms']:4d} res={residual:.2e} "
                  f"asm={stats['t_assemble']:.2f}s solve={stats['t_solve']:.2f}s")
    return solution


def mesh_nodes(mesh, r):
    """Coordinates of the velocity lattice nodes (for initial data)."""
    shape = tuple(mesh.n_axis * r + 1)
    axes = [mesh.box[ax, 0] + np.arange(shape[ax]) * (mesh.h / r)
            for ax in range(mesh.dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)
