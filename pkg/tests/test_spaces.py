import numpy as np
import pytest

from stokesxt.levelset import NEG, POS, decompositions_for_slab, interpolate_levelset
from stokesxt.levelset import LevelSetField
from stokesxt.mesh import build_structured_mesh, build_time_partition, slab
from stokesxt.spaces import (
    build_pressure_space,
    build_velocity_space,
    enrich_pressure_xfem,
    evaluate_basis,
    simplex_element,
    small_cut_filter,
)


def two_triangle_slab(q=1):
    mesh = build_structured_mesh(2, [(0, 1), (0, 1)], 1)
    tp = build_time_partition(1.0, 1)
    return slab(mesh, tp, 1)


def test_velocity_space_counts():
    s = two_triangle_slab()
    vmap = build_velocity_space(s, r=2, q=1)
    assert vmap.n_nodes == 9
    assert vmap.n_dofs == 36
    vmap0 = build_velocity_space(s, r=2, q=0)
    assert vmap0.n_dofs == 18
    assert vmap.boundary_nodes.sum() == 8
    assert (~vmap.boundary_nodes).sum() == 1


def test_velocity_space_rejects_low_degree():
    s = two_triangle_slab()
    with pytest.raises(ValueError, match="Hood-Taylor"):
        build_velocity_space(s, r=1, q=1)


def test_pressure_space_counts():
    s = two_triangle_slab()
    pmap = build_pressure_space(s, 1, 1)
    assert pmap.n_nodes == 4
    assert pmap.n_dofs == 8
    pmap0 = build_pressure_space(s, 1, 0)
    assert pmap0.n_dofs == 4
    assert not pmap.boundary_nodes.any()
    # dof shared along the diagonal: both triangles reference it
    shared = set(pmap.conn[0]) & set(pmap.conn[1])
    assert len(shared) == 2   # the diagonal endpoints (0,0) and (1,1)


@pytest.mark.parametrize("dim,r", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_simplex_element_lagrange(dim, r):
    el = simplex_element(dim, r)
    vals = el.eval(el.ref_nodes)
    assert np.allclose(vals, np.eye(el.n_nodes), atol=1e-11)
    rng = np.random.default_rng(1)
    pts = rng.dirichlet(np.ones(dim + 1), size=10)[:, :dim]
    assert np.allclose(el.eval(pts).sum(axis=-1), 1.0, atol=1e-12)
    assert np.allclose(el.eval_grad(pts).sum(axis=-2), 0.0, atol=1e-11)


def test_partition_of_unity_spacetime():
    s = two_triangle_slab()
    vmap = build_velocity_space(s, 2, 1)
    rng = np.random.default_rng(5)
    for _ in range(5):
        lam = rng.dirichlet(np.ones(3))
        verts = s.mesh.vertices[s.mesh.simplices[0]]
        x = lam @ verts
        t = rng.random()
        dofs, vals, grads, dts = evaluate_basis(vmap, 0, x, t)
        # each component sums to one over its dofs
        assert np.allclose(vals.sum(axis=0), 1.0, atol=1e-12)
        assert np.allclose(grads.sum(axis=0), 0.0, atol=1e-11)
        assert np.allclose(dts.sum(axis=0), 0.0, atol=1e-11)


def test_evaluate_basis_outside_rejected():
    s = two_triangle_slab()
    vmap = build_velocity_space(s, 2, 1)
    with pytest.raises(ValueError, match="outside"):
        evaluate_basis(vmap, 0, np.array([0.1, 0.9]), 0.5)   # in triangle 1, not 0
    with pytest.raises(ValueError, match="outside"):
        evaluate_basis(vmap, 0, np.array([0.2, 0.1]), 1.5)


def cut_setup(n_s=4):
    mesh = build_structured_mesh(2, [(0, 1), (0, 1)], n_s)
    tp = build_time_partition(1.0, 2)
    s = slab(mesh, tp, 1)
    ls = LevelSetField(lambda x, t: x[..., 0] - 0.5 - 0.05 * t)
    dls = interpolate_levelset(ls, s)
    return s, dls


def test_xfem_uncut_no_duplication():
    s = two_triangle_slab()
    pmap = build_pressure_space(s, 1, 1)
    ls = LevelSetField(lambda x, t: np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    xmap = enrich_pressure_xfem(pmap, dls)
    assert xmap.n_dofs == pmap.n_dofs
    assert not xmap.duplicated.any()


def test_xfem_duplication_on_cut():
    s, dls = cut_setup()
    pmap = build_pressure_space(s, 1, 1)
    decomps = decompositions_for_slab(dls)
    xmap = enrich_pressure_xfem(pmap, dls, decomps)
    assert xmap.duplicated.any()
    # duplicated nodes are exactly those whose patch is crossed
    dup_nodes = np.where(xmap.duplicated)[0]
    assert xmap.n_dofs == pmap.n_dofs + len(dup_nodes) * pmap.n_modes
    for node in dup_nodes:
        assert xmap.node_sides[node].all()
        assert xmap.dof_for(node, NEG, 0) != xmap.dof_for(node, POS, 0)


def test_xfem_reproduces_base_space():
    # summing both side copies with the same coefficients reproduces the
    # unenriched function at arbitrary points
    s, dls = cut_setup()
    pmap = build_pressure_space(s, 1, 1)
    xmap = enrich_pressure_xfem(pmap, dls)
    rng = np.random.default_rng(3)
    base_coef = rng.normal(size=pmap.n_dofs)
    coef = np.zeros(xmap.n_dofs)
    coef[: pmap.n_dofs] = base_coef
    for node in np.where(xmap.duplicated)[0]:
        for m in range(pmap.n_modes):
            coef[xmap.dof_for(node, NEG, m)] = base_coef[pmap.dof_index(node, 0, m)]
    for e in range(s.mesh.n_simplices):
        lam = rng.dirichlet(np.ones(3))
        x = lam @ s.mesh.vertices[s.mesh.simplices[e]]
        t = s.t0 + rng.random() * s.k
        dofs, vals, _, _ = evaluate_basis(xmap, e, x, t)
        got = np.dot(coef[dofs], vals)
        dofs_b, vals_b, _, _ = evaluate_basis(pmap, e, x, t)
        want = np.dot(base_coef[dofs_b], vals_b[:, 0])
        assert abs(got - want) < 1e-12


def test_xfem_side_locality():
    # a side copy vanishes at points on the opposite side
    s, dls = cut_setup()
    pmap = build_pressure_space(s, 1, 1)
    xmap = enrich_pressure_xfem(pmap, dls)
    node = int(np.where(xmap.duplicated)[0][0])
    # find a cut element containing this node
    els = [e for e in range(s.mesh.n_simplices) if node in pmap.conn[e]]
    for e in els:
        lam = np.ones(3) / 3
        x = lam @ s.mesh.vertices[s.mesh.simplices[e]]
        t = s.t0 + 0.3 * s.k
        side_here = POS if dls.evaluate(x[None], t)[0] >= 0 else NEG
        dofs, vals, _, _ = evaluate_basis(xmap, e, x, t)
        opposite = NEG if side_here == POS else POS
        d_op = xmap.dof_for(node, opposite, 0)
        if d_op in dofs.tolist():
            i = dofs.tolist().index(d_op)
            assert vals[i] == 0.0


def test_small_cut_filter():
    s, dls = cut_setup()
    pmap = build_pressure_space(s, 1, 1)
    xmap = enrich_pressure_xfem(pmap, dls)
    same = small_cut_filter(xmap, 0.0)
    assert same.n_dofs == xmap.n_dofs
    # large theta removes every duplication but never both sides
    hard = small_cut_filter(xmap, 0.499)
    assert hard.n_dofs <= xmap.n_dofs
    aggressive = small_cut_filter(xmap, 1e-8)
    assert aggressive.n_dofs == xmap.n_dofs   # no truly tiny cuts here
    with pytest.raises(ValueError):
        small_cut_filter(xmap, 1.0)


def test_broken_in_time_disjoint_dofs():
    # dof indices are slab-local; coupling across slabs happens only through
    # the upwind trace, never shared indices
    mesh = build_structured_mesh(2, [(0, 1), (0, 1)], 2)
    tp = build_time_partition(1.0, 2)
    s1, s2 = slab(mesh, tp, 1), slab(mesh, tp, 2)
    v1 = build_velocity_space(s1, 2, 1)
    v2 = build_velocity_space(s2, 2, 1)
    assert v1.slab.index != v2.slab.index
    assert v1.n_dofs == v2.n_dofs
    t1 = v1.mode_times()
    t2 = v2.mode_times()
    assert np.all(t2 > t1[-1] - 1e-12)


def test_interpolate_and_mode_times():
    s = two_triangle_slab()
    vmap = build_velocity_space(s, 2, 1)
    # a field linear in t and quadratic in space is reproduced at nodes
    f = lambda x, t: np.stack([x[..., 0] ** 2 + t, x[..., 1] * t], axis=-1)
    coef = vmap.interpolate(f)
    for m, t in enumerate(vmap.mode_times()):
        vals = f(vmap.node_coords, t)
        got0 = coef[vmap.dof_index(np.arange(vmap.n_nodes), 0, m)]
        assert np.allclose(got0, vals[:, 0], atol=1e-14)
