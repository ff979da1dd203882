import numpy as np
import pytest

from stokesxt.levelset import (
    CUT,
    NEG,
    POS,
    LevelSetField,
    cut_simplex,
    cut_spatial_simplex,
    decompose_cut_prism,
    decompositions_for_slab,
    interpolate_levelset,
    mean_curvature,
    quadrature_interface,
    quadrature_subdomain,
    uncut_decomposition,
)
from stokesxt.mesh import SpatialMesh, build_structured_mesh, build_time_partition, slab
from stokesxt.quadrature import simplex_measure


def unit_triangle_prism_slab():
    """Single reference triangle (0,0),(1,0),(0,1) over the slab (0,1)."""
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tris = np.array([[0, 1, 2]])
    mesh = SpatialMesh(2, np.array([[0.0, 1.0], [0.0, 1.0]]), np.array([1, 1]),
                       1.0, verts, tris)
    tp = build_time_partition(1.0, 1)
    return slab(mesh, tp, 1)


def field_linear(a, b, c):
    # phi = a*x + b*y + c*t + const packed in c if needed
    def phi(x, t):
        return a * x[..., 0] + b * x[..., 1] + np.asarray(c(t) if callable(c) else c * np.ones(()))

    return phi


def test_interpolate_sphere_value():
    ls = LevelSetField(lambda x, t: x[..., 0] ** 2 + x[..., 1] ** 2
                       + (x[..., 2] - t) ** 2 - 0.5)
    assert abs(ls(np.zeros(3), 0.0) - (-0.5)) < 1e-15


def test_interpolate_constant_all_pos():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    assert np.all(dls.bottom == 1.0) and np.all(dls.top == 1.0)
    assert dls.classify()[0] == POS


def test_interpolate_time_ramp():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: (t - 0.5) * np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    assert np.allclose(dls.bottom, -0.5)
    assert np.allclose(dls.top, 0.5)
    assert dls.classify()[0] == CUT


def test_classification_cases():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    dls.bottom = np.array([1.0, 1.0, 1.0]); dls.top = np.array([1.0, 1.0, 1.0])
    dls._classes = None
    assert dls.classify()[0] == POS
    dls.bottom = -np.ones(3); dls.top = np.ones(3); dls._classes = None
    assert dls.classify()[0] == CUT
    eps = 1e-3
    dls.bottom = -np.ones(3); dls.top = -eps * np.ones(3); dls._classes = None
    assert dls.classify()[0] == NEG
    # an exact zero counts as cut
    dls.top = np.array([0.0, -1.0, -1.0]); dls._classes = None
    assert dls.classify()[0] == CUT


def test_decompose_vertical_plane():
    # phi = x - 0.5 on the reference prism
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: x[..., 0] - 0.5)
    dls = interpolate_levelset(ls, s)
    dec = decompose_cut_prism(dls, 0)
    m_neg, m_pos = dec.side_measures()
    assert abs(m_neg - 0.375) < 1e-13
    assert abs(m_pos - 0.125) < 1e-13
    # interface: segment of length 1/2 for unit time, |nu_x| = 1
    rule = quadrature_interface(dec, order=2)
    assert abs(rule.weights.sum() - 0.5) < 1e-13
    assert np.allclose(rule.nu_x, 1.0, atol=1e-13)
    assert np.allclose(rule.normals, [1.0, 0.0], atol=1e-13)
    assert abs(rule.integrate_ds_dt(lambda p: np.ones(len(p))) - 0.5) < 1e-13


def test_decompose_time_slice():
    # phi = t - 0.5: neg measure 0.25, purely temporal normal
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: (t - 0.5) * np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    dec = decompose_cut_prism(dls, 0)
    m_neg, m_pos = dec.side_measures()
    assert abs(m_neg - 0.25) < 1e-13
    rule = quadrature_interface(dec, order=2)
    assert np.allclose(rule.nu_x, 0.0, atol=1e-13)
    assert abs(rule.integrate_ds_dt(lambda p: np.ones(len(p)))) < 1e-13
    # d-sigma measure of the slice equals the triangle area
    assert abs(rule.weights.sum() - 0.5) < 1e-13


def test_decompose_diagonal_exact_and_monte_carlo():
    # phi = x + t - 1 on the reference prism; exact neg measure 1/3
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: x[..., 0] + t - 1.0)
    dls = interpolate_levelset(ls, s)
    dec = decompose_cut_prism(dls, 0)
    m_neg, m_pos = dec.side_measures()
    assert abs((m_neg + m_pos) - 0.5) < 1e-13
    assert abs(m_neg - 1.0 / 3.0) < 1e-13

    rng = np.random.default_rng(42)
    n = 10 ** 6
    # uniform samples in triangle x (0,1)
    a = rng.random((n, 2))
    flip = a.sum(axis=1) > 1
    a[flip] = 1.0 - a[flip]
    t = rng.random(n)
    frac_neg = np.mean(a[:, 0] + t < 1.0)
    mc = 0.5 * frac_neg
    assert abs(mc - m_neg) < 3e-3


def test_normal_orientation_neg_to_pos():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: x[..., 0] - 0.5,
                       grad=lambda x, t: np.broadcast_to([1.0, 0.0], x.shape))
    dls = interpolate_levelset(ls, s)
    dec = decompose_cut_prism(dls, 0)
    rule = quadrature_interface(dec, order=1)
    eps = 1e-4
    shifted = rule.points[:, :2] + eps * rule.normals
    base = ls(rule.points[:, :2], rule.points[:, 2])
    moved = ls(shifted, rule.points[:, 2])
    assert np.all(moved > base)


def test_measure_conservation_randomized_linear():
    s = unit_triangle_prism_slab()
    rng = np.random.default_rng(7)
    for _ in range(200):
        a, b, c, d0 = rng.normal(size=4)
        ls = LevelSetField(lambda x, t, a=a, b=b, c=c, d0=d0:
                           a * x[..., 0] + b * x[..., 1] + c * t + d0)
        dls = interpolate_levelset(ls, s)
        if dls.classify()[0] != CUT:
            continue
        dec = decompose_cut_prism(dls, 0)
        m_neg, m_pos = dec.side_measures()
        assert abs(m_neg + m_pos - 0.5) < 1e-12 * 0.5


def test_subdomain_quadrature_values():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: x[..., 0] - 0.5)
    dls = interpolate_levelset(ls, s)
    dec = decompose_cut_prism(dls, 0)
    rule = quadrature_subdomain(dec, NEG, order=3)
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 0.375) < 1e-13
    # integrate x1 * t over the neg side, compare against Monte-Carlo
    val = np.sum(rule.weights * rule.points[:, 0] * rule.points[:, 2])
    rng = np.random.default_rng(3)
    n = 10 ** 6
    a = rng.random((n, 2))
    flip = a.sum(axis=1) > 1
    a[flip] = 1.0 - a[flip]
    t = rng.random(n)
    mask = a[:, 0] < 0.5
    mc = 0.5 * np.mean(a[mask[: n], 0][: mask.sum()] * t[mask])
    mc = 0.5 * np.mean(np.where(mask, a[:, 0] * t, 0.0))
    assert abs(val - mc) < 1e-3


def test_subdomain_quadrature_uncut():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    dec = uncut_decomposition(dls, 0)
    rule = quadrature_subdomain(dec, POS, order=2)
    val = np.sum(rule.weights * rule.points[:, 0])
    assert abs(val - 1.0 / 6.0) < 1e-14
    empty = quadrature_subdomain(dec, NEG, order=2)
    assert len(empty.weights) == 0


def test_quadrature_exactness_uncut_tensor():
    s = unit_triangle_prism_slab()
    ls = LevelSetField(lambda x, t: np.ones(x.shape[:-1]))
    dls = interpolate_levelset(ls, s)
    dec = uncut_decomposition(dls, 0)
    order = 4
    rule = quadrature_subdomain(dec, POS, order=order)
    # x^2 y^2 * t^4: space total degree 4, time degree 4
    val = np.sum(rule.weights * rule.points[:, 0] ** 2 * rule.points[:, 1] ** 2
                 * rule.points[:, 2] ** 4)
    exact = (2 * 2 * 1.0 / (2 + 2 + 2) / (2 + 2 + 1) / (2 + 1) / 2) / 5
    # int_T x^2 y^2 = 2!2!/(2+4)! = 4/720; int_0^1 t^4 = 1/5
    exact = (4.0 / 720.0) * (1.0 / 5.0)
    assert abs(val - exact) < 1e-13 * max(1.0, abs(exact))


def moving_circle_interface_measure(n_s, center, r2_of_t, t0, t1):
    mesh = build_structured_mesh(2, [(-1, 1), (-1, 1)], n_s)
    tp = build_time_partition(t1, 1)
    s = slab(mesh, tp, 1)
    s = type(s)(mesh, 1, t0, t1)
    ls = LevelSetField(lambda x, t: (x[..., 0] - center[0]) ** 2
                       + (x[..., 1] - center[1]) ** 2 - r2_of_t(t))
    dls = interpolate_levelset(ls, s)
    total = 0.0
    for e, dec in decompositions_for_slab(dls).items():
        rule = quadrature_interface(dec, order=3)
        total += np.sum(rule.weights * rule.nu_x)
    return total


def test_interface_measure_moving_circle_converges():
    # phi = x^2 + y^2 - (1/4 + t/4); ds dt measure = int 2*pi*sqrt(1/4+t/4) dt
    from scipy.integrate import quad

    exact, _ = quad(lambda t: 2 * np.pi * np.sqrt(0.25 + 0.25 * t), 0.0, 1.0)
    errs = []
    for n_s in (4, 8, 16, 32):
        got = moving_circle_interface_measure(n_s, (0.0, 0.0),
                                              lambda t: 0.25 + 0.25 * t, 0.0, 1.0)
        errs.append(abs(got - exact))
    eocs = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.isfinite(eocs))
    assert 1.8 <= eocs[-1] <= 2.2, (errs, eocs)


def test_subdomain_volume_moving_circle_converges():
    # disk area pi*R^2(t) integrated in time
    from scipy.integrate import quad

    exact, _ = quad(lambda t: np.pi * (0.25 + 0.25 * t), 0.0, 1.0)
    errs = []
    for n_s in (4, 8, 16, 32):
        mesh = build_structured_mesh(2, [(-1, 1), (-1, 1)], n_s)
        tp = build_time_partition(1.0, 1)
        s = slab(mesh, tp, 1)
        ls = LevelSetField(lambda x, t: x[..., 0] ** 2 + x[..., 1] ** 2
                           - (0.25 + 0.25 * t))
        dls = interpolate_levelset(ls, s)
        cls = dls.classify()
        vol = float(np.sum(mesh.measures()[cls == NEG]) * s.k)
        for e, dec in decompositions_for_slab(dls).items():
            m_neg, _ = dec.side_measures()
            vol += m_neg
        errs.append(abs(vol - exact))
    eocs = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert 1.8 <= eocs[-1] <= 2.2, (errs, eocs)


def test_cut_simplex_zero_vertex_facets_once():
    # triangle with values (-, 0, +): interface from zero vertex to cut point
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    neg, pos, iface = cut_simplex(verts, np.array([-1.0, 0.0, 1.0]))
    assert len(iface) == 1
    # phi = -1 + x + 2y: zero segment from the zero vertex (1,0) to (0, 1/2)
    seg = iface[0]
    assert np.allclose(sorted(seg[:, 0].tolist()), [0.0, 1.0])
    assert np.allclose(sorted(seg[:, 1].tolist()), [0.0, 0.5])
    m_neg = sum(simplex_measure(s[None])[0] for s in neg)
    m_pos = sum(simplex_measure(s[None])[0] for s in pos)
    assert abs(m_neg + m_pos - 0.5) < 1e-14
    # the (+,0,...) neighbour emits nothing
    _, _, iface_pos = cut_simplex(verts, np.array([1.0, 0.0, 1.0]))
    assert len(iface_pos) == 0


def test_cut_spatial_simplex():
    verts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    pieces = cut_spatial_simplex(verts, np.array([-1.0, 1.0, -1.0]), order=2)
    total = sum(w.sum() for _, _, w in pieces)
    assert abs(total - 0.5) < 1e-13
    signs = {s for s, _, _ in pieces}
    assert signs == {NEG, POS}


def test_mean_curvature_circle_and_sphere():
    ls2 = LevelSetField(
        lambda x, t: x[..., 0] ** 2 + x[..., 1] ** 2 - 0.25,
        grad=lambda x, t: 2.0 * x,
    )
    pt = np.array([0.5, 0.0])
    assert abs(mean_curvature(ls2, pt, 0.0) - 2.0) < 1e-6
    # paper-style sphere of radius 1/sqrt(2): kappa = 2/R = 2*sqrt(2)
    ls3 = LevelSetField(
        lambda x, t: x[..., 0] ** 2 + x[..., 1] ** 2 + (x[..., 2] - t) ** 2 - 0.5,
        grad=lambda x, t: 2.0 * np.stack(
            [x[..., 0], x[..., 1], x[..., 2] - t], axis=-1),
    )
    p3 = np.array([np.sqrt(0.5), 0.0, 0.0])
    assert abs(mean_curvature(ls3, p3, 0.0) - 2.0 * np.sqrt(2.0)) < 1e-5


def test_validate_nondegenerate():
    ls = LevelSetField(
        lambda x, t: x[..., 0] ** 2 + x[..., 1] ** 2 - 0.25,
        grad=lambda x, t: 2.0 * x,
    )
    assert ls.validate_nondegenerate([(-1, 1), (-1, 1)], 1.0)


def test_3d_prism_decomposition_plane():
    # tetrahedral prism in 4D space-time cut by x - 0.25
    mesh = build_structured_mesh(3, [(0, 1), (0, 1), (0, 1)], 1)
    tp = build_time_partition(1.0, 1)
    s = slab(mesh, tp, 1)
    ls = LevelSetField(lambda x, t: x[..., 0] - 0.25)
    dls = interpolate_levelset(ls, s)
    cls = dls.classify()
    vol_neg = float(np.sum(mesh.measures()[cls == NEG]) * s.k)
    for e in np.where(cls == CUT)[0]:
        dec = decompose_cut_prism(dls, int(e))
        m_neg, m_pos = dec.side_measures()
        meas_e = simplex_measure(mesh.simplex_coords(int(e))[None])[0] * s.k
        assert abs(m_neg + m_pos - meas_e) < 1e-12 * meas_e
        vol_neg += m_neg
    assert abs(vol_neg - 0.25) < 1e-12
