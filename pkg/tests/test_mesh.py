import numpy as np
import pytest

from stokesxt.mesh import build_structured_mesh, build_time_partition, slab


def test_counts_2d():
    mesh = build_structured_mesh(2, [(-1, 1), (-1, 1)], 4)
    assert mesh.n_simplices == 128          # 8x8 squares, two triangles each
    assert mesh.n_vertices == 81


def test_counts_3d():
    mesh = build_structured_mesh(3, [(-1, 1), (-1, 1), (-0.75, 1.75)], 4)
    assert mesh.n_simplices == 3840         # 8*8*10 cubes, six tets each


def test_unit_square_minimal():
    mesh = build_structured_mesh(2, [(0, 1), (0, 1)], 1)
    assert mesh.n_simplices == 2
    assert abs(mesh.measures().sum() - 1.0) < 1e-14


def test_noncommensurate_box_rejected():
    with pytest.raises(ValueError, match="axis y"):
        build_structured_mesh(2, [(0, 1), (0, 1.1)], 4)


@pytest.mark.parametrize("dim,box,n_s", [
    (2, [(-1, 1), (-0.75, 1.25)], 4),
    (3, [(0, 1), (0, 1), (0, 1)], 2),
])
def test_mesh_invariants(dim, box, n_s):
    mesh = build_structured_mesh(dim, box, n_s)
    meas = mesh.measures()
    assert np.all(meas > 0)
    box_vol = np.prod([hi - lo for lo, hi in box])
    assert abs(meas.sum() - box_vol) < 1e-12 * box_vol

    # conformity: interior facets shared by exactly 2 simplices, boundary by 1
    counts = mesh.facets()
    assert set(counts.values()) <= {1, 2}
    bmask = mesh.boundary_vertex_mask()
    for f, c in counts.items():
        if c == 1:
            verts = mesh.vertices[list(f)]
            assert bmask[list(f)].all()
            # a boundary facet lies in a single box face
            on_face = False
            for ax in range(dim):
                for side in range(2):
                    if np.allclose(verts[:, ax], mesh.box[ax, side], atol=1e-12):
                        on_face = True
            assert on_face


def test_orientation_positive():
    for dim, box in [(2, [(0, 1), (0, 1)]), (3, [(0, 1), (0, 1), (0, 1)])]:
        mesh = build_structured_mesh(dim, box, 2)
        coords = mesh.simplex_coords()
        det = np.linalg.det(coords[:, 1:] - coords[:, :1])
        assert np.all(det > 0)


def test_time_partition():
    tp = build_time_partition(1.0, 4)
    assert np.allclose(tp.nodes, [0, 0.25, 0.5, 0.75, 1.0])
    tp = build_time_partition(1.0, 1)
    assert np.allclose(tp.nodes, [0, 1])
    tp = build_time_partition(2.0, 4)
    assert np.allclose(tp.nodes, [0, 0.5, 1.0, 1.5, 2.0])
    with pytest.raises(ValueError):
        build_time_partition(1.0, 0)


def test_slab_prisms():
    mesh = build_structured_mesh(2, [(0, 1), (0, 1)], 1)
    tp = build_time_partition(1.0, 4)
    s = slab(mesh, tp, 1)
    assert s.n_prisms == 2
    assert np.allclose(s.prism_measures(), 0.125)
    assert abs(s.prism_measures().sum() - 1.0 * 0.25) < 1e-14
    s_last = slab(mesh, tp, 4)
    assert s_last.t1 == tp.final_time
    with pytest.raises(ValueError):
        slab(mesh, tp, 0)
    with pytest.raises(ValueError):
        slab(mesh, tp, 5)


def test_slabs_tile_spacetime():
    mesh = build_structured_mesh(2, [(-1, 1), (0, 1)], 2)
    tp = build_time_partition(1.5, 3)
    total = sum(slab(mesh, tp, n).prism_measures().sum() for n in range(1, 4))
    assert abs(total - 2.0 * 1.5) < 1e-12 * 3.0


def test_summary_serializable():
    import json

    mesh = build_structured_mesh(2, [(0, 1), (0, 1)], 2)
    s = json.dumps(mesh.summary())
    assert "n_simplices" in s
