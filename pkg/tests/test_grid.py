import numpy as np
import pytest

from induction2d.basis import NodeSet1D
from induction2d.grid import (
    BoundaryKind,
    ConfigurationError,
    CornerField,
    ElementGrid,
    StaggeredField,
    exchange_or_fill_ghosts,
    pad_periodic,
    staggered_node_coords,
)


def rotating_exact(t):
    """Exact rotated-loop field about the domain centre (oracle sampling)."""
    a0, r0, cx, cy = 1e-3, 0.125, 0.75, 0.5

    def b0(x, y):
        r = np.hypot(x - cx, y - cy)
        inside = r < r0
        safe = np.where(r > 0, r, 1.0)
        return (
            np.where(inside, -a0 * (y - cy) / safe, 0.0),
            np.where(inside, a0 * (x - cx) / safe, 0.0),
        )

    def exact(x, y, tt):
        c, s = np.cos(tt), np.sin(tt)
        xr = 0.5 + c * (x - 0.5) + s * (y - 0.5)
        yr = 0.5 - s * (x - 0.5) + c * (y - 0.5)
        bx0, by0 = b0(xr, yr)
        return c * bx0 - s * by0, s * bx0 + c * by0

    return lambda x, y, tt=t: exact(x, y, tt)


def test_grid_spacing_and_area():
    g = ElementGrid(4, 8, 0.0, 2.0, -1.0, 1.0)
    assert g.dx == pytest.approx(0.5)
    assert g.dy == pytest.approx(0.25)
    assert g.area == pytest.approx(4.0)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ConfigurationError):
        ElementGrid(0, 4)
    with pytest.raises(ConfigurationError):
        ElementGrid(4, 4, 1.0, 0.0)


def test_element_of_corners_and_interior():
    g = ElementGrid(4, 4)
    assert g.element_of(0.0, 0.0) == ((0, 0), (0.0, 0.0))
    (ix, iy), (xi, eta) = g.element_of(0.3, 0.9)
    assert (ix, iy) == (1, 3)
    assert xi == pytest.approx(0.2, abs=1e-13)
    assert eta == pytest.approx(0.6, abs=1e-13)


def test_element_of_rejects_outside_points():
    g = ElementGrid(4, 4)
    with pytest.raises(ValueError):
        g.element_of(-0.1, 0.5)


def test_element_map_roundtrip():
    g = ElementGrid(7, 5, 0.0, 1.4, 0.2, 1.2)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = rng.uniform(g.x0, g.x1)
        y = rng.uniform(g.y0, g.y1)
        (ix, iy), (xi, eta) = g.element_of(x, y)
        assert g.x_faces[ix] + xi * g.dx == pytest.approx(x, abs=1e-14)
        assert g.y_faces[iy] + eta * g.dy == pytest.approx(y, abs=1e-14)


def test_axis_coords_share_faces_bitwise():
    g = ElementGrid(10, 10, 0.0, 1.0, 0.0, 1.0)
    nodes = NodeSet1D(3)
    xc = g.axis_coords(0, nodes.flux_nodes)
    assert np.array_equal(xc[:-1, -1], xc[1:, 0])
    xp = g.axis_coords(0, nodes.flux_nodes, padded=True)
    assert np.array_equal(xp[1:-1], xc)


def test_periodic_ghosts_single_element_wraps_to_self():
    g = ElementGrid(1, 1)
    f = StaggeredField.zeros(2, g)
    rng = np.random.default_rng(0)
    f.bx[:] = rng.standard_normal(f.bx.shape)
    f.by[:] = rng.standard_normal(f.by.shape)
    gh = exchange_or_fill_ghosts(f, g)
    for px in range(3):
        for py in range(3):
            assert np.array_equal(gh.bx[px, py], f.bx[0, 0])
            assert np.array_equal(gh.by[px, py], f.by[0, 0])


def test_periodic_ghosts_constant_field():
    g = ElementGrid(3, 2)
    f = StaggeredField.zeros(1, g)
    f.bx[:] = 4.25
    f.by[:] = -1.5
    gh = exchange_or_fill_ghosts(f, g)
    assert np.all(gh.bx == 4.25)
    assert np.all(gh.by == -1.5)


def test_ghost_fill_is_idempotent_and_conservative():
    g = ElementGrid(4, 4)
    f = StaggeredField.zeros(2, g)
    rng = np.random.default_rng(1)
    f.bx[:] = rng.standard_normal(f.bx.shape)
    f.by[:] = rng.standard_normal(f.by.shape)
    total_before = f.bx.sum() + f.by.sum()
    g1 = exchange_or_fill_ghosts(f, g)
    g2 = exchange_or_fill_ghosts(f, g)
    assert np.array_equal(g1.bx, g2.bx) and np.array_equal(g1.by, g2.by)
    assert f.bx.sum() + f.by.sum() == total_before


def test_dirichlet_ghosts_sample_exact_solution():
    g = ElementGrid(4, 4, boundary=BoundaryKind.DIRICHLET_EXACT)
    nodes = NodeSet1D(2)
    exact = rotating_exact(0.0)
    f = StaggeredField.zeros(2, g)
    gh = exchange_or_fill_ghosts(f, g, nodes, exact, t=0.0)
    (bx_x, bx_y), _ = staggered_node_coords(g, nodes, padded=True)
    # direct sampling oracle on a ghost element in the ring
    px, py = 0, 2
    X, Y = np.meshgrid(bx_x[px], bx_y[py], indexing="ij")
    bx_ref, _ = exact(X, Y, 0.0)
    assert np.array_equal(gh.bx[px, py], bx_ref)
    # interior untouched
    assert np.array_equal(gh.bx[1:-1, 1:-1], f.bx)


def test_dirichlet_without_evaluator_is_config_error():
    g = ElementGrid(2, 2, boundary=BoundaryKind.DIRICHLET_EXACT)
    f = StaggeredField.zeros(1, g)
    with pytest.raises(ConfigurationError):
        exchange_or_fill_ghosts(f, g, NodeSet1D(1), None)


def test_pad_periodic_wraps_both_axes():
    a = np.arange(12.0).reshape(3, 4)
    p = pad_periodic(a)
    assert p.shape == (5, 6)
    assert p[0, 1] == a[-1, 0] and p[-1, -1] == a[0, 0]


def test_staggered_shapes_validated():
    with pytest.raises(ValueError):
        StaggeredField(2, np.zeros((2, 2, 3, 3)), np.zeros((2, 2, 3, 4)))
    with pytest.raises(ValueError):
        CornerField(2, np.zeros((2, 2, 3, 4)))


def test_pack_unpack_roundtrip():
    g = ElementGrid(3, 2)
    f = StaggeredField.zeros(1, g)
    rng = np.random.default_rng(5)
    f.bx[:] = rng.standard_normal(f.bx.shape)
    f.by[:] = rng.standard_normal(f.by.shape)
    vec = f.pack()
    back = f.unpack_like(vec)
    assert np.array_equal(back.bx, f.bx) and np.array_equal(back.by, f.by)
