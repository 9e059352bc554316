from fractions import Fraction

import numpy as np
import pytest

from induction2d.analysis import divergence_norm, magnetic_energy
from induction2d.ctsd import VelocityField
from induction2d.grid import ConfigurationError, ElementGrid
from induction2d.rkdg import (
    CleaningParams,
    DgScheme,
    DgState,
    LdfBasis,
    LdfScheme,
    LdfState,
    UnsupportedOrderError,
    _legendre_matrix,
    cfl_dt_dg,
    divclean_step,
    ssp_order_for_degree,
    ssp_rk_step,
)


def loop_b(a0=1e-3, r0=0.25, cx=0.5, cy=0.5):
    def b(x, y):
        r = np.hypot(x - cx, y - cy)
        inside = r < r0
        safe = np.where(r > 0, r, 1.0)
        return (
            np.where(inside, -a0 * (y - cy) / safe, 0.0),
            np.where(inside, a0 * (x - cx) / safe, 0.0),
        )

    return b


def smooth_b(x, y):
    return np.cos(2 * np.pi * y), -np.cos(2 * np.pi * x)


def dg_scheme(n=1, N=8, ncomp=2, velocity=None):
    g = ElementGrid(N, N)
    v = velocity or VelocityField.constant(1.0, 1.0)
    return DgScheme(g, n, v, ncomp=ncomp)


# ---------------------------------------------------------------- projection

def test_projection_of_constant_field_is_single_mode():
    sch = dg_scheme(2, 4)
    u = sch.project(lambda x, y: (np.ones_like(x), np.zeros_like(y)))
    assert u[:, :, 0, 0, 0] == pytest.approx(1.0, abs=1e-13)
    mask = np.ones_like(u, dtype=bool)
    mask[:, :, 0, 0, 0] = False
    assert np.max(np.abs(u[mask])) < 1e-13


def test_projection_is_exact_for_polynomials_in_space():
    sch = dg_scheme(2, 3)
    g = sch.grid

    def b(x, y):
        xi = 2 * (x - np.floor(x * g.Nx) / g.Nx) * g.Nx - 1
        return xi**2 - 0.5, 0.0 * y

    u = sch.project(b)
    back = DgState(u, g, 2)
    xh = np.linspace(0.0, 1.0, 7)
    bx, _ = back.eval_b(xh, xh)
    exact = ((2 * xh - 1) ** 2 - 0.5)[None, None, :, None] + 0.0 * bx
    assert np.max(np.abs(bx - exact)) < 1e-12


def test_ldf_projection_recovers_member_of_space():
    g = ElementGrid(4, 4)
    sch = LdfScheme(g, 1, VelocityField.constant(1.0, 1.0))
    basis = sch.basis

    def b(x, y):
        xi = 2 * (x * g.Nx - np.floor(x * g.Nx)) - 1
        eta = 2 * (y * g.Ny - np.floor(y * g.Ny)) - 1
        bx3 = basis.elements[2].component("x", xi, eta)
        bx5 = basis.elements[4].component("x", xi, eta)
        by5 = basis.elements[4].component("y", xi, eta)
        return 0.3 * bx3 + 0.5 * bx5, 0.5 * by5

    c = sch.project(b)
    expected = np.zeros(basis.size)
    expected[2], expected[4] = 0.3, 0.5
    assert np.max(np.abs(c - expected[None, None, :])) < 1e-12


def test_loop_projection_close_to_dense_least_squares():
    # single element containing the whole rim; oracle = weighted lstsq on
    # a dense uniform grid, the discrete minimiser of the same error
    n, a0 = 1, 1e-3
    g = ElementGrid(1, 1)
    sch = DgScheme(g, n, VelocityField.constant(1.0, 1.0))
    u = sch.project(loop_b(a0), num_quad=50)
    xs = (np.arange(50) + 0.5) / 50
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    bx_exact, _ = loop_b(a0)(X, Y)
    V = _legendre_matrix(n + 1, 2 * xs - 1)
    design = np.einsum("ia,jb->ijab", V, V).reshape(2500, (n + 1) ** 2)
    coef, *_ = np.linalg.lstsq(design, bx_exact.ravel(), rcond=None)
    lstsq_err = np.linalg.norm(design @ coef - bx_exact.ravel())
    proj_err = np.linalg.norm(design @ u[0, 0, 0].ravel() - bx_exact.ravel())
    assert proj_err <= 1.05 * lstsq_err


# ------------------------------------------------------------------ DG RHS

def test_constant_state_is_steady_dg():
    sch = dg_scheme(2, 5)
    u = sch.project(lambda x, y: (0.4 + 0 * x, -1.1 + 0 * y))
    rate = sch.rhs(u)
    assert np.max(np.abs(rate)) < 1e-13


def dg1d_advection_rhs(modes, v, dx):
    """Independent 1D modal DG RHS for du/dt + d(vu)/dx = 0, upwind flux."""
    N, m = modes.shape
    q = m + 1
    xq, wq = np.polynomial.legendre.leggauss(q)
    V = _legendre_matrix(m, xq)
    Vd = _legendre_matrix(m, xq, True)
    Pp = _legendre_matrix(m, np.array([1.0]))[0]
    Pm = _legendre_matrix(m, np.array([-1.0]))[0]
    uq = modes @ V.T                      # (N, q)
    vol = ((v * uq * wq) @ Vd) / dx       # (1/dx) * sum w v u theta'
    # upwind flux at faces (v > 0): value from the left element's right trace
    trace_r = modes @ Pp
    fhat = v * np.roll(trace_r, 1)        # face i = left face of element i
    rate = vol - (np.roll(fhat, -1)[:, None] * Pp[None, :]
                  - fhat[:, None] * Pm[None, :]) / dx
    return rate


def test_dg_rhs_reduces_to_1d_advection():
    # y-independent By with Bx = 0 and v = (1, 0) advects in x only
    n, N = 2, 6
    g = ElementGrid(N, N)
    sch = DgScheme(g, n, VelocityField.constant(1.0, 0.0))
    rng = np.random.default_rng(8)
    modes_1d = rng.standard_normal((N, n + 1))
    u = np.zeros((N, N, 2, n + 1, n + 1))
    u[:, :, 1, :, 0] = modes_1d[:, None, :]
    rate = sch.rhs(u)
    oracle = dg1d_advection_rhs(modes_1d, 1.0, g.dx)
    assert np.max(np.abs(rate[:, :, 1, :, 0] - oracle[:, None, :])) < 1e-12
    mask = np.ones_like(rate, dtype=bool)
    mask[:, :, 1, :, 0] = False
    assert np.max(np.abs(rate[mask])) < 1e-12


def test_dg_advection_conserves_mean_field():
    sch = dg_scheme(2, 8)
    u = sch.project(loop_b())
    dt = cfl_dt_dg(sch.grid, np.sqrt(2.0), 2)
    total0 = u[:, :, :, 0, 0].sum(axis=(0, 1))
    u1 = ssp_rk_step(u, sch.rhs, dt, 3)
    total1 = u1[:, :, :, 0, 0].sum(axis=(0, 1))
    assert np.max(np.abs(total1 - total0)) < 1e-12


@pytest.mark.parametrize("n", [1, 2])
def test_dg_smooth_convergence(n):
    errors = []
    sizes = [4, 8, 16]
    for N in sizes:
        g = ElementGrid(N, N)
        sch = DgScheme(g, n, VelocityField.constant(1.0, 1.0))
        u = sch.project(smooth_b)
        t, t_end = 0.0, 0.25
        order = ssp_order_for_degree(n)
        while t < t_end - 1e-12:
            dt = cfl_dt_dg(g, np.sqrt(2.0), n, t=t, t_end=t_end)
            u = ssp_rk_step(u, sch.rhs, dt, order, t0=t)
            t += dt
        state = DgState(u, g, n)
        xh = np.linspace(0.02, 0.98, 5)
        bx, _ = state.eval_b(xh, xh)
        X = g.x_faces[:-1, None] + xh[None, :] * g.dx
        Y = g.y_faces[:-1, None] + xh[None, :] * g.dy
        exact = np.cos(2 * np.pi * (Y[None, :, None, :] - t_end)) + 0.0 * X[:, None, :, None]
        errors.append(np.mean(np.abs(bx - exact)))
    slope = -np.polyfit(np.log(sizes), np.log(errors), 1)[0]
    assert slope >= n + 0.7


# ---------------------------------------------------------------------- LDF

def test_ldf_basis_counts():
    assert LdfBasis(1).size == 5
    assert LdfBasis(2).size == 9
    assert LdfBasis(3).size == 14
    with pytest.raises(UnsupportedOrderError):
        LdfBasis(4)


def test_ldf_basis_is_orthonormal():
    for n in (1, 2, 3):
        gram = LdfBasis(n).gram_matrix()
        assert np.max(np.abs(gram - np.eye(gram.shape[0]))) < 1e-12


def test_ldf_basis_symbolic_divergence_is_zero():
    for element in LdfBasis(3).elements:
        assert element.symbolic_divergence() == {}


def test_ldf_symbolic_divergence_catches_bad_element():
    from induction2d.rkdg import LdfElement

    bad = LdfElement(1.0, {(1, 0): Fraction(1)}, {})
    assert bad.symbolic_divergence() == {(0, 0): Fraction(1)}


def test_ldf_constant_state_is_steady():
    g = ElementGrid(5, 5)
    sch = LdfScheme(g, 1, VelocityField.constant(1.0, 1.0))
    c = sch.project(lambda x, y: (0.6 + 0 * x, -0.2 + 0 * y))
    rate = sch.rhs(c)
    assert np.max(np.abs(rate)) < 1e-13


def test_ldf_state_has_zero_volume_divergence():
    g = ElementGrid(4, 4)
    sch = LdfScheme(g, 2, VelocityField.constant(1.0, 1.0))
    c = sch.project(loop_b())
    norm = divergence_norm(LdfState(c, g, 2))
    scale = max(np.max(np.abs(c)), 1e-3)
    assert norm.volume <= 1e-12 * scale
    assert norm.surface > 0.0


def test_ldf_requires_square_elements():
    g = ElementGrid(4, 8, 0.0, 1.0, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        LdfScheme(g, 1, VelocityField.constant(1.0, 1.0))


# ----------------------------------------------------------------- cleaning

def test_divclean_pure_damping():
    sch = dg_scheme(1, 4, ncomp=3)
    u = np.zeros((4, 4, 3, 2, 2))
    u[:, :, 2, 0, 0] = 0.8  # uniform psi, zero B
    params = CleaningParams(c_h=2.0, c_p2=0.5)
    dt = 0.01
    out = divclean_step(u, sch, params, dt, order=2)
    expected = 0.8 * np.exp(-(params.c_h**2 / params.c_p2) * dt)
    assert np.max(np.abs(out[:, :, 2, 0, 0] - expected)) < 1e-13
    assert np.max(np.abs(out[:, :, :2])) < 1e-14


def test_divclean_leaves_constant_divfree_state_alone():
    sch = dg_scheme(1, 4, ncomp=3)
    u = np.zeros((4, 4, 3, 2, 2))
    u[:, :, 0, 0, 0] = 1.0
    u[:, :, 1, 0, 0] = -2.0
    params = CleaningParams.defaults(vmax=np.sqrt(2.0), dx=sch.grid.dx)
    out = divclean_step(u, sch, params, 0.005, order=2)
    assert np.max(np.abs(out - u)) < 1e-13


def test_cleaning_params_defaults_match_prescription():
    p = CleaningParams.defaults(vmax=np.sqrt(2.0), dx=1.0 / 32)
    assert p.c_h == pytest.approx(2 * np.sqrt(2.0), abs=1e-15)
    assert p.c_p2 == pytest.approx(0.8 * 2 * np.sqrt(2.0) / 32, abs=1e-15)
    with pytest.raises(ConfigurationError):
        CleaningParams(c_h=-1.0, c_p2=1.0)


def test_divclean_damps_seeded_divergence_error():
    # seed a non-solenoidal perturbation; cleaning must shrink the norm
    # faster than the plain scheme
    n, N = 1, 8
    g = ElementGrid(N, N)
    v = VelocityField.constant(1.0, 1.0)
    clean = DgScheme(g, n, v, ncomp=3)
    plain = DgScheme(g, n, v, ncomp=2)
    rng = np.random.default_rng(12)
    u3 = np.zeros((N, N, 3, 2, 2))
    u3[:, :, :2] = 1e-3 * rng.standard_normal((N, N, 2, 2, 2))
    u2 = u3[:, :, :2].copy()
    params = CleaningParams.defaults(np.sqrt(2.0), g.dx)
    dt = cfl_dt_dg(g, np.sqrt(2.0), n, c_h=params.c_h)
    norm0 = divergence_norm(DgState(u2, g, n))
    for _ in range(60):
        u3 = divclean_step(u3, clean, params, dt, order=2)
        u2 = ssp_rk_step(u2, plain.rhs, dt, 2)
    norm_clean = divergence_norm(DgState(u3[:, :, :2], g, n))
    norm_plain = divergence_norm(DgState(u2, g, n))
    assert norm_clean.volume < norm_plain.volume
    assert norm_clean.volume < norm0.volume


# ------------------------------------------------------------------- SSP-RK

def test_ssp_zero_rhs_identity():
    # identity up to the rounding of the convex-combination coefficients
    u = np.array([1.0, 2.0, 3.0])
    for order in (2, 3, 4):
        out = ssp_rk_step(u, lambda w, t: np.zeros_like(w), 0.3, order)
        assert np.max(np.abs(out - u)) < 3e-15


def test_ssp3_linear_amplification_is_cubic_taylor():
    z = 0.1
    out = ssp_rk_step(np.array(1.0), lambda u, t: z * u, 1.0, 3)
    assert float(out) == pytest.approx(1 + z + z**2 / 2 + z**3 / 6, abs=1e-15)


def test_ssp2_linear_amplification_is_quadratic_taylor():
    z = -0.2
    out = ssp_rk_step(np.array(1.0), lambda u, t: z * u, 1.0, 2)
    assert float(out) == pytest.approx(1 + z + z**2 / 2, abs=1e-15)


def test_ssp4_order_on_nonautonomous_ode():
    # u' = cos t, u(0) = 0, exact u = sin t
    errs, dts = [], [0.2, 0.1, 0.05, 0.025]
    for dt in dts:
        u, t = np.array(0.0), 0.0
        while t < 1.0 - 1e-12:
            step = min(dt, 1.0 - t)
            u = ssp_rk_step(u, lambda w, s: np.array(np.cos(s)), step, 4, t0=t)
            t += step
        errs.append(abs(float(u) - np.sin(1.0)))
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.2)


def test_ssp_rejects_unsupported_order():
    with pytest.raises(UnsupportedOrderError):
        ssp_rk_step(np.array(1.0), lambda u, t: u, 0.1, 5)


def test_ssp_order_for_degree_caps():
    assert [ssp_order_for_degree(n) for n in range(5)] == [2, 2, 3, 4, 4]


# ----------------------------------------------------------------- time step

def test_cfl_dg_formula():
    g = ElementGrid(128, 128)
    dt = cfl_dt_dg(g, np.sqrt(2.0), 1, cfl=0.8)
    assert dt == pytest.approx(0.8 / 3 * (1 / 128) / np.sqrt(2.0), abs=1e-15)
    assert cfl_dt_dg(g, 1.0, 0) == pytest.approx(0.8 / 128)


def test_cfl_dg_uses_cleaning_speed_when_larger():
    # the GLM waves sweep both axes at c_h, hence the doubled speed
    g = ElementGrid(32, 32)
    vmax, c_h = np.sqrt(2.0), 2 * np.sqrt(2.0)
    dt = cfl_dt_dg(g, vmax, 2, c_h=c_h)
    assert dt == pytest.approx(0.8 / 5 * (1 / 32) / (2 * c_h), abs=1e-15)


def test_cfl_dg_rejects_zero_velocity():
    with pytest.raises(ConfigurationError):
        cfl_dt_dg(ElementGrid(4, 4), 0.0, 1)


# ------------------------------------------------------------- state adapters

def test_dg_state_energy_of_projected_smooth_field():
    sch = dg_scheme(3, 8)
    u = sch.project(smooth_b)
    state = DgState(u, sch.grid, 3)
    assert magnetic_energy(state) == pytest.approx(0.5, abs=1e-4)
