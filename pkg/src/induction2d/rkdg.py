"""Modal RKDG comparison schemes for the induction equation.

Three variants share the weak-form machinery on tensor Legendre modes over
the reference square [-1,1]^2 (orthonormal under the area-averaged inner
product):

* traditional RKDG on the divergence form dB/dt + div(v (x) B - B (x) v) = 0,
* the locally divergence-free (LDF) variant whose vector basis elements
  are curls of scalar polynomials, so the element-wise divergence is a
  polynomial identity zero,
* divergence cleaning (GLM): the induction step, a coupled (B, psi) wave
  step at speed c_h, and exact damping of psi.

Interface fluxes upwind componentwise in the face-normal velocity (the
exact Riemann solution of the linear system); the cleaning subsystem uses
its exact two-wave solution at speed c_h. Periodic boundaries only, and
no slope limiters anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import BoundaryKind, ConfigurationError, ElementGrid


class UnsupportedOrderError(ValueError):
    pass


# ----------------------------------------------------------------- modal basis

def _legendre_matrix(nmodes: int, x: np.ndarray, deriv: bool = False) -> np.ndarray:
    """Values (or xi-derivatives) of sqrt(2k+1) P_k at points on [-1,1]."""
    out = np.empty((x.size, nmodes))
    for k in range(nmodes):
        c = np.zeros(k + 1)
        c[k] = np.sqrt(2 * k + 1)
        series = np.polynomial.legendre.Legendre(c)
        out[:, k] = (series.deriv()(x) if deriv else series(x))
    return out


# ------------------------------------------------------------------ LDF basis

@dataclass(frozen=True)
class LdfElement:
    """One vector basis element: scale * (sum cx x^i y^j, sum cy x^i y^j)."""

    scale: float
    cx: dict
    cy: dict

    def component(self, which: str, X, Y):
        coeffs = self.cx if which == "x" else self.cy
        out = np.zeros(np.broadcast(X, Y).shape)
        for (i, j), c in coeffs.items():
            out += float(c) * X**i * Y**j
        return self.scale * out

    def component_deriv(self, which: str, axis: str, X, Y):
        coeffs = self.cx if which == "x" else self.cy
        out = np.zeros(np.broadcast(X, Y).shape)
        for (i, j), c in coeffs.items():
            if axis == "x" and i > 0:
                out += float(c) * i * X ** (i - 1) * Y**j
            elif axis == "y" and j > 0:
                out += float(c) * j * X**i * Y ** (j - 1)
        return self.scale * out

    def symbolic_divergence(self) -> dict:
        """d(cx)/dx + d(cy)/dy with exact rational arithmetic."""
        div: dict = {}
        for (i, j), c in self.cx.items():
            if i > 0:
                key = (i - 1, j)
                div[key] = div.get(key, Fraction(0)) + Fraction(c) * i
        for (i, j), c in self.cy.items():
            if j > 0:
                key = (i, j - 1)
                div[key] = div.get(key, Fraction(0)) + Fraction(c) * j
        return {k: v for k, v in div.items() if v != 0}


def _F(a, b=1):
    return Fraction(a, b)


_LDF_TABLE = [
    # degree 0
    LdfElement(1.0, {(0, 0): _F(1)}, {}),
    LdfElement(1.0, {}, {(0, 0): _F(1)}),
    # degree 1
    LdfElement(np.sqrt(3.0), {(0, 1): _F(1)}, {}),
    LdfElement(np.sqrt(3.0), {}, {(1, 0): _F(1)}),
    LdfElement(np.sqrt(1.5), {(1, 0): _F(1)}, {(0, 1): _F(-1)}),
    # degree 2
    LdfElement(np.sqrt(30.0), {(2, 0): _F(1, 4), (0, 0): _F(-1, 12)}, {(1, 1): _F(-1, 2)}),
    LdfElement(np.sqrt(30.0), {(1, 1): _F(-1, 2)}, {(0, 2): _F(1, 4), (0, 0): _F(-1, 12)}),
    LdfElement(np.sqrt(5.0), {(0, 2): _F(3, 2), (0, 0): _F(-1, 2)}, {}),
    LdfElement(np.sqrt(5.0), {}, {(2, 0): _F(3, 2), (0, 0): _F(-1, 2)}),
    # degree 3
    LdfElement(np.sqrt(3486.0) / 166.0,
               {(3, 0): _F(5), (1, 0): _F(-4)},
               {(2, 1): _F(-15), (0, 1): _F(4)}),
    LdfElement(np.sqrt(30.0) / 4.0,
               {(2, 1): _F(3), (0, 1): _F(-1)},
               {(1, 2): _F(-3), (1, 0): _F(1)}),
    LdfElement(np.sqrt(7.0) / 2.0, {(0, 3): _F(5), (0, 1): _F(-3)}, {}),
    LdfElement(np.sqrt(7.0) / 2.0, {}, {(3, 0): _F(5), (1, 0): _F(-3)}),
    LdfElement(np.sqrt(165585.0) / 1824.0,
               {(3, 0): _F(-56, 83), (1, 2): _F(-24), (1, 0): _F(576, 83)},
               {(0, 3): _F(8), (2, 1): _F(168, 83), (0, 1): _F(-576, 83)}),
]

_LDF_COUNT = {0: 2, 1: 5, 2: 9, 3: 14}


class LdfBasis:
    """Orthonormal locally divergence-free vector basis, tabulated to n = 3."""

    def __init__(self, degree: int):
        if degree > 3:
            raise UnsupportedOrderError(
                "the divergence-free basis is tabulated through degree 3 only"
            )
        self.degree = degree
        self.elements = _LDF_TABLE[: _LDF_COUNT[degree]]
        self.size = len(self.elements)

    def eval_components(self, X, Y):
        """(bx, by) arrays of shape (size,) + broadcast(X, Y).shape."""
        bx = np.stack([e.component("x", X, Y) for e in self.elements])
        by = np.stack([e.component("y", X, Y) for e in self.elements])
        return bx, by

    def eval_derivs(self, X, Y):
        dbx_dx = np.stack([e.component_deriv("x", "x", X, Y) for e in self.elements])
        dbx_dy = np.stack([e.component_deriv("x", "y", X, Y) for e in self.elements])
        dby_dx = np.stack([e.component_deriv("y", "x", X, Y) for e in self.elements])
        dby_dy = np.stack([e.component_deriv("y", "y", X, Y) for e in self.elements])
        return dbx_dx, dbx_dy, dby_dx, dby_dy

    def gram_matrix(self, q: int = 12) -> np.ndarray:
        """Area-averaged inner product (1/4) int b_i . b_j over [-1,1]^2."""
        x, w = np.polynomial.legendre.leggauss(q)
        X, Y = np.meshgrid(x, x, indexing="ij")
        W = w[:, None] * w[None, :]
        bx, by = self.eval_components(X, Y)
        return 0.25 * np.einsum("pij,qij,ij->pq", bx, bx, W, optimize=True) + \
            0.25 * np.einsum("pij,qij,ij->pq", by, by, W, optimize=True)

    def check_orthonormal(self, tol: float = 1e-12):
        gram = self.gram_matrix()
        err = np.max(np.abs(gram - np.eye(self.size)))
        if err > tol:
            raise AssertionError(f"divergence-free basis fails orthonormality by {err:.2e}")


# -------------------------------------------------------------- linear fluxes

def _induction_flux_x(bx, by, vx, vy):
    """x-direction flux of (Bx, By): (0, vx By - vy Bx)."""
    return np.zeros_like(bx), vx * by - vy * bx


def _induction_flux_y(bx, by, vx, vy):
    return vy * bx - vx * by, np.zeros_like(by)


def _upwind(fl, fr, vn):
    return np.where(vn > 0.0, fl, np.where(vn < 0.0, fr, 0.5 * (fl + fr)))


# ----------------------------------------------------------------- DG schemes

class DgScheme:
    """Traditional modal RKDG on the divergence form (plus psi transport
    when cleaning is active). Coefficients are arrays (Nx, Ny, C, m, m)."""

    def __init__(self, grid: ElementGrid, degree: int, velocity,
                 ncomp: int = 2):
        if grid.boundary is not BoundaryKind.PERIODIC:
            raise ConfigurationError("the DG comparison schemes run on periodic grids")
        self.grid = grid
        self.degree = degree
        self.velocity = velocity
        self.ncomp = ncomp
        n = degree
        m = n + 1
        q = n + 2
        self.nmodes = m
        xq, wq = np.polynomial.legendre.leggauss(q)
        self.xq, self.wq = xq, wq
        self.V = _legendre_matrix(m, xq)           # (q, m)
        self.Vd = _legendre_matrix(m, xq, True)
        self.Pp = _legendre_matrix(m, np.array([1.0]))[0]
        self.Pm = _legendre_matrix(m, np.array([-1.0]))[0]
        # velocity at volume quadrature points
        xv = grid.x_faces[:-1, None] + (xq[None, :] + 1) * 0.5 * grid.dx
        yv = grid.y_faces[:-1, None] + (xq[None, :] + 1) * 0.5 * grid.dy
        X = xv[:, None, :, None]
        Y = yv[None, :, None, :]
        vx, vy = velocity(X + 0.0 * Y, Y + 0.0 * X)
        shape = (grid.Nx, grid.Ny, q, q)
        self.vx_vol = np.broadcast_to(vx, shape)
        self.vy_vol = np.broadcast_to(vy, shape)
        # velocity at face quadrature points
        Xf = grid.x_faces[:, None, None]
        vxf, vyf = velocity(Xf + 0.0 * yv[None, :, :], yv[None, :, :] + 0.0 * Xf)
        self.v_face_x = (np.broadcast_to(vxf, (grid.Nx + 1, grid.Ny, q)),
                         np.broadcast_to(vyf, (grid.Nx + 1, grid.Ny, q)))
        Yf = grid.y_faces[None, :, None]
        vxf, vyf = velocity(xv[:, None, :] + 0.0 * Yf, Yf + 0.0 * xv[:, None, :])
        self.v_face_y = (np.broadcast_to(vxf, (grid.Nx, grid.Ny + 1, q)),
                         np.broadcast_to(vyf, (grid.Nx, grid.Ny + 1, q)))

    # ------------------------------------------------------------ projection

    def project(self, b_eval, num_quad: int | None = None) -> np.ndarray:
        """L2 projection of analytic (Bx, By[, psi=0]) onto the modal basis.

        Functions already in the space are projected exactly at the default
        quadrature (n+2 points per direction). Discontinuous data aliases
        at that order; pass a larger `num_quad` to approach the true L2
        minimiser.
        """
        q = num_quad or (self.degree + 2)
        xq, wq = np.polynomial.legendre.leggauss(q)
        V = _legendre_matrix(self.nmodes, xq)
        g = self.grid
        xv = g.x_faces[:-1, None] + (xq[None, :] + 1) * 0.5 * g.dx
        yv = g.y_faces[:-1, None] + (xq[None, :] + 1) * 0.5 * g.dy
        X = xv[:, None, :, None] + 0.0 * yv[None, :, None, :]
        Y = yv[None, :, None, :] + 0.0 * xv[:, None, :, None]
        bx, by = b_eval(X, Y)
        u = np.zeros((g.Nx, g.Ny, self.ncomp, self.nmodes, self.nmodes))
        w2 = wq[:, None] * wq[None, :]
        u[:, :, 0] = 0.25 * np.einsum("xyij,ij,ia,jb->xyab", bx, w2, V, V, optimize=True)
        u[:, :, 1] = 0.25 * np.einsum("xyij,ij,ia,jb->xyab", by, w2, V, V, optimize=True)
        return u

    # ----------------------------------------------------------- weak forms

    def _traces(self, u):
        """Element-boundary traces at face quadrature points."""
        right = (self.Pp @ u) @ self.V.T
        left = (self.Pm @ u) @ self.V.T
        top = (u @ self.Pp) @ self.V.T
        bottom = (u @ self.Pm) @ self.V.T
        return left, right, bottom, top

    def _face_states(self, u):
        """Upwind-ready (uL, uR) on vertical and (uB, uT) on horizontal faces."""
        left, right, bottom, top = self._traces(u)
        uL = np.roll(right, 1, axis=0)   # face fx owned by element fx-1
        uR = left
        uB = np.roll(top, 1, axis=1)
        uT = bottom
        # arrays indexed by face: vertical faces fx = 0..Nx-1 plus wrap copy
        return uL, uR, uB, uT

    def rhs(self, u: np.ndarray, t: float = 0.0) -> np.ndarray:
        """Semi-discrete divergence-form RHS; psi (component 2) is inert."""
        g = self.grid
        w2 = self.wq[:, None] * self.wq[None, :]
        vals = (self.V @ u[:, :, :2]) @ self.V.T
        bx, by = vals[:, :, 0], vals[:, :, 1]
        fx_bx, fx_by = _induction_flux_x(bx, by, self.vx_vol, self.vy_vol)
        fy_bx, fy_by = _induction_flux_y(bx, by, self.vx_vol, self.vy_vol)
        rate = np.zeros_like(u)
        rate[:, :, 0] = (
            self.Vd.T @ (w2 * fx_bx) @ self.V / (2 * g.dx)
            + self.V.T @ (w2 * fy_bx) @ self.Vd / (2 * g.dy)
        )
        rate[:, :, 1] = (
            self.Vd.T @ (w2 * fx_by) @ self.V / (2 * g.dx)
            + self.V.T @ (w2 * fy_by) @ self.Vd / (2 * g.dy)
        )
        uL, uR, uB, uT = self._face_states(u)
        vxf, vyf = self.v_face_x[0][:-1], self.v_face_x[1][:-1]
        fL = _induction_flux_x(uL[:, :, 0], uL[:, :, 1], vxf, vyf)
        fR = _induction_flux_x(uR[:, :, 0], uR[:, :, 1], vxf, vyf)
        fhat_x = np.stack([_upwind(a, b, vxf) for a, b in zip(fL, fR)], axis=2)
        vxf, vyf = self.v_face_y[0][:, :-1], self.v_face_y[1][:, :-1]
        fB = _induction_flux_y(uB[:, :, 0], uB[:, :, 1], vxf, vyf)
        fT = _induction_flux_y(uT[:, :, 0], uT[:, :, 1], vxf, vyf)
        fhat_y = np.stack([_upwind(a, b, vyf) for a, b in zip(fB, fT)], axis=2)
        self._accumulate_surface(rate, fhat_x, fhat_y, components=(0, 1))
        return rate

    def _accumulate_surface(self, rate, fhat_x, fhat_y, components):
        """Subtract the surface terms given single-valued face fluxes.

        fhat_x is indexed by the element's LEFT face; the right face of
        element e is the left face of e+1 (periodic roll).
        """
        g = self.grid
        for c in components:
            fx_l = (fhat_x[:, :, c] * self.wq) @ self.V
            fx_r = np.roll(fx_l, -1, axis=0)
            rate[:, :, c] -= (
                fx_r[:, :, None, :] * self.Pp[None, None, :, None]
                - fx_l[:, :, None, :] * self.Pm[None, None, :, None]
            ) / (2 * g.dx)
            fy_b = (fhat_y[:, :, c] * self.wq) @ self.V
            fy_t = np.roll(fy_b, -1, axis=1)
            rate[:, :, c] -= (
                fy_t[:, :, :, None] * self.Pp[None, None, None, :]
                - fy_b[:, :, :, None] * self.Pm[None, None, None, :]
            ) / (2 * g.dy)

    def cleaning_rhs(self, u: np.ndarray, c_h: float, t: float = 0.0) -> np.ndarray:
        """RHS of dB/dt + grad psi = 0, dpsi/dt + c_h^2 div B = 0."""
        if u.shape[2] < 3:
            raise ConfigurationError("cleaning needs psi coefficients")
        g = self.grid
        w2 = self.wq[:, None] * self.wq[None, :]
        vals = (self.V @ u) @ self.V.T
        bx, by, psi = vals[:, :, 0], vals[:, :, 1], vals[:, :, 2]
        rate = np.zeros_like(u)
        # volume terms of fluxes Fx = (psi, 0, ch^2 Bx), Fy = (0, psi, ch^2 By)
        wpsi = w2 * psi
        rate[:, :, 0] = self.Vd.T @ wpsi @ self.V / (2 * g.dx)
        rate[:, :, 1] = self.V.T @ wpsi @ self.Vd / (2 * g.dy)
        rate[:, :, 2] = c_h**2 * (
            self.Vd.T @ (w2 * bx) @ self.V / (2 * g.dx)
            + self.V.T @ (w2 * by) @ self.Vd / (2 * g.dy)
        )
        uL, uR, uB, uT = self._face_states(u)
        # exact two-wave solution at speed c_h for (Bn, psi); tangential flux 0
        bxs = 0.5 * (uL[:, :, 0] + uR[:, :, 0]) + (uL[:, :, 2] - uR[:, :, 2]) / (2 * c_h)
        psis = 0.5 * (uL[:, :, 2] + uR[:, :, 2]) + 0.5 * c_h * (uL[:, :, 0] - uR[:, :, 0])
        fhat_x = np.stack([psis, np.zeros_like(psis), c_h**2 * bxs], axis=2)
        bys = 0.5 * (uB[:, :, 1] + uT[:, :, 1]) + (uB[:, :, 2] - uT[:, :, 2]) / (2 * c_h)
        psis = 0.5 * (uB[:, :, 2] + uT[:, :, 2]) + 0.5 * c_h * (uB[:, :, 1] - uT[:, :, 1])
        fhat_y = np.stack([np.zeros_like(psis), psis, c_h**2 * bys], axis=2)
        self._accumulate_surface(rate, fhat_x, fhat_y, components=(0, 1, 2))
        return rate


class LdfScheme:
    """RKDG on the locally divergence-free vector basis (n <= 3).

    Coefficients are shared between Bx and By: arrays (Nx, Ny, nb)."""

    def __init__(self, grid: ElementGrid, degree: int, velocity):
        if grid.boundary is not BoundaryKind.PERIODIC:
            raise ConfigurationError("the DG comparison schemes run on periodic grids")
        if grid.dx != grid.dy:
            raise ConfigurationError(
                "the reference-element curl basis is divergence free only for dx = dy"
            )
        self.grid = grid
        self.degree = degree
        self.velocity = velocity
        self.basis = LdfBasis(degree)
        self.basis.check_orthonormal()
        q = degree + 2
        xq, wq = np.polynomial.legendre.leggauss(q)
        self.xq, self.wq = xq, wq
        X, Y = np.meshgrid(xq, xq, indexing="ij")
        self.bx_vol, self.by_vol = self.basis.eval_components(X, Y)      # (nb, q, q)
        dxx, dxy, dyx, dyy = self.basis.eval_derivs(X, Y)
        self.dbx_dxi, self.dby_dxi = dxx, dyx
        self.dbx_deta, self.dby_deta = dxy, dyy
        nb = self.basis.size
        self._bx_flat = self.bx_vol.reshape(nb, -1)
        self._by_flat = self.by_vol.reshape(nb, -1)
        self._dby_dxi_flat = self.dby_dxi.reshape(nb, -1)
        self._dbx_deta_flat = self.dbx_deta.reshape(nb, -1)
        one = np.ones(q)
        self.trace_left = self.basis.eval_components(-one, xq)           # at xi=-1
        self.trace_right = self.basis.eval_components(one, xq)
        self.trace_bottom = self.basis.eval_components(xq, -one)
        self.trace_top = self.basis.eval_components(xq, one)
        helper = DgScheme(grid, degree, velocity)
        self.vx_vol, self.vy_vol = helper.vx_vol, helper.vy_vol
        self.v_face_x, self.v_face_y = helper.v_face_x, helper.v_face_y

    def project(self, b_eval, num_quad: int | None = None) -> np.ndarray:
        q = num_quad or (self.degree + 2)
        xq, wq = np.polynomial.legendre.leggauss(q)
        X, Y = np.meshgrid(xq, xq, indexing="ij")
        bxb, byb = self.basis.eval_components(X, Y)
        g = self.grid
        xv = g.x_faces[:-1, None] + (xq[None, :] + 1) * 0.5 * g.dx
        yv = g.y_faces[:-1, None] + (xq[None, :] + 1) * 0.5 * g.dy
        Xp = xv[:, None, :, None] + 0.0 * yv[None, :, None, :]
        Yp = yv[None, :, None, :] + 0.0 * xv[:, None, :, None]
        bx, by = b_eval(Xp, Yp)
        w2 = wq[:, None] * wq[None, :]
        return 0.25 * (
            np.einsum("xyij,ij,pij->xyp", bx, w2, bxb, optimize=True)
            + np.einsum("xyij,ij,pij->xyp", by, w2, byb, optimize=True)
        )

    def eval_b(self, coeffs):
        q = self.xq.size
        shape = coeffs.shape[:2] + (q, q)
        bx = (coeffs @ self._bx_flat).reshape(shape)
        by = (coeffs @ self._by_flat).reshape(shape)
        return bx, by

    def rhs(self, coeffs: np.ndarray, t: float = 0.0) -> np.ndarray:
        g = self.grid
        w2 = self.wq[:, None] * self.wq[None, :]
        bx, by = self.eval_b(coeffs)
        _, fx_by = _induction_flux_x(bx, by, self.vx_vol, self.vy_vol)
        fy_bx, _ = _induction_flux_y(bx, by, self.vx_vol, self.vy_vol)
        flat = coeffs.shape[:2] + (-1,)
        rate = (
            (w2 * fx_by).reshape(flat) @ self._dby_dxi_flat.T / (2 * g.dx)
            + (w2 * fy_bx).reshape(flat) @ self._dbx_deta_flat.T / (2 * g.dy)
        )
        # traces of B on both sides of each face
        bxR = coeffs @ self.trace_right[0]
        byR = coeffs @ self.trace_right[1]
        bxL = coeffs @ self.trace_left[0]
        byL = coeffs @ self.trace_left[1]
        bxT = coeffs @ self.trace_top[0]
        byT = coeffs @ self.trace_top[1]
        bxB = coeffs @ self.trace_bottom[0]
        byB = coeffs @ self.trace_bottom[1]
        vxf, vyf = self.v_face_x[0][:-1], self.v_face_x[1][:-1]
        uLx, uLy = np.roll(bxR, 1, axis=0), np.roll(byR, 1, axis=0)
        _, fL = _induction_flux_x(uLx, uLy, vxf, vyf)
        _, fR = _induction_flux_x(bxL, byL, vxf, vyf)
        fhat_x = _upwind(fL, fR, vxf)                 # flux of By through x-faces
        vxf, vyf = self.v_face_y[0][:, :-1], self.v_face_y[1][:, :-1]
        uBx, uBy = np.roll(bxT, 1, axis=1), np.roll(byT, 1, axis=1)
        fB, _ = _induction_flux_y(uBx, uBy, vxf, vyf)
        fT, _ = _induction_flux_y(bxB, byB, vxf, vyf)
        fhat_y = _upwind(fB, fT, vyf)                 # flux of Bx through y-faces
        # surface terms tested against the vector basis traces
        wgt = self.wq
        sL = (fhat_x * wgt) @ self.trace_left[1].T
        sR = (np.roll(fhat_x, -1, axis=0) * wgt) @ self.trace_right[1].T
        rate -= (sR - sL) / (2 * g.dx)
        sB = (fhat_y * wgt) @ self.trace_bottom[0].T
        sT = (np.roll(fhat_y, -1, axis=1) * wgt) @ self.trace_top[0].T
        rate -= (sT - sB) / (2 * g.dy)
        return rate


# ------------------------------------------------------------------ cleaning

@dataclass(frozen=True)
class CleaningParams:
    """GLM wave speed and diffusion coefficient, both positive."""

    c_h: float
    c_p2: float

    def __post_init__(self):
        if self.c_h <= 0 or self.c_p2 <= 0:
            raise ConfigurationError("cleaning parameters must be positive")

    @classmethod
    def defaults(cls, vmax: float, dx: float) -> "CleaningParams":
        c_h = 2.0 * vmax
        return cls(c_h=c_h, c_p2=0.8 * c_h * dx)


def divclean_step(u: np.ndarray, scheme: DgScheme, params: CleaningParams,
                  dt: float, order: int, t0: float = 0.0) -> np.ndarray:
    """Operator-split cleaning step: induction, (B, psi) wave, exact damping.

    The wave subsystem carries exactly neutral modes (continuous
    Riemann-invariant profiles produce no interface jumps), so its stage
    count is held at three or more: second-order SSP-RK has no imaginary
    stability interval and would amplify those modes at any Courant number.
    """
    wave_order = max(order, 3)
    u1 = ssp_rk_step(u, scheme.rhs, dt, order, t0)
    u2 = ssp_rk_step(u1, lambda w, t: scheme.cleaning_rhs(w, params.c_h, t), dt,
                     wave_order, t0)
    out = u2.copy()
    out[:, :, 2] *= np.exp(-(params.c_h**2 / params.c_p2) * dt)
    return out


# -------------------------------------------------------------------- SSP-RK

def ssp_rk_step(u, rhs, dt: float, order: int, t0: float = 0.0):
    """Optimal SSP Runge-Kutta step of the requested order (2, 3 or 4)."""
    u = np.asarray(u)
    if order == 2:
        u1 = u + dt * rhs(u, t0)
        return 0.5 * u + 0.5 * (u1 + dt * rhs(u1, t0 + dt))
    if order == 3:
        u1 = u + dt * rhs(u, t0)
        u2 = 0.75 * u + 0.25 * (u1 + dt * rhs(u1, t0 + dt))
        return u / 3.0 + (2.0 / 3.0) * (u2 + dt * rhs(u2, t0 + 0.5 * dt))
    if order == 4:
        # five-stage fourth-order SSP scheme (Spiteri-Ruuth coefficients)
        c1 = 0.391752226571890
        u1 = u + c1 * dt * rhs(u, t0)
        t1 = c1
        a20, a21, b21 = 0.444370493651235, 0.555629506348765, 0.368410593050371
        u2 = a20 * u + a21 * u1 + b21 * dt * rhs(u1, t0 + t1 * dt)
        t2 = a21 * t1 + b21
        a30, a32, b32 = 0.620101851488403, 0.379898148511597, 0.251891774271694
        u3 = a30 * u + a32 * u2 + b32 * dt * rhs(u2, t0 + t2 * dt)
        t3 = a32 * t2 + b32
        a40, a43, b43 = 0.178079954393132, 0.821920045606868, 0.544974750228521
        r3 = rhs(u3, t0 + t3 * dt)
        u4 = a40 * u + a43 * u3 + b43 * dt * r3
        t4 = a43 * t3 + b43
        a52, a53, b53 = 0.517231671970585, 0.096059710526147, 0.063692468666290
        a54, b54 = 0.386708617503269, 0.226007483236906
        return a52 * u2 + a53 * u3 + b53 * dt * r3 + a54 * u4 + b54 * dt * rhs(u4, t0 + t4 * dt)
    raise UnsupportedOrderError(f"SSP-RK order must be 2, 3 or 4, got {order}")


def ssp_order_for_degree(n: int) -> int:
    """Time order matched to the spatial order, within the tabulated range."""
    return min(max(n + 1, 2), 4)


def cfl_dt_dg(grid, vmax: float, n: int, cfl: float = 0.8,
              c_h: float | None = None,
              t: float | None = None, t_end: float | None = None) -> float:
    """RKDG Courant step dt = C/(2n+1) * min(dx,dy)/speed.

    `vmax` should be the dimension-summed advection speed max(|vx|+|vy|).
    Active cleaning replaces it by 2 c_h when that is faster: the GLM waves
    run at c_h along each axis, so their 2D sweep speed doubles.
    """
    if vmax <= 0.0:
        raise ConfigurationError("vmax must be positive")
    speed = max(vmax, 2.0 * c_h) if c_h is not None else vmax
    dt = cfl / (2 * n + 1) * min(grid.dx, grid.dy) / speed
    if t is not None and t_end is not None:
        dt = min(dt, t_end - t)
    return dt


# ------------------------------------------------------------- state adapters

class DgState:
    """Evaluation adapter of tensor-modal coefficients for the diagnostics."""

    def __init__(self, coeffs: np.ndarray, grid: ElementGrid, degree: int):
        self.coeffs = coeffs
        self.grid = grid
        self.degree = degree
        self.cv_partition = np.array([0.0, 1.0])

    def _matrices(self, xhat, deriv=False):
        xi = 2.0 * np.asarray(xhat, dtype=float) - 1.0
        return _legendre_matrix(self.degree + 1, xi, deriv)

    def eval_b(self, xhat, yhat):
        Vx, Vy = self._matrices(xhat), self._matrices(yhat)
        bx = Vx @ self.coeffs[:, :, 0] @ Vy.T
        by = Vx @ self.coeffs[:, :, 1] @ Vy.T
        return bx, by

    def eval_div(self, xhat, yhat):
        Vx, Vy = self._matrices(xhat), self._matrices(yhat)
        Dx, Dy = self._matrices(xhat, True), self._matrices(yhat, True)
        ddx = Dx @ self.coeffs[:, :, 0] @ Vy.T
        ddy = Vx @ self.coeffs[:, :, 1] @ Dy.T
        return 2.0 * ddx / self.grid.dx + 2.0 * ddy / self.grid.dy


class LdfState:
    def __init__(self, coeffs: np.ndarray, grid: ElementGrid, degree: int):
        self.coeffs = coeffs
        self.grid = grid
        self.degree = degree
        self.basis = LdfBasis(degree)
        self.cv_partition = np.array([0.0, 1.0])

    def eval_b(self, xhat, yhat):
        xi = 2.0 * np.asarray(xhat, dtype=float) - 1.0
        eta = 2.0 * np.asarray(yhat, dtype=float) - 1.0
        X, Y = np.meshgrid(xi, eta, indexing="ij")
        bxb, byb = self.basis.eval_components(X, Y)
        shape = self.coeffs.shape[:2] + X.shape
        bx = (self.coeffs @ bxb.reshape(self.basis.size, -1)).reshape(shape)
        by = (self.coeffs @ byb.reshape(self.basis.size, -1)).reshape(shape)
        return bx, by

    def eval_div(self, xhat, yhat):
        xi = 2.0 * np.asarray(xhat, dtype=float) - 1.0
        eta = 2.0 * np.asarray(yhat, dtype=float) - 1.0
        X, Y = np.meshgrid(xi, eta, indexing="ij")
        dxx, _, _, dyy = self.basis.eval_derivs(X, Y)
        shape = self.coeffs.shape[:2] + X.shape
        ddx = (self.coeffs @ dxx.reshape(self.basis.size, -1)).reshape(shape)
        ddy = (self.coeffs @ dyy.reshape(self.basis.size, -1)).reshape(shape)
        return 2.0 * ddx / self.grid.dx + 2.0 * ddy / self.grid.dy
