"""Staggered, exactly divergence-free spectral difference scheme for
the 2D induction equation.

Bx lives on (flux-x, solution-y) points and By on (solution-x, flux-y)
points, so the normal component is collocated on element faces and shared
between neighbours. The electric field Ez = vy*Bx - vx*By is assembled at
the control-volume corner points with upwind (1D face / 2D corner)
selection of the multi-valued tangential components, and the update

    dBx/dt = -dEz/dy,   dBy/dt = +dEz/dx

differentiates the tensor interpolant of the single-valued Ez, which keeps
the polynomial divergence of B identically zero, locally and globally.
The equivalent evolution of the corner vector potential,
dAz/dt = -(vx dAz/dx + vy dAz/dy), is provided as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import NodeSet1D
from .grid import (
    BoundaryKind,
    ConfigurationError,
    CornerField,
    ElementGrid,
    StaggeredField,
    exchange_or_fill_ghosts,
    pad_periodic,
)


@dataclass(frozen=True)
class PotentialInit:
    """Analytic z-component of the vector potential used to seed B."""

    name: str
    az: Callable


class VelocityField:
    """Prescribed velocity; evaluators must broadcast over numpy arrays."""

    def __init__(self, fn: Callable, name: str = "custom", constant=None):
        self.fn = fn
        self.name = name
        self.constant_value = constant

    @classmethod
    def constant(cls, vx: float, vy: float) -> "VelocityField":
        def fn(x, y):
            return vx * np.ones_like(x), vy * np.ones_like(y)

        return cls(fn, name=f"constant({vx},{vy})", constant=(vx, vy))

    @classmethod
    def rotation(cls, center=(0.0, 0.0)) -> "VelocityField":
        cx, cy = center

        def fn(x, y):
            return -(y - cy), x - cx

        return cls(fn, name=f"rotation@{center}")

    def __call__(self, x, y):
        return self.fn(x, y)

    def max_speed(self, grid: ElementGrid, nodes: NodeSet1D,
                  include_ghosts: bool = True) -> float:
        """|v| bound: exact for constant fields, corner-sampled otherwise."""
        return self._sampled_max(grid, nodes, include_ghosts, np.hypot)

    def max_sweep_speed(self, grid: ElementGrid, nodes: NodeSet1D,
                        include_ghosts: bool = True) -> float:
        """max(|vx| + |vy|), the Courant-relevant speed of the tensor-product
        update: the 2D operator is the sum of the two 1D sweeps, so their
        speeds add when scaling the time step."""
        return self._sampled_max(
            grid, nodes, include_ghosts, lambda a, b: np.abs(a) + np.abs(b)
        )

    def _sampled_max(self, grid, nodes, include_ghosts, combine) -> float:
        if self.constant_value is not None:
            vx, vy = self.constant_value
            return float(combine(vx, vy))
        xc = grid.axis_coords(0, nodes.flux_nodes, padded=include_ghosts)
        yc = grid.axis_coords(1, nodes.flux_nodes, padded=include_ghosts)
        X = xc.ravel()[:, None]
        Y = yc.ravel()[None, :]
        vx, vy = self.fn(X + 0.0 * Y, Y + 0.0 * X)
        return float(np.max(combine(vx, vy)))


class MagneticFluxes:
    """Cumulative magnetic fluxes phi_x, phi_y on the corner points."""

    def __init__(self, degree: int, phix: np.ndarray, phiy: np.ndarray):
        self.degree = degree
        self.phix = phix
        self.phiy = phiy

    def circulation_residual(self) -> float:
        """Max violation of phi_x + phi_y - phi_x(0,y) - phi_y(x,0) = 0."""
        r = (self.phix + self.phiy
             - self.phix[:, :, 0:1, :] - self.phiy[:, :, :, 0:1])
        return float(np.max(np.abs(r)))


class CtsdScheme:
    """Semi-discrete operator and setup helpers on a fixed grid/degree."""

    def __init__(self, grid: ElementGrid, degree: int, velocity: VelocityField,
                 exact_solution: Callable | None = None):
        if grid.boundary is BoundaryKind.DIRICHLET_EXACT and exact_solution is None:
            raise ConfigurationError(
                "Dirichlet boundaries need an exact-solution evaluator"
            )
        self.grid = grid
        self.degree = degree
        self.nodes = NodeSet1D(degree)
        self.velocity = velocity
        self.exact_solution = exact_solution
        n = degree
        fb, sb = self.nodes.flux_basis, self.nodes.solution_basis
        self._s2f = sb.eval_matrix(self.nodes.flux_nodes)        # (n+2, n+1)
        self._df_s = fb.deriv_matrix(self.nodes.solution_nodes)  # (n+1, n+2)
        self._df_f = fb.deriv_matrix(self.nodes.flux_nodes)      # (n+2, n+2)
        # corner coordinates with bitwise-shared faces
        self._xc = grid.axis_coords(0, self.nodes.flux_nodes)    # (Nx, n+2)
        self._yc = grid.axis_coords(1, self.nodes.flux_nodes)    # (Ny, n+2)
        # velocity at every corner point of every element
        X = self._xc[:, None, :, None]
        Y = self._yc[None, :, None, :]
        vx, vy = velocity(X + 0.0 * Y, Y + 0.0 * X)
        self._vx_c, self._vy_c = np.broadcast_to(vx, (grid.Nx, grid.Ny, n + 2, n + 2)), \
            np.broadcast_to(vy, (grid.Nx, grid.Ny, n + 2, n + 2))
        # velocity on the face corner rows, used for the upwind selection
        Xf = grid.x_faces[:, None, None]
        vxf, _ = velocity(Xf + 0.0 * self._yc[None, :, :], self._yc[None, :, :] + 0.0 * Xf)
        self._vx_face = vxf                                      # (Nx+1, Ny, n+2)
        Yf = grid.y_faces[None, :, None]
        _, vyf = velocity(self._xc[:, None, :] + 0.0 * Yf, Yf + 0.0 * self._xc[:, None, :])
        self._vy_face = vyf                                      # (Nx, Ny+1, n+2)

    # ------------------------------------------------------------ setup

    def corner_potential(self, init: PotentialInit) -> CornerField:
        X = self._xc[:, None, :, None]
        Y = self._yc[None, :, None, :]
        az = init.az(X + 0.0 * Y, Y + 0.0 * X)
        n = self.degree
        az = np.broadcast_to(az, (self.grid.Nx, self.grid.Ny, n + 2, n + 2)).copy()
        return CornerField(self.degree, az)

    def init_from_potential(self, init: PotentialInit):
        """Sample Az at the corner points and differentiate the interpolant.

        The resulting B is pointwise divergence free and has continuous
        normal components across faces, element by element.
        """
        az = self.corner_potential(init)
        return az, self.b_from_potential(az)

    def b_from_potential(self, az: CornerField) -> StaggeredField:
        bx = (az.values @ self._df_s.T) / self.grid.dy
        by = -(self._df_s @ az.values) / self.grid.dx
        return StaggeredField(self.degree, bx, by)

    def fluxes_from_potential(self, az: CornerField) -> MagneticFluxes:
        """Closed-form fluxes phi_x = Az - Az(.,0), phi_y = Az(0,.) - Az."""
        v = az.values
        phix = v - v[:, :, :, 0:1]
        phiy = v[:, :, 0:1, :] - v
        return MagneticFluxes(self.degree, phix, phiy)

    def reconstruct_b(self, fluxes: MagneticFluxes) -> StaggeredField:
        """B from fluxes: Bx = d(phi_x)/dy, By = d(phi_y)/dx at the nodes."""
        scale = max(1.0, np.max(np.abs(fluxes.phix)), np.max(np.abs(fluxes.phiy)))
        if fluxes.circulation_residual() > 1e-8 * scale:
            raise ValueError(
                "fluxes violate the discrete circulation identity; "
                "the data is not divergence free"
            )
        bx = (fluxes.phix @ self._df_s.T) / self.grid.dy
        by = (self._df_s @ fluxes.phiy) / self.grid.dx
        return StaggeredField(self.degree, bx, by)

    # ------------------------------------------------------------ operator

    def _ghost(self, field: StaggeredField, t: float) -> StaggeredField:
        return exchange_or_fill_ghosts(field, self.grid, self.nodes,
                                       self.exact_solution, t)

    def assemble_electric_field(self, field: StaggeredField, t: float = 0.0) -> CornerField:
        """Single-valued Ez = vy*Bx - vx*By at every corner point.

        Tangential components are two-valued on shared faces; the upwind
        side is chosen by the sign of the face-normal velocity, and both
        signs at the four-element corner points. Zero normal velocity
        averages the two candidates.
        """
        n = self.degree
        Nx, Ny = self.grid.Nx, self.grid.Ny
        gh = self._ghost(field, t)
        # own-element interpolation of Bx/By to the corner points
        bxc = gh.bx @ self._s2f.T
        byc = self._s2f @ gh.by
        # horizontal faces: Bx from below vs above, picked by sign(vy)
        south = bxc[1:-1, 0:Ny + 1, :, -1]
        north = bxc[1:-1, 1:Ny + 2, :, 0]
        vyf = self._vy_face
        fbx = np.where(vyf > 0.0, south, np.where(vyf < 0.0, north, 0.5 * (south + north)))
        # vertical faces: By from left vs right, picked by sign(vx)
        west = byc[0:Nx + 1, 1:-1, -1, :]
        east = byc[1:Nx + 2, 1:-1, 0, :]
        vxf = self._vx_face
        fby = np.where(vxf > 0.0, west, np.where(vxf < 0.0, east, 0.5 * (west + east)))
        BX = np.empty((Nx, Ny, n + 2, n + 2))
        BX[:, :, :, 1:n + 1] = bxc[1:-1, 1:-1, :, 1:n + 1]
        BX[:, :, :, 0] = fbx[:, 0:Ny, :]
        BX[:, :, :, n + 1] = fbx[:, 1:Ny + 1, :]
        BY = np.empty((Nx, Ny, n + 2, n + 2))
        BY[:, :, 1:n + 1, :] = byc[1:-1, 1:-1, 1:n + 1, :]
        BY[:, :, 0, :] = fby[0:Nx, :, :]
        BY[:, :, n + 1, :] = fby[1:Nx + 1, :, :]
        return CornerField(n, self._vy_c * BX - self._vx_c * BY)

    def curl_rhs(self, ez: CornerField) -> StaggeredField:
        """dBx/dt = -dEz/dy and dBy/dt = +dEz/dx at the staggered points."""
        dbx = -(ez.values @ self._df_s.T) / self.grid.dy
        dby = (self._df_s @ ez.values) / self.grid.dx
        return StaggeredField(self.degree, dbx, dby)

    def rhs(self, field: StaggeredField, t: float = 0.0) -> StaggeredField:
        return self.curl_rhs(self.assemble_electric_field(field, t))

    def packed_rhs(self, template: StaggeredField):
        """Flat-vector RHS wrapper for the time integrator."""

        def fn(vec: np.ndarray, t: float) -> np.ndarray:
            return self.rhs(template.unpack_like(vec), t).pack()

        return fn

    # ------------------------------------------------ potential formulation

    def potential_rhs(self, az: CornerField, t: float = 0.0) -> CornerField:
        """dAz/dt = -(vx dAz/dx + vy dAz/dy) at the corner points.

        Derivatives of the per-element interpolant, with the same upwind
        selection as the magnetic update where they are two-valued
        (tangential derivatives are single-valued on shared faces).
        Periodic boundaries only; the rotating test evolves B directly.
        """
        if self.grid.boundary is not BoundaryKind.PERIODIC:
            raise ConfigurationError("the potential formulation supports periodic runs only")
        n = self.degree
        Nx, Ny = self.grid.Nx, self.grid.Ny
        azp = pad_periodic(az.values)
        dax = (self._df_f @ azp) / self.grid.dx
        day = (azp @ self._df_f.T) / self.grid.dy
        west = dax[0:Nx + 1, 1:-1, -1, :]
        east = dax[1:Nx + 2, 1:-1, 0, :]
        vxf = self._vx_face
        fdax = np.where(vxf > 0.0, west, np.where(vxf < 0.0, east, 0.5 * (west + east)))
        south = day[1:-1, 0:Ny + 1, :, -1]
        north = day[1:-1, 1:Ny + 2, :, 0]
        vyf = self._vy_face
        fday = np.where(vyf > 0.0, south, np.where(vyf < 0.0, north, 0.5 * (south + north)))
        DAX = np.empty((Nx, Ny, n + 2, n + 2))
        DAX[:, :, 1:n + 1, :] = dax[1:-1, 1:-1, 1:n + 1, :]
        DAX[:, :, 0, :] = fdax[0:Nx]
        DAX[:, :, n + 1, :] = fdax[1:Nx + 1]
        DAY = np.empty((Nx, Ny, n + 2, n + 2))
        DAY[:, :, :, 1:n + 1] = day[1:-1, 1:-1, :, 1:n + 1]
        DAY[:, :, :, 0] = fday[:, 0:Ny]
        DAY[:, :, :, n + 1] = fday[:, 1:Ny + 1]
        return CornerField(n, -(self._vx_c * DAX + self._vy_c * DAY))

    # ------------------------------------------------------------ queries

    def pointwise_divergence(self, field: StaggeredField, x: float, y: float) -> float:
        """d(Bx)/dx + d(By)/dy of the polynomial representation at (x, y)."""
        (ix, iy), (xi, eta) = self.grid.element_of(x, y)
        fb, sb = self.nodes.flux_basis, self.nodes.solution_basis
        dfx = fb.deriv_matrix(np.array([xi]))[0]
        es_y = sb.eval_matrix(np.array([eta]))[0]
        es_x = sb.eval_matrix(np.array([xi]))[0]
        dfy = fb.deriv_matrix(np.array([eta]))[0]
        dbx = dfx @ field.bx[ix, iy] @ es_y / self.grid.dx
        dby = es_x @ field.by[ix, iy] @ dfy / self.grid.dy
        return float(dbx + dby)

    def vmax(self) -> float:
        include = self.grid.boundary is BoundaryKind.DIRICHLET_EXACT
        return self.velocity.max_speed(self.grid, self.nodes, include_ghosts=include)

    def sweep_speed(self) -> float:
        include = self.grid.boundary is BoundaryKind.DIRICHLET_EXACT
        return self.velocity.max_sweep_speed(self.grid, self.nodes,
                                             include_ghosts=include)


class CtsdState:
    """Evaluation adapter of a staggered field for the diagnostics."""

    def __init__(self, field: StaggeredField, grid: ElementGrid, nodes: NodeSet1D):
        self.field = field
        self.grid = grid
        self.nodes = nodes
        self.degree = field.degree
        self.cv_partition = nodes.flux_nodes  # sub-cell boundaries per element

    def eval_b(self, xhat, yhat):
        """(Bx, By) of shape (Nx, Ny, len(xhat), len(yhat)) at unit-reference points."""
        fb, sb = self.nodes.flux_basis, self.nodes.solution_basis
        ex_f, ey_f = fb.eval_matrix(xhat), fb.eval_matrix(yhat)
        ex_s, ey_s = sb.eval_matrix(xhat), sb.eval_matrix(yhat)
        BX = ex_f @ self.field.bx @ ey_s.T
        BY = ex_s @ self.field.by @ ey_f.T
        return BX, BY

    def eval_div(self, xhat, yhat):
        fb, sb = self.nodes.flux_basis, self.nodes.solution_basis
        dx_f, dy_f = fb.deriv_matrix(xhat), fb.deriv_matrix(yhat)
        ex_s, ey_s = sb.eval_matrix(xhat), sb.eval_matrix(yhat)
        ddx = (dx_f @ self.field.bx @ ey_s.T) / self.grid.dx
        ddy = (ex_s @ self.field.by @ dy_f.T) / self.grid.dy
        return ddx + ddy
