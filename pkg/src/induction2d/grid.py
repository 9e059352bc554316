"""Structured Cartesian element mesh and staggered field storage.

Per-element data lives in arrays indexed (ix, iy, ...node indices...).
Values on element boundaries are stored redundantly by both neighbours and
kept bitwise consistent: shared physical coordinates are built once per
face so that sampling any continuous function at a face produces the same
float in both elements, which makes the normal-continuity invariant of the
staggered representation directly assertable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class BoundaryKind(enum.Enum):
    PERIODIC = "periodic"
    DIRICHLET_EXACT = "dirichlet_exact"


class ConfigurationError(ValueError):
    """Invalid solver or experiment configuration."""


@dataclass(frozen=True)
class ElementGrid:
    Nx: int
    Ny: int
    x0: float = 0.0
    x1: float = 1.0
    y0: float = 0.0
    y1: float = 1.0
    boundary: BoundaryKind = BoundaryKind.PERIODIC
    x_faces: np.ndarray = field(init=False, repr=False)
    y_faces: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.Nx < 1 or self.Ny < 1:
            raise ConfigurationError(f"need at least one element, got {self.Nx}x{self.Ny}")
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ConfigurationError("domain extents must be positive")
        object.__setattr__(self, "x_faces", np.linspace(self.x0, self.x1, self.Nx + 1))
        object.__setattr__(self, "y_faces", np.linspace(self.y0, self.y1, self.Ny + 1))

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.Nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.Ny

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def element_of(self, x: float, y: float):
        """Element indices and local [0,1]^2 coordinates of a domain point."""
        if not (self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1):
            raise ValueError(f"point ({x}, {y}) is outside the domain")
        ix = min(int((x - self.x0) / self.dx), self.Nx - 1)
        iy = min(int((y - self.y0) / self.dy), self.Ny - 1)
        xi = (x - self.x_faces[ix]) / self.dx
        eta = (y - self.y_faces[iy]) / self.dy
        return (ix, iy), (xi, eta)

    def axis_coords(self, axis: int, nodes_ref, padded: bool = False) -> np.ndarray:
        """Physical coordinates of reference nodes in every panel along an axis.

        Returns an array (panels, len(nodes_ref)). Reference endpoints 0 and
        1 are pinned to the exact face coordinates so neighbouring panels
        share them bitwise. With `padded`, one ghost panel is added on each
        side (coordinates continue beyond the domain).
        """
        nodes_ref = np.asarray(nodes_ref, dtype=float)
        faces = self.x_faces if axis == 0 else self.y_faces
        h = self.dx if axis == 0 else self.dy
        if padded:
            faces = np.concatenate(([faces[0] - h], faces, [faces[-1] + h]))
        left = faces[:-1]
        coords = left[:, None] + nodes_ref[None, :] * h
        if nodes_ref[0] == 0.0:
            coords[:, 0] = left
        if nodes_ref[-1] == 1.0:
            coords[:, -1] = faces[1:]
        return coords


def pad_periodic(a: np.ndarray) -> np.ndarray:
    """Add one wrapped ghost panel on each side of the two element axes."""
    pad = [(1, 1), (1, 1)] + [(0, 0)] * (a.ndim - 2)
    return np.pad(a, pad, mode="wrap")


class StaggeredField:
    """Nodal (Bx, By) of the staggered scheme.

    bx has shape (Nx, Ny, n+2, n+1): Bx at (flux-x, solution-y) points.
    by has shape (Nx, Ny, n+1, n+2): By at (solution-x, flux-y) points.
    The first/last flux index of bx lies on the element's vertical faces
    and is shared with the neighbour (normal-component continuity).
    """

    def __init__(self, degree: int, bx: np.ndarray, by: np.ndarray):
        n = degree
        if bx.shape[2:] != (n + 2, n + 1) or by.shape[2:] != (n + 1, n + 2):
            raise ValueError(
                f"staggered shapes {bx.shape[2:]}, {by.shape[2:]} do not match degree {n}"
            )
        self.degree = degree
        self.bx = bx
        self.by = by

    @classmethod
    def zeros(cls, degree: int, grid: ElementGrid) -> "StaggeredField":
        n = degree
        return cls(
            degree,
            np.zeros((grid.Nx, grid.Ny, n + 2, n + 1)),
            np.zeros((grid.Nx, grid.Ny, n + 1, n + 2)),
        )

    def copy(self) -> "StaggeredField":
        return StaggeredField(self.degree, self.bx.copy(), self.by.copy())

    def max_abs(self) -> float:
        return max(np.max(np.abs(self.bx)), np.max(np.abs(self.by)), 0.0)

    def face_continuity_error(self, periodic: bool) -> float:
        """Largest mismatch of the normal component across shared faces."""
        err = 0.0
        if self.bx.shape[0] > 1:
            err = max(err, np.max(np.abs(self.bx[1:, :, 0, :] - self.bx[:-1, :, -1, :])))
        if self.by.shape[1] > 1:
            err = max(err, np.max(np.abs(self.by[:, 1:, :, 0] - self.by[:, :-1, :, -1])))
        if periodic:
            err = max(err, np.max(np.abs(self.bx[0, :, 0, :] - self.bx[-1, :, -1, :])))
            err = max(err, np.max(np.abs(self.by[:, 0, :, 0] - self.by[:, -1, :, -1])))
        return float(err)

    def pack(self) -> np.ndarray:
        return np.concatenate((self.bx.ravel(), self.by.ravel()))

    def unpack_like(self, vec: np.ndarray) -> "StaggeredField":
        split = self.bx.size
        return StaggeredField(
            self.degree,
            vec[:split].reshape(self.bx.shape),
            vec[split:].reshape(self.by.shape),
        )


class CornerField:
    """Scalar values (Az or Ez) on the (n+2) x (n+2) corner points per element."""

    def __init__(self, degree: int, values: np.ndarray):
        if values.shape[2:] != (degree + 2, degree + 2):
            raise ValueError(
                f"corner shape {values.shape[2:]} does not match degree {degree}"
            )
        self.degree = degree
        self.values = values

    @classmethod
    def zeros(cls, degree: int, grid: ElementGrid) -> "CornerField":
        n = degree
        return cls(n, np.zeros((grid.Nx, grid.Ny, n + 2, n + 2)))

    def copy(self) -> "CornerField":
        return CornerField(self.degree, self.values.copy())

    def shared_edge_error(self, periodic: bool) -> float:
        """Largest mismatch of values shared by adjacent elements."""
        v = self.values
        err = 0.0
        if v.shape[0] > 1:
            err = max(err, np.max(np.abs(v[1:, :, 0, :] - v[:-1, :, -1, :])))
        if v.shape[1] > 1:
            err = max(err, np.max(np.abs(v[:, 1:, :, 0] - v[:, :-1, :, -1])))
        if periodic:
            err = max(err, np.max(np.abs(v[0, :, 0, :] - v[-1, :, -1, :])))
            err = max(err, np.max(np.abs(v[:, 0, :, 0] - v[:, -1, :, -1])))
        return float(err)


def staggered_node_coords(grid: ElementGrid, nodes, padded: bool = False):
    """Physical coordinate arrays for the staggered Bx and By nodes.

    Returns ((bx_x, bx_y), (by_x, by_y)) where bx_x has shape (panels, n+2)
    on flux nodes and bx_y has shape (panels, n+1) on solution nodes.
    """
    fx = grid.axis_coords(0, nodes.flux_nodes, padded=padded)
    fy = grid.axis_coords(1, nodes.flux_nodes, padded=padded)
    sx = grid.axis_coords(0, nodes.solution_nodes, padded=padded)
    sy = grid.axis_coords(1, nodes.solution_nodes, padded=padded)
    return (fx, sy), (sx, fy)


def exchange_or_fill_ghosts(field: StaggeredField, grid: ElementGrid, nodes=None,
                            exact=None, t: float = 0.0) -> StaggeredField:
    """Return the field extended by one ghost element layer on each side.

    Periodic grids wrap the interior data; Dirichlet grids sample the
    supplied exact solution `exact(x, y, t) -> (Bx, By)` at the ghost
    nodes at time t. The interior block is copied unchanged, so repeated
    fills from the same interior data are bit-identical.
    """
    if grid.boundary is BoundaryKind.PERIODIC:
        return StaggeredField(field.degree, pad_periodic(field.bx), pad_periodic(field.by))
    if exact is None:
        raise ConfigurationError(
            "Dirichlet boundaries need an exact-solution evaluator for the ghosts"
        )
    if nodes is None:
        raise ConfigurationError("Dirichlet ghost fill needs the node set")
    (bx_x, bx_y), (by_x, by_y) = staggered_node_coords(grid, nodes, padded=True)
    n = field.degree
    bxp = np.empty((grid.Nx + 2, grid.Ny + 2, n + 2, n + 1))
    byp = np.empty((grid.Nx + 2, grid.Ny + 2, n + 1, n + 2))
    bxp[1:-1, 1:-1] = field.bx
    byp[1:-1, 1:-1] = field.by
    ring = _ring_mask(grid.Nx + 2, grid.Ny + 2)
    ex, ey = np.nonzero(ring)
    X = bx_x[ex][:, :, None] * np.ones_like(bx_y[ey][:, None, :])
    Y = bx_y[ey][:, None, :] * np.ones_like(bx_x[ex][:, :, None])
    bxs, _ = exact(X, Y, t)
    bxp[ex, ey] = bxs
    X = by_x[ex][:, :, None] * np.ones_like(by_y[ey][:, None, :])
    Y = by_y[ey][:, None, :] * np.ones_like(by_x[ex][:, :, None])
    _, bys = exact(X, Y, t)
    byp[ex, ey] = bys
    return StaggeredField(field.degree, bxp, byp)


def _ring_mask(nx: int, ny: int) -> np.ndarray:
    m = np.zeros((nx, ny), dtype=bool)
    m[0, :] = m[-1, :] = True
    m[:, 0] = m[:, -1] = True
    return m
