"""ADER time integration: Galerkin-in-time tableau, Picard corrector, update.

The solution over one step is represented by Lagrange polynomials in time
on n+1 Gauss-Legendre nodes. One step performs exactly n Picard
corrections of the node states followed by a conservative final update,
which is accurate to order n+1. With n = 0 the step reduces to forward
Euler. The time step is factored out of the mass matrix so a single
tableau serves every step size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import LagrangeBasis, TimeQuadrature


class AderDivergenceError(RuntimeError):
    """Raised when a Picard iterate stops being finite."""


@dataclass(frozen=True)
class AderTableau:
    degree: int
    nodes: np.ndarray          # n+1 Gauss-Legendre nodes on [0,1]
    weights: np.ndarray        # matching quadrature weights
    end_values: np.ndarray     # l_i(1)
    start_values: np.ndarray   # l_j(0)
    mass: np.ndarray           # M[j,i] = l_j(1) l_i(1) - w_i l_j'(t_i)
    mass_inv: np.ndarray
    quad_matrix: np.ndarray    # Q[j,i] = w_i l_j(t_i)
    picard_const: np.ndarray   # M^-1 @ start_values
    picard_matrix: np.ndarray  # M^-1 @ Q


def build_tableau(n: int) -> AderTableau:
    """Assemble the degree-n tableau; the inverse is checked on the spot."""
    tq = TimeQuadrature(n)
    basis = LagrangeBasis(tq.time_nodes)
    end_values = basis.eval_matrix(np.array([1.0]))[0]
    start_values = basis.eval_matrix(np.array([0.0]))[0]
    deriv_at_nodes = basis.deriv_matrix(tq.time_nodes)  # [i, j] = l_j'(t_i)
    eval_at_nodes = basis.eval_matrix(tq.time_nodes)    # identity for GL nodes
    w = tq.time_weights
    mass = np.outer(end_values, end_values) - (w[None, :] * deriv_at_nodes.T)
    mass_inv = np.linalg.inv(mass)
    if np.max(np.abs(mass @ mass_inv - np.eye(n + 1))) > 1e-12:
        raise np.linalg.LinAlgError(f"ADER mass matrix poorly inverted at n={n}")
    quad_matrix = w[None, :] * eval_at_nodes.T
    return AderTableau(
        degree=n,
        nodes=tq.time_nodes,
        weights=w,
        end_values=end_values,
        start_values=start_values,
        mass=mass,
        mass_inv=mass_inv,
        quad_matrix=quad_matrix,
        picard_const=mass_inv @ start_values,
        picard_matrix=mass_inv @ quad_matrix,
    )


def ader_step(state, rhs, dt: float, tableau: AderTableau, t0: float = 0.0):
    """Advance `state` by one ADER step of size dt.

    `rhs(u, t)` must return the semi-discrete time derivative of a state
    shaped like `state`; it is called at the n+1 node times t0 + tau_i*dt
    once per correction and once more for the final update. Arrays of any
    shape (including complex) are supported.
    """
    if dt <= 0.0:
        raise ValueError(f"time step must be positive, got {dt}")
    tab = tableau
    n = tab.degree
    u0 = np.asarray(state)
    node_times = t0 + tab.nodes * dt
    nodes = [u0.copy() for _ in range(n + 1)]
    for k in range(n):
        rates = [rhs(nodes[i], node_times[i]) for i in range(n + 1)]
        nodes = []
        for j in range(n + 1):
            u = tab.picard_const[j] * u0
            for i in range(n + 1):
                u = u + (dt * tab.picard_matrix[j, i]) * rates[i]
            nodes.append(u)
            if not np.all(np.isfinite(u)):
                raise AderDivergenceError(
                    f"non-finite state after Picard correction {k + 1} of {n}"
                )
    rates = [rhs(nodes[i], node_times[i]) for i in range(n + 1)]
    out = u0.copy()
    for i in range(n + 1):
        out = out + (dt * tab.weights[i]) * rates[i]
    if not np.all(np.isfinite(out)):
        raise AderDivergenceError("non-finite state after the final update")
    return out


def cfl_dt(grid, vmax: float, n: int, cfl: float = 0.8,
           t: float | None = None, t_end: float | None = None) -> float:
    """Courant step dt = C/(n+1) * min(dx,dy)/vmax, clipped to land on t_end."""
    if vmax <= 0.0:
        raise ValueError("vmax must be positive; a steady problem needs an explicit dt")
    dt = cfl / (n + 1) * min(grid.dx, grid.dy) / vmax
    if t is not None and t_end is not None:
        dt = min(dt, t_end - t)
    return dt
