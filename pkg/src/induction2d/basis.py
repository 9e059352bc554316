"""One-dimensional node sets, quadrature and Lagrange interpolation on [0,1].

All schemes in this package share the same reference element [0,1]: the
n+2 flux points (element boundaries plus n interior Gauss-Legendre points)
and the n+1 solution points (Chebyshev zeros). Interpolation uses the
barycentric form, which stays well conditioned at the high degrees the
staggered scheme supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0,1].

    The rule is exact for polynomials up to degree 2m-1. Weights are
    positive and sum to one.
    """
    if m < 1:
        raise ValueError(f"Gauss-Legendre rule needs at least one node, got m={m}")
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (x + 1.0), 0.5 * w


def chebyshev_solution_nodes(n: int) -> np.ndarray:
    """Zeros of the Chebyshev polynomial T_{n+1}, mapped to (0,1), increasing."""
    if n < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got n={n}")
    k = np.arange(n + 1)
    x = np.cos((2.0 * k + 1.0) * np.pi / (2.0 * (n + 1)))
    return np.sort(0.5 * (x + 1.0))


class LagrangeBasis:
    """Lagrange interpolation basis on a fixed set of distinct nodes.

    Evaluation and differentiation use the barycentric weights
    w_i = 1 / prod_{j != i} (x_i - x_j), rescaled by their largest
    magnitude (a common factor cancels in the barycentric formula).
    """

    def __init__(self, nodes):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise ValueError("nodes must be a non-empty 1D sequence")
        if nodes.size > 1 and np.min(np.diff(np.sort(nodes))) <= 0.0:
            raise ValueError("nodes must be distinct")
        self.nodes = nodes
        diff = nodes[:, None] - nodes[None, :]
        np.fill_diagonal(diff, 1.0)
        w = 1.0 / np.prod(diff, axis=1)
        self.barycentric_weights = w / np.max(np.abs(w))

    def __len__(self):
        return self.nodes.size

    def eval_matrix(self, targets) -> np.ndarray:
        """Matrix E with E[a, i] = l_i(targets[a])."""
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        x, w = self.nodes, self.barycentric_weights
        E = np.empty((targets.size, x.size))
        for a, t in enumerate(targets):
            hit = np.nonzero(t == x)[0]
            if hit.size:
                E[a] = 0.0
                E[a, hit[0]] = 1.0
            else:
                c = w / (t - x)
                E[a] = c / np.sum(c)
        return E

    def deriv_matrix(self, targets) -> np.ndarray:
        """Matrix D with D[a, i] = l_i'(targets[a]).

        Targets coinciding with a node use the classical barycentric
        differentiation formula; other targets use
        l_i'(t) = l_i(t) * sum_{j != i} 1/(t - x_j), which stays accurate
        arbitrarily close to the nodes.
        """
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        x, w = self.nodes, self.barycentric_weights
        D = np.empty((targets.size, x.size))
        off_diag = ~np.eye(x.size, dtype=bool)
        for a, t in enumerate(targets):
            hit = np.nonzero(t == x)[0]
            if hit.size:
                k = hit[0]
                row = np.zeros(x.size)
                mask = np.arange(x.size) != k
                row[mask] = (w[mask] / w[k]) / (t - x[mask])
                row[k] = -np.sum(row[mask])
                D[a] = row
            else:
                inv = 1.0 / (t - x)
                ell = w * inv
                ell /= np.sum(ell)
                # per-entry sums computed directly: subtracting the huge
                # 1/(t - x_k) term from the total would cancel catastrophically
                sums = np.where(off_diag, inv[None, :], 0.0).sum(axis=1)
                D[a] = ell * sums
        return D

    def interpolate(self, coeffs, x: float) -> float:
        """Value at x of the polynomial with nodal values `coeffs`."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.nodes.size:
            raise ValueError(
                f"expected {self.nodes.size} nodal values, got {coeffs.shape[-1]}"
            )
        return coeffs @ self.eval_matrix(x)[0]


def lagrange_eval(basis: LagrangeBasis, coeffs, x: float) -> float:
    return basis.interpolate(coeffs, x)


def lagrange_deriv_matrix(basis: LagrangeBasis, targets) -> np.ndarray:
    return basis.deriv_matrix(targets)


@dataclass(frozen=True)
class NodeSet1D:
    """Solution/flux node layout of the staggered scheme for one degree.

    flux_nodes[0] = 0 and flux_nodes[-1] = 1 coincide with the element
    boundaries; the n interior flux nodes are the Gauss-Legendre points.
    Solution points sit strictly inside the control volumes bounded by
    consecutive flux nodes, which is what the stability of the method
    requires of them.
    """

    degree: int
    solution_nodes: np.ndarray = field(init=False)
    flux_nodes: np.ndarray = field(init=False)
    gl_weights: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.degree
        if n < 0:
            raise ValueError(f"polynomial degree must be nonnegative, got n={n}")
        sol = chebyshev_solution_nodes(n)
        if n >= 1:
            inner, w = gauss_legendre(n)
        else:
            inner, w = np.empty(0), np.empty(0)
        flux = np.concatenate(([0.0], inner, [1.0]))
        for i in range(n + 1):
            if not (flux[i] < sol[i] < flux[i + 1]):
                raise ValueError(
                    f"solution node {sol[i]} escapes control volume "
                    f"({flux[i]}, {flux[i + 1]}) at degree {n}"
                )
        object.__setattr__(self, "solution_nodes", sol)
        object.__setattr__(self, "flux_nodes", flux)
        object.__setattr__(self, "gl_weights", w)

    @cached_property
    def solution_basis(self) -> LagrangeBasis:
        return LagrangeBasis(self.solution_nodes)

    @cached_property
    def flux_basis(self) -> LagrangeBasis:
        return LagrangeBasis(self.flux_nodes)


@dataclass(frozen=True)
class TimeQuadrature:
    """Gauss-Legendre collocation in time on the unit step, degree n."""

    degree: int
    time_nodes: np.ndarray = field(init=False)
    time_weights: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError(f"degree must be nonnegative, got {self.degree}")
        nodes, weights = gauss_legendre(self.degree + 1)
        object.__setattr__(self, "time_nodes", nodes)
        object.__setattr__(self, "time_weights", weights)
