"""Finite-difference Sturm-Liouville discretization and discrete boundary objects.

The differential expression is l[f] = -(1/w) [ (p f')' + q f ] on (a, b). The
flux-form stencil with half-node coefficient samples gives a symmetric matrix
T; the operator handed downstream is the similarity-symmetrized
L_h = W^{-1/2} T W^{-1/2}, so every consumer sees a Hermitian matrix.

Endpoint classification (regular / limit-circle / limit-point) is caller
metadata. Non-regular endpoints are handled by truncating the interval by a
configurable delta and flagging the operator as a truncated-domain
approximation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spectral import HermitianMatrix

ENDPOINT_KINDS = ("regular", "limit-circle", "limit-point")


class CoefficientError(ValueError):
    """Raised when p or w fail positivity at sampled grid points."""


class EndpointError(ValueError):
    """Raised for operations that need a regular endpoint."""


class SupportError(ValueError):
    """Raised when a grid function violates a compact-support precondition."""


@dataclass(frozen=True)
class SLCoefficients:
    """Coefficients p, q, w on (a, b) with user-declared endpoint types."""

    p: Callable
    q: Callable
    w: Callable
    a: float
    b: float
    endpoint_a: str = "regular"
    endpoint_b: str = "regular"
    delta: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        if self.endpoint_a not in ENDPOINT_KINDS or self.endpoint_b not in ENDPOINT_KINDS:
            raise ValueError(f"endpoint type must be one of {ENDPOINT_KINDS}")
        if not self.a < self.b:
            raise ValueError(f"empty interval ({self.a}, {self.b})")

    @classmethod
    def flat(cls, a: float = 0.0, b: float = float(np.pi)) -> "SLCoefficients":
        one = lambda x: np.ones_like(np.asarray(x, dtype=float))
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        return cls(one, zero, one, a, b, "regular", "regular", 0.0, "flat")

    @classmethod
    def jacobi(cls, alpha: float, beta: float) -> "SLCoefficients":
        """w = (1-x)^a (1+x)^b, p = (1-x)^{a+1} (1+x)^{b+1} on (-1, 1); eigenvalues n(n+a+b+1)."""
        if not (alpha > 0 and beta > 0):
            raise ValueError(f"Jacobi parameters must be positive, got ({alpha}, {beta})")
        p = lambda x: (1 - x) ** (alpha + 1) * (1 + x) ** (beta + 1)
        w = lambda x: (1 - x) ** alpha * (1 + x) ** beta
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        return cls(p, zero, w, -1.0, 1.0, "limit-circle", "limit-circle", 0.0, "jacobi")

    @classmethod
    def laguerre(cls, alpha: float, cutoff: float = 40.0, delta: float = 1e-3) -> "SLCoefficients":
        """w = x^a e^{-x}, p = x^{a+1} e^{-x} on (0, cutoff): truncated-domain model."""
        if not alpha > -1:
            raise ValueError(f"Laguerre parameter must satisfy alpha > -1, got {alpha}")
        p = lambda x: x ** (alpha + 1) * np.exp(-x)
        w = lambda x: x ** alpha * np.exp(-x)
        zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
        return cls(p, zero, w, 0.0, cutoff, "limit-circle", "limit-point", delta, "laguerre")

    @classmethod
    def from_tables(cls, xs, ps, qs, ws) -> "SLCoefficients":
        """Tabulated coefficients, linearly interpolated."""
        xs = np.asarray(xs, dtype=float)
        ps, qs, ws = (np.asarray(v, dtype=float) for v in (ps, qs, ws))
        return cls(
            lambda x: np.interp(x, xs, ps),
            lambda x: np.interp(x, xs, qs),
            lambda x: np.interp(x, xs, ws),
            float(xs[0]), float(xs[-1]), "regular", "regular", 0.0, "tabulated",
        )

    def effective_interval(self):
        """(a', b', truncated): interval after delta-truncation of non-regular endpoints."""
        a_eff = self.a + self.delta if self.endpoint_a != "regular" else self.a
        b_eff = self.b - self.delta if self.endpoint_b != "regular" else self.b
        return a_eff, b_eff, (a_eff != self.a or b_eff != self.b)


def _grid(coeffs: SLCoefficients, n_interior: int):
    a_eff, b_eff, truncated = coeffs.effective_interval()
    h = (b_eff - a_eff) / (n_interior + 1)
    nodes = a_eff + h * np.arange(1, n_interior + 1)
    return nodes, h, a_eff, b_eff, truncated


@dataclass(frozen=True)
class DiscreteOperator:
    """Symmetrized discrete Sturm-Liouville operator on N interior nodes."""

    coeffs: SLCoefficients
    n_interior: int
    h: float
    nodes: np.ndarray
    matrix: HermitianMatrix
    weights: np.ndarray     # w at interior nodes
    p_half: np.ndarray      # p at half nodes, flux coefficients actually used
    q_nodes: np.ndarray
    bc: str
    truncated: bool

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix.entries.real)

    def apply_expression(self, f: np.ndarray) -> np.ndarray:
        """l[f] = W^{-1} T f on interior grid values (ghost nodes read as 0)."""
        return self._apply_flux(f) / self.weights

    def _apply_flux(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        ext = np.concatenate(([0.0], f, [0.0]))
        flux = self.p_half * np.diff(ext) / self.h
        return -(np.diff(flux) / self.h) - self.q_nodes * f


def discretize(coeffs: SLCoefficients, n_interior: int, bc: str = "dirichlet") -> DiscreteOperator:
    """Flux-form second-order discretization of -(1/w)[(p f')' + q f].

    Dirichlet rows clamp ghost nodes to zero; neumann-type rows zero the
    outermost fluxes instead (the natural condition, which is also the right
    treatment for degenerate limit-circle endpoints where p -> 0).
    """
    if n_interior < 3:
        raise ValueError("need at least 3 interior nodes")
    if bc not in ("dirichlet", "neumann-type"):
        raise ValueError(f"unknown boundary treatment {bc!r}")
    nodes, h, a_eff, b_eff, truncated = _grid(coeffs, n_interior)
    half = a_eff + h * (np.arange(n_interior + 1) + 0.5)
    p_half = np.asarray(coeffs.p(half), dtype=float).copy()
    w_nodes = np.asarray(coeffs.w(nodes), dtype=float)
    q_nodes = np.asarray(coeffs.q(nodes), dtype=float)
    if np.any(p_half <= 0):
        raise CoefficientError(f"p must be positive at half nodes (min {p_half.min():.3e})")
    if np.any(w_nodes <= 0):
        raise CoefficientError(f"w must be positive at grid nodes (min {w_nodes.min():.3e})")
    if bc == "neumann-type":
        p_half[0] = 0.0
        p_half[-1] = 0.0
    t = np.zeros((n_interior, n_interior))
    diag = (p_half[:-1] + p_half[1:]) / h ** 2 - q_nodes
    np.fill_diagonal(t, diag)
    off = -p_half[1:-1] / h ** 2
    t[np.arange(n_interior - 1), np.arange(1, n_interior)] = off
    t[np.arange(1, n_interior), np.arange(n_interior - 1)] = off
    root_w = np.sqrt(w_nodes)
    l_h = t / root_w[:, None] / root_w[None, :]
    l_h = (l_h + l_h.T) / 2          # bitwise symmetry despite division order
    return DiscreteOperator(
        coeffs, n_interior, h, nodes, HermitianMatrix(l_h),
        w_nodes, p_half, q_nodes, bc, truncated,
    )


def build_A0(coeffs: SLCoefficients, n_interior: int, bc: str) -> DiscreteOperator:
    """Base operator for perturbation scenarios: Dirichlet or neumann-type rows."""
    return discretize(coeffs, n_interior, bc)


def _derivative_stencil(values: np.ndarray, h: float, i: int) -> float:
    n = values.shape[0]
    if 0 < i < n - 1:
        return (values[i + 1] - values[i - 1]) / (2 * h)
    if i == 0:
        return (values[1] - values[0]) / h
    return (values[n - 1] - values[n - 2]) / h


def wronskian_form(coeffs: SLCoefficients, f, g, node_index: int):
    """The p-modified Wronskian p(x)[f'(x) g(x) - f(x) g'(x)] at an interior node.

    Bilinear (no conjugation), so [f, f] = 0 identically. Central second-order
    stencils inside, one-sided first-order at the first and last node.
    """
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError("f and g must be equal-length grid vectors")
    n = f.shape[0]
    if not 0 <= node_index < n:
        raise IndexError(f"node {node_index} outside grid of {n} interior nodes")
    nodes, h, *_ = _grid(coeffs, n)
    df = _derivative_stencil(f, h, node_index)
    dg = _derivative_stencil(g, h, node_index)
    p_x = float(coeffs.p(nodes[node_index]))
    return p_x * (df * g[node_index] - f[node_index] * dg)


def greens_dirichlet_check(op: DiscreteOperator, f, g):
    """Residual pair (symmetry, Dirichlet identity) for compactly supported f, g.

    Checks <l f, g>_w = <f, l g>_w (matrix symmetry) and the boundary-free
    Dirichlet formula <l f, g>_w = sum_half h p f' g' - sum h q f g, where f'
    is the half-node difference quotient. Both residuals are absolute.
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    n = op.n_interior
    if f.shape != (n,) or g.shape != (n,):
        raise ValueError(f"grid functions must have shape ({n},)")
    for name, v in (("f", f), ("g", g)):
        if np.any(v[:2] != 0.0) or np.any(v[-2:] != 0.0):
            raise SupportError(f"{name} must vanish on the first and last two nodes")
    h = op.h
    tf = op._apply_flux(f)
    tg = op._apply_flux(g)
    lhs = h * float(np.dot(tf, g))
    sym = abs(lhs - h * float(np.dot(f, tg)))
    ext_f = np.concatenate(([0.0], f, [0.0]))
    ext_g = np.concatenate(([0.0], g, [0.0]))
    dirichlet = h * float(np.dot(op.p_half * np.diff(ext_f) / h, np.diff(ext_g) / h)) \
        - h * float(np.dot(op.q_nodes * f, g))
    return sym, abs(lhs - dirichlet)


def principal_solution(coeffs: SLCoefficients, lam: float, endpoint: str, n_interior: int) -> np.ndarray:
    """Distinguished small solution from a regular endpoint, on the interior grid.

    Integrates the first-order system u' = v/p, v' = -(q + lam w) u with
    classical RK4 from the endpoint, normalized u = 0, p u' = +1 at a
    (and p u' = -1 at b, so the solution grows into the interval).
    """
    if endpoint not in ("a", "b"):
        raise ValueError("endpoint must be 'a' or 'b'")
    declared = coeffs.endpoint_a if endpoint == "a" else coeffs.endpoint_b
    if declared != "regular":
        raise EndpointError(
            f"principal solutions are only constructed at regular endpoints "
            f"(endpoint {endpoint} is declared {declared})"
        )
    nodes, h, a_eff, b_eff, _ = _grid(coeffs, n_interior)

    def rhs(x, state):
        u, v = state
        return np.array([v / float(coeffs.p(x)), -(float(coeffs.q(x)) + lam * float(coeffs.w(x))) * u])

    if endpoint == "a":
        x, step = a_eff, h
        state = np.array([0.0, 1.0])
        order = range(n_interior)
    else:
        x, step = b_eff, -h
        state = np.array([0.0, -1.0])
        order = range(n_interior - 1, -1, -1)

    out = np.zeros(n_interior)
    for idx in order:
        k1 = rhs(x, state)
        k2 = rhs(x + step / 2, state + step / 2 * k1)
        k3 = rhs(x + step / 2, state + step / 2 * k2)
        k4 = rhs(x + step, state + step * k3)
        state = state + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x += step
        out[idx] = state[0]
    return out


@dataclass(frozen=True)
class BoundaryFunctional:
    """Discrete representer of f -> [f, u](endpoint) for a principal solution u."""

    representer: np.ndarray
    endpoint: str
    solution: np.ndarray
    h: float
    weights: np.ndarray

    def pair(self, f) -> float:
        """Grid duality pairing h * sum w_i f_i r_i ~ [f, u](endpoint)."""
        f = np.asarray(f, dtype=float)
        return self.h * float(np.dot(self.weights * f, self.representer))


def save_grid_csv(path, xs, values):
    """Export a grid function as CSV rows (x, value) with a header."""
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    if xs.shape != values.shape:
        raise ValueError("x grid and values must have equal length")
    with open(path, "w", newline="\n") as fh:
        fh.write("x,value\n")
        for x, v in zip(xs, values):
            fh.write(f"{x:.12g},{v:.12g}\n")


def boundary_functional(coeffs: SLCoefficients, u, endpoint: str) -> BoundaryFunctional:
    """Boundary functional generated by a principal solution.

    With u(endpoint) = 0 the Wronskian collapses to [f, u](a) = -f(a) (p u')(a),
    and the normalization of principal_solution makes (p u')(a) = 1 at a
    (-1 at b). The representer concentrates the pairing on the node next to
    the endpoint, so pairings are first-order accurate in h.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    nodes, h, *_ = _grid(coeffs, n)
    w_nodes = np.asarray(coeffs.w(nodes), dtype=float)
    r = np.zeros(n)
    if endpoint == "a":
        r[0] = -1.0 / (h * w_nodes[0])          # -f(a) * (p u')(a) with (p u')(a) = +1
    elif endpoint == "b":
        r[-1] = 1.0 / (h * w_nodes[-1])         # -f(b) * (p u')(b) with (p u')(b) = -1
    else:
        raise ValueError("endpoint must be 'a' or 'b'")
    return BoundaryFunctional(r, endpoint, u, h, w_nodes)
