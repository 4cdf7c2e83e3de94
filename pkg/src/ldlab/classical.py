"""Exact Laguerre machinery: recurrences, quadrature, and the two inner products.

The operator is the shifted Laguerre operator A = l + k acting diagonally on
the generalized Laguerre basis, c_m -> (m + k)^n c_m. The module evaluates the
explicit derivative-weighted inner product

    <p,q>_n = sum_j b_j(n,k) integral p^(j) q^(j) t^(alpha+j) exp(-t) dt

with Gauss-Laguerre quadrature that is exact on the polynomial test grid, and
the spectral inner product sum_m (m+k)^n c_m d_m ||L_m||^2, whose agreement is
the flagship identity check of the package.

Polynomials are represented by their coefficient vectors in L_n^alpha.
Derivatives use the basis identity (L_n^alpha)' = -L_{n-1}^{alpha+1}
symbolically, never finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, lgamma
from math import exp as _exp

import numpy as np
from scipy.special import roots_genlaguerre

QUADRATURE_RTOL = 1e-10
IDENTITY_RTOL = 1e-8


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a)/Gamma(b) in ratio form, safe against overflow for a, b <= ~170."""
    return _exp(lgamma(a) - lgamma(b))


def laguerre_norm_sq(n: int, alpha: float) -> float:
    """||L_n^alpha||^2 = Gamma(n + alpha + 1) / n! under the weight t^alpha e^{-t}."""
    return gamma_ratio(n + alpha + 1.0, n + 1.0)


def bj_coeff(n: int, k: float, j: int):
    """The Dirichlet-form coefficient b_j(n,k) = sum_i (-1)^{i+j}/j! C(j,i) (k+i)^n.

    Exact rational arithmetic when k is an integer (returned as Fraction-exact
    float), double evaluation otherwise. b_0 = k^n and b_n = 1 always.
    """
    if j < 0 or j > n:
        raise ValueError(f"derivative order j={j} outside 0..{n}")
    if not k > 0:
        raise ValueError(f"spectral shift k must be positive, got {k}")
    if float(k).is_integer():
        kk = int(k)
        total = sum(
            Fraction((-1) ** (i + j) * comb(j, i) * (kk + i) ** n, factorial(j))
            for i in range(j + 1)
        )
        return float(total)
    return float(sum((-1) ** (i + j) / factorial(j) * comb(j, i) * (k + i) ** n
                     for i in range(j + 1)))


@dataclass(frozen=True)
class LaguerreBasis:
    """Generalized Laguerre basis L_0..L_N for weight t^alpha e^{-t}.

    Stores the three-term recurrence
    (n+1) L_{n+1} = (a_n - x) L_n - c_n L_{n-1}, a_n = 2n+alpha+1, c_n = n+alpha.
    """

    alpha: float
    max_degree: int
    rec_a: np.ndarray
    rec_c: np.ndarray

    @classmethod
    def build(cls, alpha: float, max_degree: int) -> "LaguerreBasis":
        if not alpha > -1:
            raise ValueError(f"Laguerre parameter must satisfy alpha > -1, got {alpha}")
        if max_degree < 0:
            raise ValueError("max_degree must be nonnegative")
        ns = np.arange(max_degree + 1, dtype=float)
        a = 2 * ns + alpha + 1
        c = ns + alpha
        a.setflags(write=False)
        c.setflags(write=False)
        return cls(float(alpha), int(max_degree), a, c)

    def eval_all(self, x) -> np.ndarray:
        """Matrix of values V[n, i] = L_n^alpha(x_i) for n = 0..max_degree."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((self.max_degree + 1, x.shape[0]))
        out[0] = 1.0
        if self.max_degree >= 1:
            out[1] = self.alpha + 1.0 - x
        for n in range(1, self.max_degree):
            out[n + 1] = ((self.rec_a[n] - x) * out[n] - self.rec_c[n] * out[n - 1]) / (n + 1)
        return out

    def norm_sq(self, n: int) -> float:
        return laguerre_norm_sq(n, self.alpha)


def laguerre_eval(basis: LaguerreBasis, n: int, x):
    """L_n^alpha(x) by the three-term recurrence."""
    if n < 0 or n > basis.max_degree:
        raise ValueError(f"degree {n} outside basis range 0..{basis.max_degree}")
    values = basis.eval_all(x)[n]
    return float(values[0]) if np.isscalar(x) else values


def laguerre_deriv(basis: LaguerreBasis, n: int, x):
    """d/dx L_n^alpha = -L_{n-1}^{alpha+1}."""
    if n < 0 or n > basis.max_degree:
        raise ValueError(f"degree {n} outside basis range 0..{basis.max_degree}")
    if n == 0:
        return 0.0 if np.isscalar(x) else np.zeros(np.shape(x))
    shifted = LaguerreBasis.build(basis.alpha + 1, n - 1)
    values = -shifted.eval_all(x)[n - 1]
    return float(values[0]) if np.isscalar(x) else values


@dataclass(frozen=True)
class PolyInLaguerre:
    """Polynomial expanded in L_n^alpha: p = sum_m coeffs[m] L_m^alpha."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.shape[0] == 0:
            raise ValueError("coefficients must be a nonempty 1-D array")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1


def _poly_coeffs(p) -> np.ndarray:
    if isinstance(p, PolyInLaguerre):
        return p.coeffs
    return np.asarray(p, dtype=float)


def x_poly(basis: LaguerreBasis) -> PolyInLaguerre:
    """The monomial x = (alpha + 1) L_0 - L_1."""
    return PolyInLaguerre(np.array([basis.alpha + 1.0, -1.0]))


def basis_poly(n: int) -> PolyInLaguerre:
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    return PolyInLaguerre(coeffs)


def derivative_coeffs(coeffs: np.ndarray, order: int) -> np.ndarray:
    """Coefficients of p^(order) in the basis L_m^{alpha+order}.

    Repeated application of (L_n^a)' = -L_{n-1}^{a+1}: the j-th derivative of
    sum c_n L_n^alpha is (-1)^j sum c_n L_{n-j}^{alpha+j}.
    """
    c = np.asarray(coeffs, dtype=float)
    if order == 0:
        return c
    if order >= c.shape[0]:
        return np.zeros(1)
    return (-1.0) ** order * c[order:]


def laguerre_apply_A(basis: LaguerreBasis, k: float, n: int, p) -> PolyInLaguerre:
    """Apply A^n = (l + k)^n diagonally: c_m -> (m + k)^n c_m."""
    if not k > 0:
        raise ValueError(f"spectral shift k must be positive, got {k}")
    if n < 0:
        raise ValueError("power must be a nonnegative integer")
    c = _poly_coeffs(p)
    m = np.arange(c.shape[0], dtype=float)
    return PolyInLaguerre((m + k) ** n * c)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for integral f(t) t^weight_exponent e^{-t} dt on (0, inf)."""

    weight_exponent: float
    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def integrate_values(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def gauss_quadrature(weight_exponent: float, m: int) -> QuadratureRule:
    """Gauss-Laguerre rule with m nodes for weight t^{weight_exponent} e^{-t}.

    Exact for polynomials up to degree 2m - 1 (Golub-Welsch nodes via scipy).
    """
    if not weight_exponent > -1:
        raise ValueError(f"weight exponent must exceed -1, got {weight_exponent}")
    if m < 1:
        raise ValueError("node count must be at least 1")
    nodes, weights = roots_genlaguerre(m, weight_exponent)
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        raise ArithmeticError(f"node solve failed for alpha'={weight_exponent}, m={m}")
    return QuadratureRule(float(weight_exponent), nodes, weights, 2 * m - 1)


@dataclass(frozen=True)
class DirichletFormSpec:
    """Data of the explicit left-definite inner product: power n, shift k, b_j table."""

    n: int
    k: float
    b: tuple

    @classmethod
    def build(cls, n: int, k: float) -> "DirichletFormSpec":
        if n < 1:
            raise ValueError("form power n must be a positive integer")
        b = tuple(bj_coeff(n, k, j) for j in range(n + 1))
        return cls(int(n), float(k), b)

    def __post_init__(self):
        if abs(self.b[-1] - 1.0) > 1e-9:
            raise ValueError(f"b_n(n,k) must equal 1, got {self.b[-1]}")
        if abs(self.b[0] - self.k ** self.n) > 1e-9 * max(1.0, self.k ** self.n):
            raise ValueError(f"b_0(n,k) must equal k^n, got {self.b[0]}")


def dirichlet_inner(spec: DirichletFormSpec, basis: LaguerreBasis, p, q) -> float:
    """sum_j b_j(n,k) integral p^(j) q^(j) t^(alpha+j) e^{-t} dt, each term by quadrature.

    Node count floor((deg p + deg q)/2) + 1 makes every integral exact.
    """
    cp = _poly_coeffs(p)
    cq = _poly_coeffs(q)
    deg_p, deg_q = cp.shape[0] - 1, cq.shape[0] - 1
    if deg_p > basis.max_degree or deg_q > basis.max_degree:
        raise ValueError(
            f"degrees ({deg_p}, {deg_q}) exceed basis max_degree {basis.max_degree}"
        )
    m = (deg_p + deg_q) // 2 + 1
    total = 0.0
    for j in range(spec.n + 1):
        dp = derivative_coeffs(cp, j)
        dq = derivative_coeffs(cq, j)
        if not (np.any(dp) and np.any(dq)):
            continue
        rule = gauss_quadrature(basis.alpha + j, m)
        shifted = LaguerreBasis.build(basis.alpha + j, max(dp.shape[0], dq.shape[0]) - 1)
        values = shifted.eval_all(rule.nodes)
        p_vals = dp @ values[: dp.shape[0]]
        q_vals = dq @ values[: dq.shape[0]]
        total += spec.b[j] * rule.integrate_values(p_vals * q_vals)
    return total


def spectral_inner(basis: LaguerreBasis, k: float, n: int, p, q) -> float:
    """<A^n p, q> evaluated in the eigenbasis: sum_m (m+k)^n c_m d_m ||L_m||^2."""
    cp = _poly_coeffs(p)
    cq = _poly_coeffs(q)
    m = max(cp.shape[0], cq.shape[0])
    cp = np.pad(cp, (0, m - cp.shape[0]))
    cq = np.pad(cq, (0, m - cq.shape[0]))
    ms = np.arange(m, dtype=float)
    norms = np.array([basis.norm_sq(i) for i in range(m)])
    return float(np.sum((ms + k) ** n * cp * cq * norms))


def laguerre_identity_table(alpha: float, k: float, n: int, max_deg: int) -> list:
    """Rows (alpha, k, n, degP, degQ, dirichlet, spectral, residual) over basis pairs."""
    basis = LaguerreBasis.build(alpha, max_deg)
    spec = DirichletFormSpec.build(n, k)
    rows = []
    for i in range(max_deg + 1):
        for j in range(i, max_deg + 1):
            p = basis_poly(i)
            q = basis_poly(j)
            d = dirichlet_inner(spec, basis, p, q)
            s = spectral_inner(basis, k, n, p, q)
            rows.append((alpha, k, n, i, j, d, s, abs(d - s) / (1.0 + abs(s))))
    return rows


def laguerre_identity_check(alpha: float, k: float, n: int, max_deg: int) -> float:
    """Max relative deviation |dirichlet - spectral| / (1 + |spectral|) over basis pairs."""
    if n > 6:
        raise ValueError("identity check supports form powers n <= 6")
    return max(row[7] for row in laguerre_identity_table(alpha, k, n, max_deg))


def jacobi_spectrum(alpha: float, beta: float, max_degree: int) -> np.ndarray:
    """Jacobi eigenvalue law n(n + alpha + beta + 1), n = 0..max_degree."""
    if not (alpha > 0 and beta > 0):
        raise ValueError(f"Jacobi parameters must be positive, got ({alpha}, {beta})")
    ns = np.arange(max_degree + 1, dtype=float)
    return ns * (ns + alpha + beta + 1.0)
