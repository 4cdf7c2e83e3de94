"""Left-definite spaces and operators for positive semi-bounded Hermitian matrices.

The central object is a SpectralOperator: a Hermitian matrix together with its
eigendecomposition, its lower bound k, and a shift gamma < k. From it we build
the r-th left-definite space (Gram matrix A^r), the r-th left-definite
operator, the shifted closed forms, and a verification report for the
defining properties and the spectral-stability statements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .report import Report, Table
from .spectral import (
    DimensionMismatchError,
    HermitianMatrix,
    SpectralDecomposition,
    as_hermitian,
    eigh,
    inner,
)

PROPERTY_TOL = 1e-9


class ShiftError(ValueError):
    """Raised when an operator is not positive (or a shift is not below its bound)."""


@dataclass(frozen=True)
class SpectralOperator:
    """Hermitian matrix + spectral data + lower bound k + shift gamma < k."""

    matrix: HermitianMatrix
    decomp: SpectralDecomposition
    lower_bound: float
    shift: float

    def __post_init__(self):
        if not self.shift < self.lower_bound:
            raise ShiftError(
                f"shift {self.shift} must lie strictly below the lower bound {self.lower_bound}"
            )

    @classmethod
    def from_matrix(cls, matrix, shift: float | None = None) -> "SpectralOperator":
        h = as_hermitian(matrix)
        decomp = eigh(h)
        k = float(decomp.eigenvalues[0])
        if shift is None:
            shift = 0.0 if k > 0 else k - 1.0
        return cls(h, decomp, k, float(shift))

    @classmethod
    def from_diag(cls, values, shift: float | None = None) -> "SpectralOperator":
        return cls.from_matrix(HermitianMatrix.diag(values), shift)

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.decomp.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.decomp.eigenvectors

    def require_positive(self):
        if self.lower_bound <= 0:
            raise ShiftError(
                f"operator lower bound {self.lower_bound} <= 0: apply a shift first "
                "(left-definite constructions need k > 0)"
            )

    def power(self, r: float) -> HermitianMatrix:
        """A^r through the stored decomposition (positive spectrum assumed for fractional r)."""
        powered = self.decomp.apply_function(lambda x: np.power(x, float(r)))
        return HermitianMatrix((powered + powered.conj().T) / 2)

    def apply_power(self, r: float, x) -> np.ndarray:
        """A^r x through the eigenbasis without forming the matrix."""
        u = self.decomp.eigenvectors
        coeff = u.conj().T @ np.asarray(x, dtype=complex)
        return u @ (np.power(self.decomp.eigenvalues, float(r)) * coeff)


@dataclass(frozen=True)
class LeftDefiniteSpace:
    """The r-th left-definite space: inner product <x,y>_r = <A^{r/2}x, A^{r/2}y>."""

    r: float
    gram: HermitianMatrix
    operator: SpectralOperator


@dataclass(frozen=True)
class LeftDefiniteOperator:
    """The r-th left-definite operator: same matrix action, domain marker D(A^{(r+2)/2})."""

    r: float
    action: HermitianMatrix
    domain_exponent: float
    domain_tag: str

    @property
    def spectrum(self) -> np.ndarray:
        return eigh(self.action).eigenvalues


def _exponent_tag(exponent: float) -> str:
    frac = Fraction(exponent).limit_denominator(64)
    if abs(float(frac) - exponent) > 1e-12:
        return f"D(A^{exponent:g})"
    if frac.denominator == 1:
        return f"D(A^{frac.numerator})"
    return f"D(A^{{{frac.numerator}/{frac.denominator}}})"


def ld_space(operator: SpectralOperator, r: float) -> LeftDefiniteSpace:
    """Build H_r with Gram matrix A^r; requires k > 0 and r > 0."""
    operator.require_positive()
    if not r > 0:
        raise ValueError(f"left-definite index must be positive, got {r}")
    return LeftDefiniteSpace(float(r), operator.power(r), operator)


def ld_inner(space: LeftDefiniteSpace, x, y) -> complex:
    """<x,y>_r = <A^{r/2}x, A^{r/2}y>, equal to <A^r x, y> for matrices."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (space.operator.dim,) or y.shape != (space.operator.dim,):
        raise DimensionMismatchError(
            f"vectors must have shape ({space.operator.dim},), got {x.shape} and {y.shape}"
        )
    half_x = space.operator.apply_power(space.r / 2, x)
    half_y = space.operator.apply_power(space.r / 2, y)
    return inner(half_x, half_y)


def ld_operator(operator: SpectralOperator, r: float) -> LeftDefiniteOperator:
    """The r-th left-definite operator; at finite dimension the action is A itself."""
    operator.require_positive()
    if not r > 0:
        raise ValueError(f"left-definite index must be positive, got {r}")
    exponent = (r + 2) / 2
    return LeftDefiniteOperator(float(r), operator.matrix, exponent, _exponent_tag(exponent))


@dataclass(frozen=True)
class ClosedFormR:
    """Shifted closed form t_r[f,g] = <(A-gamma)^{r/2}f, (A-gamma)^{r/2}g> + gamma<f,g>.

    r is a positive integer; the form is semi-bounded with lower bound
    gamma + (k - gamma)^r.
    """

    r: int
    gamma: float
    operator: SpectralOperator

    def __post_init__(self):
        if not (isinstance(self.r, int) or float(self.r).is_integer()) or self.r < 1:
            raise ValueError(f"closed-form index must be a positive integer, got {self.r}")
        if not self.gamma < self.operator.lower_bound:
            raise ShiftError(
                f"shift {self.gamma} must lie strictly below the lower bound "
                f"{self.operator.lower_bound}"
            )
        object.__setattr__(self, "r", int(self.r))

    def __call__(self, f, g) -> complex:
        f = np.asarray(f, dtype=complex)
        g = np.asarray(g, dtype=complex)
        u = self.operator.decomp.eigenvectors
        lam = self.operator.decomp.eigenvalues
        cf = u.conj().T @ f
        cg = u.conj().T @ g
        half = np.power(lam - self.gamma, self.r / 2)
        return inner(half * cf, half * cg) + self.gamma * inner(f, g)

    def lower_bound(self) -> float:
        return self.gamma + (self.operator.lower_bound - self.gamma) ** self.r


def pnew_form(operator: SpectralOperator, r: int, f, g, gamma: float | None = None) -> complex:
    """Evaluate the shifted closed form t_r[f,g] with gamma taken from the operator."""
    if gamma is None:
        gamma = operator.shift
    return ClosedFormR(r, gamma, operator)(f, g)


def _tolerance_scale(operator: SpectralOperator, r: float, *vectors) -> float:
    norms = [float(np.linalg.norm(v)) for v in vectors]
    return operator.matrix.norm_max ** r * max(norms) ** 2


def multiplicity_list(eigenvalues, rtol: float = 1e-8) -> list:
    """Cluster sorted eigenvalues into (value, multiplicity) pairs."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    scale = max(abs(lam[0]), abs(lam[-1]), 1e-300)
    out = []
    for v in lam:
        if out and abs(v - out[-1][0]) <= rtol * scale:
            out[-1][1] += 1
        else:
            out.append([float(v), 1])
    return [(v, m) for v, m in out]


def verify_ld_properties(
    operator: SpectralOperator, r: float, sample_count: int, seed: int
) -> Report:
    """Residual report for the left-definite property suite.

    Checks, on `sample_count` seeded random vectors: the lower bound
    <x,x>_r >= k^r <x,x>; the duality identity <x,y>_r = <A^r x, y>; that the
    eigenvectors stay orthogonal in H_r with Gram entries lambda_n^r; and that
    the eigenvalue multiplicity lists of A and of the r-th left-definite
    operator coincide.
    """
    operator.require_positive()
    space = ld_space(operator, r)
    rng = np.random.default_rng(seed)
    n = operator.dim
    k = operator.lower_bound

    report = Report(
        "left-definite property suite",
        meta={"r": float(r), "dim": n, "samples": sample_count, "seed": seed},
    )

    worst_lower = 0.0
    worst_dual = 0.0
    for _ in range(sample_count):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        y = rng.normal(size=n) + 1j * rng.normal(size=n)
        scale_x = _tolerance_scale(operator, r, x)
        scale_xy = _tolerance_scale(operator, r, x, y)
        xx_r = ld_inner(space, x, x).real
        violation = (k ** r * float(np.vdot(x, x).real) - xx_r) / scale_x
        worst_lower = max(worst_lower, violation)
        dual = abs(ld_inner(space, x, y) - inner(operator.apply_power(r, x), y)) / scale_xy
        worst_dual = max(worst_dual, dual)
    report.add_check("lower-bound(4)", f"r={r:g}, {sample_count} samples", worst_lower, PROPERTY_TOL)
    report.add_check("duality(5)", f"r={r:g}, {sample_count} samples", worst_dual, PROPERTY_TOL)

    # eigen-Gram: <phi_n, phi_m>_r = delta_nm * lambda_n^r
    u = operator.eigenvectors
    lam = operator.eigenvalues
    gram = u.conj().T @ space.gram.entries @ u
    off = gram - np.diag(np.diag(gram))
    lam_max_r = float(np.max(lam)) ** r
    report.add_check(
        "eigen-gram-offdiag", f"r={r:g}", float(np.max(np.abs(off))) / lam_max_r, PROPERTY_TOL
    )
    diag_dev = float(np.max(np.abs(np.diag(gram).real - lam ** r) / lam ** r))
    report.add_check("eigen-gram-diag", f"r={r:g}", diag_dev, PROPERTY_TOL)

    # multiplicity stability: the left-definite operator is the same matrix, so the
    # eigenvalue lists (with multiplicity) must agree exactly
    ld_op = ld_operator(operator, r)
    same = np.array_equal(operator.eigenvalues, ld_op.spectrum)
    report.add_flag("multiplicity-invariance", f"r={r:g}, tag={ld_op.domain_tag}", same)

    report.add_table(
        Table.build(
            "eigen_gram_diag",
            ("n", "lambda_n", "gram_nn", "lambda_n^r"),
            [(i, float(lam[i]), float(gram[i, i].real), float(lam[i] ** r)) for i in range(n)],
        )
    )
    return report
