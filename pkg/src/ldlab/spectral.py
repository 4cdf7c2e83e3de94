"""Dense Hermitian linear algebra, subspaces, and linear relations.

Everything downstream (left-definite spaces, extension theory, perturbations)
is built on the primitives in this module: validated Hermitian matrices,
spectral decompositions, matrix powers through the eigenbasis, orthonormal
subspaces with rank decisions by singular-value cutoff, and linear relations
represented as subspaces of the doubled space H (+) H.

All values are immutable after construction and every operation is a pure
function, so concurrent read-only use is safe.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-12   # allowed asymmetry relative to the largest entry
ORTHO_TOL = 1e-10        # max-norm tolerance for B*B - I
RANK_RTOL = 1e-10        # singular values below RANK_RTOL * sigma_max are zero
SUBSPACE_TOL = 1e-10     # projector max-norm tolerance for subspace equality
CLUSTER_RTOL = 1e-10     # eigenvalues closer than this (relative) form a cluster
POSITIVE_FLOOR = 1e-8    # smallest eigenvalue admitted for fractional powers


class NotHermitianError(ValueError):
    """Raised when a matrix fails the Hermitian symmetry invariant."""


class DimensionMismatchError(ValueError):
    """Raised when ambient dimensions of operands disagree."""


class SpectrumError(ValueError):
    """Raised when a spectral precondition (e.g. strict positivity) fails."""


def inner(x, y) -> complex:
    """Inner product, linear in the first argument: <x,y> = sum x_i conj(y_i)."""
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


@dataclass(frozen=True)
class HermitianMatrix:
    """A validated n x n complex Hermitian matrix."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise NotHermitianError(f"expected a square matrix, got shape {entries.shape}")
        if entries.shape[0] == 0:
            raise NotHermitianError("empty matrix")
        if not np.all(np.isfinite(entries.view(float))):
            raise NotHermitianError("matrix contains non-finite entries")
        asym = float(np.max(np.abs(entries - entries.conj().T)))
        scale = float(np.max(np.abs(entries)))
        if asym > HERMITIAN_RTOL * max(scale, 1e-300):
            raise NotHermitianError(
                f"matrix is not Hermitian: max asymmetry {asym:.3e} "
                f"exceeds {HERMITIAN_RTOL:.1e} * {scale:.3e}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def norm_max(self) -> float:
        return float(np.max(np.abs(self.entries)))

    @classmethod
    def diag(cls, values) -> "HermitianMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, n: int) -> "HermitianMatrix":
        return cls(np.eye(n))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def as_hermitian(matrix) -> HermitianMatrix:
    """Coerce an array-like (or pass through a HermitianMatrix) with validation."""
    if isinstance(matrix, HermitianMatrix):
        return matrix
    return HermitianMatrix(np.asarray(matrix))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        u = np.asarray(self.eigenvectors, dtype=complex)
        if np.any(np.diff(lam) < 0):
            raise SpectrumError("eigenvalues must be nondecreasing")
        ortho = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[1]))))
        if ortho > ORTHO_TOL:
            raise SpectrumError(f"eigenvector columns not orthonormal: {ortho:.3e}")
        lam.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", u)

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def apply_function(self, func) -> np.ndarray:
        """U diag(func(lambda)) U* as a plain ndarray."""
        u = self.eigenvectors
        return (u * func(self.eigenvalues)) @ u.conj().T


def eigh(matrix) -> SpectralDecomposition:
    """Hermitian eigendecomposition with cluster re-orthonormalization.

    Eigenvalues within CLUSTER_RTOL * ||H||_max of each other are treated as
    one cluster and their eigenvectors re-orthonormalized by QR, so degenerate
    spectra always yield cleanly orthonormal columns.

    Raises NotHermitianError for non-Hermitian input (with the max asymmetry
    reported) and propagates LinAlgError on non-convergence.
    """
    h = as_hermitian(matrix)
    lam, u = np.linalg.eigh(h.entries)
    gap_tol = CLUSTER_RTOL * max(h.norm_max, 1e-300)
    start = 0
    for i in range(1, len(lam) + 1):
        if i == len(lam) or lam[i] - lam[i - 1] > gap_tol:
            if i - start > 1:
                q, _ = np.linalg.qr(u[:, start:i])
                u[:, start:i] = q
            start = i
    decomp = SpectralDecomposition(lam, u)
    resid = float(np.max(np.abs(h.entries @ u - u * lam)))
    if resid > ORTHO_TOL * max(h.norm_max, 1e-300):
        raise SpectrumError(f"eigendecomposition residual too large: {resid:.3e}")
    return decomp


def mat_power(matrix, r: float) -> HermitianMatrix:
    """H^r through the spectral decomposition, U diag(lambda^r) U*.

    For non-integer (or negative) r every eigenvalue must exceed
    POSITIVE_FLOOR; otherwise a SpectrumError names the offending eigenvalue.
    mat_power(H, 0) is the identity and mat_power(H, 1) returns H itself.
    """
    if not np.isfinite(r):
        raise ValueError("power must be finite")
    h = as_hermitian(matrix)
    if r == 1:
        return h
    if r == 0:
        return HermitianMatrix.identity(h.dim)
    decomp = eigh(h)
    lam = decomp.eigenvalues
    fractional = not (float(r).is_integer() and r > 0)
    if fractional and lam[0] <= POSITIVE_FLOOR:
        raise SpectrumError(
            f"matrix is not strictly positive: eigenvalue {lam[0]:.6e} <= "
            f"{POSITIVE_FLOOR:.1e} forbids power {r}"
        )
    powered = decomp.apply_function(lambda x: np.power(x, float(r)))
    return HermitianMatrix((powered + powered.conj().T) / 2)


def _onb(columns: np.ndarray, ambient: int) -> np.ndarray:
    """Orthonormal basis of the column space, rank by singular-value cutoff."""
    cols = np.asarray(columns, dtype=complex).reshape(ambient, -1)
    if cols.shape[1] == 0:
        return np.zeros((ambient, 0), dtype=complex)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    return u[:, :rank]


def _nullspace(m: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ker(m), singular values below cutoff count as zero."""
    m = np.asarray(m, dtype=complex)
    if m.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:, :].conj().T


@dataclass(frozen=True)
class Subspace:
    """A subspace of C^n carried by an orthonormal column basis."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex).reshape(self.ambient_dim, -1)
        if basis.shape[1] > self.ambient_dim:
            raise DimensionMismatchError(
                f"rank {basis.shape[1]} exceeds ambient dimension {self.ambient_dim}"
            )
        if basis.shape[1] > 0:
            ortho = float(np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[1]))))
            if ortho > ORTHO_TOL:
                raise SpectrumError(f"basis columns not orthonormal: {ortho:.3e}")
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    @classmethod
    def span(cls, columns, ambient_dim: int | None = None) -> "Subspace":
        cols = np.asarray(columns, dtype=complex)
        if cols.ndim == 1:
            cols = cols[:, None]
        n = ambient_dim if ambient_dim is not None else cols.shape[0]
        return cls(n, _onb(cols, n))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=complex))

    def contains(self, vector, tol: float = SUBSPACE_TOL) -> bool:
        v = np.asarray(vector, dtype=complex)
        scale = float(np.linalg.norm(v))
        if scale == 0.0:
            return True
        resid = v - self.basis @ (self.basis.conj().T @ v)
        return float(np.linalg.norm(resid)) <= tol * scale


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return Subspace(a.ambient_dim, _onb(np.hstack([a.basis, b.basis]), a.ambient_dim))


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the nullspace of [A, -B]: x = A u = B v."""
    _check_ambient(a, b)
    if a.rank == 0 or b.rank == 0:
        return Subspace.zero(a.ambient_dim)
    null = _nullspace(np.hstack([a.basis, -b.basis]))
    return Subspace(a.ambient_dim, _onb(a.basis @ null[: a.rank], a.ambient_dim))


def orthocomplement(a: Subspace) -> Subspace:
    if a.rank == 0:
        return Subspace.full(a.ambient_dim)
    u, s, _ = np.linalg.svd(a.basis, full_matrices=True)
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    return Subspace(a.ambient_dim, u[:, rank:])


def subspace_algebra(kind: str, a: Subspace, b: Subspace | None = None) -> Subspace:
    """Dispatcher over {sum | intersect | orthocomplement}."""
    if kind == "orthocomplement":
        return orthocomplement(a)
    if b is None:
        raise ValueError(f"operation {kind!r} needs a second subspace")
    if kind == "sum":
        return subspace_sum(a, b)
    if kind == "intersect":
        return subspace_intersect(a, b)
    raise ValueError(f"unknown subspace operation {kind!r}")


def subspaces_equal(a: Subspace, b: Subspace, tol: float = SUBSPACE_TOL) -> bool:
    _check_ambient(a, b)
    if a.rank != b.rank:
        return False
    return float(np.max(np.abs(a.projector - b.projector))) <= tol if a.rank else True


@dataclass(frozen=True)
class LinearRelation:
    """A linear relation on C^n: a subspace of the doubled space C^n (+) C^n.

    The graph basis is stored with the first n rows holding the `f` block and
    the last n rows the `g` block of pairs (f, g).
    """

    graph: Subspace

    def __post_init__(self):
        if self.graph.ambient_dim % 2 != 0:
            raise DimensionMismatchError("relation graph must live in a doubled space")

    @property
    def space_dim(self) -> int:
        return self.graph.ambient_dim // 2

    @property
    def dim(self) -> int:
        return self.graph.rank

    def _blocks(self):
        n = self.space_dim
        return self.graph.basis[:n], self.graph.basis[n:]

    @classmethod
    def from_matrix(cls, matrix) -> "LinearRelation":
        a = np.asarray(matrix, dtype=complex)
        n = a.shape[0]
        return cls(Subspace.span(np.vstack([np.eye(n), a]), 2 * n))

    @classmethod
    def from_blocks(cls, f_block, g_block) -> "LinearRelation":
        f = np.atleast_2d(np.asarray(f_block, dtype=complex))
        g = np.atleast_2d(np.asarray(g_block, dtype=complex))
        if f.shape != g.shape:
            raise DimensionMismatchError("f and g blocks must have matching shapes")
        return cls(Subspace.span(np.vstack([f, g]), 2 * f.shape[0]))

    @classmethod
    def multivalued(cls, n: int) -> "LinearRelation":
        """The purely multivalued relation {0} x C^n."""
        return cls(Subspace.span(np.vstack([np.zeros((n, n)), np.eye(n)]), 2 * n))

    def domain(self) -> Subspace:
        f, _ = self._blocks()
        return Subspace(self.space_dim, _onb(f, self.space_dim))

    def mul_part(self) -> Subspace:
        """The multivalued part {g : (0, g) in the relation}."""
        n = self.space_dim
        bottom = Subspace.span(np.vstack([np.zeros((n, n)), np.eye(n)]), 2 * n)
        inter = subspace_intersect(self.graph, bottom)
        return Subspace(n, _onb(inter.basis[n:], n))


def rel_adjoint(t: LinearRelation) -> LinearRelation:
    """Adjoint relation: the orthogonal complement of the flipped graph J(f,g) = (g,-f)."""
    f, g = t._blocks()
    flipped = Subspace.span(np.vstack([g, -f]), 2 * t.space_dim)
    return LinearRelation(orthocomplement(flipped))


def rel_compose(t: LinearRelation, s: LinearRelation) -> LinearRelation:
    """Composition T o S = {(f, h) : exists g with (f, g) in S and (g, h) in T}.

    Matching pairs are found as the nullspace of [G_S, -F_T] acting on graph
    coordinates, so graph(A) o graph(B) = graph(AB) holds by construction.
    """
    if t.space_dim != s.space_dim:
        raise DimensionMismatchError("relations live on different spaces")
    n = t.space_dim
    fs, gs = s._blocks()
    ft, gt = t._blocks()
    null = _nullspace(np.hstack([gs, -ft]))
    a, b = null[: s.dim], null[s.dim:]
    return LinearRelation(Subspace.span(np.vstack([fs @ a, gt @ b]), 2 * n))


def rel_power(t: LinearRelation, n: int) -> LinearRelation:
    if n < 1:
        raise ValueError("power must be a positive integer")
    out = t
    for _ in range(n - 1):
        out = rel_compose(out, t)
    return out


def rel_is_selfadjoint(t: LinearRelation, tol: float = SUBSPACE_TOL) -> bool:
    return subspaces_equal(t.graph, rel_adjoint(t).graph, tol)


def save_matrix_csv(matrix, path):
    """Write a complex matrix row-major, each entry as adjacent (re, im) columns."""
    m = np.asarray(matrix, dtype=complex)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in m:
            flat = []
            for z in row:
                flat.extend((repr(float(z.real)), repr(float(z.imag))))
            writer.writerow(flat)


def load_matrix_csv(path) -> np.ndarray:
    """Read a complex matrix written by save_matrix_csv."""
    rows = []
    with open(path, "r", newline="") as fh:
        for record in csv.reader(fh):
            if not record:
                continue
            vals = [float(x) for x in record]
            if len(vals) % 2 != 0:
                raise ValueError(f"{path}: odd column count, expected (re, im) pairs")
            rows.append([complex(vals[2 * j], vals[2 * j + 1]) for j in range(len(vals) // 2)])
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    return np.array(rows, dtype=complex)
