"""Self-adjoint extension theory and finite-rank perturbations, finite-dimensional model.

Symmetric restrictions of a Hermitian matrix play the role of minimal
operators: S = {(f, Af) : f perp C} for a constraint subspace C. On these we
compute defect spaces and deficiency indices, check the von Neumann
decomposition, build the Friedrichs extension as a linear relation, run the
power-commutation experiment, and realize the Theta-parameterized singular
perturbation A_Theta = A0 + B Theta B* for self-adjoint relations Theta,
including purely multivalued parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .leftdef import SpectralOperator
from .report import Report
from .spectral import (
    DimensionMismatchError,
    HermitianMatrix,
    LinearRelation,
    SpectrumError,
    Subspace,
    _nullspace,
    _onb,
    eigh,
    orthocomplement,
    rel_adjoint,
    rel_is_selfadjoint,
    rel_power,
    subspace_intersect,
    subspaces_equal,
)

SYMMETRY_TOL = 1e-10
FORM_TOL = 1e-10
INTERLACE_SLACK = 1e-10


class NotSymmetricError(ValueError):
    """Raised when a relation expected to be symmetric is not contained in its adjoint."""


class NotSelfAdjointError(ValueError):
    """Raised when a parameter or result fails the self-adjointness test."""


def _operator_matrix(a) -> np.ndarray:
    if isinstance(a, SpectralOperator):
        return np.asarray(a.matrix.entries)
    if isinstance(a, HermitianMatrix):
        return np.asarray(a.entries)
    return np.asarray(HermitianMatrix(np.asarray(a)).entries)


def minimal_relation(operator, constraints: Subspace) -> LinearRelation:
    """The symmetric restriction {(f, Af) : f perp C} as a linear relation."""
    a = _operator_matrix(operator)
    n = a.shape[0]
    if constraints.ambient_dim != n:
        raise DimensionMismatchError(
            f"constraints live in C^{constraints.ambient_dim}, operator in C^{n}"
        )
    dom = orthocomplement(constraints)
    if dom.rank == 0:
        return LinearRelation(Subspace.zero(2 * n))
    return LinearRelation.from_blocks(dom.basis, a @ dom.basis)


@dataclass(frozen=True)
class ExtensionProblem:
    """A Hermitian ambient action with a constraint subspace and its minimal relation."""

    operator: SpectralOperator
    constraints: Subspace
    relation: LinearRelation

    @classmethod
    def build(cls, operator: SpectralOperator, constraints: Subspace) -> "ExtensionProblem":
        return cls(operator, constraints, minimal_relation(operator, constraints))


def is_symmetric_relation(s: LinearRelation, tol: float = SYMMETRY_TOL) -> bool:
    """S subset of S*, checked by projecting the graph basis onto the adjoint graph."""
    adj = rel_adjoint(s)
    if s.dim == 0:
        return True
    resid = s.graph.basis - adj.graph.projector @ s.graph.basis
    return float(np.max(np.abs(resid))) <= tol


def _require_symmetric(s: LinearRelation):
    if not is_symmetric_relation(s):
        raise NotSymmetricError("relation is not symmetric (S is not contained in S*)")


@dataclass(frozen=True)
class DeficiencyReport:
    m_plus: int
    m_minus: int
    defect_plus: Subspace
    defect_minus: Subspace


def _defect_space(adjoint: LinearRelation, sign: float) -> Subspace:
    """{f : (f, sign*i*f) in S*}, returned as a subspace of the base space."""
    n = adjoint.space_dim
    eig_graph = LinearRelation.from_matrix(sign * 1j * np.eye(n))
    inter = subspace_intersect(adjoint.graph, eig_graph.graph)
    return Subspace(n, _onb(inter.basis[:n], n))


def deficiency_indices(s: LinearRelation) -> DeficiencyReport:
    """Deficiency indices (m+, m-) = dims of ker(S* -/+ i) with defect bases."""
    _require_symmetric(s)
    adj = rel_adjoint(s)
    d_plus = _defect_space(adj, +1.0)
    d_minus = _defect_space(adj, -1.0)
    return DeficiencyReport(d_plus.rank, d_minus.rank, d_plus, d_minus)


def von_neumann_check(s: LinearRelation) -> Report:
    """Verify graph(S*) = graph(S) (+) D+ (+) D- in the graph space.

    Checks the dimension identity dim S* = dim S + m+ + m-, pairwise trivial
    intersections of the three summands, and that their span recovers S*.
    """
    _require_symmetric(s)
    adj = rel_adjoint(s)
    rep = deficiency_indices(s)
    n = s.space_dim

    def graph_of_defect(d: Subspace, sign: float) -> Subspace:
        return Subspace.span(np.vstack([d.basis, sign * 1j * d.basis]), 2 * n)

    gp = graph_of_defect(rep.defect_plus, +1.0)
    gm = graph_of_defect(rep.defect_minus, -1.0)

    report = Report("von Neumann decomposition", meta={"dim": n})
    dim_ok = adj.dim == s.dim + rep.m_plus + rep.m_minus
    report.add_flag(
        "dimension-identity",
        f"dim S*={adj.dim}, dim S={s.dim}, m+={rep.m_plus}, m-={rep.m_minus}",
        dim_ok,
    )
    for name, a, b in (
        ("S^D+", s.graph, gp),
        ("S^D-", s.graph, gm),
        ("D+^D-", gp, gm),
    ):
        inter = subspace_intersect(a, b)
        report.add_flag(f"trivial-intersection {name}", f"dim={inter.rank}", inter.rank == 0)
    stacked = np.hstack([s.graph.basis, gp.basis, gm.basis])
    span = Subspace.span(stacked, 2 * n)
    report.add_flag("span-equals-adjoint", f"dim span={span.rank}", subspaces_equal(span, adj.graph))
    return report


def form_lower_bound(s: LinearRelation) -> float:
    """Smallest eigenvalue of the quadratic form <g, f> on graph coordinates."""
    if s.dim == 0:
        return 0.0
    f, g = s._blocks()
    q = f.conj().T @ g
    q = (q + q.conj().T) / 2
    return float(np.linalg.eigvalsh(q)[0])


def friedrichs_relation(s: LinearRelation) -> LinearRelation:
    """Friedrichs extension of a nonnegative symmetric relation.

    Construction: graph(S) (+) {0} x (dom S)^perp. The result is self-adjoint,
    extends S, has dom = dom S, and its form restricted to dom S equals
    <Sf, g>; all four properties are enforced here rather than assumed.
    """
    _require_symmetric(s)
    scale = max(float(np.max(np.abs(s.graph.basis))) if s.dim else 0.0, 1.0)
    if form_lower_bound(s) < -FORM_TOL * scale:
        raise SpectrumError(
            f"relation is not nonnegative (form lower bound {form_lower_bound(s):.3e})"
        )
    n = s.space_dim
    extra = orthocomplement(s.domain())
    cols = np.hstack(
        [s.graph.basis, np.vstack([np.zeros((n, extra.rank)), extra.basis])]
    )
    result = LinearRelation(Subspace.span(cols, 2 * n))
    if not rel_is_selfadjoint(result):
        raise NotSelfAdjointError("Friedrichs construction failed self-adjointness check")
    return result


@dataclass(frozen=True)
class PowerVerdict:
    verdict: str            # "EQUAL" | "DIFFER"
    power: int
    dim_power_of_friedrichs: int
    dim_friedrichs_of_power: int


def friedrichs_power_experiment(s: LinearRelation, n: int) -> PowerVerdict:
    """Compare dom((S_F)^n) with dom((S^n)_F) as subspaces; report the verdict only.

    The experiment makes no truth claim beyond the trivial cases (self-adjoint
    S, or n = 1, which are EQUAL by construction).
    """
    if not 1 <= n <= 4:
        raise ValueError("power experiment supports 1 <= n <= 4")
    sf_pow = rel_power(friedrichs_relation(s), n)
    pow_f = friedrichs_relation(rel_power(s, n))
    dom_a = sf_pow.domain()
    dom_b = pow_f.domain()
    verdict = "EQUAL" if subspaces_equal(dom_a, dom_b) else "DIFFER"
    return PowerVerdict(verdict, n, dom_a.rank, dom_b.rank)


def _compose_triple_space(t: LinearRelation, s: LinearRelation) -> LinearRelation:
    """Brute-force composition: intersect in (f, g, h) space, then drop g.

    Builds W1 = {(f,g,h) : (f,g) in S} and W2 = {(f,g,h) : (g,h) in T} as
    explicit subspaces of C^{3n}, intersects them, and projects the result to
    the (f, h) coordinates. Serves as the independent oracle for rel_compose.
    """
    n = t.space_dim
    ds, dt = s.dim, t.dim
    w1 = np.zeros((3 * n, ds + n), dtype=complex)
    w1[: 2 * n, :ds] = s.graph.basis
    w1[2 * n:, ds:] = np.eye(n)
    w2 = np.zeros((3 * n, dt + n), dtype=complex)
    w2[:n, dt:] = np.eye(n)
    w2[n:, :dt] = t.graph.basis
    a = Subspace.span(w1, 3 * n)
    b = Subspace.span(w2, 3 * n)
    inter = subspace_intersect(a, b)
    dropped = np.vstack([inter.basis[:n], inter.basis[2 * n:]])
    return LinearRelation(Subspace.span(dropped, 2 * n))


def _domains_equal_by_rank(a: Subspace, b: Subspace) -> bool:
    """Independent equality test: equal dims and rank of the stacked bases."""
    if a.rank != b.rank:
        return False
    if a.rank == 0:
        return True
    stacked = np.hstack([a.basis, b.basis])
    sv = np.linalg.svd(stacked, compute_uv=False)
    return int(np.sum(sv > 1e-9 * sv[0])) == a.rank


def friedrichs_power_oracle(s: LinearRelation, n: int) -> PowerVerdict:
    """Same experiment through the triple-space composition and a rank-based equality test."""
    sf = friedrichs_relation(s)
    sf_pow, s_pow = sf, s
    for _ in range(n - 1):
        sf_pow = _compose_triple_space(sf_pow, sf)
        s_pow = _compose_triple_space(s_pow, s)
    pow_f = friedrichs_relation(s_pow)
    dom_a = sf_pow.domain()
    dom_b = pow_f.domain()
    verdict = "EQUAL" if _domains_equal_by_rank(dom_a, dom_b) else "DIFFER"
    return PowerVerdict(verdict, n, dom_a.rank, dom_b.rank)


def relation_spectrum(t: LinearRelation):
    """Operator-part eigenvalues and multivalued dimension of a self-adjoint relation."""
    if not rel_is_selfadjoint(t):
        raise NotSelfAdjointError("spectrum extraction needs a self-adjoint relation")
    n = t.space_dim
    mul = t.mul_part()
    dom = orthocomplement(mul)
    if dom.rank == 0:
        return np.zeros(0), mul.rank
    f, g = t._blocks()
    coeffs, *_ = np.linalg.lstsq(f, dom.basis, rcond=None)
    if float(np.max(np.abs(f @ coeffs - dom.basis))) > 1e-8:
        raise NotSelfAdjointError("domain basis not reachable from graph (inconsistent relation)")
    values = g @ coeffs
    op_values = values - mul.projector @ values
    compressed = dom.basis.conj().T @ op_values
    compressed = (compressed + compressed.conj().T) / 2
    return np.linalg.eigvalsh(compressed), mul.rank


@dataclass(frozen=True)
class PerturbationSpec:
    """Coordinate map B (independent columns) and a self-adjoint relation Theta on C^d."""

    b_map: np.ndarray
    theta: LinearRelation

    def __post_init__(self):
        b = np.asarray(self.b_map, dtype=complex)
        if b.ndim != 2:
            raise DimensionMismatchError("B must be an n x d matrix")
        d = b.shape[1]
        if d == 0 or np.linalg.matrix_rank(b) < d:
            raise ValueError("columns of B must be linearly independent")
        if self.theta.space_dim != d:
            raise DimensionMismatchError(
                f"Theta lives on C^{self.theta.space_dim}, B has {d} columns"
            )
        if not rel_is_selfadjoint(self.theta):
            raise NotSelfAdjointError("Theta must be a self-adjoint relation")
        b.setflags(write=False)
        object.__setattr__(self, "b_map", b)

    @classmethod
    def from_matrix(cls, b_map, theta_matrix) -> "PerturbationSpec":
        """Accept a Hermitian d x d matrix as parameterization sugar."""
        theta = LinearRelation.from_matrix(HermitianMatrix(np.asarray(theta_matrix)).entries)
        return cls(np.asarray(b_map, dtype=complex), theta)

    @property
    def rank(self) -> int:
        return self.b_map.shape[1]

    def split_theta(self):
        """(operator-part matrix on C^d, multivalued-part subspace of C^d)."""
        mul = self.theta.mul_part()
        dom = orthocomplement(mul)
        d = self.theta.space_dim
        if dom.rank == 0:
            return np.zeros((d, d), dtype=complex), mul
        f, g = self.theta._blocks()
        coeffs, *_ = np.linalg.lstsq(f, dom.basis, rcond=None)
        values = g @ coeffs
        op_values = values - mul.projector @ values
        theta_op = op_values @ dom.basis.conj().T
        theta_op = (theta_op + theta_op.conj().T) / 2
        return theta_op, mul


def perturb(a0, spec: PerturbationSpec) -> LinearRelation:
    """The perturbed object A_Theta = A0 + B Theta B* as a self-adjoint relation.

    With Theta = Theta_op (+) M split into operator and multivalued parts:
    if M = {0} the result is the graph of the matrix A0 + B Theta_op B*;
    otherwise the graph is {(f, A0 f + B Theta_op B* f + B m) :
    P_M B* f = 0, m in M}, which carries multivalued part B M.
    """
    a = _operator_matrix(a0)
    n = a.shape[0]
    if spec.b_map.shape[0] != n:
        raise DimensionMismatchError(
            f"B has {spec.b_map.shape[0]} rows, operator dimension is {n}"
        )
    b = spec.b_map
    theta_op, mul = spec.split_theta()
    perturbed = a + b @ theta_op @ b.conj().T
    if mul.rank == 0:
        result = LinearRelation.from_matrix(perturbed)
    else:
        constraint = (b @ mul.basis).conj().T          # rows m_j^* B^*
        dom_basis = _nullspace(constraint)
        cols_op = np.vstack([dom_basis, perturbed @ dom_basis])
        cols_mul = np.vstack([np.zeros((n, mul.rank)), b @ mul.basis])
        result = LinearRelation(Subspace.span(np.hstack([cols_op, cols_mul]), 2 * n))
    if not rel_is_selfadjoint(result):
        raise NotSelfAdjointError("perturbed relation failed self-adjointness check")
    return result


def limit_crosscheck(a0, spec: PerturbationSpec, t_list):
    """Penalty surrogate for the multivalued part: Theta_op + t P_M with t -> inf.

    For each t the finite eigenvalues of A0 + B (Theta_op + t P_M) B* are
    compared against the operator-part spectrum of perturb(); the dim(M)
    largest eigenvalues are the divergent branches. Returns a row per t:
    (t, max deviation of finite eigenvalues, smallest divergent eigenvalue).
    """
    a = _operator_matrix(a0)
    target, mul_dim = relation_spectrum(perturb(a0, spec))
    theta_op, mul = spec.split_theta()
    b = spec.b_map
    rows = []
    for t in t_list:
        theta_t = theta_op + float(t) * mul.projector
        lam = np.linalg.eigvalsh(a + b @ theta_t @ b.conj().T)
        keep = lam.shape[0] - mul.rank
        finite = lam[:keep]
        dev = float(np.max(np.abs(finite - target))) if keep else 0.0
        lowest_div = float(lam[keep]) if mul.rank else float("nan")
        rows.append((float(t), dev, lowest_div))
    return rows, target, mul_dim


def theta_sweep(a0, b_map, family):
    """Spectra along a family of Theta parameters.

    `family` yields (label, theta) pairs where theta is a Hermitian matrix or
    a self-adjoint LinearRelation. Returns rows
    (label, mul_dim, sorted operator-part eigenvalues...).
    """
    rows = []
    for label, theta in family:
        if isinstance(theta, LinearRelation):
            spec = PerturbationSpec(np.asarray(b_map, dtype=complex), theta)
        else:
            spec = PerturbationSpec.from_matrix(b_map, theta)
        eigs, mul_dim = relation_spectrum(perturb(a0, spec))
        rows.append((label, mul_dim, tuple(float(x) for x in eigs)))
    return rows


def interlacing_check(a0, phi, t: float) -> bool:
    """Rank-one interlacing: lambda_i(A) <= lambda_i(A + t phi phi*) <= lambda_{i+1}(A)."""
    if not t > 0:
        raise ValueError("interlacing check needs t > 0")
    phi = np.asarray(phi, dtype=complex)
    if abs(np.linalg.norm(phi) - 1.0) > 1e-8:
        raise ValueError("phi must be normalized")
    a = _operator_matrix(a0)
    lam = eigh(HermitianMatrix(a)).eigenvalues
    mu = eigh(HermitianMatrix(a + t * np.outer(phi, phi.conj()))).eigenvalues
    scale = max(float(np.max(np.abs(lam))), float(t), 1.0)
    slack = INTERLACE_SLACK * scale
    n = lam.shape[0]
    for i in range(n):
        upper = lam[i + 1] if i + 1 < n else np.inf
        if not (lam[i] - slack <= mu[i] <= upper + slack):
            return False
    return True
