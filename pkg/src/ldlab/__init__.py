"""ldlab: a desk-scale laboratory for left-definite Hilbert scales, self-adjoint
extensions via linear relations, and finite-rank singular perturbations."""

from .spectral import (
    HermitianMatrix,
    LinearRelation,
    SpectralDecomposition,
    Subspace,
    eigh,
    mat_power,
    orthocomplement,
    rel_adjoint,
    rel_compose,
    rel_is_selfadjoint,
    subspace_algebra,
    subspace_intersect,
    subspace_sum,
    subspaces_equal,
)
from .leftdef import (
    ClosedFormR,
    LeftDefiniteOperator,
    LeftDefiniteSpace,
    SpectralOperator,
    ld_inner,
    ld_operator,
    ld_space,
    pnew_form,
    verify_ld_properties,
)
from .hscale import (
    GrowthModel,
    ScaleVector,
    critical_index,
    duality_pair,
    equivalence_check,
    hs_norm,
    isometry_check,
    membership,
)
from .classical import (
    DirichletFormSpec,
    LaguerreBasis,
    PolyInLaguerre,
    QuadratureRule,
    bj_coeff,
    dirichlet_inner,
    gauss_quadrature,
    jacobi_spectrum,
    laguerre_apply_A,
    laguerre_eval,
    laguerre_identity_check,
    spectral_inner,
)
from .extensions import (
    DeficiencyReport,
    ExtensionProblem,
    PerturbationSpec,
    deficiency_indices,
    friedrichs_power_experiment,
    friedrichs_relation,
    interlacing_check,
    limit_crosscheck,
    minimal_relation,
    perturb,
    theta_sweep,
    von_neumann_check,
)
from .sldiscrete import (
    BoundaryFunctional,
    DiscreteOperator,
    SLCoefficients,
    boundary_functional,
    build_A0,
    discretize,
    greens_dirichlet_check,
    principal_solution,
    wronskian_form,
)
from .config import ConfigError, ScenarioConfig, parse_config
from .report import Report, emit
from .scenarios import run_scenario

__version__ = "0.1.0"
