import numpy as np
import pytest

from ldlab.extensions import (
    NotSelfAdjointError,
    NotSymmetricError,
    PerturbationSpec,
    deficiency_indices,
    friedrichs_power_experiment,
    friedrichs_power_oracle,
    friedrichs_relation,
    interlacing_check,
    is_symmetric_relation,
    limit_crosscheck,
    minimal_relation,
    perturb,
    relation_spectrum,
    theta_sweep,
    von_neumann_check,
)
from ldlab.spectral import (
    LinearRelation,
    SpectrumError,
    Subspace,
    rel_adjoint,
    rel_is_selfadjoint,
    subspaces_equal,
)


def seeded_restriction(seed, n, codim, complex_=True):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    if complex_:
        m = m + 1j * rng.normal(size=(n, n))
    h = m @ m.conj().T + 0.5 * np.eye(n)
    c = rng.normal(size=(n, codim))
    if complex_:
        c = c + 1j * rng.normal(size=(n, codim))
    return h, Subspace.span(c, ambient_dim=n)


class TestMinimalRelation:
    def test_no_constraints_gives_full_graph(self):
        a = np.diag([1.0, 2.0])
        s = minimal_relation(a, Subspace.zero(2))
        assert subspaces_equal(s.graph, LinearRelation.from_matrix(a).graph)
        assert rel_is_selfadjoint(s)

    def test_codim_one_restriction(self):
        a = np.diag([1.0, 2.0, 3.0])
        c = Subspace.span(np.ones(3) / np.sqrt(3))
        s = minimal_relation(a, c)
        assert s.dim == 2
        assert is_symmetric_relation(s)
        assert not rel_is_selfadjoint(s)

    def test_full_constraint_gives_trivial_relation(self):
        a = np.diag([1.0, 2.0])
        s = minimal_relation(a, Subspace.full(2))
        assert s.dim == 0


class TestDeficiency:
    def test_selfadjoint_has_zero_indices(self):
        s = LinearRelation.from_matrix(np.diag([1.0, 2.0, 3.0]))
        rep = deficiency_indices(s)
        assert (rep.m_plus, rep.m_minus) == (0, 0)

    def test_codim_one(self):
        a = np.diag([1.0, 2.0, 3.0])
        s = minimal_relation(a, Subspace.span(np.ones(3) / np.sqrt(3)))
        rep = deficiency_indices(s)
        assert (rep.m_plus, rep.m_minus) == (1, 1)

    def test_codim_two_dim_six(self):
        h, c = seeded_restriction(0, 6, 2)
        rep = deficiency_indices(minimal_relation(h, c))
        assert (rep.m_plus, rep.m_minus) == (2, 2)

    def test_rejects_nonsymmetric(self):
        t = LinearRelation.from_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(NotSymmetricError):
            deficiency_indices(t)

    @pytest.mark.parametrize("codim", [1, 2, 3])
    def test_indices_match_codim_on_seeded_trials(self, codim):
        for seed in range(8):
            n = 5 + (seed % 5)
            h, c = seeded_restriction(seed, n, codim)
            rep = deficiency_indices(minimal_relation(h, c))
            assert (rep.m_plus, rep.m_minus) == (codim, codim)


class TestVonNeumann:
    def test_selfadjoint_case(self):
        s = LinearRelation.from_matrix(np.diag([1.0, 2.0]))
        assert von_neumann_check(s).overall == "PASS"

    def test_codim_one_dimension_identity(self):
        h, c = seeded_restriction(1, 5, 1)
        s = minimal_relation(h, c)
        report = von_neumann_check(s)
        assert report.overall == "PASS"
        assert rel_adjoint(s).dim == s.dim + 2   # (n-1) + 1 + 1 = n + 1

    def test_codim_two_dimension_identity(self):
        h, c = seeded_restriction(2, 6, 2)
        s = minimal_relation(h, c)
        assert von_neumann_check(s).overall == "PASS"
        assert rel_adjoint(s).dim == s.dim + 4


class TestFriedrichs:
    def test_already_selfadjoint_is_fixed_point(self):
        s = LinearRelation.from_matrix(np.diag([1.0, 2.0]))
        sf = friedrichs_relation(s)
        assert subspaces_equal(sf.graph, s.graph)

    def test_restriction_splits_operator_and_mul_part(self):
        # diag(1,2) restricted to span{e1}: operator part 1 on e1, mul part span{e2}
        a = np.diag([1.0, 2.0])
        s = minimal_relation(a, Subspace.span(np.array([0.0, 1.0])))
        sf = friedrichs_relation(s)
        assert rel_is_selfadjoint(sf)
        eigs, mul_dim = relation_spectrum(sf)
        np.testing.assert_allclose(eigs, [1.0])
        assert mul_dim == 1
        assert sf.mul_part().contains(np.array([0.0, 1.0]))

    def test_domain_preserved_and_extends(self):
        for seed in range(10):
            h, c = seeded_restriction(seed, 7, 1 + seed % 3)
            s = minimal_relation(h, c)
            sf = friedrichs_relation(s)
            assert rel_is_selfadjoint(sf)
            assert subspaces_equal(sf.domain(), s.domain())
            # extends S: graph(S) inside graph(S_F)
            resid = s.graph.basis - sf.graph.projector @ s.graph.basis
            assert np.max(np.abs(resid)) <= 1e-9

    def test_form_preserved_on_domain(self):
        h, c = seeded_restriction(3, 6, 2)
        s = minimal_relation(h, c)
        sf = friedrichs_relation(s)
        f, g = sf._blocks()
        rng = np.random.default_rng(4)
        x = s.domain().basis @ (rng.normal(size=s.domain().rank))
        coeffs, *_ = np.linalg.lstsq(f, x[:, None], rcond=None)
        value = complex(x.conj() @ (g @ coeffs)[:, 0])
        expected = complex(x.conj() @ h @ x)
        assert value == pytest.approx(expected, rel=1e-9)

    def test_rejects_indefinite(self):
        s = LinearRelation.from_matrix(np.diag([-1.0, 2.0]))
        with pytest.raises(SpectrumError, match="not nonnegative"):
            friedrichs_relation(s)


class TestPowerExperiment:
    def test_selfadjoint_base_equal(self):
        s = LinearRelation.from_matrix(np.diag([1.0, 2.0, 3.0]))
        for n in (1, 2, 3):
            assert friedrichs_power_experiment(s, n).verdict == "EQUAL"

    def test_power_one_always_equal(self):
        h, c = seeded_restriction(5, 6, 2)
        s = minimal_relation(h, c)
        assert friedrichs_power_experiment(s, 1).verdict == "EQUAL"

    def test_oracle_agreement_seeded(self):
        for seed in range(12):
            codim = 1 + seed % 2
            h, c = seeded_restriction(seed, 6, codim)
            s = minimal_relation(h, c)
            for n in (2, 3):
                main = friedrichs_power_experiment(s, n)
                oracle = friedrichs_power_oracle(s, n)
                assert main.verdict == oracle.verdict
                assert (main.dim_power_of_friedrichs, main.dim_friedrichs_of_power) == \
                    (oracle.dim_power_of_friedrichs, oracle.dim_friedrichs_of_power)

    def test_rejects_large_power(self):
        s = LinearRelation.from_matrix(np.diag([1.0]))
        with pytest.raises(ValueError):
            friedrichs_power_experiment(s, 5)


class TestPerturb:
    def test_decoupled_coordinate(self):
        spec = PerturbationSpec.from_matrix(np.array([[1.0], [0.0]]), [[0.5]])
        eigs, mul_dim = relation_spectrum(perturb(np.diag([1.0, 2.0]), spec))
        np.testing.assert_allclose(eigs, [1.5, 2.0], atol=1e-12)
        assert mul_dim == 0

    def test_two_by_two_golden_ratio_values(self):
        b = np.array([[1.0], [1.0]]) / np.sqrt(2.0)
        spec = PerturbationSpec.from_matrix(b, [[1.0]])
        eigs, _ = relation_spectrum(perturb(np.diag([1.0, 3.0]), spec))
        expected = np.array([(5 - np.sqrt(5)) / 2, (5 + np.sqrt(5)) / 2])
        np.testing.assert_allclose(eigs, expected, atol=1e-12)

    def test_purely_multivalued_theta(self):
        b = np.array([[1.0], [0.0]])
        spec = PerturbationSpec(b, LinearRelation.multivalued(1))
        rel = perturb(np.diag([1.0, 2.0]), spec)
        eigs, mul_dim = relation_spectrum(rel)
        np.testing.assert_allclose(eigs, [2.0], atol=1e-12)
        assert mul_dim == 1
        assert rel.mul_part().contains(np.array([1.0, 0.0]))

    def test_matrix_theta_matches_direct_eigensolve(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            n, d = 6, 2
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            a0 = m @ m.conj().T
            b = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
            t = rng.normal(size=(d, d))
            theta = (t + t.T) / 2
            spec = PerturbationSpec.from_matrix(b, theta)
            eigs, mul_dim = relation_spectrum(perturb(a0, spec))
            direct = np.linalg.eigvalsh(a0 + b @ theta @ b.conj().T)
            assert mul_dim == 0
            scale = max(1.0, float(np.max(np.abs(direct))))
            assert np.max(np.abs(eigs - direct)) <= 1e-10 * scale

    def test_mixed_theta_operator_and_mul_part(self):
        # Theta on C^2: operator part t on span{e1}, multivalued part span{e2}
        rng = np.random.default_rng(12)
        m = rng.normal(size=(5, 5))
        a0 = m @ m.T + np.eye(5)
        b = Subspace.span(rng.normal(size=(5, 2))).basis
        t = 0.8
        theta = LinearRelation.from_blocks(
            np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[t, 0.0], [0.0, 1.0]])
        )
        spec = PerturbationSpec(b, theta)
        rel = perturb(a0, spec)
        assert rel_is_selfadjoint(rel)
        eigs, mul_dim = relation_spectrum(rel)
        assert mul_dim == 1
        assert len(eigs) == 4
        # penalty-limit oracle: Theta_op + s P_M with s = 1e8
        rows, target, _ = limit_crosscheck(a0, spec, [1e8])
        np.testing.assert_allclose(target, eigs, atol=1e-12)
        assert rows[0][1] <= 1e-6

    def test_rejects_rank_deficient_b(self):
        b = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(ValueError, match="independent"):
            PerturbationSpec.from_matrix(b, np.eye(2))

    def test_rejects_non_selfadjoint_theta(self):
        b = np.array([[1.0], [0.0]])
        theta = LinearRelation.from_blocks(np.array([[1.0]]), np.array([[1.0 + 1j]]))
        with pytest.raises(NotSelfAdjointError):
            PerturbationSpec(b, theta)


class TestLimitCrosscheck:
    def test_multivalued_limit(self):
        b = np.array([[1.0], [0.0]])
        spec = PerturbationSpec(b, LinearRelation.multivalued(1))
        rows, target, mul_dim = limit_crosscheck(np.diag([1.0, 2.0]), spec, [1e8])
        assert mul_dim == 1
        np.testing.assert_allclose(target, [2.0], atol=1e-12)
        assert rows[0][1] <= 1e-6

    def test_no_mul_part_constant_in_t(self):
        b = np.array([[1.0], [0.0]])
        spec = PerturbationSpec.from_matrix(b, [[0.7]])
        rows, target, mul_dim = limit_crosscheck(np.diag([1.0, 2.0]), spec, [1.0, 100.0, 1e6])
        assert mul_dim == 0
        assert all(abs(r[1]) <= 1e-9 for r in rows)

    def test_rank_two_fully_multivalued_on_dim4(self):
        rng = np.random.default_rng(7)
        m = rng.normal(size=(4, 4))
        a0 = m @ m.T + np.eye(4)
        b = Subspace.span(rng.normal(size=(4, 2))).basis
        spec = PerturbationSpec(b, LinearRelation.multivalued(2))
        rows, target, mul_dim = limit_crosscheck(a0, spec, [1e8])
        assert mul_dim == 2
        # oracle: constrained eigenproblem on the orthocomplement of ran(B)
        from ldlab.spectral import orthocomplement
        comp = orthocomplement(Subspace.span(b)).basis
        constrained = np.linalg.eigvalsh(comp.conj().T @ a0 @ comp)
        np.testing.assert_allclose(np.sort(target), np.sort(constrained), atol=1e-9)
        assert rows[0][1] <= 1e-5


class TestThetaSweepAndInterlacing:
    def test_sweep_monotone_and_endpoints(self):
        a0 = np.diag([1.0, 3.0])
        b = np.array([[1.0], [1.0]]) / np.sqrt(2.0)
        family = [(t, np.array([[t]])) for t in np.linspace(0.0, 10.0, 11)]
        rows = theta_sweep(a0, b, family)
        spectra = np.array([r[2] for r in rows])
        assert np.all(np.diff(spectra, axis=0) >= -1e-12)
        np.testing.assert_allclose(spectra[0], [1.0, 3.0], atol=1e-12)

    def test_sweep_limit_matches_multivalued(self):
        # the tight t -> inf statement is limit_crosscheck's job; the sweep
        # endpoint at moderate t should already approach the multivalued spectrum
        a0 = np.diag([1.0, 3.0])
        b = np.array([[1.0], [1.0]]) / np.sqrt(2.0)
        spec = PerturbationSpec(b, LinearRelation.multivalued(1))
        eigs_mul, _ = relation_spectrum(perturb(a0, spec))
        rows = theta_sweep(a0, b, [(1e4, np.array([[1e4]]))])
        finite = np.array(rows[0][2][: len(eigs_mul)])
        np.testing.assert_allclose(finite, eigs_mul, atol=1e-3)
        crossrows, target, _ = limit_crosscheck(a0, spec, [1e8])
        np.testing.assert_allclose(target, eigs_mul, atol=1e-12)
        assert crossrows[0][1] <= 1e-6

    def test_interlacing_two_by_two(self):
        # eigenvalues (5 +/- sqrt 5)/2 = 1.38..., 3.61... interlace 1, 3
        a0 = np.diag([1.0, 3.0])
        phi = np.array([1.0, 1.0]) / np.sqrt(2.0)
        assert interlacing_check(a0, phi, 1.0)

    def test_interlacing_seeded_dim8(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
            a0 = m @ m.conj().T
            phi = rng.normal(size=8) + 1j * rng.normal(size=8)
            phi = phi / np.linalg.norm(phi)
            assert interlacing_check(a0, phi, float(rng.uniform(0.1, 5.0)))

    def test_interlacing_requires_positive_t(self):
        with pytest.raises(ValueError):
            interlacing_check(np.eye(2), np.array([1.0, 0.0]), 0.0)
