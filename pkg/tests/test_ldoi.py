#!/usr/bin/env python3
"""
Tests for invariant triples: construction, projection, blocks and leg permutations
"""
import numpy as np
import pytest

from src.core.cones import extremal_psd_ray, triple_from_witness, TcpWitness
from src.core.ldoi import (
    InvariantClass,
    LegPermutation,
    MatrixPair,
    MatrixTriple,
    average_oracle,
    bipartite_dimension,
    bipartite_direct_sum,
    build,
    conditional_expectations,
    conjugate_transpose,
    dense_leg_permutation,
    direct_sum,
    extract_triple,
    is_invariant,
    leg_permutation,
    partial_transpose,
    principal_subtriple,
    project,
    rank_of,
    spectrum,
    symmetry_flags,
    tightest_class,
    triple_basis,
    unit_rank_form,
)
from src.core.matcore import spectral_distance
from src.gallery.families import dicke, werner
from src.utils.sampling import complex_gaussian, random_triple

CLASSES = list(InvariantClass)


class TestTriples:
    """Test triple and pair containers"""

    @pytest.mark.unit
    def test_diagonal_mismatch_rejected(self):
        """Test unequal diagonals raise ValueError"""
        with pytest.raises(ValueError, match="diagonals differ"):
            MatrixTriple(np.eye(2), 2 * np.eye(2), np.eye(2))

    @pytest.mark.unit
    def test_shape_mismatch_rejected(self):
        """Test triples of different sizes raise ValueError"""
        with pytest.raises(ValueError, match="dimension mismatch"):
            MatrixTriple(np.eye(2), np.eye(2), np.eye(3))

    @pytest.mark.unit
    def test_triples_are_read_only(self):
        """Test stored matrices cannot be mutated"""
        t = MatrixTriple(np.eye(2), np.eye(2), np.eye(2))
        with pytest.raises(ValueError):
            t.A[0, 0] = 5

    @pytest.mark.unit
    def test_pair_embeddings(self):
        """Test pairs embed as (A, diag A, B) for LDUI and (A, B, diag A) for CLDUI"""
        p = MatrixPair(np.ones((2, 2)), np.array([[1.0, 0.5], [0.5, 1.0]]))
        ldui = p.to_triple(InvariantClass.LDUI)
        cldui = p.to_triple(InvariantClass.CLDUI)
        assert np.allclose(ldui.B, np.eye(2)) and np.allclose(ldui.C, p.B)
        assert np.allclose(cldui.B, p.B) and np.allclose(cldui.C, np.eye(2))
        with pytest.raises(ValueError):
            p.to_triple(InvariantClass.LDOI)

    @pytest.mark.unit
    def test_class_parsing_accepts_map_names(self):
        """Test DUC/CDUC/DOC parse to the matrix classes"""
        assert InvariantClass.parse("duc") is InvariantClass.LDUI
        assert InvariantClass.parse("CDUC") is InvariantClass.CLDUI
        assert InvariantClass.parse("LDOI") is InvariantClass.LDOI
        assert InvariantClass.LDOI.map_name == "DOC"
        with pytest.raises(ValueError, match="Unsupported class"):
            InvariantClass.parse("XYZ")

    @pytest.mark.unit
    @pytest.mark.parametrize("klass", list(InvariantClass))
    def test_class_parsing_passes_members_through(self, klass):
        """Test enum members parse to themselves whatever str() gives for them"""
        assert InvariantClass.parse(klass) is klass


class TestBuildAndProject:
    """Test dense construction, extraction and projection"""

    @pytest.mark.unit
    def test_build_places_entries(self):
        """Test the three index patterns of a d=2 LDOI matrix"""
        A = np.array([[1, 2], [3, 4]])
        B = np.array([[1, 5], [6, 4]])
        C = np.array([[1, 7], [8, 4]])
        X = build(InvariantClass.LDOI, MatrixTriple(A, B, C))
        # rows: |00>, |01>, |10>, |11>
        assert X[1, 1] == 2 and X[2, 2] == 3
        assert X[0, 3] == 5 and X[3, 0] == 6
        assert X[1, 2] == 7 and X[2, 1] == 8
        assert np.count_nonzero(X) == 8

    @pytest.mark.unit
    @pytest.mark.parametrize("klass", CLASSES)
    def test_extract_inverts_build(self, klass):
        """Test extract(build(t)) recovers the promoted triple"""
        rng = np.random.default_rng(1)
        t = random_triple(3, rng, klass)
        assert extract_triple(build(klass, t)).allclose(t)

    @pytest.mark.unit
    def test_bipartite_dimension(self):
        """Test non-square sizes are rejected"""
        assert bipartite_dimension(np.eye(9)) == 3
        with pytest.raises(ValueError, match="perfect square"):
            bipartite_dimension(np.eye(5))

    @pytest.mark.unit
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_projection_matches_sign_average(self, d):
        """Test LDOI projection equals the exact sign-group average"""
        rng = np.random.default_rng(d)
        for _ in range(5):
            X = complex_gaussian((d * d, d * d), rng)
            P = project(X, InvariantClass.LDOI)
            assert np.max(np.abs(P - average_oracle(X, InvariantClass.LDOI))) <= 1e-10
            assert np.allclose(project(P, InvariantClass.LDOI), P)

    @pytest.mark.unit
    @pytest.mark.parametrize("klass", [InvariantClass.LDUI, InvariantClass.CLDUI])
    def test_projection_matches_phase_average(self, klass):
        """Test LDUI/CLDUI projection equals the exact cyclic phase average"""
        rng = np.random.default_rng(7)
        X = complex_gaussian((9, 9), rng)
        assert np.max(np.abs(project(X, klass) - average_oracle(X, klass))) <= 1e-10

    @pytest.mark.unit
    def test_projection_is_self_adjoint(self):
        """Test <P(X), Y> == <X, P(Y)>"""
        rng = np.random.default_rng(3)
        X = complex_gaussian((9, 9), rng)
        Y = complex_gaussian((9, 9), rng)
        lhs = np.vdot(project(X, InvariantClass.LDOI), Y)
        rhs = np.vdot(X, project(Y, InvariantClass.LDOI))
        assert abs(lhs - rhs) <= 1e-10

    @pytest.mark.slow
    def test_monte_carlo_average_converges(self):
        """Test the seeded Monte-Carlo phase average approaches the projection"""
        rng = np.random.default_rng(11)
        X = rng.random((9, 9))
        approx = average_oracle(X, InvariantClass.LDUI, mode="mc_phase", samples=20000, seed=5)
        assert np.max(np.abs(approx - project(X, InvariantClass.LDUI))) < 0.05

    @pytest.mark.unit
    def test_average_oracle_errors(self):
        """Test unsupported modes and sample counts raise"""
        X = np.eye(4)
        with pytest.raises(ValueError, match="Unsupported averaging mode"):
            average_oracle(X, InvariantClass.LDOI, mode="bogus")
        with pytest.raises(ValueError, match="samples"):
            average_oracle(X, InvariantClass.LDOI, mode="mc_phase", samples=0)
        with pytest.raises(ValueError, match="Exact averaging"):
            average_oracle(np.eye(169), InvariantClass.LDOI)

    @pytest.mark.unit
    def test_invariance_and_tightest_class(self):
        """Test class membership of built matrices"""
        rng = np.random.default_rng(2)
        t = random_triple(3, rng, InvariantClass.CLDUI)
        X = build(InvariantClass.CLDUI, t)
        assert is_invariant(X, InvariantClass.CLDUI)
        assert is_invariant(X, InvariantClass.LDOI)
        assert not is_invariant(X, InvariantClass.LDUI)
        assert tightest_class(t) is InvariantClass.CLDUI
        assert tightest_class(MatrixTriple.diagonal(np.ones((3, 3)))) is InvariantClass.LDUI


class TestBlocksAndSpectra:
    """Test block decomposition, spectra and ranks against dense oracles"""

    @pytest.mark.unit
    @pytest.mark.parametrize("klass", CLASSES)
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_spectrum_matches_dense(self, klass, d):
        """Test block eigenvalues match the dense eigensolver"""
        rng = np.random.default_rng(100 + d)
        for _ in range(5):
            t = random_triple(d, rng, klass)
            dense = np.linalg.eigvals(build(klass, t))
            assert spectral_distance(spectrum(t, klass), dense) <= 1e-9

    @pytest.mark.unit
    @pytest.mark.parametrize("klass", CLASSES)
    def test_rank_matches_dense(self, klass):
        """Test block ranks match the dense rank on low-rank triples"""
        rng = np.random.default_rng(5)
        for width in (1, 2, 3):
            w = TcpWitness(complex_gaussian((3, width), rng), complex_gaussian((3, width), rng))
            t = triple_from_witness(w).promote(klass)
            X = build(klass, t)
            assert rank_of(t, klass) == np.linalg.matrix_rank(X, tol=1e-9 * np.linalg.norm(X, 2))

    @pytest.mark.unit
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_extremal_ranks(self, d):
        """Test the ranks attained by the all-ones extremal separable triple"""
        ones = triple_from_witness(TcpWitness(np.ones((d, 1)), np.ones((d, 1))))
        assert rank_of(ones.promote(InvariantClass.LDUI), InvariantClass.LDUI) == d * (d + 1) // 2
        assert rank_of(ones.promote(InvariantClass.CLDUI), InvariantClass.CLDUI) == d * d - d + 1
        assert rank_of(ones, InvariantClass.LDOI) == d * (d - 1) // 2 + 1


class TestLegPermutations:
    """Test triple rules against dense index shuffles"""

    @pytest.mark.unit
    @pytest.mark.parametrize("which", list(LegPermutation))
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_rule_matches_dense(self, which, d):
        """Test every leg permutation rule as an exact d^2 x d^2 equality"""
        rng = np.random.default_rng(d)
        for _ in range(3):
            t = random_triple(d, rng)
            dense = dense_leg_permutation(build(InvariantClass.LDOI, t), which)
            assert np.allclose(build(InvariantClass.LDOI, leg_permutation(t, which)), dense, atol=1e-12)

    @pytest.mark.unit
    def test_partial_transpose_swaps_b_and_c(self):
        """Test X^Gamma has triple (A, C, B)"""
        t = random_triple(3, np.random.default_rng(9))
        XG = partial_transpose(build(InvariantClass.LDOI, t))
        assert extract_triple(XG).allclose(MatrixTriple(t.A, t.C, t.B))
        with pytest.raises(ValueError, match="Unsupported leg"):
            partial_transpose(np.eye(4), "third")

    @pytest.mark.unit
    def test_conjugate_transpose(self):
        """Test the triple of X^* matches the dense adjoint"""
        t = random_triple(3, np.random.default_rng(4))
        dense = build(InvariantClass.LDOI, t).conj().T
        assert np.allclose(build(InvariantClass.LDOI, conjugate_transpose(t)), dense)


class TestStructure:
    """Test sums, subtriples, expectations, bases and unit-rank forms"""

    @pytest.mark.unit
    def test_direct_sum_matches_dense(self):
        """Test the triple direct sum builds the bipartite direct sum"""
        rng = np.random.default_rng(8)
        t1, t2 = random_triple(2, rng), random_triple(3, rng)
        dense = bipartite_direct_sum(build(InvariantClass.LDOI, t1), build(InvariantClass.LDOI, t2))
        assert np.allclose(build(InvariantClass.LDOI, direct_sum(t1, t2)), dense)
        assert direct_sum(t1, None) is t1

    @pytest.mark.unit
    def test_principal_subtriple(self):
        """Test index restriction and its errors"""
        t = random_triple(4, np.random.default_rng(6))
        sub = principal_subtriple(t, [0, 2])
        assert sub.d == 2 and sub.A[0, 1] == t.A[0, 2]
        with pytest.raises(ValueError, match="non-empty"):
            principal_subtriple(t, [])
        with pytest.raises(ValueError, match="out of range"):
            principal_subtriple(t, [4])

    @pytest.mark.unit
    def test_conditional_expectations_match_partial_traces(self):
        """Test A_row and A_col are the dense partial traces"""
        t = random_triple(3, np.random.default_rng(12))
        T = build(InvariantClass.LDOI, t).reshape(3, 3, 3, 3)
        ce = conditional_expectations(t)
        assert np.allclose(ce.a_row, np.einsum("ijkj->ik", T))
        assert np.allclose(ce.a_col, np.einsum("ijil->jl", T))
        assert ce.trace == pytest.approx(np.trace(T.reshape(9, 9)))

    @pytest.mark.unit
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_triple_basis_sizes(self, d):
        """Test basis sizes 3d^2-2d (LDOI) and 2d^2-d (LDUI, CLDUI) and linear independence"""
        for klass, size in ((InvariantClass.LDOI, 3 * d * d - 2 * d),
                            (InvariantClass.LDUI, 2 * d * d - d),
                            (InvariantClass.CLDUI, 2 * d * d - d)):
            basis = triple_basis(d, klass)
            assert len(basis) == size
            M = np.column_stack([build(klass, t).reshape(-1) for t in basis])
            assert np.linalg.matrix_rank(M) == size

    @pytest.mark.unit
    def test_unit_rank_forms(self):
        """Test recognition of the two unit-rank shapes"""
        diag_ray = extremal_psd_ray(InvariantClass.LDOI, "diag", 3, x=[1, 2, 3])
        pair_ray = extremal_psd_ray(InvariantClass.LDOI, "pair", 3, 0, 2, x=[1, 1j])
        assert unit_rank_form(build(InvariantClass.LDOI, diag_ray)) == "diagonal"
        assert unit_rank_form(build(InvariantClass.LDOI, pair_ray)) == "two_dim_support"
        assert unit_rank_form(np.eye(9)) is None

    @pytest.mark.unit
    def test_symmetry_flags(self):
        """Test Werner is symmetric and Dicke mixtures are Bose symmetric"""
        w = symmetry_flags(werner(1.0, 0.5, 3))
        assert w.self_adjoint and w.symmetric and not w.bose_symmetric
        assert symmetry_flags(dicke(np.eye(3) + 0.2)).bose_symmetric


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
