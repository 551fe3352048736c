#!/usr/bin/env python3
"""
Tests for the named matrix and map families
"""
import numpy as np
import pytest

from src.core.cones import ppt_test, realignment_test
from src.core.docmaps import CovariantMap
from src.core.ldoi import InvariantClass, MatrixTriple, build, is_invariant, rank_of
from src.gallery.families import (
    StormerFixture,
    as_triple,
    dicke,
    edge_3x3,
    generate,
    get_family,
    isotropic,
    list_families,
    projector,
    pt_invariant,
    stormer,
    tau,
    unit_rank_ldui,
    werner,
)


class TestRegistry:
    """Test family lookup and generation"""

    @pytest.mark.unit
    def test_list_by_kind(self):
        """Test families are filtered by kind"""
        maps = list_families("map")
        matrices = list_families("matrix")
        assert "lambda" in maps and "werner" not in maps
        assert "werner" in matrices and "tau" not in matrices
        assert list_families("fixture") == ["stormer"]
        assert len(list_families()) == len(maps) + len(matrices) + 1

    @pytest.mark.unit
    @pytest.mark.parametrize("name", list_families())
    def test_example_parameters_generate_invariant_items(self, name):
        """Test every family builds from its example and lies in its declared class"""
        spec = get_family(name)
        item = generate(name, spec.example)
        t = as_triple(item)
        assert isinstance(t, MatrixTriple)
        assert is_invariant(build(InvariantClass.LDOI, t), spec.klass)
        if spec.kind == "map":
            assert isinstance(item, CovariantMap)
            assert item.klass is spec.klass
        if spec.kind == "fixture":
            assert isinstance(item, StormerFixture)

    @pytest.mark.unit
    def test_unknown_family_and_bad_parameters(self):
        """Test lookup and parameter errors are ValueErrors"""
        with pytest.raises(ValueError, match="Unsupported family"):
            generate("bogus")
        with pytest.raises(ValueError, match="Invalid parameters for family werner"):
            generate("werner", {"a": 1.0})
        with pytest.raises(ValueError, match="Invalid parameters"):
            generate("werner", {"a": 1.0, "b": 0.5, "d": 3, "e": 1})


class TestMatrixFamilies:
    """Test matrix families against their dense definitions"""

    @pytest.mark.unit
    def test_werner_is_identity_plus_flip(self):
        """Test X(werner(a, b, d)) = a I + b F"""
        d = 3
        X = build(InvariantClass.LDUI, werner(0.7, -0.2, d))
        expected = 0.7 * np.eye(d * d) - 0.2 * projector("flip_F", d)
        assert np.allclose(X, expected)

    @pytest.mark.unit
    def test_isotropic_is_identity_plus_omega(self):
        """Test X(isotropic(a, b, d)) = a I + b |Omega><Omega|"""
        d = 3
        X = build(InvariantClass.CLDUI, isotropic(0.7, 0.4, d))
        expected = 0.7 * np.eye(d * d) + 0.4 * d * projector("maxent_Pomega", d)
        assert np.allclose(X, expected)

    @pytest.mark.unit
    def test_dicke_and_pt_invariant_validation(self):
        """Test input checks of Dicke mixtures and PT-invariant triples"""
        with pytest.raises(ValueError, match="real symmetric"):
            dicke([[1.0, 1j], [-1j, 1.0]])
        with pytest.raises(ValueError, match="Unsupported side"):
            pt_invariant(np.ones((2, 2)), np.eye(2), side="third")
        t = pt_invariant(np.ones((2, 2)), [[1.0, 0.5j], [-0.5j, 1.0]], side="first")
        assert np.allclose(t.C, t.B.T)

    @pytest.mark.unit
    def test_edge_state_validation(self):
        """Test parameter ranges of the 3x3 edge states"""
        n = np.sqrt(2 * np.cos(0.3))
        eta, zeta, xi = [n, 0, 0], [0, n, 0], [0, 0, n]
        t = edge_3x3(2.0, 0.3, eta, zeta, xi)
        assert t.d == 3
        with pytest.raises(ValueError, match="b must be positive"):
            edge_3x3(-1.0, 0.3, eta, zeta, xi)
        with pytest.raises(ValueError, match="theta"):
            edge_3x3(2.0, 0.0, eta, zeta, xi)
        with pytest.raises(ValueError, match="2 cos"):
            edge_3x3(2.0, 0.3, [1, 0, 0], zeta, xi)

    @pytest.mark.unit
    def test_unit_rank_ldui(self):
        """Test the two-site family has rank one"""
        t = unit_rank_ldui(0, 2, 1.0, 2.0, 1.0, 2.0, 3)
        assert rank_of(t, InvariantClass.LDUI) == 1
        with pytest.raises(ValueError, match="distinct indices"):
            unit_rank_ldui(1, 1, 1.0, 1.0, 1.0, 1.0, 3)

    @pytest.mark.unit
    @pytest.mark.parametrize("mu", [1.0, 2.0, 5.0])
    def test_stormer_is_ppt_and_fails_realignment(self, mu):
        """Test the fixture lies on the PPT boundary and is realignment-entangled"""
        fixture = stormer(mu)
        assert fixture.witness_map.klass is InvariantClass.CLDUI
        assert ppt_test(fixture.triple).passed
        assert not realignment_test(fixture.triple).passed
        with pytest.raises(ValueError, match="mu must be positive"):
            stormer(0.0)


class TestMapFamilies:
    """Test map family parameter domains"""

    @pytest.mark.unit
    def test_tau_range(self):
        """Test k outside [1, d-1] is rejected"""
        assert tau(4, 3).d == 4
        with pytest.raises(ValueError, match="k must lie"):
            tau(4, 4)
        with pytest.raises(ValueError, match="at least 2"):
            tau(1, 1)


class TestProjectors:
    """Test the canonical operators on C^d (x) C^d"""

    @pytest.mark.unit
    @pytest.mark.parametrize("d", [2, 3])
    def test_projector_identities(self, d):
        """Test P_s + P_a = I, F^2 = I and P_omega, P_eq are projectors"""
        I = np.eye(d * d)
        Ps, Pa, F = projector("symmetric_Ps", d), projector("antisymmetric_Pa", d), projector("flip_F", d)
        assert np.allclose(Ps + Pa, I)
        assert np.allclose(F @ F, I)
        for kind in ("symmetric_Ps", "antisymmetric_Pa", "maxent_Pomega", "equal_Peq"):
            P = projector(kind, d)
            assert np.allclose(P @ P, P)
            assert is_invariant(P, InvariantClass.LDOI)
        assert np.trace(projector("maxent_Pomega", d)).real == pytest.approx(1.0)
        assert np.trace(projector("equal_Peq", d)).real == pytest.approx(d)

    @pytest.mark.unit
    def test_unknown_projector(self):
        """Test unknown kinds and too small dimensions"""
        with pytest.raises(ValueError, match="Unsupported projector"):
            projector("bogus", 3)
        with pytest.raises(ValueError, match="at least 2"):
            projector("flip_F", 1)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
