"""
Test Suite for the planar constructor
"""

import random

import pytest

from services.assignment_service import classify, edge_values
from services.constructor_service import (
    GeneratorSpec,
    build_from_generators,
    build_general,
    deformed_assignment,
    line_assignment,
)
from services.errors import InvalidInput, NotABasis
from services.lattice_service import apply_matrix, normalize_symmetric, transform_set
from services.nset_service import achieved_set


def random_spec(rng, m, n, spread=3):
    """Random generator lists with the required sums and random signs."""
    a_list = [(rng.randint(-spread, spread), rng.randint(-spread, spread)) for _ in range(m - 1)]
    b_list = [(rng.randint(-spread, spread), rng.randint(-spread, spread)) for _ in range(n - 1)]
    a_list.append((1 - sum(a[0] for a in a_list), -sum(a[1] for a in a_list)))
    b_list.append((-sum(b[0] for b in b_list), 1 - sum(b[1] for b in b_list)))
    signs = tuple(tuple(rng.choice("+-") for _ in range(n)) for _ in range(m))
    return GeneratorSpec(tuple(a_list), tuple(b_list), signs)


def spec(a_list, b_list, signs):
    return GeneratorSpec(tuple(a_list), tuple(b_list), tuple(tuple(row) for row in signs))


# ============================================
# Generator Spec Tests
# ============================================

class TestGeneratorSpec:
    """Test generator list validation and targets"""

    def test_target_with_plus(self):
        """Test a=(1,0), b=(0,1) with '+' targets the hexagonal set"""
        s = spec([(1, 0)], [(0, 1)], [["+"]])
        assert s.target() == normalize_symmetric([(1, 0), (0, 1), (1, 1)])
        assert s.resolution == 6

    def test_wrong_sums_rejected(self):
        """Test generators that do not sum to (1,0) and (0,1)"""
        with pytest.raises(InvalidInput):
            spec([(1, 1)], [(0, 1)], [["+"]])

    def test_sign_table_shape(self):
        """Test a sign table of the wrong shape"""
        with pytest.raises(InvalidInput):
            spec([(1, 0)], [(0, 1)], [["+", "-"]])

    def test_unknown_sign_rejected(self):
        """Test signs other than '+' and '-'"""
        with pytest.raises(InvalidInput):
            spec([(1, 0)], [(0, 1)], [["*"]])


# ============================================
# Construction Tests
# ============================================

class TestBuildFromGenerators:
    """Test the constructed witnesses"""

    def test_plus_sign(self):
        """Test '+' achieves {0, ±a, ±b, ±(a+b)}"""
        result = build_from_generators(spec([(1, 0)], [(0, 1)], [["+"]]))
        assert result.k == 6
        assert result.achieved == normalize_symmetric([(1, 0), (0, 1), (1, 1)])

    def test_minus_sign(self):
        """Test '-' achieves {0, ±a, ±b, ±(a-b)}"""
        result = build_from_generators(spec([(1, 0)], [(0, 1)], [["-"]]))
        assert result.achieved == normalize_symmetric([(1, 0), (0, 1), (1, -1)])

    def test_two_by_one(self):
        """Test a = ((1,1), (0,-1)), b = ((0,1),) with '+' signs"""
        s = spec([(1, 1), (0, -1)], [(0, 1)], [["+"], ["+"]])
        result = build_from_generators(s)
        assert result.k == 10
        expected = normalize_symmetric([(1, 1), (0, -1), (0, 1), (1, 2), (0, 0)])
        assert result.achieved == expected
        assert achieved_set(result.witness) == expected

    def test_random_generator_lists(self):
        """Test twenty random specs achieve exactly their targets"""
        rng = random.Random(107)
        for _ in range(20):
            s = random_spec(rng, rng.randint(1, 3), rng.randint(1, 3))
            result = build_from_generators(s)
            assert result.achieved == s.target()
            assert result.witness.shift((0, 0)) == (0, 0)

    def test_assignments_are_proper(self):
        """Test the line and deformed assignments are proper"""
        rng = random.Random(109)
        for _ in range(5):
            s = random_spec(rng, 2, 2)
            assert classify(line_assignment(s)).proper
            assert classify(deformed_assignment(s)).proper

    def test_deformation_removes_the_other_diagonal(self):
        """Test a - b appears before the corner move and not after"""
        s = spec([(1, 0)], [(0, 1)], [["+"]])
        assert (1, -1) in edge_values(line_assignment(s))
        assert (1, -1) not in edge_values(deformed_assignment(s))
        assert edge_values(deformed_assignment(s)) == s.target()


# ============================================
# General Construction Tests
# ============================================

class TestBuildGeneral:
    """Test constructions for an arbitrary basis u, v"""

    def test_sheared_basis(self):
        """Test u=(1,1), v=(0,1) with a=(1,1), b=(0,1)"""
        result = build_general((1, 1), (0, 1), [(1, 1)], [(0, 1)], [["+"]])
        assert result.matrix == ((1, 0), (1, 1))
        assert result.pullback.spec.a_list == ((1, 0),)
        assert result.achieved_set_of_target == normalize_symmetric([(1, 1), (0, 1), (1, 2)])
        assert "determinant" in result.reasoning

    def test_non_basis_rejected(self):
        """Test u, v spanning an index-2 sublattice"""
        with pytest.raises(NotABasis):
            build_general((2, 0), (0, 1), [(2, 0)], [(0, 1)], [["+"]])

    def test_equivariance(self):
        """Test building through M gives M applied to the standard construction"""
        rng = random.Random(113)
        for _ in range(10):
            s = random_spec(rng, rng.randint(1, 2), rng.randint(1, 2))
            p, q = rng.randint(-2, 2), rng.randint(-2, 2)
            matrix = ((1 + p * q, p), (q, 1))
            u, v = (matrix[0][0], matrix[1][0]), (matrix[0][1], matrix[1][1])
            result = build_general(
                u,
                v,
                [apply_matrix(matrix, a) for a in s.a_list],
                [apply_matrix(matrix, b) for b in s.b_list],
                s.signs,
            )
            assert result.pullback.spec.a_list == s.a_list
            assert result.achieved_set_of_target == transform_set(matrix, build_from_generators(s).achieved)
