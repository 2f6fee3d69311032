"""
Unit tests for Thompson group elements and their spheromorphisms
"""

import random
from fractions import Fraction

import pytest

from src.continued_fraction import INF, QuadraticIrrational
from src.errors import ThompsonError
from src.mobius import IDENTITY, S, T, Mobius
from src.sphero import compose, equals, is_identity, validate
from src.thompson import (
    boundary_agrees,
    boundary_equivalent,
    make_polygon,
    random_thompson,
    thompson_apply,
    thompson_compose,
    thompson_equal,
    thompson_from_mobius,
    thompson_from_polygons,
    thompson_inverse,
    thompson_sphero,
    thompson_validate,
)

SURDS = [
    QuadraticIrrational.sqrt(2),
    QuadraticIrrational.make(-1, 1, 1, 2),
    QuadraticIrrational.make(1, 1, 2, 5),
    QuadraticIrrational.sqrt(3).neg(),
    QuadraticIrrational.make(3, 1, 2, 3),
]


@pytest.fixture
def square_map():
    """(0, 1, 2, inf) onto (0, 1/2, 1, inf), a genuinely piecewise element"""
    U = make_polygon([0, 1, 2, INF])
    V = make_polygon([0, Fraction(1, 2), 1, INF])
    return thompson_from_polygons(U, V, 0)


@pytest.mark.unit
@pytest.mark.cf
class TestPolygons:
    """Test ideal polygons"""

    def test_triangle(self, tri):
        """Test the basic triangle is accepted"""
        assert tri.cusps == (Fraction(0), Fraction(1), INF)

    @pytest.mark.parametrize("cusps", [
        [0, 1],
        [0, 2, INF],
        [1, 0, INF],
    ])
    def test_invalid(self, cusps):
        """Test too few cusps, a non-unimodular side and the wrong order"""
        with pytest.raises(ThompsonError):
            make_polygon(cusps)


@pytest.mark.unit
@pytest.mark.cf
class TestElements:
    """Test validation, evaluation and the group law"""

    def test_rotation_is_one_matrix(self, rotation):
        """Test the order-3 rotation is x -> 1/(1 - x) everywhere"""
        assert rotation.breakpoints == ()
        assert thompson_apply(rotation, Fraction(2)) == -1
        assert thompson_apply(rotation, 0) == 1
        assert thompson_apply(rotation, 1) == INF

    def test_rotation_order_three(self, rotation):
        """Test the cube of the rotation is the identity"""
        cube = thompson_compose(rotation, thompson_compose(rotation, rotation))
        assert thompson_equal(cube, thompson_from_mobius(IDENTITY))
        assert not thompson_equal(rotation, thompson_from_mobius(IDENTITY))

    def test_piecewise_values(self, square_map):
        """Test cusps go to the matching cusps"""
        assert len(square_map.breakpoints) > 1
        assert thompson_apply(square_map, 0) == 0
        assert thompson_apply(square_map, 1) == Fraction(1, 2)
        assert thompson_apply(square_map, 2) == 1
        assert thompson_apply(square_map, INF) == INF

    def test_inverse(self, square_map):
        """Test the inverse undoes the element"""
        inv = thompson_inverse(square_map)
        assert thompson_apply(inv, Fraction(1, 2)) == 1
        assert thompson_equal(thompson_compose(square_map, inv), thompson_from_mobius(IDENTITY))

    def test_orientation_reversal_rejected(self):
        """Test a det -1 matrix is not in the group"""
        with pytest.raises(ThompsonError):
            thompson_validate([(INF, INF, S)])

    def test_discontinuity_rejected(self):
        """Test pieces must agree at the breakpoints"""
        with pytest.raises(ThompsonError):
            thompson_validate([(0, 1, IDENTITY), (1, 0, T)])

    def test_gap_rejected(self):
        """Test arcs must tile the circle"""
        with pytest.raises(ThompsonError):
            thompson_validate([(0, 1, IDENTITY), (2, 0, IDENTITY)])

    def test_merges_equal_matrices(self):
        """Test adjacent pieces with one matrix collapse"""
        t = thompson_validate([(0, 1, T), (1, 0, T)])
        assert t.breakpoints == ()
        assert t.matrices == (T,)


@pytest.mark.unit
@pytest.mark.cf
class TestSpheromorphisms:
    """Test the tree maps of Thompson elements"""

    def test_rotation_sphero(self, rotation):
        """Test the rotation gives a valid element of order three"""
        g = thompson_sphero(rotation)
        assert validate(g).ok
        assert is_identity(compose(g, compose(g, g)))

    def test_piecewise_valid(self, square_map):
        """Test the assembled map validates"""
        assert validate(thompson_sphero(square_map)).ok

    @pytest.mark.parametrize("x", SURDS)
    def test_boundary_action(self, square_map, x):
        """Test the tree map agrees with the element on boundary points"""
        g = thompson_sphero(square_map)
        assert boundary_agrees(g, x, thompson_apply(square_map, x))

    def test_homomorphism(self, square_map, rotation):
        """Test composition is preserved"""
        lhs = thompson_sphero(thompson_compose(square_map, rotation))
        rhs = compose(thompson_sphero(square_map), thompson_sphero(rotation))
        assert equals(lhs, rhs)

    def test_single_matrix_matches_mobius(self):
        """Test an element without breakpoints is its matrix"""
        from src.mobius import mobius_sphero
        m = Mobius.of(2, 1, 1, 1)
        assert equals(thompson_sphero(thompson_from_mobius(m)), mobius_sphero(m))

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(3))
    def test_random_elements(self, seed):
        """Test random elements on a few boundary points"""
        t = random_thompson(random.Random(seed), max_cusps=4)
        g = thompson_sphero(t)
        for x in SURDS[:3]:
            assert boundary_agrees(g, x, thompson_apply(t, x))


@pytest.mark.unit
@pytest.mark.cf
class TestBoundaryOrbits:
    """Test orbit equivalence of boundary points"""

    def test_same_orbit(self):
        """Test sqrt(2) and 1/sqrt(2) are in one orbit"""
        assert boundary_equivalent(QuadraticIrrational.sqrt(2), QuadraticIrrational.make(0, 1, 2, 2))

    def test_different_orbits(self):
        """Test sqrt(2) and the golden ratio are not"""
        assert not boundary_equivalent(QuadraticIrrational.sqrt(2), QuadraticIrrational.make(1, 1, 2, 5))
