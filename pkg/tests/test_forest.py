"""
Unit tests for cut sets, components, skeletons and the ball algebra
"""

import random

import pytest

from src.errors import InvalidAddressError
from src.forest import (
    apex_of,
    branch,
    component_at,
    component_of,
    components,
    frame,
    make_cutset,
    make_region,
    present_directions,
    region_complement,
    region_difference,
    region_empty,
    region_full,
    region_intersect,
    region_is_trivial,
    region_member,
    region_union,
    skeleton,
    skeleton_equivalent,
)
from src.sphero_builders import random_cutset


@pytest.mark.unit
@pytest.mark.sphero
class TestComponents:
    """Test components of a cut set"""

    @pytest.mark.parametrize("cuts,apexes", [
        ([], [()]),
        ([(1,)], [(), (1,)]),
        ([(1,), (1, 1)], [(), (1,), (1, 1)]),
    ])
    def test_components(self, cuts, apexes):
        """Test one component per cut plus the root component"""
        assert [c.apex for c in components(make_cutset(cuts))] == apexes

    def test_cut_at_root_rejected(self):
        """Test the empty address is not an edge"""
        with pytest.raises(InvalidAddressError):
            make_cutset([()])

    def test_apex_of(self):
        """Test the deepest cut prefix wins"""
        cuts = make_cutset([(1,), (1, 1)])
        assert apex_of((1, 1, 5), cuts) == (1, 1)
        assert apex_of((1, 2), cuts) == (1,)
        assert apex_of((2,), cuts) == ()

    def test_component_of(self):
        """Test looking up the component through any of its vertices"""
        cuts = make_cutset([(1,), (1, 1)])
        comp = component_of((1, 3, 2), cuts)
        assert comp.apex == (1,)
        assert comp.boundary == (((1,), "inside"), ((1, 1), "outside"))

    def test_boundary_count(self):
        """Test every cut is seen from both sides"""
        cuts = random_cutset(random.Random(3), 6, 4)
        total = sum(len(c.boundary) for c in components(cuts))
        assert total == 2 * len(cuts)

    def test_present_directions(self):
        """Test the directions a component keeps at a vertex"""
        cuts = make_cutset([(1,), (3,), (1, 1)])
        assert present_directions((), cuts) == [2, 4]
        assert present_directions((1,), cuts) == [2]
        assert present_directions((2,), cuts) == [0, 1]


@pytest.mark.unit
@pytest.mark.sphero
class TestFrameAndSkeleton:
    """Test frames and skeletons"""

    def test_frame_single_cut(self):
        """Test the frame of the root component with one cut"""
        comp = component_at((), make_cutset([(1,)]))
        assert frame(comp).sorted() == [(), (1,)]

    def test_frame_two_cuts(self):
        """Test the frame spans both boundary edges"""
        comp = component_at((), make_cutset([(1,), (2,)]))
        assert frame(comp).sorted() == [(), (1,), (2,)]

    def test_frame_between_cuts(self):
        """Test the frame of the middle component of a path"""
        comp = component_at((1,), make_cutset([(1,), (1, 1)]))
        assert frame(comp).sorted() == [(), (1,), (1, 1)]

    def test_frame_needs_boundary(self):
        """Test the whole tree has no frame"""
        with pytest.raises(InvalidAddressError):
            frame(component_at((), frozenset()))

    def test_skeleton_path(self):
        """Test two nested cuts give a blue path"""
        s = skeleton(make_cutset([(1,), (1, 1)]))
        assert s.tree.sorted() == [(), (1,), (1, 1)]
        assert s.edges_of("blue") == [(1,), (1, 1)]
        assert s.edges_of("black") == []

    def test_skeleton_empty(self):
        """Test no cuts and no base gives the empty skeleton"""
        assert skeleton(frozenset()).is_empty

    def test_skeleton_with_base(self):
        """Test the base subtree adds black edges"""
        from src.tree_core import FiniteSubtree
        s = skeleton(make_cutset([(2,)]), FiniteSubtree.of((), (1,)))
        assert s.edge_colors == {(1,): "black", (2,): "blue"}

    def test_skeleton_leaves_are_blue(self):
        """Test every terminal vertex lies on a blue edge"""
        cuts = random_cutset(random.Random(11), 5, 4)
        s = skeleton(cuts)
        blue_ends = set()
        for e in s.edges_of("blue"):
            blue_ends.update([e, e[:-1]])
        assert set(s.tree.leaves()) <= blue_ends

    def test_skeleton_equivalent(self):
        """Test colour-preserving isomorphism of skeletons"""
        a = skeleton(make_cutset([(1,), (1, 1)]))
        b = skeleton(make_cutset([(2,), (2, 3)]))
        c = skeleton(make_cutset([(1, 1), (2,)]))
        assert skeleton_equivalent(a, b)
        assert not skeleton_equivalent(a, c)


@pytest.mark.unit
@pytest.mark.sphero
class TestRegions:
    """Test the Boolean algebra of boundary regions"""

    def test_nested_branches(self):
        """Test branch(1) meets branch(1,1) in branch(1,1)"""
        assert region_intersect(branch((1,)), branch((1, 1))) == branch((1, 1))

    def test_difference(self):
        """Test branch(1) minus branch(1,1)"""
        r = region_difference(branch((1,)), branch((1, 1)))
        assert r == make_region([(1,), (1, 1)], [(1,)])

    def test_double_complement(self):
        """Test complement is an involution"""
        r = make_region([(1,), (2, 3)], [(), (2, 3)])
        assert region_complement(region_complement(r)) == r

    def test_canonical_drops_redundant_cut(self):
        """Test a cut with equal status on both sides disappears"""
        r = make_region([(1,), (2,)], [(), (1,)])
        assert r.cuts == frozenset({(2,)})

    def test_trivial(self):
        """Test full and empty regions"""
        assert region_is_trivial(region_full())
        assert region_is_trivial(region_empty())
        assert region_union(branch((1,)), region_complement(branch((1,)))) == region_full()
        assert not region_is_trivial(branch((1,)))

    @staticmethod
    def _random_region(rng):
        cuts = random_cutset(rng, 3, 3)
        return make_region(cuts, [x for x in [(), *cuts] if rng.random() < 0.5])

    def test_de_morgan(self):
        """Test De Morgan laws on random regions"""
        rng = random.Random(5)
        for _ in range(20):
            a, b = (self._random_region(rng) for _ in range(2))
            assert region_complement(region_union(a, b)) == region_intersect(region_complement(a), region_complement(b))

    def test_selected_must_be_apex(self):
        """Test selecting a non-apex vertex is rejected"""
        with pytest.raises(InvalidAddressError):
            make_region([(1,)], [(2,)])

    @pytest.mark.parametrize("prefix,expected", [
        ((1, 7), "inside"),
        ((2,), "outside"),
        ((1,), "inside"),
    ])
    def test_member_branch(self, prefix, expected):
        """Test membership in branch(1)"""
        assert region_member(branch((1,)), prefix) == expected

    def test_member_undecided(self):
        """Test a cut below the prefix leaves it undecided"""
        r = region_difference(branch((1,)), branch((1, 1)))
        assert region_member(r, (1,)) == "undecided"
        assert region_member(r, (1, 2)) == "inside"
        assert region_member(r, (1, 1, 4)) == "outside"
