"""
Unit tests for tree geometry: addresses, paths, spans and finite subtrees
"""

import pytest

from src.errors import InvalidAddressError
from src.tree_core import (
    PARENT,
    ROOT,
    FiniteSubtree,
    address_key,
    direction_to,
    distance,
    format_address,
    is_ancestor,
    is_connected,
    meet,
    parent,
    parse_address,
    path,
    span,
    span_set,
    step,
    subtree_or_none,
)


@pytest.mark.unit
class TestAddresses:
    """Test address parsing and formatting"""

    @pytest.mark.parametrize("text,expected", [
        ("eps", ()),
        ("", ()),
        ("1", (1,)),
        ("1.2.3", (1, 2, 3)),
        (" 4.1 ", (4, 1)),
    ])
    def test_parse(self, text, expected):
        """Test text addresses"""
        assert parse_address(text) == expected

    @pytest.mark.parametrize("text", ["0", "1.0", "-1", "a.b", "1..2"])
    def test_parse_invalid(self, text):
        """Test labels must be positive integers"""
        with pytest.raises(InvalidAddressError):
            parse_address(text)

    def test_format_roundtrip(self):
        """Test format then parse gives the same address"""
        for v in [(), (1,), (3, 1, 4)]:
            assert parse_address(format_address(v)) == v

    def test_root_has_no_parent(self):
        """Test parent of eps raises"""
        with pytest.raises(InvalidAddressError):
            parent(ROOT)

    def test_sort_key_is_length_then_lex(self):
        """Test deterministic ordering"""
        vs = [(2,), (1, 1), (), (1,)]
        assert sorted(vs, key=address_key) == [(), (1,), (2,), (1, 1)]


@pytest.mark.unit
class TestGeometry:
    """Test paths, meets and distances"""

    @pytest.mark.parametrize("v,w,expected", [
        ((), (), 0),
        ((1,), (), 1),
        ((1, 2), (1, 3), 2),
        ((1, 2, 5), (2,), 4),
        ((7,), (7, 1, 1), 2),
    ])
    def test_distance(self, v, w, expected):
        """Test tree distance"""
        assert distance(v, w) == expected
        assert distance(w, v) == expected

    def test_meet(self):
        """Test longest common prefix"""
        assert meet((1, 2, 3), (1, 2, 4)) == (1, 2)
        assert meet((1,), (2,)) == ()

    def test_path_goes_through_meet(self):
        """Test the path from 1.2 to 1.3"""
        assert path((1, 2), (1, 3)) == [(1, 2), (1,), (1, 3)]
        assert path((), ()) == [()]

    def test_path_length_matches_distance(self):
        """Test |path| = distance + 1"""
        v, w = (1, 2, 3), (4, 1)
        assert len(path(v, w)) == distance(v, w) + 1

    def test_step_and_direction(self):
        """Test walking in a direction and recovering it"""
        v = (3, 1)
        assert step(v, PARENT) == (3,)
        assert step(v, 5) == (3, 1, 5)
        assert direction_to(v, (3,)) == PARENT
        assert direction_to(v, (3, 1, 2)) == 2

    def test_direction_needs_adjacent(self):
        """Test non-adjacent vertices raise"""
        with pytest.raises(InvalidAddressError):
            direction_to((1,), (2,))

    def test_is_ancestor(self):
        """Test the prefix order"""
        assert is_ancestor((), (1, 2))
        assert is_ancestor((1, 2), (1, 2))
        assert not is_ancestor((1, 3), (1, 2))


@pytest.mark.unit
class TestFiniteSubtree:
    """Test spans and finite subtrees"""

    def test_span_of_siblings(self):
        """Test span adds the common parent"""
        t = span([(1, 1), (1, 2)])
        assert t.sorted() == [(1,), (1, 1), (1, 2)]
        assert t.top() == (1,)

    def test_span_across_root(self):
        """Test span of two branches contains eps"""
        assert span([(1, 1), (2,)]).sorted() == [(), (1,), (2,), (1, 1)]

    def test_span_empty(self):
        """Test span of nothing raises while span_set returns empty"""
        with pytest.raises(InvalidAddressError):
            span([])
        assert span_set([]) == frozenset()

    def test_disconnected_rejected(self):
        """Test disconnected vertex sets are rejected"""
        with pytest.raises(InvalidAddressError):
            FiniteSubtree.of((1,), (2,))
        assert not is_connected([(1,), (2,)])

    def test_edges_and_leaves(self, small_subtree):
        """Test edges are child endpoints and leaves have degree 1"""
        assert small_subtree.edges() == [(1,), (2,)]
        assert small_subtree.leaves() == [(1,), (2,)]
        assert len(small_subtree) == 3
        assert (1,) in small_subtree

    def test_single_vertex(self, root_only):
        """Test a one-vertex subtree has no edges or leaves"""
        assert root_only.edges() == []
        assert root_only.leaves() == []

    def test_subtree_or_none(self):
        """Test optional construction"""
        assert subtree_or_none([]) is None
        assert subtree_or_none([(1,)]).top() == (1,)
