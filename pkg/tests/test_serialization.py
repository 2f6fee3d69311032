"""
Unit tests for JSON import/export and DOT output
"""

import json

import pytest

from src.bitree import BiTree, bitree_of, ij_bitree_of
from src.continued_fraction import CFWord, QuadraticIrrational
from src.errors import SerializationError
from src.forest import branch, skeleton
from src.mobius import Mobius
from src.serialization import dumps, export_dot, from_json, loads, to_json
from src.sphero import equals
from src.tree_core import FiniteSubtree


@pytest.mark.unit
class TestJson:
    """Test the typed JSON format"""

    def test_e1_layout(self, e1_sphero):
        """Test the exported fields of E1"""
        data = to_json(e1_sphero)
        assert data["type"] == "Spheromorphism"
        assert data["source_cuts"] == ["1", "1.1"]
        assert data["target_cuts"] == ["1", "2"]
        assert [p["source_apex"] for p in data["pieces"]] == ["eps", "1", "1.1"]
        assert data["pieces"][0]["rules"]["eps"]["children"] == {"exc": {}, "t": 2, "c": 1}

    def test_sphero_roundtrip(self, e1_sphero):
        """Test E1 survives dumps/loads"""
        back = loads(dumps(e1_sphero))
        assert back == e1_sphero
        assert equals(back, e1_sphero)

    @pytest.mark.parametrize("obj", [
        FiniteSubtree.of((), (1,), (1, 2)),
        branch((2, 1)),
        Mobius.of(2, 1, 1, 1),
        CFWord(terms=(2, 1, 1, 2)),
        QuadraticIrrational.make(1, 1, 2, 5),
    ])
    def test_value_roundtrip(self, obj):
        """Test small value objects"""
        assert from_json(to_json(obj)) == obj

    def test_thompson_roundtrip(self, rotation, tri):
        """Test elements and polygons with the point at infinity"""
        assert from_json(to_json(rotation)) == rotation
        assert from_json(to_json(tri)) == tri

    def test_bitree_roundtrip(self, e1_sphero):
        """Test anchored bi-trees keep their anchors"""
        J = FiniteSubtree.of(())
        bt = ij_bitree_of(e1_sphero, J, J)
        assert from_json(json.loads(json.dumps(to_json(bt)))) == bt

    @pytest.mark.parametrize("text", [
        "not json",
        '{"vertices": []}',
        '{"type": "Nothing"}',
        '{"type": "Mobius", "matrix": [2, 0, 0, 1]}',
        '{"type": "Spheromorphism", "pieces": []}',
    ])
    def test_invalid(self, text):
        """Test malformed input raises SerializationError"""
        with pytest.raises(SerializationError):
            loads(text)

    def test_unknown_export(self):
        """Test exporting an unsupported object"""
        with pytest.raises(SerializationError):
            to_json(object())


@pytest.mark.unit
class TestDot:
    """Test Graphviz output"""

    def test_e1_bitree(self, e1_sphero):
        """Test three vertices and three coloured edges"""
        dot = export_dot(bitree_of(e1_sphero))
        lines = dot.strip().splitlines()
        assert lines[0] == "graph G {"
        assert lines[-1] == "}"
        assert sum(1 for line in lines if " -- " in line) == 3
        assert '"1" -- "1.1" [color=blue];' in dot
        assert '"1.1" -- "eps" [color=red];' in dot

    def test_empty_bitree(self):
        """Test the empty graph"""
        assert export_dot(BiTree()) == "graph G {\n}\n"

    def test_anchor_labels(self, e1_sphero):
        """Test anchors appear as external labels"""
        J = FiniteSubtree.of(())
        dot = export_dot(ij_bitree_of(e1_sphero, J, J), name="H")
        assert dot.startswith("graph H {")
        assert '"eps" [xlabel="L:eps,R:eps"];' in dot

    def test_skeleton(self):
        """Test a skeleton exports its blue edges"""
        from src.forest import make_cutset
        dot = export_dot(skeleton(make_cutset([(1,), (1, 1)])))
        assert '"eps" -- "1" [color=blue];' in dot
        assert '"1" -- "1.1" [color=blue];' in dot
