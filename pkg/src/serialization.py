"""
JSON 与 DOT 格式
所有公开模型的 JSON 导入导出（带 "type" 字段分派），以及双树/骨架的 DOT 输出
"""

import json
from typing import Any, Callable, Dict, Union

from loguru import logger
from pydantic import ValidationError

from .bitree import BiTree, make_bitree
from .continued_fraction import CFWord, QuadraticIrrational, format_rational, parse_rational
from .errors import HierTreeError, SerializationError
from .forest import BoundaryRegion, ColoredFiniteTree, make_cutset
from .mobius import Mobius
from .relabel import TailAffineBijection
from .sphero import NeighborRule, PieceMap, Spheromorphism, make_sphero
from .thompson import IdealPolygon, ThompsonElement
from .tree_core import FiniteSubtree, address_key, format_address, parse_address


def _addrs(vs) -> list:
    return [format_address(v) for v in sorted(vs, key=address_key)]


def _parse_addrs(items) -> list:
    return [parse_address(s) for s in items]


# ==================== 导出 ====================

def _sphero_json(g: Spheromorphism) -> dict:
    return {
        "source_cuts": _addrs(g.source_cuts),
        "target_cuts": _addrs(g.target_cuts),
        "pieces": [
            {
                "source_apex": format_address(p.source_apex),
                "target_apex": format_address(p.target_apex),
                "rules": {format_address(u): r.to_json() for u, r in sorted(p.rules.items(), key=lambda kv: address_key(kv[0]))},
            }
            for p in g.pieces
        ],
    }


def _anchor_json(anchor):
    if anchor is None:
        return None
    return {format_address(x): v for x, v in sorted(anchor.items(), key=lambda kv: address_key(kv[0]))}


def _bitree_json(bt: BiTree) -> dict:
    return {
        "vertices": sorted(bt.vertices),
        "edges": [list(e) for e in bt.edges],
        "left_anchor": _anchor_json(bt.left_anchor),
        "right_anchor": _anchor_json(bt.right_anchor),
        "marks": sorted(bt.marks),
        "weak": bt.weak,
    }


_EXPORTERS: Dict[type, Callable[[Any], dict]] = {
    FiniteSubtree: lambda t: {"vertices": _addrs(t.vertices)},
    TailAffineBijection: lambda f: f.to_json(),
    NeighborRule: lambda r: r.to_json(),
    Spheromorphism: _sphero_json,
    BoundaryRegion: lambda r: {"cuts": _addrs(r.cuts), "selected": _addrs(r.selected)},
    ColoredFiniteTree: lambda t: {
        "vertices": _addrs(t.tree.vertices) if t.tree is not None else [],
        "edge_colors": {format_address(e): c for e, c in sorted(t.edge_colors.items(), key=lambda kv: address_key(kv[0]))},
    },
    BiTree: _bitree_json,
    Mobius: lambda m: {"matrix": [m.a, m.b, m.c, m.d]},
    ThompsonElement: lambda t: {
        "breakpoints": [format_rational(r) for r in t.breakpoints],
        "matrices": [[m.a, m.b, m.c, m.d] for m in t.matrices],
    },
    IdealPolygon: lambda p: {"cusps": [format_rational(c) for c in p.cusps]},
    CFWord: lambda w: {"terms": list(w.terms)},
    QuadraticIrrational: lambda x: {"a": x.a, "b": x.b, "c": x.c, "d": x.d},
}


def to_json(obj) -> dict:
    """模型到 JSON 字典，"type" 为类名"""
    exporter = _EXPORTERS.get(type(obj))
    if exporter is None:
        raise SerializationError(f"No JSON format for {type(obj).__name__}")
    return {"type": type(obj).__name__, **exporter(obj)}


# ==================== 导入 ====================

def _sphero_from(d: dict) -> Spheromorphism:
    pieces = [
        PieceMap(
            source_apex=parse_address(p["source_apex"]),
            target_apex=parse_address(p["target_apex"]),
            rules={parse_address(u): NeighborRule.from_json(r) for u, r in p.get("rules", {}).items()},
        )
        for p in d["pieces"]
    ]
    return make_sphero(_parse_addrs(d["source_cuts"]), _parse_addrs(d["target_cuts"]), pieces)


def _anchor_from(d):
    if d is None:
        return None
    return {parse_address(x): v for x, v in d.items()}


def _colored_from(d: dict) -> ColoredFiniteTree:
    vs = _parse_addrs(d["vertices"])
    tree = FiniteSubtree(vertices=frozenset(vs)) if vs else None
    return ColoredFiniteTree(tree=tree, edge_colors={parse_address(e): c for e, c in d["edge_colors"].items()})


_IMPORTERS: Dict[str, Callable[[dict], Any]] = {
    "FiniteSubtree": lambda d: FiniteSubtree(vertices=frozenset(_parse_addrs(d["vertices"]))),
    "TailAffineBijection": TailAffineBijection.from_json,
    "NeighborRule": NeighborRule.from_json,
    "Spheromorphism": _sphero_from,
    "BoundaryRegion": lambda d: BoundaryRegion(
        cuts=make_cutset(_parse_addrs(d["cuts"])), selected=frozenset(_parse_addrs(d["selected"]))
    ),
    "ColoredFiniteTree": _colored_from,
    "BiTree": lambda d: make_bitree(
        d["vertices"], [tuple(e) for e in d["edges"]],
        _anchor_from(d.get("left_anchor")), _anchor_from(d.get("right_anchor")),
        d.get("marks", []), d.get("weak", False),
    ),
    "Mobius": lambda d: Mobius.of(*d["matrix"]),
    "ThompsonElement": lambda d: ThompsonElement(
        breakpoints=tuple(parse_rational(r) for r in d["breakpoints"]),
        matrices=tuple(Mobius.of(*m) for m in d["matrices"]),
    ),
    "IdealPolygon": lambda d: IdealPolygon(cusps=tuple(parse_rational(c) for c in d["cusps"])),
    "CFWord": lambda d: CFWord(terms=tuple(d["terms"])),
    "QuadraticIrrational": lambda d: QuadraticIrrational.make(d["a"], d["b"], d["c"], d["d"]),
}


def from_json(data: Union[dict, str]):
    """
    JSON 字典（或字符串）到模型

    Raises:
        SerializationError: 缺少字段、类型未知或内容不合法
    """
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise SerializationError(f"Malformed JSON: {e}") from e
    if not isinstance(data, dict) or "type" not in data:
        raise SerializationError("JSON object with a 'type' field expected")
    importer = _IMPORTERS.get(data["type"])
    if importer is None:
        raise SerializationError(f"Unknown type {data['type']!r}")
    try:
        return importer(data)
    except (KeyError, TypeError, ValueError, ValidationError, HierTreeError) as e:
        logger.error(f"Failed to import {data['type']}: {e}")
        raise SerializationError(f"Invalid {data['type']} data: {e}") from e


def dumps(obj) -> str:
    return json.dumps(to_json(obj), ensure_ascii=False, indent=2)


def loads(text: str):
    return from_json(text)


# ==================== DOT ====================

def export_dot(obj: Union[BiTree, ColoredFiniteTree], name: str = "G") -> str:
    """无向图 DOT，边带 color=black|blue|red 属性"""
    lines = [f"graph {name} {{"]
    if isinstance(obj, BiTree):
        labels: Dict[str, list] = {}
        for side, anchor in (("L", obj.left_anchor), ("R", obj.right_anchor)):
            for x, v in (anchor or {}).items():
                labels.setdefault(v, []).append(f"{side}:{format_address(x)}")
        for v in sorted(obj.vertices):
            extra = f' [xlabel="{",".join(sorted(labels[v]))}"]' if v in labels else ""
            lines.append(f'  "{v}"{extra};')
        for a, b, c in obj.edges:
            lines.append(f'  "{a}" -- "{b}" [color={c}];')
    elif isinstance(obj, ColoredFiniteTree):
        if obj.tree is not None:
            for v in obj.tree.sorted():
                lines.append(f'  "{format_address(v)}";')
            for e in obj.tree.edges():
                lines.append(f'  "{format_address(e[:-1])}" -- "{format_address(e)}" [color={obj.edge_colors[e]}];')
    else:
        raise SerializationError(f"No DOT format for {type(obj).__name__}")
    lines.append("}")
    return "\n".join(lines) + "\n"
