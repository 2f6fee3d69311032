"""
割集与覆盖森林
(𝕋)-子树总是相对割集表示为分量（顶点 + 边界），
并提供框架、骨架以及球代数 𝒜 的布尔运算
"""

from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Tuple

import networkx as nx
from loguru import logger
from networkx.algorithms.isomorphism import categorical_edge_match
from pydantic import BaseModel, ConfigDict

from .errors import InvalidAddressError
from .tree_core import (
    ROOT,
    Address,
    FiniteSubtree,
    address_key,
    check_address,
    is_ancestor,
    span,
)

CutSet = FrozenSet[Address]
Side = Literal["inside", "outside"]
Color = Literal["black", "blue", "red"]


def make_cutset(edges: Iterable[Iterable[int]]) -> CutSet:
    """割边用子端点表示，深度必须 ≥ 1"""
    out = set()
    for e in edges:
        e = check_address(e)
        if not e:
            raise InvalidAddressError("A cut edge needs a child endpoint of depth >= 1")
        out.add(e)
    return frozenset(out)


def apexes(cuts: CutSet) -> List[Address]:
    """所有分量的顶点，按确定顺序"""
    return [ROOT] + sorted(cuts, key=address_key)


def apex_of(v: Address, cuts: CutSet) -> Address:
    """v 所在分量的顶点：v 的最深的、属于割集的前缀，否则为 ε"""
    for i in range(len(v), 0, -1):
        if v[:i] in cuts:
            return v[:i]
    return ROOT


def same_component(v: Address, w: Address, cuts: CutSet) -> bool:
    return apex_of(v, cuts) == apex_of(w, cuts)


def cut_children(u: Address, cuts: CutSet) -> List[int]:
    """u 的被割掉的子方向"""
    return sorted(e[-1] for e in cuts if len(e) == len(u) + 1 and e[:-1] == u)


def has_parent_direction(u: Address, cuts: CutSet) -> bool:
    """u 在其分量内是否保留父方向"""
    return bool(u) and u not in cuts


def present_directions(u: Address, cuts: CutSet, limit: Optional[int] = None) -> List[int]:
    """
    u 在其分量内保留的方向（0 为父方向），子方向只列到 limit

    limit 缺省为最大被割子标签加一，之后的子方向总是保留
    """
    removed = cut_children(u, cuts)
    limit = max(removed, default=0) + 1 if limit is None else limit
    out = [0] if has_parent_direction(u, cuts) else []
    out.extend(k for k in range(1, limit + 1) if k not in removed)
    return out


# ==================== 分量 ====================

class Component(BaseModel):
    """割集的一个分量"""
    model_config = ConfigDict(frozen=True)

    apex: Address
    boundary: Tuple[Tuple[Address, Side], ...] = ()

    def boundary_edges(self) -> List[Address]:
        return [e for e, _ in self.boundary]

    def contains(self, v: Address, cuts: CutSet) -> bool:
        return apex_of(v, cuts) == self.apex


def component_at(apex: Address, cuts: CutSet) -> Component:
    boundary: List[Tuple[Address, Side]] = []
    if apex:
        boundary.append((apex, "inside"))
    for e in sorted(cuts, key=address_key):
        if e != apex and apex_of(e[:-1], cuts) == apex:
            boundary.append((e, "outside"))
    return Component(apex=apex, boundary=tuple(boundary))


def component_of(v: Address, cuts: CutSet) -> Component:
    """v 所在的分量"""
    return component_at(apex_of(v, cuts), cuts)


def components(cuts: CutSet) -> List[Component]:
    """割集的全部分量，恰有 |cuts| + 1 个"""
    return [component_at(a, cuts) for a in apexes(cuts)]


def frame(comp: Component) -> FiniteSubtree:
    """分量的框架：所有边界边端点张成的最小子树"""
    if not comp.boundary:
        raise InvalidAddressError("A component without boundary edges (the whole tree) has no frame")
    ends = []
    for e, _ in comp.boundary:
        ends.extend([e, e[:-1]])
    return span(ends)


# ==================== 着色树与骨架 ====================

class ColoredFiniteTree(BaseModel):
    """边着色的有限子树；tree 为 None 表示空骨架"""
    model_config = ConfigDict(frozen=True)

    tree: Optional[FiniteSubtree] = None
    edge_colors: Dict[Address, Color] = {}

    @property
    def is_empty(self) -> bool:
        return self.tree is None

    def edges_of(self, color: Color) -> List[Address]:
        return sorted((e for e, c in self.edge_colors.items() if c == color), key=address_key)


def skeleton(cuts: CutSet, base: Optional[FiniteSubtree] = None) -> ColoredFiniteTree:
    """
    骨架：包含所有割边（蓝色）与 base 的最小子树，其余边为黑色

    Args:
        cuts: 割集
        base: 可选的附加有限子树（锚点 I）

    Returns:
        ColoredFiniteTree；两者皆空时为空骨架
    """
    ends: List[Address] = []
    for e in cuts:
        ends.extend([e, e[:-1]])
    if base is not None:
        ends.extend(base.vertices)
    if not ends:
        return ColoredFiniteTree()
    tree = span(ends)
    colors: Dict[Address, Color] = {}
    for e in tree.edges():
        colors[e] = "blue" if e in cuts else "black"
    return ColoredFiniteTree(tree=tree, edge_colors=colors)


def skeleton_graph(s: ColoredFiniteTree) -> nx.Graph:
    g = nx.Graph()
    if s.tree is not None:
        g.add_nodes_from(s.tree.vertices)
        g.add_edges_from((e[:-1], e, {"color": s.edge_colors[e]}) for e in s.tree.edges())
    return g


def skeleton_equivalent(a: ColoredFiniteTree, b: ColoredFiniteTree) -> bool:
    """两个骨架是否保色同构（自同构轨道的不变量）"""
    return nx.is_isomorphic(skeleton_graph(a), skeleton_graph(b), edge_match=categorical_edge_match("color", ""))


# ==================== 球代数 ====================

class BoundaryRegion(BaseModel):
    """
    球代数 𝒜 的元素：割集加上被选中的分量顶点。
    边界 ∂𝕋 中落在被选分量里的射线组成该区域。
    """
    model_config = ConfigDict(frozen=True)

    cuts: CutSet = frozenset()
    selected: FrozenSet[Address] = frozenset()

    def status(self, v: Address) -> bool:
        """v 所在分量是否被选中"""
        return apex_of(v, self.cuts) in self.selected

    def canonical(self) -> "BoundaryRegion":
        return region_canonical(self)

    def is_full(self) -> bool:
        r = self.canonical()
        return not r.cuts and ROOT in r.selected

    def is_empty(self) -> bool:
        return not self.canonical().selected

    def is_trivial(self) -> bool:
        return self.is_full() or self.is_empty()


def make_region(cuts: Iterable[Iterable[int]], selected: Iterable[Iterable[int]]) -> BoundaryRegion:
    cuts = make_cutset(cuts)
    sel = frozenset(tuple(s) for s in selected)
    valid = set(apexes(cuts))
    for s in sel:
        if s not in valid:
            raise InvalidAddressError(f"Selected vertex {s} is not a component apex")
    return region_canonical(BoundaryRegion(cuts=cuts, selected=sel))


def region_canonical(r: BoundaryRegion) -> BoundaryRegion:
    """去掉两侧选择状态相同的割边并合并分量"""
    kept = frozenset(e for e in r.cuts if r.status(e) != r.status(e[:-1]))
    selected = frozenset(a for a in apexes(kept) if r.status(a))
    if len(kept) != len(r.cuts):
        logger.debug(f"Region canonicalization removed {len(r.cuts) - len(kept)} cuts")
    return BoundaryRegion(cuts=kept, selected=selected)


def region_full() -> BoundaryRegion:
    return BoundaryRegion(cuts=frozenset(), selected=frozenset({ROOT}))


def region_empty() -> BoundaryRegion:
    return BoundaryRegion()


def branch(p: Address) -> BoundaryRegion:
    """以 p 为根的分支的边界"""
    p = check_address(p)
    if not p:
        return region_full()
    return BoundaryRegion(cuts=frozenset({p}), selected=frozenset({p}))


def _combine(a: BoundaryRegion, b: BoundaryRegion, op) -> BoundaryRegion:
    cuts = a.cuts | b.cuts
    selected = frozenset(x for x in apexes(cuts) if op(a.status(x), b.status(x)))
    return region_canonical(BoundaryRegion(cuts=cuts, selected=selected))


def region_intersect(a: BoundaryRegion, b: BoundaryRegion) -> BoundaryRegion:
    return _combine(a, b, lambda x, y: x and y)


def region_union(a: BoundaryRegion, b: BoundaryRegion) -> BoundaryRegion:
    return _combine(a, b, lambda x, y: x or y)


def region_complement(a: BoundaryRegion) -> BoundaryRegion:
    selected = frozenset(x for x in apexes(a.cuts) if x not in a.selected)
    return region_canonical(BoundaryRegion(cuts=a.cuts, selected=selected))


def region_difference(a: BoundaryRegion, b: BoundaryRegion) -> BoundaryRegion:
    return _combine(a, b, lambda x, y: x and not y)


def region_is_trivial(r: BoundaryRegion) -> bool:
    """空集或整个边界"""
    return r.is_trivial()


def region_member(r: BoundaryRegion, prefix: Address) -> Literal["inside", "outside", "undecided"]:
    """
    判断经过 prefix 的边界柱集与区域的关系

    Returns:
        inside / outside；若柱集被更深的割边分开则为 undecided
    """
    r = region_canonical(r)
    prefix = tuple(prefix)
    for e in r.cuts:
        if len(e) > len(prefix) and is_ancestor(prefix, e[:-1]):
            return "undecided"
    return "inside" if r.status(prefix) else "outside"
