"""
双树（bi-tree）
球同构的双陪集不变量：由完美森林的骨架画出黑/蓝/红三色图。
带锚点的 (I,J)-双树对应 𝒦(I)\\Hier(𝕋)/𝒦(J)；⋄-乘积把两个双树沿 J₂ 粘合。

约定：ij_bitree_of(g, I, J) 中，右锚点 J 在源一侧（黑+蓝树中，x ↦ x），
左锚点 I 在目标一侧（黑+红树中，y ↦ g⁻¹(y)）。diamond(Δ, Γ) 粘合 Δ 的右锚点与 Γ 的左锚点。
"""

import random
from collections import defaultdict, deque
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match
from loguru import logger
from pydantic import BaseModel, ConfigDict

from .errors import BiTreeError
from .forest import apex_of, make_cutset
from .sphero import (
    Spheromorphism,
    apply_vertex,
    invert,
    perfect_forest,
    rebuild,
    validate,
)
from .sphero_builders import build_sphero
from .tree_core import (
    ROOT,
    Address,
    FiniteSubtree,
    address_key,
    format_address,
    parse_address,
    span,
)

Edge = Tuple[str, str, str]


# ==================== 数据模型 ====================

class BiTree(BaseModel):
    """
    有限三色图及可选锚点

    left_anchor: I 的顶点 ↦ 图顶点；right_anchor: J 的顶点 ↦ 图顶点。
    weak 为 True 时允许蓝红双边，marks 记录弱双树的标记顶点。
    """
    model_config = ConfigDict(frozen=True)

    vertices: FrozenSet[str] = frozenset()
    edges: Tuple[Edge, ...] = ()
    left_anchor: Optional[Dict[Address, str]] = None
    right_anchor: Optional[Dict[Address, str]] = None
    marks: FrozenSet[str] = frozenset()
    weak: bool = False

    @property
    def anchored(self) -> bool:
        return self.left_anchor is not None

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def edges_of(self, color: str) -> List[Edge]:
        return [e for e in self.edges if e[2] == color]

    def degree(self) -> Dict[str, int]:
        deg = {v: 0 for v in self.vertices}
        for a, b, _ in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def anchor_images(self) -> Set[str]:
        out: Set[str] = set()
        for anchor in (self.left_anchor, self.right_anchor):
            if anchor:
                out.update(anchor.values())
        return out


def make_bitree(
    vertices: Iterable[str],
    edges: Iterable[Tuple[str, str, str]],
    left_anchor: Optional[Mapping[Address, str]] = None,
    right_anchor: Optional[Mapping[Address, str]] = None,
    marks: Iterable[str] = (),
    weak: bool = False,
) -> BiTree:
    norm = sorted((min(a, b), max(a, b), c) for a, b, c in edges)
    return BiTree(
        vertices=frozenset(vertices),
        edges=tuple(norm),
        left_anchor=dict(left_anchor) if left_anchor is not None else None,
        right_anchor=dict(right_anchor) if right_anchor is not None else None,
        marks=frozenset(marks),
        weak=weak,
    )


def identity_bitree(J: FiniteSubtree) -> BiTree:
    """id_J：J 全黑，两侧锚点为恒等"""
    ids = {v: format_address(v) for v in J.vertices}
    edges = [(ids[v[:-1]], ids[v], "black") for v in J.edges()]
    return make_bitree(ids.values(), edges, ids, ids)


# ==================== 结构检查 ====================

def _is_tree(vertices: Set[str], edges: List[Edge]) -> bool:
    if not vertices:
        return not edges
    g = nx.MultiGraph()
    g.add_nodes_from(vertices)
    g.add_edges_from((a, b) for a, b, _ in edges)
    return g.number_of_edges() == len(vertices) - 1 and nx.is_connected(g)


def check_bitree(bt: BiTree) -> List[str]:
    """
    检查双树不变量

    Returns:
        问题列表，空表示合法
    """
    problems = []
    vs = set(bt.vertices)
    blue_black = [e for e in bt.edges if e[2] in ("black", "blue")]
    red_black = [e for e in bt.edges if e[2] in ("black", "red")]
    if not _is_tree(vs, blue_black):
        problems.append("black+blue edges do not form a tree")
    if not _is_tree(vs, red_black):
        problems.append("black+red edges do not form a tree")
    pairs = defaultdict(set)
    for a, b, c in bt.edges:
        pairs[(a, b)].add(c)
    if not bt.weak and any({"blue", "red"} <= cs for cs in pairs.values()):
        problems.append("blue-red double edge")
    if len(bt.edges_of("blue")) != len(bt.edges_of("red")):
        problems.append("blue and red edge counts differ")
    allowed = bt.anchor_images() | set(bt.marks)
    for v, d in bt.degree().items():
        if d <= 1 and v not in allowed and len(vs) > 1:
            problems.append(f"vertex {v} has valence {d}")
    if bt.anchored:
        black_blue_nodes = {a for a, _, _ in blue_black} | {b for _, b, _ in blue_black} | vs
        if not set(bt.left_anchor.values()) <= black_blue_nodes:
            problems.append("left anchor leaves the vertex set")
    return problems


# ==================== 从球同构画双树 ====================

def _draw(g: Spheromorphism, source_marks: Iterable[Address], target_marks: Iterable[Address]) -> Tuple[Set[Address], List[Tuple[Address, Address, str]], Spheromorphism]:
    """在 g 自身的森林上画图，顶点为源树地址"""
    c, t = g.source_cuts, g.target_cuts
    g_inv = invert(g)
    a_pts: Set[Address] = set(source_marks)
    for e in c:
        a_pts.update([e, e[:-1]])
    targets: Set[Address] = set(target_marks)
    for e in t:
        targets.update([e, e[:-1]])
    pts = a_pts | {apply_vertex(g_inv, y) for y in targets}

    groups: Dict[Address, List[Address]] = defaultdict(list)
    for x in pts:
        groups[apex_of(x, c)].append(x)
    vertices: Set[Address] = set()
    edges: List[Tuple[Address, Address, str]] = []
    for apex in sorted(groups, key=address_key):
        xi = span(groups[apex])
        vertices |= xi.vertices
        edges.extend((v[:-1], v, "black") for v in xi.edges())
    for e in c:
        edges.append((e[:-1], e, "blue"))
    for e in t:
        edges.append((apply_vertex(g_inv, e[:-1]), apply_vertex(g_inv, e), "red"))
    return vertices, edges, g_inv


def _to_bitree(vertices, edges, **kwargs) -> BiTree:
    return make_bitree(
        (format_address(v) for v in vertices),
        ((format_address(a), format_address(b), c) for a, b, c in edges),
        **kwargs,
    )


def bitree_of(g: Spheromorphism) -> BiTree:
    """球同构的（无锚）双树；自同构对应空双树"""
    pf = perfect_forest(g)
    if not pf.source_cuts:
        return BiTree()
    vertices, edges, _ = _draw(pf, (), ())
    logger.debug(f"bitree_of: {len(vertices)} vertices, {len(pf.source_cuts)} blue edges")
    return _to_bitree(vertices, edges)


def ij_bitree_of(g: Spheromorphism, I: FiniteSubtree, J: FiniteSubtree) -> BiTree:
    """
    (I,J)-双树

    Args:
        g: 球同构，视为 J → I 的态射
        I: 目标一侧的有限子树（左锚点）
        J: 源一侧的有限子树（右锚点）
    """
    if not I.vertices or not J.vertices:
        raise BiTreeError("ij_bitree_of needs nonempty I and J")
    pf = perfect_forest(g)
    vertices, edges, g_inv = _draw(pf, J.vertices, I.vertices)
    left = {y: format_address(apply_vertex(g_inv, y)) for y in I.vertices}
    right = {x: format_address(x) for x in J.vertices}
    return _to_bitree(vertices, edges, left_anchor=left, right_anchor=right)


def weak_bitree_of(
    g: Spheromorphism,
    source_cuts: Iterable[Address],
    target_cuts: Iterable[Address],
    marks: Iterable[Address] = (),
    target_marks: Iterable[Address] = (),
) -> BiTree:
    """
    在给定的相容森林（不必完美）上画弱双树，允许蓝红双边

    Args:
        g: 球同构
        source_cuts / target_cuts: 与 g 相容的森林
        marks: 源一侧的标记顶点
        target_marks: 目标一侧的标记顶点
    """
    c, t = make_cutset(source_cuts), make_cutset(target_cuts)
    pf = perfect_forest(g)
    if not pf.source_cuts <= c:
        raise BiTreeError("forest is not a refinement of the perfect forest")
    g2 = rebuild(pf, c, t)
    report = validate(g2)
    if not report.ok:
        raise BiTreeError(f"forest is not compatible with g: {report.diagnostic}")
    marks = set(marks)
    vertices, edges, _ = _draw(g2, marks, target_marks)
    return _to_bitree(vertices, edges, marks=(format_address(m) for m in marks), weak=True)


def _prune(vertices: Set[str], edges: List[Edge], keep: Set[str], only_black: bool) -> Tuple[Set[str], List[Edge]]:
    """反复去掉不在 keep 中的 0/1 度顶点"""
    vertices, edges = set(vertices), list(edges)
    while True:
        deg = {v: 0 for v in vertices}
        for a, b, _ in edges:
            deg[a] += 1
            deg[b] += 1
        doomed = set()
        for v, d in deg.items():
            if v in keep or d > 1:
                continue
            if d == 1 and only_black:
                edge = next(e for e in edges if v in (e[0], e[1]))
                if edge[2] != "black":
                    continue
            doomed.add(v)
        if not doomed:
            return vertices, edges
        vertices -= doomed
        edges = [e for e in edges if e[0] not in doomed and e[1] not in doomed]


def collapse(weak: BiTree) -> BiTree:
    """蓝红双边收缩成黑边，再剪去非标记的黑色叶子"""
    pairs: Dict[Tuple[str, str], List[str]] = defaultdict(list)
    for a, b, c in weak.edges:
        pairs[(a, b)].append(c)
    edges: List[Edge] = []
    for (a, b), colors in pairs.items():
        colors = sorted(colors)
        while "blue" in colors and "red" in colors:
            colors.remove("blue")
            colors.remove("red")
            colors.append("black")
        edges.extend((a, b, c) for c in colors)
    keep = set(weak.marks) | weak.anchor_images()
    vertices, edges = _prune(set(weak.vertices), edges, keep, only_black=True)
    return make_bitree(vertices, edges, weak.left_anchor, weak.right_anchor)


# ==================== 等价 ====================

def to_graph(bt: BiTree) -> nx.Graph:
    """转为 networkx 图：平行边的颜色以 '+' 连接，锚点信息写入节点属性"""
    g = nx.Graph()
    labels: Dict[str, List[str]] = defaultdict(list)
    for side, anchor in (("L", bt.left_anchor), ("R", bt.right_anchor)):
        for x, v in (anchor or {}).items():
            labels[v].append(f"{side}:{format_address(x)}")
    for v in bt.vertices:
        g.add_node(v, anchor="|".join(sorted(labels[v])))
    colors: Dict[Tuple[str, str], List[str]] = defaultdict(list)
    for a, b, c in bt.edges:
        colors[(a, b)].append(c)
    for (a, b), cs in colors.items():
        g.add_edge(a, b, color="+".join(sorted(cs)))
    return g


def _signature(bt: BiTree) -> Tuple:
    return (
        None if bt.left_anchor is None else frozenset(bt.left_anchor),
        None if bt.right_anchor is None else frozenset(bt.right_anchor),
    )


def equivalent(a: BiTree, b: BiTree) -> bool:
    """是否存在保色（且与锚点交换）的图同构"""
    if _signature(a) != _signature(b):
        raise BiTreeError("bi-trees have different anchor signatures")
    if len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return False
    return nx.is_isomorphic(
        to_graph(a),
        to_graph(b),
        node_match=categorical_node_match("anchor", ""),
        edge_match=categorical_edge_match("color", ""),
    )


def certificate(bt: BiTree) -> str:
    """用于去重的不变量哈希（等价的双树哈希相同）"""
    return nx.weisfeiler_lehman_graph_hash(to_graph(bt), node_attr="anchor", edge_attr="color")


# ==================== ⋄-乘积 ====================

GLUE_RULES: Dict[Tuple[str, str], Optional[str]] = {
    ("blue", "black"): "blue",
    ("black", "red"): "red",
    ("black", "black"): "black",
    ("blue", "red"): None,
    ("red", "blue"): "black",
}


def _compact(vertices: Set[str], edges: List[Edge], left, right) -> BiTree:
    order = sorted(vertices)
    names = {v: f"v{i}" for i, v in enumerate(order)}
    return make_bitree(
        names.values(),
        ((names[a], names[b], c) for a, b, c in edges),
        {x: names[v] for x, v in left.items()},
        {x: names[v] for x, v in right.items()},
    )


def diamond(delta: BiTree, gamma: BiTree, glue: Optional[Mapping[Tuple[str, str], Optional[str]]] = None) -> BiTree:
    """
    ⋄-乘积：Δ ∈ M(J1,J2)，Γ ∈ M(J2,J3)，得到 (J1,J3)-双树

    Args:
        delta: 右锚点为 J2 的双树
        gamma: 左锚点为 J2 的双树
        glue: 粘合表，默认 GLUE_RULES；
            (Δ 色, Γ 色) 为 J2 上的边，("red", "blue") 为 J2 之外重合的一对边
    """
    glue = GLUE_RULES if glue is None else glue
    if not delta.anchored or not gamma.anchored:
        raise BiTreeError("diamond needs anchored bi-trees")
    if set(delta.right_anchor) != set(gamma.left_anchor):
        raise BiTreeError("J2 mismatch between the factors")
    j2 = FiniteSubtree(vertices=frozenset(delta.right_anchor))

    rename_d = {v: f"a:{v}" for v in delta.vertices}
    rename_g = {v: f"b:{v}" for v in gamma.vertices}
    for x in j2.vertices:
        rename_g[gamma.left_anchor[x]] = rename_d[delta.right_anchor[x]]

    pairs: Dict[Tuple[str, str], List[Tuple[str, str]]] = defaultdict(list)

    def add(a: str, b: str, c: str, src: str) -> None:
        pairs[(min(a, b), max(a, b))].append((src, c))

    for a, b, c in delta.edges:
        add(rename_d[a], rename_d[b], c, "d")
    for a, b, c in gamma.edges:
        add(rename_g[a], rename_g[b], c, "g")

    j2_pairs = set()
    for x in j2.edges():
        a, b = rename_d[delta.right_anchor[x]], rename_d[delta.right_anchor[x[:-1]]]
        j2_pairs.add((min(a, b), max(a, b)))

    edges: List[Edge] = []
    for (a, b), tagged in pairs.items():
        if (a, b) in j2_pairs:
            dc = [c for s, c in tagged if s == "d" and c in ("black", "blue")]
            gc = [c for s, c in tagged if s == "g" and c in ("black", "red")]
            if not dc or not gc:
                raise BiTreeError(f"J2 edge {a}-{b} is missing from one factor")
            rest = list(tagged)
            rest.remove(("d", dc[0]))
            rest.remove(("g", gc[0]))
            glued = glue[(dc[0], gc[0])]
            if glued is not None:
                edges.append((a, b, glued))
        else:
            rest = list(tagged)
        # 其余的重合只可能是 Δ 的红边与 Γ 的蓝边
        while ("d", "red") in rest and ("g", "blue") in rest:
            rest.remove(("d", "red"))
            rest.remove(("g", "blue"))
            crossed = glue.get(("red", "blue"), GLUE_RULES[("red", "blue")])
            if crossed is not None:
                edges.append((a, b, crossed))
        edges.extend((a, b, c) for _, c in rest)

    left = {x: rename_d[v] for x, v in delta.left_anchor.items()}
    right = {x: rename_g[v] for x, v in gamma.right_anchor.items()}
    vertices = set(rename_d.values()) | set(rename_g.values())
    vertices, edges = _prune(vertices, edges, set(left.values()) | set(right.values()), only_black=False)
    return _compact(vertices, edges, left, right)


def source_support(g: Spheromorphism, delta_vertices: Iterable[str], J: FiniteSubtree) -> FiniteSubtree:
    """g 的源一侧数据张成的子树：J、双树顶点、完美森林割边端点、规则顶点与分量顶点"""
    pf = perfect_forest(g)
    points = list(J.vertices) + [parse_address(v) for v in delta_vertices]
    for e in pf.source_cuts:
        points.extend([e, e[:-1]])
    points.extend(pf.rule_keys())
    points.extend(p.source_apex for p in pf.pieces)
    return span(points)


def target_support(g: Spheromorphism, gamma_vertices: Iterable[str], J: FiniteSubtree) -> FiniteSubtree:
    """g 的目标一侧数据张成的子树"""
    pf = perfect_forest(g)
    points = list(J.vertices) + [apply_vertex(pf, parse_address(v)) for v in gamma_vertices]
    for e in pf.target_cuts:
        points.extend([e, e[:-1]])
    points.extend(apply_vertex(pf, u) for u in pf.rule_keys())
    points.extend(p.target_apex for p in pf.pieces)
    return span(points)


# ==================== 重新着色乘积 ====================

def product_via_recoloring(delta: BiTree, gamma: BiTree, link: Mapping[str, Address]) -> BiTree:
    """
    通过重新着色计算 g1·g2 的 (J1,J3)-双树

    Args:
        delta: ij_bitree_of(g1, J1, J2)，顶点为 g1 源树地址
        gamma: ij_bitree_of(g2, J2, J3)，顶点为 g2 源树地址
        link: Γ 的顶点 ↦ 它在 g2 下的像（g1 源树中的地址）
    """
    if not delta.anchored or not gamma.anchored:
        raise BiTreeError("product_via_recoloring needs anchored bi-trees")
    missing = [v for v in gamma.vertices if v not in link]
    if missing:
        raise BiTreeError(f"link data misses Gamma vertices {sorted(missing)[:3]}")
    to_t1 = {v: format_address(link[v]) for v in gamma.vertices}

    pairs: Dict[Tuple[str, str], Dict[str, str]] = defaultdict(dict)
    for a, b, c in delta.edges:
        pairs[(min(a, b), max(a, b))]["d"] = c
    for a, b, c in gamma.edges:
        x, y = to_t1[a], to_t1[b]
        pairs[(min(x, y), max(x, y))]["g"] = c

    table = GLUE_RULES
    edges: List[Edge] = []
    for (a, b), cs in pairs.items():
        if "d" in cs and "g" in cs:
            key = (cs["d"], cs["g"])
            if key not in table:
                raise BiTreeError(f"unexpected colour pair {key} on {a}-{b}")
            if table[key] is not None:
                edges.append((a, b, table[key]))
        else:
            edges.append((a, b, cs.get("d") or cs["g"]))

    left = dict(delta.left_anchor)
    right = {x: to_t1[v] for x, v in gamma.right_anchor.items()}
    vertices = set(delta.vertices) | set(to_t1.values())
    vertices, edges = _prune(vertices, edges, set(left.values()) | set(right.values()), only_black=True)
    return make_bitree(vertices, edges, left, right)


def recoloring_link(g2: Spheromorphism, gamma: BiTree) -> Dict[str, Address]:
    """Γ 的顶点（g2 源地址文本）在 g2 下的像"""
    return {v: apply_vertex(g2, parse_address(v)) for v in gamma.vertices}


# ==================== 逆构造 ====================

def _embed(vertices: Set[str], edges: List[Edge], start: Dict[str, Address]) -> Dict[str, Address]:
    """把树确定性地嵌入 𝕋：从起点出发广度优先，取最小未用子标签"""
    adj: Dict[str, List[str]] = defaultdict(list)
    for a, b, _ in edges:
        adj[a].append(b)
        adj[b].append(a)
    pos = dict(start)
    used = set(pos.values())
    queue = deque(sorted(pos))
    while queue:
        v = queue.popleft()
        for n in sorted(adj[v]):
            if n in pos:
                continue
            m = 1
            while pos[v] + (m,) in used:
                m += 1
            pos[n] = pos[v] + (m,)
            used.add(pos[n])
            queue.append(n)
    if set(pos) != set(vertices):
        raise BiTreeError("coloured subgraph is not connected")
    return pos


def realize(bt: BiTree) -> Spheromorphism:
    """
    由双树构造一个代表元

    蓝黑树嵌入源树（右锚点处为恒等），红黑树嵌入目标树（左锚点处为恒等），
    每个黑色连通分量给出一个分量同构
    """
    problems = check_bitree(bt)
    if problems:
        raise BiTreeError(f"invalid bi-tree: {problems[0]}")
    if bt.is_empty:
        return Spheromorphism()
    vs = set(bt.vertices)
    blue_black = [e for e in bt.edges if e[2] in ("black", "blue")]
    red_black = [e for e in bt.edges if e[2] in ("black", "red")]
    if bt.anchored:
        p_start = {v: x for x, v in bt.right_anchor.items()}
        q_start = {v: y for y, v in bt.left_anchor.items()}
    else:
        first = min(vs)
        p_start, q_start = {first: ROOT}, {first: ROOT}
    p = _embed(vs, blue_black, p_start)
    q = _embed(vs, red_black, q_start)

    def edge_id(x: Address, y: Address) -> Address:
        return x if len(x) > len(y) else y

    source_cuts = {edge_id(p[a], p[b]) for a, b, _ in bt.edges_of("blue")}
    target_cuts = {edge_id(q[a], q[b]) for a, b, _ in bt.edges_of("red")}

    black = nx.Graph()
    black.add_nodes_from(vs)
    black.add_edges_from((a, b) for a, b, _ in bt.edges_of("black"))
    seeds = [{p[v]: q[v] for v in comp} for comp in nx.connected_components(black)]
    return build_sphero(source_cuts, target_cuts, seeds)


def random_bitree(seed: int, max_blue: int = 3, max_block: int = 3) -> BiTree:
    """
    随机的 ({ε},{ε})-双树

    取 k+1 棵随机黑树，用蓝、红两棵随机生成树把它们连起来，
    蓝红重合时重抽，最后剪去锚点以外的黑色叶子
    """
    rng = random.Random(seed)
    while True:
        k = rng.randint(0, max_blue)
        blocks: List[List[str]] = []
        edges: List[Edge] = []
        for _ in range(k + 1):
            block: List[str] = []
            for _ in range(rng.randint(1, max_block)):
                v = f"v{sum(len(b) for b in blocks) + len(block)}"
                if block:
                    edges.append((rng.choice(block), v, "black"))
                block.append(v)
            blocks.append(block)
        for color in ("blue", "red"):
            order = list(range(k + 1))
            rng.shuffle(order)
            for i in range(1, k + 1):
                a = rng.choice(blocks[order[rng.randrange(i)]])
                b = rng.choice(blocks[order[i]])
                edges.append((a, b, color))
        blue = {frozenset((a, b)) for a, b, c in edges if c == "blue"}
        if any(frozenset((a, b)) in blue for a, b, c in edges if c == "red"):
            continue
        vertices = {v for block in blocks for v in block}
        r_left, r_right = rng.choice(sorted(vertices)), rng.choice(sorted(vertices))
        vertices, edges = _prune(vertices, edges, {r_left, r_right}, only_black=True)
        bt = make_bitree(vertices, edges, {ROOT: r_left}, {ROOT: r_right})
        if not check_bitree(bt):
            return bt


# ==================== 球函数 ====================

def spherical_value(g: Spheromorphism, nu) -> Fraction:
    """Φ_ν(g) = ν^{k(g)−1}，k(g) 为完美森林的块数"""
    k = perfect_forest(g).piece_count()
    return Fraction(nu) ** (k - 1)
