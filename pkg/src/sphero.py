"""
表格型球同构（spheromorphism）
每个覆盖森林分量上给出一个树同构：从分量顶点出发，按局部规则逐步映射方向，
没有规则的顶点按标签复制。本模块负责校验、求值、复合、求逆与完美森林。
"""

from collections import deque
from typing import Dict, Iterable, List, Optional, Set, Tuple

from loguru import logger
from pydantic import BaseModel, ConfigDict

from .errors import DomainError, InvalidSpheromorphismError, NeedMoreDigits
from .forest import (
    CutSet,
    apex_of,
    apexes,
    cut_children,
    has_parent_direction,
    make_cutset,
)
from .relabel import TailAffineBijection
from .tree_core import (
    PARENT,
    ROOT,
    Address,
    FiniteSubtree,
    address_key,
    direction_to,
    format_address,
    is_ancestor,
    path,
    span_set,
    step,
)


# ==================== 局部规则 ====================

class NeighborRule(BaseModel):
    """
    顶点处的局部方向映射

    parent_image: 父方向的像（0 表示父方向，k 表示第 k 个子方向），None 表示父方向不存在
    child_to_parent: 映到父方向的子标签
    child_map: 其余子标签到子标签的尾仿射双射
    """
    model_config = ConfigDict(frozen=True)

    parent_image: Optional[int] = PARENT
    child_to_parent: Optional[int] = None
    child_map: TailAffineBijection = TailAffineBijection()

    def image(self, d: int) -> int:
        if d == PARENT:
            if self.parent_image is None:
                raise DomainError("Parent direction is absent at this vertex")
            return self.parent_image
        if d == self.child_to_parent:
            return PARENT
        return self.child_map.apply(d)

    def preimage(self, d: int) -> int:
        if d == PARENT:
            if self.parent_image == PARENT:
                return PARENT
            if self.child_to_parent is not None:
                return self.child_to_parent
            raise DomainError("Parent direction is not in the image")
        if self.parent_image == d:
            return PARENT
        return self.child_map.preimage(d)

    def inverse(self) -> "NeighborRule":
        pi, ctp = self.parent_image, self.child_to_parent
        new_parent = PARENT if pi == PARENT else ctp
        new_ctp = pi if pi is not None and pi >= 1 else None
        return NeighborRule(parent_image=new_parent, child_to_parent=new_ctp, child_map=self.child_map.invert())

    def restrict(self, d: int) -> "NeighborRule":
        """从定义域去掉方向 d"""
        if d == PARENT:
            return self.model_copy(update={"parent_image": None})
        if d == self.child_to_parent:
            return self.model_copy(update={"child_to_parent": None})
        return self.model_copy(update={"child_map": self.child_map.restrict(d)})

    def extend(self, d: int, image: int) -> "NeighborRule":
        """向定义域添加方向 d ↦ image"""
        if d == PARENT:
            if self.parent_image is not None:
                raise DomainError("Parent direction already mapped")
            return self.model_copy(update={"parent_image": image})
        if image == PARENT:
            if self.child_to_parent is not None or self.parent_image == PARENT:
                raise DomainError("Parent direction already in the image")
            return self.model_copy(update={"child_to_parent": d})
        return self.model_copy(update={"child_map": self.child_map.extend(d, image)})

    def to_json(self) -> dict:
        return {"parent": self.parent_image, "to_parent": self.child_to_parent, "children": self.child_map.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "NeighborRule":
        return cls(
            parent_image=data.get("parent"),
            child_to_parent=data.get("to_parent"),
            child_map=TailAffineBijection.from_json(data["children"]),
        )


def default_rule(u: Address, cuts: CutSet) -> NeighborRule:
    """分量内的标签复制规则：现有方向到自身"""
    return NeighborRule(
        parent_image=PARENT if has_parent_direction(u, cuts) else None,
        child_to_parent=None,
        child_map=TailAffineBijection.identity_excluding(cut_children(u, cuts)),
    )


def compose_rules(outer: NeighborRule, inner: NeighborRule) -> NeighborRule:
    """outer ∘ inner"""
    parent_image = None if inner.parent_image is None else outer.image(inner.parent_image)
    f = inner.child_map
    big_t = max(f.threshold, outer.child_map.threshold - f.shift, 1)
    ctp: Optional[int] = None
    exc: Dict[int, int] = {}
    for k in list(f.exc) + list(range(f.threshold, big_t)):
        d = outer.image(f.apply(k))
        if d == PARENT:
            ctp = k
        else:
            exc[k] = d
    if inner.child_to_parent is not None:
        d = outer.image(PARENT)
        if d == PARENT:
            ctp = inner.child_to_parent
        else:
            exc[inner.child_to_parent] = d
    child_map = TailAffineBijection.make(exc, big_t, f.shift + outer.child_map.shift)
    return NeighborRule(parent_image=parent_image, child_to_parent=ctp, child_map=child_map)


# ==================== 数据模型 ====================

class PieceMap(BaseModel):
    """一个源分量到目标分量的同构"""
    model_config = ConfigDict(frozen=True)

    source_apex: Address
    target_apex: Address
    rules: Dict[Address, NeighborRule] = {}


class ValidationReport(BaseModel):
    """validate 的结果"""
    ok: bool
    diagnostic: str = ""
    vertex: Optional[Address] = None


class Spheromorphism(BaseModel):
    """
    表格型球同构

    source_cuts / target_cuts 为两个覆盖森林的割集，
    pieces 按源分量顶点排序，与目标分量一一对应
    """
    model_config = ConfigDict(frozen=True)

    source_cuts: CutSet = frozenset()
    target_cuts: CutSet = frozenset()
    pieces: Tuple[PieceMap, ...] = (PieceMap(source_apex=ROOT, target_apex=ROOT),)

    def piece_index(self) -> Dict[Address, PieceMap]:
        return {p.source_apex: p for p in self.pieces}

    def piece_of(self, v: Address) -> PieceMap:
        a = apex_of(v, self.source_cuts)
        index = self.piece_index()
        if a not in index:
            raise InvalidSpheromorphismError(f"No piece for component apex {format_address(a)}")
        return index[a]

    def rule_at(self, piece: PieceMap, u: Address) -> NeighborRule:
        rule = piece.rules.get(u)
        return rule if rule is not None else default_rule(u, self.source_cuts)

    def rule_keys(self) -> List[Address]:
        return sorted({u for p in self.pieces for u in p.rules}, key=address_key)

    def piece_count(self) -> int:
        return len(self.pieces)


def make_sphero(source_cuts: Iterable, target_cuts: Iterable, pieces: Iterable[PieceMap]) -> Spheromorphism:
    pieces = sorted(pieces, key=lambda p: address_key(p.source_apex))
    return Spheromorphism(source_cuts=make_cutset(source_cuts), target_cuts=make_cutset(target_cuts), pieces=tuple(pieces))


def identity() -> Spheromorphism:
    return Spheromorphism()


# ==================== 校验 ====================

def _boundary_vertices(apex: Address, cuts: CutSet) -> Set[Address]:
    """分量内与边界相邻的顶点：顶点本身与割边的父端"""
    out = {apex}
    for e in cuts:
        if apex_of(e[:-1], cuts) == apex:
            out.add(e[:-1])
    return out


def _check_local(g: Spheromorphism, u: Address, w: Address, rule: NeighborRule) -> Optional[str]:
    """检查 rule 是否把 u 处的现有方向双射到 w 处的现有方向"""
    c, t = g.source_cuts, g.target_cuts
    if (rule.parent_image is None) == has_parent_direction(u, c):
        return "parent direction presence does not match the source component"
    ctp = rule.child_to_parent
    src_cut = set(cut_children(u, c))
    if ctp is not None and ctp in src_cut:
        return f"child {ctp} is cut but mapped to the parent direction"
    expected_dom = src_cut | ({ctp} if ctp is not None else set())
    if set(rule.child_map.domain_excluded()) != expected_dom:
        return "child domain does not match the present child directions"
    hits_parent = rule.parent_image == PARENT or ctp is not None
    if rule.parent_image == PARENT and ctp is not None:
        return "two directions map to the parent direction"
    if hits_parent != has_parent_direction(w, t):
        return "parent direction in the image does not match the target component"
    tgt_cut = set(cut_children(w, t))
    pi = rule.parent_image
    if pi is not None and pi >= 1 and pi in tgt_cut:
        return f"parent direction maps to cut child {pi}"
    expected_img = tgt_cut | ({pi} if pi is not None and pi >= 1 else set())
    if set(rule.child_map.image_excluded()) != expected_img:
        return "child image does not match the present target child directions"
    return None


def _walk_core(g: Spheromorphism, piece: PieceMap) -> Tuple[Dict[Address, Address], Optional[ValidationReport]]:
    """在核心上做 BFS，返回核心顶点的像或诊断"""
    a = piece.source_apex
    cuts = g.source_cuts
    core = span_set([a] + list(piece.rules) + [x for x in _boundary_vertices(a, cuts)])
    phi: Dict[Address, Address] = {a: piece.target_apex}
    back: Dict[Address, Tuple[int, int]] = {}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        w = phi[u]
        rule = g.rule_at(piece, u)
        problem = _check_local(g, u, w, rule)
        if problem:
            return phi, ValidationReport(ok=False, diagnostic=problem, vertex=u)
        if u in back:
            d_back, expected = back[u]
            if rule.image(d_back) != expected:
                return phi, ValidationReport(ok=False, diagnostic="edge is not preserved", vertex=u)
        neighbours = [(PARENT, u[:-1])] if has_parent_direction(u, cuts) else []
        neighbours += [(x[-1], x) for x in core if len(x) == len(u) + 1 and x[:-1] == u]
        for d, x in neighbours:
            image_dir = rule.image(d)
            if x not in core:
                continue
            y = step(w, image_dir)
            if x in phi:
                if phi[x] != y:
                    return phi, ValidationReport(ok=False, diagnostic="core map is inconsistent", vertex=x)
                continue
            phi[x] = y
            back[x] = (direction_to(x, u), direction_to(y, w))
            queue.append(x)
        # 核心之外的方向按标签复制向下延伸，必须映到子方向
        if rule.child_to_parent is not None:
            x = u + (rule.child_to_parent,)
            if x not in core:
                return phi, ValidationReport(ok=False, diagnostic="free child maps to the parent direction", vertex=u)
    return phi, None


def validate(g: Spheromorphism) -> ValidationReport:
    """
    检查表格数据是否定义了一个合法的球同构

    Returns:
        ValidationReport，失败时给出诊断和顶点
    """
    c, t = g.source_cuts, g.target_cuts
    if len(g.pieces) != len(c) + 1 or len(t) != len(c):
        return ValidationReport(ok=False, diagnostic="piece count does not match the cut sets")
    if [p.source_apex for p in g.pieces] != apexes(c):
        return ValidationReport(ok=False, diagnostic="pieces do not match the source components")
    seen_targets: Set[Address] = set()
    for piece in g.pieces:
        for u in piece.rules:
            if apex_of(u, c) != piece.source_apex:
                return ValidationReport(ok=False, diagnostic="rule outside its piece", vertex=u)
        target_comp = apex_of(piece.target_apex, t)
        if target_comp in seen_targets:
            return ValidationReport(ok=False, diagnostic="two pieces share a target component", vertex=piece.source_apex)
        seen_targets.add(target_comp)
        try:
            phi, report = _walk_core(g, piece)
        except DomainError as e:
            return ValidationReport(ok=False, diagnostic=str(e), vertex=piece.source_apex)
        if report is not None:
            return report
        images = set(phi.values())
        for x in _boundary_vertices(target_comp, t):
            if x not in images:
                return ValidationReport(ok=False, diagnostic="target boundary vertex is not reached by the core",
                                        vertex=piece.source_apex)
    return ValidationReport(ok=True)


def ensure_valid(g: Spheromorphism) -> Spheromorphism:
    report = validate(g)
    if not report.ok:
        where = format_address(report.vertex) if report.vertex is not None else "-"
        logger.error(f"Invalid spheromorphism: {report.diagnostic} at {where}")
        raise InvalidSpheromorphismError(f"{report.diagnostic} at {where}")
    return g


# ==================== 求值 ====================

def apply_vertex(g: Spheromorphism, v: Address) -> Address:
    """顶点的像：定位分量后从顶点出发逐步映射"""
    v = tuple(v)
    piece = g.piece_of(v)
    a = piece.source_apex
    u, w = a, piece.target_apex
    for k in v[len(a):]:
        rule = piece.rules.get(u)
        d = k if rule is None else rule.image(k)
        w = step(w, d)
        u = u + (k,)
    return w


def apply_prefix(g: Spheromorphism, prefix: Address) -> Address:
    """
    边界柱集的像

    Args:
        g: 球同构
        prefix: 边界射线的前缀

    Returns:
        地址 p′，g 把 prefix 的柱集映入 p′ 的柱集

    Raises:
        NeedMoreDigits: 柱集跨越割边或核心
    """
    p = tuple(prefix)
    required = 0
    for e in g.source_cuts:
        if len(e) > len(p) and is_ancestor(p, e[:-1]):
            required = max(required, len(e) - len(p))
    piece = g.piece_of(p)
    for u, rule in piece.rules.items():
        if not is_ancestor(p, u):
            continue
        if rule.child_to_parent is not None:
            required = max(required, len(u) + 1 - len(p))
        if u != p and rule.parent_image != PARENT:
            required = max(required, len(u) - len(p))
    if required:
        raise NeedMoreDigits(required)
    return apply_vertex(g, p)


# ==================== 重建、规范化 ====================

def normalize(g: Spheromorphism) -> Spheromorphism:
    """去掉与默认规则相同的规则"""
    pieces = []
    for p in g.pieces:
        rules = {u: r for u, r in p.rules.items() if r != default_rule(u, g.source_cuts)}
        pieces.append(p.model_copy(update={"rules": rules}))
    return g.model_copy(update={"pieces": tuple(pieces)})


def _edge_between(x: Address, y: Address) -> Address:
    """相邻顶点之间的边（子端点）"""
    return x if len(x) > len(y) else y


def rebuild(g: Spheromorphism, new_source: CutSet, new_target: CutSet) -> Spheromorphism:
    """
    在另一个与 g 相容的森林上重新表示 g

    new_source 可以比原割集更粗（合并）或更细（细分），new_target 必须是对应的目标割集。
    """
    old = g.source_cuts
    removed = old - new_source
    added = new_source - old
    candidates: Set[Address] = set(g.rule_keys())
    for e in removed | added:
        candidates.update([e, e[:-1]])
    for a in apexes(old) + apexes(new_source):
        candidates.add(a)
    for e in old | new_source:
        candidates.add(e[:-1])

    rules_by_apex: Dict[Address, Dict[Address, NeighborRule]] = {a: {} for a in apexes(new_source)}
    for u in sorted(candidates, key=address_key):
        piece = g.piece_of(u)
        rule = g.rule_at(piece, u)
        w = apply_vertex(g, u)
        for k in cut_children(u, old):
            if u + (k,) in removed:
                rule = rule.extend(k, direction_to(w, apply_vertex(g, u + (k,))))
        if u in removed:
            rule = rule.extend(PARENT, direction_to(w, apply_vertex(g, u[:-1])))
        for k in cut_children(u, new_source):
            if u + (k,) in added:
                rule = rule.restrict(k)
        if u in added:
            rule = rule.restrict(PARENT)
        if rule != default_rule(u, new_source):
            rules_by_apex[apex_of(u, new_source)][u] = rule

    pieces = [
        PieceMap(source_apex=a, target_apex=apply_vertex(g, a), rules=rules_by_apex[a])
        for a in apexes(new_source)
    ]
    return Spheromorphism(source_cuts=frozenset(new_source), target_cuts=frozenset(new_target), pieces=tuple(pieces))


def refine(g: Spheromorphism, extra_cuts: Iterable[Address]) -> Spheromorphism:
    """在源森林上增加割边，目标森林相应增加像边"""
    extra = make_cutset(extra_cuts) - g.source_cuts
    images = set()
    for e in extra:
        images.add(_edge_between(apply_vertex(g, e), apply_vertex(g, e[:-1])))
    return rebuild(g, g.source_cuts | extra, g.target_cuts | frozenset(images))


# ==================== 完美森林 ====================

def perfect_forest(g: Spheromorphism) -> Spheromorphism:
    """
    最粗的相容森林（一次扫描合并所有像仍相邻的割边）

    Returns:
        在完美森林上重新表示的 g
    """
    drop_source, drop_target = set(), set()
    for e in g.source_cuts:
        x, y = apply_vertex(g, e[:-1]), apply_vertex(g, e)
        if len(x) == len(y) + 1 and x[:-1] == y or len(y) == len(x) + 1 and y[:-1] == x:
            drop_source.add(e)
            drop_target.add(_edge_between(x, y))
    if not drop_source:
        return normalize(g)
    logger.debug(f"Perfect forest merges {len(drop_source)} cut edges")
    return rebuild(g, g.source_cuts - drop_source, g.target_cuts - drop_target)


def perfect_cuts(g: Spheromorphism) -> Tuple[CutSet, CutSet]:
    pf = perfect_forest(g)
    return pf.source_cuts, pf.target_cuts


# ==================== 群运算 ====================

def invert(g: Spheromorphism) -> Spheromorphism:
    """逆映射：目标分量成为源分量"""
    pieces = []
    t = g.target_cuts
    for piece in g.pieces:
        b0 = apex_of(piece.target_apex, t)
        # 沿目标树从 target_apex 走到 b0，同时在源树中追踪原像
        u, w = piece.source_apex, piece.target_apex
        for nxt in _path_steps(w, b0):
            d = direction_to(w, nxt)
            u = step(u, g.rule_at(piece, u).preimage(d))
            w = nxt
        rules = {}
        for x, rule in piece.rules.items():
            rules[apply_vertex(g, x)] = rule.inverse()
        pieces.append(PieceMap(source_apex=b0, target_apex=u, rules=rules))
    pieces.sort(key=lambda p: address_key(p.source_apex))
    out = Spheromorphism(source_cuts=g.target_cuts, target_cuts=g.source_cuts, pieces=tuple(pieces))
    return normalize(out)


def _path_steps(v: Address, w: Address) -> List[Address]:
    return path(v, w)[1:]


def compose(g: Spheromorphism, h: Spheromorphism) -> Spheromorphism:
    """g ∘ h：先作用 h 再作用 g"""
    h_inv = invert(h)
    new_source = set(h.source_cuts)
    for e in g.source_cuts - h.target_cuts:
        new_source.add(_edge_between(apply_vertex(h_inv, e), apply_vertex(h_inv, e[:-1])))
    new_target = set(g.target_cuts)
    for e in h.target_cuts - g.source_cuts:
        new_target.add(_edge_between(apply_vertex(g, e), apply_vertex(g, e[:-1])))
    new_source, new_target = frozenset(new_source), frozenset(new_target)

    candidates: Set[Address] = set(h.rule_keys())
    for cuts in (h.source_cuts, new_source):
        candidates.update(apexes(cuts))
        candidates.update(e[:-1] for e in cuts)
    g_marks = set(g.rule_keys()) | set(apexes(g.source_cuts)) | {e[:-1] for e in g.source_cuts}
    candidates.update(apply_vertex(h_inv, y) for y in g_marks)

    rules_by_apex: Dict[Address, Dict[Address, NeighborRule]] = {a: {} for a in apexes(new_source)}
    for u in sorted(candidates, key=address_key):
        h_piece = h.piece_of(u)
        inner = h.rule_at(h_piece, u)
        for k in cut_children(u, new_source):
            if u + (k,) not in h.source_cuts:
                inner = inner.restrict(k)
        if u in new_source and u not in h.source_cuts:
            inner = inner.restrict(PARENT)
        y = apply_vertex(h, u)
        outer = g.rule_at(g.piece_of(y), y)
        rule = compose_rules(outer, inner)
        if rule != default_rule(u, new_source):
            rules_by_apex[apex_of(u, new_source)][u] = rule

    pieces = [
        PieceMap(source_apex=a, target_apex=apply_vertex(g, apply_vertex(h, a)), rules=rules_by_apex[a])
        for a in apexes(new_source)
    ]
    return Spheromorphism(source_cuts=new_source, target_cuts=new_target, pieces=tuple(pieces))


def compose_all(*gs: Spheromorphism) -> Spheromorphism:
    """g1 ∘ g2 ∘ … ∘ gn"""
    out = identity()
    for g in gs:
        out = compose(out, g)
    return out


def is_identity(g: Spheromorphism) -> bool:
    pf = perfect_forest(g)
    if pf.source_cuts:
        return False
    piece = pf.pieces[0]
    return piece.target_apex == ROOT and not piece.rules


def equals(g: Spheromorphism, h: Spheromorphism) -> bool:
    """顶点映射是否处处相同"""
    return is_identity(compose(g, invert(h)))


def is_automorphism(g: Spheromorphism) -> bool:
    return not perfect_forest(g).source_cuts


def in_stabilizer(g: Spheromorphism, J: FiniteSubtree) -> bool:
    """g 是否属于 J 的逐点稳定子 𝒦(J)"""
    if not J.vertices:
        raise DomainError("Stabilizer of an empty subtree")
    if not is_automorphism(g):
        return False
    return all(apply_vertex(g, v) == v for v in J.vertices)
