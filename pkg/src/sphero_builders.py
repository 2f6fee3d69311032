"""
球同构构造器
从有限的种子映射延伸出分量同构，并由此构造区域传输、分离元、随机元素、
稳定子分解以及多块拼装
"""

import random
from collections import deque
from typing import Dict, Iterable, List, Mapping, Optional, Set

from loguru import logger

from .errors import DomainError
from .forest import (
    BoundaryRegion,
    CutSet,
    apex_of,
    apexes,
    cut_children,
    has_parent_direction,
    make_cutset,
    region_canonical,
)
from .relabel import TailAffineBijection
from .sphero import (
    NeighborRule,
    PieceMap,
    Spheromorphism,
    apply_vertex,
    default_rule,
    ensure_valid,
    in_stabilizer,
    invert,
    is_automorphism,
    perfect_forest,
    refine,
)
from .tree_core import (
    PARENT,
    ROOT,
    Address,
    FiniteSubtree,
    address_key,
    direction_to,
    distance,
    is_ancestor,
    step,
)


# ==================== 种子延伸 ====================

def _marks(apex: Address, cuts: CutSet) -> Set[Address]:
    out = {apex}
    out.update(e[:-1] for e in cuts if apex_of(e[:-1], cuts) == apex)
    return out


def _excluded_labels(u: Address, cuts: CutSet) -> Set[int]:
    """方向 d 编码为标签 d + 1 后，u 处不存在的标签"""
    out = {k + 1 for k in cut_children(u, cuts)}
    if not has_parent_direction(u, cuts):
        out.add(PARENT + 1)
    return out


def _local_rule(u: Address, cuts: CutSet, fixed: Dict[int, int], free: TailAffineBijection) -> NeighborRule:
    """由固定方向对与自由部分的保序双射拼出局部规则"""
    def image(d: int) -> int:
        return fixed[d] if d in fixed else free.apply(d + 1) - 1

    parent_image = image(PARENT) if has_parent_direction(u, cuts) else None
    cut = set(cut_children(u, cuts))
    bound = max([free.threshold, 2] + [k + 2 for k in fixed] + [k + 2 for k in cut])
    while bound + free.shift < 1:
        bound += 1
    ctp: Optional[int] = None
    exc: Dict[int, int] = {}
    for k in range(1, bound):
        if k in cut:
            continue
        d = image(k)
        if d == PARENT:
            ctp = k
        else:
            exc[k] = d
    return NeighborRule(
        parent_image=parent_image,
        child_to_parent=ctp,
        child_map=TailAffineBijection.make(exc, bound, free.shift),
    )


def extend_isomorphism(source_cuts: CutSet, target_cuts: CutSet, seed: Mapping[Address, Address]) -> PieceMap:
    """
    把有限的保邻接单射延伸为整个分量上的同构

    自由方向按保序方式配对（父方向视为最小的方向）；遇到父方向或含边界顶点的分支时
    继续展开，其余分支按标签复制。

    Args:
        source_cuts: 源割集
        target_cuts: 目标割集
        seed: 源分量中连通顶点集到目标分量的映射

    Returns:
        源分量的 PieceMap
    """
    if not seed:
        raise DomainError("extend_isomorphism needs a nonempty seed")
    phi: Dict[Address, Address] = {tuple(k): tuple(v) for k, v in seed.items()}
    first = min(phi, key=address_key)
    src_apex = apex_of(first, source_cuts)
    tgt_apex = apex_of(phi[first], target_cuts)
    for x, y in phi.items():
        if apex_of(x, source_cuts) != src_apex or apex_of(y, target_cuts) != tgt_apex:
            raise DomainError(f"Seed pair {x} -> {y} leaves the component")
    if len(set(phi.values())) != len(phi):
        raise DomainError("Seed is not injective")
    for x in phi:
        for x2 in phi:
            if (distance(x, x2) == 1) != (distance(phi[x], phi[x2]) == 1):
                raise DomainError(f"Seed does not preserve adjacency at {x}, {x2}")

    src_marks = _marks(src_apex, source_cuts)
    tgt_marks = _marks(tgt_apex, target_cuts)
    rules: Dict[Address, NeighborRule] = {}
    queue = deque(sorted(phi, key=address_key))
    while queue:
        u = queue.popleft()
        if u in rules:
            continue
        w = phi[u]
        fixed: Dict[int, int] = {}
        if has_parent_direction(u, source_cuts) and u[:-1] in phi:
            fixed[PARENT] = direction_to(w, phi[u[:-1]])
        for x in phi:
            if len(x) == len(u) + 1 and x[:-1] == u:
                fixed[x[-1]] = direction_to(w, phi[x])
        free = TailAffineBijection.order_preserving(
            _excluded_labels(u, source_cuts) | {d + 1 for d in fixed},
            _excluded_labels(w, target_cuts) | {d + 1 for d in fixed.values()},
        )
        rule = _local_rule(u, source_cuts, fixed, free)
        rules[u] = rule

        # 需要显式展开的方向
        todo: Set[int] = set()
        if has_parent_direction(u, source_cuts) and PARENT not in fixed:
            todo.add(PARENT)
        if has_parent_direction(w, target_cuts) and PARENT not in fixed.values():
            todo.add(rule.preimage(PARENT))
        for m in src_marks:
            if len(m) > len(u) and is_ancestor(u, m):
                todo.add(m[len(u)])
        for m in tgt_marks:
            if len(m) > len(w) and is_ancestor(w, m):
                todo.add(rule.preimage(m[len(w)]))
        for d in sorted(todo - set(fixed)):
            x, y = step(u, d), step(w, rule.image(d))
            if x not in phi:
                phi[x] = y
                queue.append(x)

    kept = {u: r for u, r in rules.items() if r != default_rule(u, source_cuts)}
    return PieceMap(source_apex=src_apex, target_apex=phi[src_apex], rules=kept)


def build_sphero(source_cuts: Iterable, target_cuts: Iterable, seeds: List[Mapping[Address, Address]]) -> Spheromorphism:
    """每个源分量一个种子，逐块延伸并校验"""
    c, t = make_cutset(source_cuts), make_cutset(target_cuts)
    pieces = sorted((extend_isomorphism(c, t, s) for s in seeds), key=lambda p: address_key(p.source_apex))
    g = Spheromorphism(source_cuts=c, target_cuts=t, pieces=tuple(pieces))
    return ensure_valid(g)


# ==================== 随机元素 ====================

def random_address(rng: random.Random, max_depth: int = 3, max_label: int = 3, min_depth: int = 0) -> Address:
    depth = rng.randint(min_depth, max_depth)
    return tuple(rng.randint(1, max_label) for _ in range(depth))


def random_cutset(rng: random.Random, n: int, max_depth: int = 3, max_label: int = 3) -> CutSet:
    out: Set[Address] = set()
    while len(out) < n:
        out.add(random_address(rng, max_depth, max_label, min_depth=1))
    return frozenset(out)


def random_subtree(rng: random.Random, max_size: int = 4, max_depth: int = 3) -> FiniteSubtree:
    """从随机顶点出发，每次随机加入一个邻点，得到至多 max_size 个顶点的子树"""
    vs: Set[Address] = {random_address(rng, max_depth)}
    size = rng.randint(1, max_size)
    while len(vs) < size:
        v = rng.choice(sorted(vs, key=address_key))
        options = [v + (k,) for k in range(1, 4)]
        if v:
            options.append(v[:-1])
        vs.add(rng.choice(options))
    return FiniteSubtree(vertices=frozenset(vs))


def _child_shuffle(rng: random.Random, u: Address, w: Address, ucuts: CutSet, wcuts: CutSet, taken: Set[Address]) -> Dict[Address, Address]:
    """在 u、w 的若干小标签子方向之间随机配对"""
    src = [k for k in range(1, 5) if u + (k,) not in ucuts and u + (k,) not in taken]
    tgt = [k for k in range(1, 5) if w + (k,) not in wcuts]
    n = min(len(src), len(tgt), rng.randint(0, 3))
    src, tgt = rng.sample(src, n), rng.sample(tgt, n)
    return {u + (a,): w + (b,) for a, b in zip(src, tgt)}


def random_sphero(seed: int, max_cuts: int = 4, max_depth: int = 3) -> Spheromorphism:
    """
    随机表格型球同构

    源、目标各取相同数量的随机割边，分量随机配对，每块再随机打乱顶点处的几个子方向
    """
    rng = random.Random(seed)
    n = rng.randint(0, max_cuts)
    c = random_cutset(rng, n, max_depth)
    t = random_cutset(rng, n, max_depth)
    targets = apexes(t)
    rng.shuffle(targets)
    seeds = []
    for a, b in zip(apexes(c), targets):
        s = {a: b}
        s.update(_child_shuffle(rng, a, b, c, t, set()))
        seeds.append(s)
    return build_sphero(c, t, seeds)


def random_automorphism(seed: int, max_depth: int = 2) -> Spheromorphism:
    """无割边的随机自同构"""
    rng = random.Random(seed)
    x, y = random_address(rng, max_depth), random_address(rng, max_depth)
    s = {x: y}
    s.update(_child_shuffle(rng, x, y, frozenset(), frozenset(), set()))
    return build_sphero([], [], [s])


def random_stabilizer_element(J: FiniteSubtree, seed: int) -> Spheromorphism:
    """𝒦(J) 中的随机元素：固定 J，打乱 J 外的若干子方向"""
    rng = random.Random(seed)
    s: Dict[Address, Address] = {v: v for v in J.vertices}
    for v in J.sorted():
        labels = [k for k in range(1, 6) if v + (k,) not in J.vertices]
        images = labels[:]
        rng.shuffle(images)
        for k, m in zip(labels, images):
            s[v + (k,)] = v + (m,)
        if labels and rng.random() < 0.5:
            k = rng.choice(labels)
            sub = [1, 2, 3]
            rng.shuffle(sub)
            for j, m in zip([1, 2, 3], sub):
                s[v + (k, j)] = s[v + (k,)] + (m,)
    return build_sphero([], [], [s])


# ==================== 区域 ====================

def region_image(g: Spheromorphism, r: BoundaryRegion) -> BoundaryRegion:
    """区域在 g 下的像"""
    r = region_canonical(r)
    g2 = refine(g, r.cuts)
    selected = set()
    for a in apexes(g2.source_cuts):
        if r.status(a):
            selected.add(apex_of(apply_vertex(g2, a), g2.target_cuts))
    return region_canonical(BoundaryRegion(cuts=g2.target_cuts, selected=frozenset(selected)))


def _split(cuts: Set[Address], group: List[Address]) -> None:
    """在组内最后一个分量顶点下切出一个不含割边的新分支"""
    a = group[-1]
    used = [e[len(a)] for e in cuts if len(e) > len(a) and is_ancestor(a, e)]
    new = a + (max(used, default=0) + 1,)
    cuts.add(new)
    group.append(new)


def transport_region(r1: BoundaryRegion, r2: BoundaryRegion) -> Spheromorphism:
    """
    构造 g 使 g(r1) = r2

    细分两边的选中与未选中分量使数目相同，再逐对配对
    """
    r1, r2 = region_canonical(r1), region_canonical(r2)
    if r1.is_trivial() or r2.is_trivial():
        raise DomainError("transport_region needs nontrivial regions")
    cuts1, cuts2 = set(r1.cuts), set(r2.cuts)
    sel1 = [a for a in apexes(r1.cuts) if a in r1.selected]
    uns1 = [a for a in apexes(r1.cuts) if a not in r1.selected]
    sel2 = [a for a in apexes(r2.cuts) if a in r2.selected]
    uns2 = [a for a in apexes(r2.cuts) if a not in r2.selected]
    for one, two in ((sel1, sel2), (uns1, uns2)):
        while len(one) < len(two):
            _split(cuts1, one)
        while len(two) < len(one):
            _split(cuts2, two)
    seeds = [{a: b} for a, b in zip(sel1, sel2)] + [{a: b} for a, b in zip(uns1, uns2)]
    logger.debug(f"transport_region with {len(seeds)} pieces")
    return build_sphero(cuts1, cuts2, seeds)


# ==================== 分离元 ====================

def separator(J: FiniteSubtree, A: FiniteSubtree, B: FiniteSubtree, seed: int = 0) -> Spheromorphism:
    """
    𝒦(J) 中的自同构 h，使 h(B) ∩ A = J

    对 J 外与 A 相交的 B 邻点，与一个新的大标签子方向对换
    """
    if not (J.vertices <= A.vertices and J.vertices <= B.vertices):
        raise DomainError("separator needs J inside both A and B")
    rng = random.Random(seed)
    phi: Dict[Address, Address] = {v: v for v in J.vertices}
    top = J.top()
    for v in J.sorted():
        labels = [x[len(v)] for x in A.vertices | B.vertices if len(x) > len(v) and is_ancestor(v, x)]
        fresh = max(labels, default=0) + 1 + rng.randint(0, 2)
        neighbours = [v + (k,) for k in sorted(set(labels))]
        if v == top and v:
            neighbours.append(v[:-1])
        for y in neighbours:
            if y in J.vertices or y not in B.vertices:
                continue
            if y in A.vertices:
                z = v + (fresh,)
                fresh += 1
                phi[y], phi[z] = z, y
            else:
                phi[y] = y
    return build_sphero([], [], [phi])


# ==================== 稳定子分解与符号特征 ====================

def _owner(J: FiniteSubtree, u: Address) -> Address:
    """u 在 J 上的最近点"""
    top = J.top()
    if not is_ancestor(top, u):
        return top
    best = top
    for i in range(len(top), len(u) + 1):
        if u[:i] in J.vertices:
            best = u[:i]
        else:
            break
    return best


def stabilizer_factors(g: Spheromorphism, J: FiniteSubtree) -> Dict[Address, Spheromorphism]:
    """
    𝒦(J) 元素分解为各分量 S_v（去掉 J 的边后 v 所在分量）上的因子

    Returns:
        v ↦ 只在 S_v 上非平凡的自同构，所有因子的乘积等于 g
    """
    if not in_stabilizer(g, J):
        raise DomainError("stabilizer_factors needs an element of the stabilizer of J")
    piece = perfect_forest(g).pieces[0]
    factors = {}
    for v in J.sorted():
        rules = {u: r for u, r in piece.rules.items() if _owner(J, u) == v}
        target = piece.target_apex if _owner(J, ROOT) == v else ROOT
        factors[v] = Spheromorphism(pieces=(PieceMap(source_apex=ROOT, target_apex=target, rules=rules),))
    return factors


def sign_character(g: Spheromorphism) -> int:
    """自同构的符号特征 (−1)^{d(gv, v)}，与 v 无关"""
    if not is_automorphism(g):
        raise DomainError("sign_character is defined on automorphisms")
    return -1 if distance(apply_vertex(g, ROOT), ROOT) % 2 else 1


# ==================== 拼装 ====================

def assemble(source_cuts: CutSet, assignment: Mapping[Address, Spheromorphism]) -> Spheromorphism:
    """
    拼装：source_cuts 的每个分量取 assignment 中对应球同构的限制

    Args:
        source_cuts: 公共细分
        assignment: 分量顶点 ↦ 在该分量上使用的球同构

    Returns:
        拼装后的球同构
    """
    c = frozenset(source_cuts)
    inverses: Dict[int, Spheromorphism] = {}
    pieces = []
    candidates_t: Set[Address] = set()
    for a in apexes(c):
        f = assignment[a]
        for e in f.source_cuts:
            if apex_of(e[:-1], c) == a and e not in c:
                raise DomainError(f"Component {a} is not inside one piece of its map")
        boundary = _marks(a, c)
        cands = {u for u in f.rule_keys() if apex_of(u, c) == a} | boundary
        rules = {}
        for u in cands:
            rule = f.rule_at(f.piece_of(u), u)
            for k in cut_children(u, c):
                if u + (k,) not in f.source_cuts:
                    rule = rule.restrict(k)
            if u == a and a and a not in f.source_cuts:
                rule = rule.restrict(PARENT)
            if rule != default_rule(u, c):
                rules[u] = rule
        pieces.append(PieceMap(source_apex=a, target_apex=apply_vertex(f, a), rules=rules))
        candidates_t.update(f.target_cuts)
        edges = ([a] if a else []) + [e for e in c if apex_of(e[:-1], c) == a]
        for e in edges:
            if e not in f.source_cuts:
                x, y = apply_vertex(f, e), apply_vertex(f, e[:-1])
                candidates_t.add(x if len(x) > len(y) else y)
        if id(f) not in inverses:
            inverses[id(f)] = invert(f)

    def owner(z: Address) -> Address:
        for a in apexes(c):
            f = assignment[a]
            if apex_of(apply_vertex(inverses[id(f)], z), c) == a:
                return a
        raise DomainError(f"Vertex {z} is not covered by the assembled pieces")

    target = frozenset(e for e in candidates_t if owner(e) != owner(e[:-1]))
    g = Spheromorphism(source_cuts=c, target_cuts=target, pieces=tuple(pieces))
    return ensure_valid(g)
