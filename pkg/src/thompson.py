"""
Thompson 群元素
ℝP¹ 上连续的分段 PSL₂(ℤ) 变换：校验、求值、复合、求逆，
由两个理想多边形构造元素，以及经 Ξ 拼装成球同构
"""

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict

from .continued_fraction import (
    INF,
    NEG_INF,
    ExtRational,
    QuadraticIrrational,
    as_ext,
    format_rational,
    interval_to_region,
    intervals_to_region,
    is_infinite,
    tails_agree,
    xi_of_point,
)
from .errors import NeedMoreDigits, ThompsonError
from .forest import BoundaryRegion, apexes
from .mobius import Mobius, mobius_apply, mobius_sphero
from .sphero import Spheromorphism, apply_prefix, perfect_forest
from .sphero_builders import assemble

Point = Union[ExtRational, QuadraticIrrational]


# ==================== ℝP¹ 上的循环序 ====================

def _proj(x: ExtRational) -> ExtRational:
    """射影直线上 −∞ 与 +∞ 是同一点"""
    return INF if is_infinite(x) else Fraction(x)


def _rkey(x: ExtRational) -> Tuple[int, Fraction]:
    """循环序的线性化：有限点按大小，∞ 最后"""
    return (1, Fraction(0)) if is_infinite(x) else (0, Fraction(x))


def _less(x: Point, r: ExtRational) -> bool:
    """x < r（∞ 视为最大），x 可以是二次无理数"""
    if isinstance(x, QuadraticIrrational):
        return is_infinite(r) or x.compare(r) < 0
    return _rkey(x) < _rkey(r)


def _cyclically_increasing(points: Sequence[ExtRational]) -> bool:
    keys = [_rkey(p) for p in points]
    if len(set(keys)) != len(keys):
        return False
    descents = sum(1 for i in range(len(keys)) if keys[(i + 1) % len(keys)] < keys[i])
    return len(keys) < 2 or descents == 1


# ==================== 数据模型 ====================

class ThompsonElement(BaseModel):
    """
    breakpoints 按 ∞ 最后的顺序排列，第 i 段为 [r_i, r_{i+1})（最后一段跨过 ∞ 回到 r_0）。
    没有断点时为整个 ℝP¹ 上的单个矩阵
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    breakpoints: Tuple[ExtRational, ...] = ()
    matrices: Tuple[Mobius, ...]

    def arcs(self) -> List[Tuple[ExtRational, ExtRational, Mobius]]:
        n = len(self.breakpoints)
        if n == 0:
            return [(INF, INF, self.matrices[0])]
        return [(self.breakpoints[i], self.breakpoints[(i + 1) % n], self.matrices[i]) for i in range(n)]


class IdealPolygon(BaseModel):
    """理想多边形：循环递增的尖点，相邻尖点 p/q、r/s 满足 |ps − qr| = 1"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    cusps: Tuple[ExtRational, ...]


def _pq(x: ExtRational) -> Tuple[int, int]:
    if is_infinite(x):
        return 1, 0
    x = Fraction(x)
    return x.numerator, x.denominator


def make_polygon(cusps: Sequence) -> IdealPolygon:
    """
    Raises:
        ThompsonError: 尖点少于 3 个、不是循环递增或某条边不是幺模的
    """
    pts = tuple(_proj(as_ext(c)) for c in cusps)
    if len(pts) < 3:
        raise ThompsonError("An ideal polygon needs at least 3 cusps")
    if not _cyclically_increasing(pts):
        raise ThompsonError("Cusps are not in cyclic order")
    for i, x in enumerate(pts):
        y = pts[(i + 1) % len(pts)]
        (p, q), (r, s) = _pq(x), _pq(y)
        if abs(p * s - q * r) != 1:
            raise ThompsonError(f"Side ({format_rational(x)}, {format_rational(y)}) is not unimodular")
    return IdealPolygon(cusps=pts)


# ==================== 校验与求值 ====================

def thompson_validate(pieces: Sequence[Tuple[ExtRational, ExtRational, Mobius]]) -> ThompsonElement:
    """
    由 (起点, 终点, 矩阵) 列表构造并校验元素

    单段时起点与终点相同，表示整个 ℝP¹。

    Raises:
        ThompsonError: 定向相反、弧段有缝隙或重叠、断点处不连续、整体不是双射
    """
    if not pieces:
        raise ThompsonError("No pieces")
    arcs = [(_proj(as_ext(s)), _proj(as_ext(e)), m) for s, e, m in pieces]
    for _, _, m in arcs:
        if m.det() != 1:
            logger.error(f"Matrix {m} reverses orientation")
            raise ThompsonError(f"Matrix {m} has det -1 (orientation reversal)")
    if len(arcs) == 1:
        s, e, m = arcs[0]
        if s != e:
            raise ThompsonError("A single piece must cover the whole circle")
        return ThompsonElement(breakpoints=(), matrices=(m.normalized(),))

    arcs.sort(key=lambda a: _rkey(a[0]))
    n = len(arcs)
    starts = [a[0] for a in arcs]
    if len(set(starts)) != n:
        raise ThompsonError("Two arcs start at the same point (overlap)")
    for i, (s, e, m) in enumerate(arcs):
        nxt_s, _, nxt_m = arcs[(i + 1) % n]
        if e != nxt_s:
            raise ThompsonError(f"Gap or overlap between arcs at {format_rational(e)}")
        if _proj(mobius_apply(m, e)) != _proj(mobius_apply(nxt_m, e)):
            logger.error(f"Discontinuity at {format_rational(e)}")
            raise ThompsonError(f"Discontinuity at breakpoint {format_rational(e)}")
    images = [_proj(mobius_apply(m, s)) for s, _, m in arcs]
    if not _cyclically_increasing(images):
        raise ThompsonError("Breakpoint images are not cyclically ordered")
    return _merge(starts, [m for _, _, m in arcs])


def _merge(breakpoints: List[ExtRational], matrices: List[Mobius]) -> ThompsonElement:
    """合并相邻的相同矩阵；全部相同则为单段"""
    mats = [m.normalized() for m in matrices]
    n = len(mats)
    if all(m == mats[0] for m in mats):
        return ThompsonElement(breakpoints=(), matrices=(mats[0],))
    keep = [i for i in range(n) if mats[i] != mats[i - 1]]
    return ThompsonElement(breakpoints=tuple(breakpoints[i] for i in keep), matrices=tuple(mats[i] for i in keep))


def _arc_index(t: ThompsonElement, x: Point) -> int:
    """x 所在弧段 [r_i, r_{i+1}) 的下标"""
    n = len(t.breakpoints)
    if n == 0:
        return 0
    idx = n - 1
    for i, r in enumerate(t.breakpoints):
        if not _less(x, r):
            idx = i
    # x 小于所有断点时属于跨过 ∞ 的最后一段
    return idx


def thompson_apply(t: ThompsonElement, x) -> Point:
    if not isinstance(x, QuadraticIrrational):
        x = _proj(as_ext(x))
    return mobius_apply(t.matrices[_arc_index(t, x)], x)


def thompson_from_mobius(m: Mobius) -> ThompsonElement:
    return thompson_validate([(INF, INF, m)])


def thompson_inverse(t: ThompsonElement) -> ThompsonElement:
    if not t.breakpoints:
        return thompson_from_mobius(t.matrices[0].inverse())
    return thompson_validate([
        (_proj(mobius_apply(m, s)), _proj(mobius_apply(m, e)), m.inverse()) for s, e, m in t.arcs()
    ])


def thompson_compose(t1: ThompsonElement, t2: ThompsonElement) -> ThompsonElement:
    """t1 ∘ t2"""
    inv2 = thompson_inverse(t2)
    points = {_proj(r) for r in t2.breakpoints}
    points |= {_proj(thompson_apply(inv2, r)) for r in t1.breakpoints}
    if not points:
        return thompson_from_mobius(t1.matrices[0] @ t2.matrices[0])
    ordered = sorted(points, key=_rkey)
    pieces = []
    for i, s in enumerate(ordered):
        e = ordered[(i + 1) % len(ordered)]
        m2 = t2.matrices[_arc_index(t2, s)]
        m1 = t1.matrices[_arc_index(t1, _proj(mobius_apply(m2, s)))]
        pieces.append((s, e, m1 @ m2))
    if len(pieces) == 1:
        s, _, m = pieces[0]
        return thompson_from_mobius(m)
    return thompson_validate(pieces)


def thompson_equal(t1: ThompsonElement, t2: ThompsonElement) -> bool:
    return thompson_compose(t1, thompson_inverse(t2)) == thompson_from_mobius(Mobius(a=1, b=0, c=0, d=1))


# ==================== 多边形构造 ====================

def _side_matrix(x: ExtRational, y: ExtRational) -> Mobius:
    """把 (0, ∞) 保向地送到弧 (x, y) 的矩阵：0 ↦ x，∞ ↦ y"""
    (p, q), (r, s) = _pq(x), _pq(y)
    if r * q - p * s == -1:
        p, q = -p, -q
    return Mobius.of(r, p, s, q)


def thompson_from_polygons(U: IdealPolygon, V: IdealPolygon, k: int) -> ThompsonElement:
    """
    U 的第 j 条边外侧送到 V 的第 j + k 条边外侧

    Args:
        U, V: 尖点个数相同的理想多边形
        k: 循环平移量
    """
    n = len(U.cusps)
    if len(V.cusps) != n:
        raise ThompsonError(f"Polygon sizes differ: {n} vs {len(V.cusps)}")
    U = make_polygon(U.cusps)
    V = make_polygon(V.cusps)
    pieces = []
    for j in range(n):
        a, b = U.cusps[j], U.cusps[(j + 1) % n]
        c, d = V.cusps[(j + k) % n], V.cusps[(j + k + 1) % n]
        gamma = _side_matrix(c, d) @ _side_matrix(a, b).inverse()
        pieces.append((a, b, gamma))
    return thompson_validate(pieces)


# ==================== 球同构 ====================

def _arc_region(s: ExtRational, e: ExtRational) -> BoundaryRegion:
    if is_infinite(s):
        return interval_to_region(NEG_INF, e)
    if is_infinite(e):
        return interval_to_region(s, INF)
    if s < e:
        return interval_to_region(s, e)
    return intervals_to_region([(s, INF), (NEG_INF, e)])


def thompson_sphero(t: ThompsonElement) -> Spheromorphism:
    """
    Ξ ∘ t ∘ Ξ⁻¹

    每段弧转成区域，与该段矩阵的球同构的源森林取公共细分，在每个分量上取对应的限制后拼装
    """
    if not t.breakpoints:
        return mobius_sphero(t.matrices[0])
    arcs = t.arcs()
    regions = [_arc_region(s, e) for s, e, _ in arcs]
    maps = [mobius_sphero(m) for _, _, m in arcs]
    cuts = set()
    for r, g in zip(regions, maps):
        cuts |= r.cuts | g.source_cuts
    cuts = frozenset(cuts)
    assignment: Dict = {}
    for a in apexes(cuts):
        owners = [i for i, r in enumerate(regions) if r.status(a)]
        if len(owners) != 1:
            raise ThompsonError(f"Component {a} lies in {len(owners)} arcs")
        assignment[a] = maps[owners[0]]
    g = perfect_forest(assemble(cuts, assignment))
    logger.info(f"thompson_sphero: {len(arcs)} arcs -> {g.piece_count()} pieces")
    return g


def boundary_agrees(g: Spheromorphism, x: QuadraticIrrational, image: QuadraticIrrational, depth: int = 10) -> bool:
    """
    g 在 Ξ(x) 上的作用是否与 Ξ(image) 相符

    从 depth 位前缀开始，不够时按 NeedMoreDigits 加深
    """
    d = depth
    for _ in range(64):
        try:
            q = apply_prefix(g, xi_of_point(x, d))
        except NeedMoreDigits as e:
            d += e.required
            continue
        return xi_of_point(image, len(q)) == q
    raise ThompsonError("apply_prefix did not settle")


def boundary_equivalent(x: QuadraticIrrational, y: QuadraticIrrational, depth: int = 40, max_shift: int = 10) -> bool:
    """两个边界点是否在同一 PGL₂(ℤ)-轨道上（连分数尾部平移后一致）"""
    return tails_agree(x, y, depth, max_shift)


# ==================== 随机元素 ====================

def _mediant(x: ExtRational, y: ExtRational, wraps: bool) -> Fraction:
    """相邻尖点的中项（Farey 加法），wraps 时 x 为 ∞ 按 −1/0 处理"""
    (p, q), (r, s) = _pq(x), _pq(y)
    if wraps:
        p, q = -1, 0
    return Fraction(p + r, q + s)


def random_polygon(rng, n: int) -> IdealPolygon:
    """从三角形 (0, 1, ∞) 出发，随机在边上插入中项，得到 n 边理想多边形"""
    if n < 3:
        raise ThompsonError("An ideal polygon needs at least 3 cusps")
    cusps: List[ExtRational] = [Fraction(0), Fraction(1), INF]
    while len(cusps) < n:
        i = rng.randrange(len(cusps))
        x, y = cusps[i], cusps[(i + 1) % len(cusps)]
        new = _mediant(x, y, wraps=is_infinite(x))
        cusps.append(new)
        cusps.sort(key=_rkey)
    return make_polygon(cusps)


def random_thompson(rng, max_cusps: int = 5) -> ThompsonElement:
    """两个随机多边形与随机循环平移给出的元素"""
    n = rng.randint(3, max_cusps)
    U, V = random_polygon(rng, n), random_polygon(rng, n)
    return thompson_from_polygons(U, V, rng.randrange(n))
