"""
连分数与边界对应 Ξ
精确有理数与二次无理数的连分数展开、ℝ∖ℚ ≅ ∂𝕋 的编码，
以及有理端点区间与球代数区域之间的互相转换
"""

import math
from enum import Enum
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, List, Tuple, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import DomainError
from .forest import BoundaryRegion, region_canonical, region_empty, region_full, region_union
from .tree_core import ROOT, Address, address_key, check_address

INF = math.inf
NEG_INF = -math.inf

# 有理数或 ±∞（∞ 只用于比较）
ExtRational = Union[Fraction, float]


def parse_rational(text: str) -> ExtRational:
    """解析 "p/q"、整数或 "inf" / "-inf" / "∞\""""
    s = str(text).strip().lower()
    if s in ("inf", "+inf", "∞", "+∞", "infinity"):
        return INF
    if s in ("-inf", "-∞", "-infinity"):
        return NEG_INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as e:
        raise DomainError(f"Not a rational: {text!r}") from e


def format_rational(x: ExtRational) -> str:
    if x == INF:
        return "inf"
    if x == NEG_INF:
        return "-inf"
    return str(Fraction(x))


def as_ext(x) -> ExtRational:
    if isinstance(x, float):
        if math.isinf(x):
            return x
        raise DomainError("Floating-point values are not accepted; use fractions")
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


def is_infinite(x: ExtRational) -> bool:
    return isinstance(x, float) and math.isinf(x)


# ==================== 二次无理数 ====================

def _squarefree(d: int) -> Tuple[int, int]:
    """d = f²·d′，返回 (f, d′)"""
    f, k = 1, 2
    while k * k <= d:
        while d % (k * k) == 0:
            d //= k * k
            f *= k
        k += 1
    return f, d


def surd_sign(a: int, b: int, d: int) -> int:
    """a + b√d 的精确符号（d 非平方数）"""
    if a >= 0 and b >= 0:
        return 0 if a == 0 and b == 0 else 1
    if a <= 0 and b <= 0:
        return -1
    lhs, rhs = a * a, b * b * d
    if a > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


class QuadraticIrrational(BaseModel):
    """
    二次无理数 (a + b√d)/c

    规范形式：d 无平方因子且 > 1，b ≠ 0，c > 0，gcd(a, b, c) = 1。请用 make() 构造。
    """
    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    c: int
    d: int

    @classmethod
    def make(cls, a: int, b: int, c: int, d: int) -> "QuadraticIrrational":
        if d <= 1 or c == 0 or b == 0:
            raise DomainError(f"Not a quadratic irrational: ({a} + {b}√{d})/{c}")
        f, d = _squarefree(d)
        if d == 1:
            raise DomainError("Radicand is a perfect square")
        b *= f
        if c < 0:
            a, b, c = -a, -b, -c
        g = gcd(gcd(a, b), c)
        return cls(a=a // g, b=b // g, c=c // g, d=d)

    @classmethod
    def sqrt(cls, n: int) -> "QuadraticIrrational":
        return cls.make(0, 1, 1, n)

    def __str__(self) -> str:
        return f"({self.a}{self.b:+d}√{self.d})/{self.c}"

    def floor(self) -> int:
        bd = isqrt(self.b * self.b * self.d)
        root_floor = bd if self.b > 0 else -bd - 1
        return (self.a + root_floor) // self.c

    def sub_int(self, n: int) -> "QuadraticIrrational":
        return QuadraticIrrational.make(self.a - n * self.c, self.b, self.c, self.d)

    def neg(self) -> "QuadraticIrrational":
        return QuadraticIrrational.make(-self.a, -self.b, self.c, self.d)

    def reciprocal(self) -> "QuadraticIrrational":
        """c/(a + b√d) = c(a − b√d)/(a² − b²d)"""
        a, b, c, d = self.a, self.b, self.c, self.d
        return QuadraticIrrational.make(c * a, -c * b, a * a - b * b * d, d)

    def sign(self) -> int:
        return surd_sign(self.a, self.b, self.d)

    def compare(self, q: ExtRational) -> int:
        """与有理数或 ±∞ 比较，返回 −1 / 1"""
        if is_infinite(q):
            return -1 if q > 0 else 1
        q = Fraction(q)
        # (a + b√d)/c − p/r 的符号 = (a·r − p·c) + b·r√d 的符号
        return surd_sign(self.a * q.denominator - q.numerator * self.c, self.b * q.denominator, self.d)


def parse_surd(text: str) -> QuadraticIrrational:
    """解析 "a,b,c,d" 或 "sqrt(n)\""""
    s = text.strip().replace(" ", "")
    if s.startswith("sqrt(") and s.endswith(")"):
        return QuadraticIrrational.sqrt(int(s[5:-1]))
    parts = s.split(",")
    if len(parts) != 4:
        raise DomainError(f"Expected 'a,b,c,d' or 'sqrt(n)', got {text!r}")
    return QuadraticIrrational.make(*(int(p) for p in parts))


# ==================== 连分数 ====================

class CFWord(BaseModel):
    """[u₀; u₁, …, u_k]，u₀ 为任意整数，其余项 ≥ 1"""
    model_config = ConfigDict(frozen=True)

    terms: Tuple[int, ...]

    @field_validator("terms")
    @classmethod
    def _positive_tail(cls, terms: Tuple[int, ...]) -> Tuple[int, ...]:
        if not terms:
            raise ValueError("A continued fraction needs at least one term")
        if any(t < 1 for t in terms[1:]):
            raise ValueError(f"Terms after the first must be >= 1: {terms}")
        return terms

    def __str__(self) -> str:
        head, rest = self.terms[0], self.terms[1:]
        if not rest:
            return f"[{head}]"
        return f"[{head}; " + ", ".join(str(t) for t in rest) + "]"

    def is_canonical(self) -> bool:
        return len(self.terms) == 1 or self.terms[-1] >= 2

    def alternate(self) -> "CFWord":
        """[…, s] ↔ […, s − 1, 1]"""
        t = list(self.terms)
        if len(t) > 1 and t[-1] == 1:
            t.pop()
            t[-1] += 1
        else:
            t[-1] -= 1
            t.append(1)
        return CFWord(terms=tuple(t))

    def canonical(self) -> "CFWord":
        return self if self.is_canonical() else self.alternate()

    def value(self) -> Fraction:
        return cf_value(self)


def _evaluate(terms: Iterable[int]) -> Fraction:
    terms = list(terms)
    x = Fraction(terms[-1])
    for t in reversed(terms[:-1]):
        x = t + 1 / x
    return x


def cf_value(w: CFWord) -> Fraction:
    """精确求值"""
    return _evaluate(w.terms)


def cf_expand(x) -> CFWord:
    """
    有理数的规范连分数（欧几里得算法，末项 ≥ 2）

    Raises:
        DomainError: 输入为 ∞
    """
    x = as_ext(x)
    if is_infinite(x):
        raise DomainError("cf_expand is undefined at infinity")
    p, q = x.numerator, x.denominator
    terms: List[int] = []
    while True:
        a = p // q
        terms.append(a)
        p, q = q, p - a * q
        if q == 0:
            break
    return CFWord(terms=tuple(terms))


def cf_stream(x: QuadraticIrrational, depth: int) -> CFWord:
    """二次无理数连分数的前 depth 项（取整、取倒数的精确递推）"""
    if depth < 1:
        raise DomainError("depth must be >= 1")
    terms = []
    y = x
    for _ in range(depth):
        n = y.floor()
        terms.append(n)
        y = y.sub_int(n).reciprocal()
    return CFWord(terms=tuple(terms))


def tails_agree(x: QuadraticIrrational, y: QuadraticIrrational, depth: int = 40, max_shift: int = 10) -> bool:
    """
    x 与 y 的连分数尾部是否在某个下标平移后一致

    比较窗口取后半段 [depth/2, depth − max_shift)
    """
    a = cf_stream(x, depth).terms
    b = cf_stream(y, depth).terms
    window = range(depth // 2, depth - max_shift)
    for m in range(-max_shift, max_shift + 1):
        if all(0 <= j + m < depth and b[j + m] == a[j] for j in window):
            return True
    return False


# ==================== Ξ 编码 ====================

class Quadrant(str, Enum):
    """ℝ∖{0, ±1} 的四个象限区间"""
    POS_UNIT = "(0,1)"
    NEG_UNIT = "(-1,0)"
    POS_TAIL = "(1,inf)"
    NEG_TAIL = "(-inf,-1)"


# 根的子标签 1, 2, 3 留给其余三个象限的起点
_QUADRANT_LABEL = {Quadrant.NEG_UNIT: 1, Quadrant.POS_TAIL: 2, Quadrant.NEG_TAIL: 3}
_LABEL_QUADRANT = {v: k for k, v in _QUADRANT_LABEL.items()}


def xi_address(quadrant: Union[Quadrant, str], digits: Iterable[int]) -> Address:
    """
    象限与连分数数字到顶点地址

    Args:
        quadrant: 象限
        digits: (0,±1) 象限为 s₁, s₂, …；(±1, ±∞) 象限为 s₀, s₁, …，均 ≥ 1

    Returns:
        (0,1) 象限的起点为 ε，数字 s₁ 对应根的子标签 s₁ + 3
    """
    quadrant = Quadrant(quadrant)
    digits = tuple(int(s) for s in digits)
    if any(s < 1 for s in digits):
        raise DomainError(f"Digits must be >= 1 in quadrant {quadrant.value}: {digits}")
    if quadrant == Quadrant.POS_UNIT:
        if not digits:
            return ROOT
        return (digits[0] + 3,) + digits[1:]
    return (_QUADRANT_LABEL[quadrant],) + digits


def xi_inverse(address: Iterable[int]) -> Tuple[Quadrant, Tuple[int, ...]]:
    """xi_address 的逆"""
    p = check_address(address)
    if not p:
        return Quadrant.POS_UNIT, ()
    if p[0] >= 4:
        return Quadrant.POS_UNIT, (p[0] - 3,) + p[1:]
    return _LABEL_QUADRANT[p[0]], p[1:]


def xi_of_point(x: QuadraticIrrational, depth: int) -> Address:
    """二次无理数的 Ξ-射线的前 depth 个标签"""
    if depth < 0:
        raise DomainError("depth must be >= 0")
    if x.sign() > 0:
        y, positive = x, True
    else:
        y, positive = x.neg(), False
    terms = cf_stream(y, depth + 1).terms
    if terms[0] == 0:
        quadrant = Quadrant.POS_UNIT if positive else Quadrant.NEG_UNIT
        digits = terms[1:]
    else:
        quadrant = Quadrant.POS_TAIL if positive else Quadrant.NEG_TAIL
        digits = terms
    return xi_address(quadrant, digits)[:depth]


def _signed_terms(p: Address) -> Tuple[int, List[int]]:
    """地址对应的带符号连分数项（不含 ε 与 (2)、(3)）"""
    head, rest = p[0], list(p[1:])
    if head >= 4:
        return 1, [0, head - 3] + rest
    if head == 1:
        return -1, [0] + rest
    return (1 if head == 2 else -1), rest


def cylinder_interval(address: Iterable[int]) -> Tuple[ExtRational, ExtRational]:
    """Ξ-射线经过该顶点的无理数组成的开区间"""
    p = check_address(address)
    if not p:
        return NEG_INF, INF
    if p == (2,):
        return Fraction(1), INF
    if p == (3,):
        return NEG_INF, Fraction(-1)
    sign, terms = _signed_terms(p)
    x = sign * _evaluate(terms)
    y = sign * _evaluate(terms[:-1] + [terms[-1] + 1])
    return (x, y) if x < y else (y, x)


def accumulation_point(address: Iterable[int]) -> ExtRational:
    """子顶点柱集的聚点（总是柱集的一个端点，ε 除外）"""
    p = check_address(address)
    if not p:
        return Fraction(0)
    if p == (2,):
        return INF
    if p == (3,):
        return NEG_INF
    sign, terms = _signed_terms(p)
    return sign * _evaluate(terms)


# ==================== 区间 ↔ 区域 ====================

def _hull(acc: ExtRational, lo: ExtRational, hi: ExtRational) -> Tuple[ExtRational, ExtRational]:
    return min(acc, lo), max(acc, hi)


def _classify(lo: ExtRational, hi: ExtRational, u: ExtRational, v: ExtRational) -> str:
    if u <= lo and hi <= v:
        return "in"
    if hi <= u or v <= lo:
        return "out"
    return "split"


def _first_uniform_child(p: Address, u: ExtRational, v: ExtRational) -> int:
    """
    最小的 m，使 m 之后所有子顶点的柱集都不含 u、v

    尾部区间随 m 单调收缩到聚点，先倍增再二分
    """
    acc = accumulation_point(p)

    def uniform(m: int) -> bool:
        lo, hi = _hull(acc, *cylinder_interval(p + (m,)))
        return not (lo < u < hi) and not (lo < v < hi)

    lo_m = 4 if not p else 1
    if uniform(lo_m):
        return lo_m
    step = 1
    while not uniform(lo_m + step):
        lo_m += step
        step *= 2
    hi_m = lo_m + step
    while hi_m - lo_m > 1:
        mid = (lo_m + hi_m) // 2
        if uniform(mid):
            hi_m = mid
        else:
            lo_m = mid
    return hi_m


def _tail_status(p: Address, u: ExtRational, v: ExtRational) -> bool:
    m = _first_uniform_child(p, u, v)
    lo, hi = _hull(accumulation_point(p), *cylinder_interval(p + (m,)))
    return _classify(lo, hi, u, v) == "in"


def _descend(p: Address, status: bool, u, v, cuts: set, selected: set) -> None:
    for m in range(1, _first_uniform_child(p, u, v)):
        child = p + (m,)
        kind = _classify(*cylinder_interval(child), u, v)
        child_status = _tail_status(child, u, v) if kind == "split" else kind == "in"
        if child_status != status:
            cuts.add(child)
            if child_status:
                selected.add(child)
        if kind == "split":
            _descend(child, child_status, u, v, cuts, selected)


def interval_to_region(u, v) -> BoundaryRegion:
    """
    有理端点开区间 ((u, v)) 的 Ξ-像

    从根开始逐层下降：被 u 或 v 分开的顶点取其尾部子顶点的状态，
    状态与所在分量不同的子顶点处切开。

    Args:
        u: 左端点，有理数或 −∞
        v: 右端点，有理数或 +∞

    Returns:
        规范的 BoundaryRegion
    """
    u, v = as_ext(u), as_ext(v)
    if u == INF or v == NEG_INF or not u < v:
        raise DomainError(f"interval_to_region needs u < v, got ({format_rational(u)}, {format_rational(v)})")
    if u == NEG_INF and v == INF:
        return region_full()
    cuts: set = set()
    selected: set = set()
    root_status = _tail_status(ROOT, u, v)
    if root_status:
        selected.add(ROOT)
    _descend(ROOT, root_status, u, v, cuts, selected)
    region = region_canonical(BoundaryRegion(cuts=frozenset(cuts), selected=frozenset(selected)))
    logger.debug(f"interval ({format_rational(u)}, {format_rational(v)}) -> {len(region.cuts)} cuts")
    return region


def intervals_to_region(intervals: Iterable[Tuple[ExtRational, ExtRational]]) -> BoundaryRegion:
    """有限个区间之并"""
    out = region_empty()
    for u, v in intervals:
        out = region_union(out, interval_to_region(u, v))
    return out


def region_to_intervals(r: BoundaryRegion) -> List[Tuple[ExtRational, ExtRational]]:
    """
    区域到互不相交的有理端点区间

    所有割边柱集的端点把直线分成基本区间，每个基本区间的状态由包含它的最深割边决定；
    相邻被选中的区间在有限端点处合并，不跨过 ∞
    """
    r = region_canonical(r)
    if not r.cuts:
        return [(NEG_INF, INF)] if ROOT in r.selected else []
    cylinders = {e: cylinder_interval(e) for e in r.cuts}
    points = {NEG_INF, INF}
    for lo, hi in cylinders.values():
        points.update([lo, hi])
    ordered = sorted(points)
    out: List[Tuple[ExtRational, ExtRational]] = []
    for lo, hi in zip(ordered, ordered[1:]):
        owner = ROOT
        for e in sorted(r.cuts, key=address_key):
            c_lo, c_hi = cylinders[e]
            if c_lo <= lo and hi <= c_hi and len(e) > len(owner):
                owner = e
        if owner not in r.selected:
            continue
        if out and out[-1][1] == lo and not is_infinite(lo):
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out
