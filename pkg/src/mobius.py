"""
PGL₂(ℤ) 作用与其球同构实现
整数矩阵的射影作用、按欧几里得算法分解为 S、T、T⁻¹ 的字，
以及生成元经 Ξ 共轭后的表格型球同构
"""

from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import List, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, model_validator

from .continued_fraction import INF, ExtRational, QuadraticIrrational, as_ext, is_infinite
from .errors import DomainError
from .relabel import TailAffineBijection
from .sphero import (
    NeighborRule,
    PieceMap,
    Spheromorphism,
    compose_all,
    ensure_valid,
    identity,
    invert,
    make_sphero,
    perfect_forest,
)


class Mobius(BaseModel):
    """x ↦ (ax + b)/(cx + d)，det = ±1，整体差一个符号视为同一元素"""
    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def _unimodular(self) -> "Mobius":
        if abs(self.a * self.d - self.b * self.c) != 1:
            raise ValueError(f"det must be ±1, got {self.a * self.d - self.b * self.c}")
        return self

    @classmethod
    def of(cls, a: int, b: int, c: int, d: int) -> "Mobius":
        det = a * d - b * c
        if abs(det) != 1:
            raise DomainError(f"|det| != 1 for ({a},{b};{c},{d})")
        return cls(a=a, b=b, c=c, d=d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mobius") -> "Mobius":
        a, b, c, d = self.a, self.b, self.c, self.d
        p, q, r, s = other.a, other.b, other.c, other.d
        return Mobius(a=a * p + b * r, b=a * q + b * s, c=c * p + d * r, d=c * q + d * s)

    def inverse(self) -> "Mobius":
        e = self.det()
        return Mobius(a=e * self.d, b=-e * self.b, c=-e * self.c, d=e * self.a)

    def normalized(self) -> "Mobius":
        """固定整体符号：c > 0，或 c = 0 且 d > 0"""
        if self.c < 0 or (self.c == 0 and self.d < 0):
            return Mobius(a=-self.a, b=-self.b, c=-self.c, d=-self.d)
        return self

    def same_map(self, other: "Mobius") -> bool:
        return self.normalized() == other.normalized()

    def __str__(self) -> str:
        return f"({self.a},{self.b};{self.c},{self.d})"


S = Mobius(a=0, b=1, c=1, d=0)
T = Mobius(a=1, b=1, c=0, d=1)
T_INV = Mobius(a=1, b=-1, c=0, d=1)
IDENTITY = Mobius(a=1, b=0, c=0, d=1)


class Generator(str, Enum):
    S = "S"
    T = "T"
    T_INV = "T^-1"


GENERATOR_MATRIX = {Generator.S: S, Generator.T: T, Generator.T_INV: T_INV}

# diag(1, −1) = S·T⁻¹·S·T·S·T⁻¹
_FLIP_WORD = [Generator.S, Generator.T_INV, Generator.S, Generator.T, Generator.S, Generator.T_INV]


def parse_mobius(text: str) -> Mobius:
    """解析 "a,b,c,d"，或生成元名 S / T / T^-1"""
    s = text.strip().replace(" ", "").strip("()")
    for gen, m in GENERATOR_MATRIX.items():
        if s == gen.value:
            return m
    parts = s.replace(";", ",").split(",")
    if len(parts) != 4:
        raise DomainError(f"Expected 'a,b,c,d', got {text!r}")
    return Mobius.of(*(int(p) for p in parts))


# ==================== 作用 ====================

def mobius_apply(m: Mobius, x: Union[ExtRational, QuadraticIrrational, int, str]):
    """
    ℝP¹ 上的精确射影作用

    Args:
        m: 矩阵
        x: 有理数、∞ 或二次无理数

    Returns:
        同类型的像；有理点的像可能是 ∞
    """
    if isinstance(x, QuadraticIrrational):
        p, q, r, d = x.a, x.b, x.c, x.d
        # (a·x + b)/(c·x + d)，分子分母同乘 r
        a1, b1 = m.a * p + m.b * r, m.a * q
        a2, b2 = m.c * p + m.d * r, m.c * q
        return QuadraticIrrational.make(a1 * a2 - b1 * b2 * d, b1 * a2 - a1 * b2, a2 * a2 - b2 * b2 * d, d)
    x = as_ext(x)
    if is_infinite(x):
        return INF if m.c == 0 else Fraction(m.a, m.c)
    den = m.c * x + m.d
    if den == 0:
        return INF
    return (m.a * x + m.b) / den


# ==================== 分解 ====================

def _power(k: int) -> List[Generator]:
    return [Generator.T] * k if k >= 0 else [Generator.T_INV] * (-k)


def mobius_decompose(m: Mobius) -> List[Generator]:
    """
    按第一列的欧几里得算法把 m 写成 S、T、T⁻¹ 的字，乘积等于 ±m

    Raises:
        DomainError: |det| ≠ 1
    """
    if abs(m.det()) != 1:
        raise DomainError("mobius_decompose needs |det| = 1")
    word: List[Generator] = []
    a, b, c, d = m.a, m.b, m.c, m.d
    while c != 0:
        k = a // c
        # 左乘 T^{-k}，再左乘 S
        a, b = a - k * c, b - k * d
        word += _power(k) + [Generator.S]
        a, b, c, d = c, d, a, b
    if a < 0:
        a, b, d = -a, -b, -d
    if d == 1:
        word += _power(b)
    else:
        # (1, b; 0, −1) = T^{−b}·diag(1, −1)
        word += _power(-b) + _FLIP_WORD
    return word


def word_matrix(word: List[Generator]) -> Mobius:
    out = IDENTITY
    for gen in word:
        out = out @ GENERATOR_MATRIX[gen]
    return out


# ==================== 生成元的球同构 ====================

def _tab(t: int, c: int) -> TailAffineBijection:
    return TailAffineBijection.make({}, t, c)


def _root_rule(t: int, c: int) -> NeighborRule:
    return NeighborRule(parent_image=None, child_map=_tab(t, c))


@lru_cache(maxsize=None)
def generator_sphero(gen: Generator) -> Spheromorphism:
    """
    生成元 S: x ↦ 1/x，T: x ↦ x + 1 及 T⁻¹ 经 Ξ 共轭的球同构

    S 交换 (0,1)/(1,∞) 以及 (−1,0)/(−∞,−1) 两对象限分支；
    T 把 (−∞,−1) 向右平移，把 (−1,0) 分两支送入 (0,1)，把 (0,1) 接到 (1,∞) 的 [1; …] 分支下
    """
    gen = Generator(gen)
    if gen == Generator.S:
        pieces = [
            PieceMap(source_apex=(), target_apex=(2,), rules={(): _root_rule(4, -3)}),
            PieceMap(source_apex=(1,), target_apex=(3,)),
            PieceMap(source_apex=(2,), target_apex=(), rules={(2,): _root_rule(1, 3)}),
            PieceMap(source_apex=(3,), target_apex=(1,)),
        ]
        g = make_sphero([(1,), (2,), (3,)], [(1,), (2,), (3,)], pieces)
    elif gen == Generator.T:
        pieces = [
            PieceMap(source_apex=(), target_apex=(2, 1), rules={(): _root_rule(4, -3)}),
            PieceMap(source_apex=(1,), target_apex=(4,), rules={(1,): _root_rule(2, -1)}),
            PieceMap(source_apex=(1, 1), target_apex=(), rules={(1, 1): _root_rule(1, 4)}),
            PieceMap(source_apex=(2,), target_apex=(2,), rules={(2,): _root_rule(1, 1)}),
            PieceMap(source_apex=(3,), target_apex=(3,), rules={(3,): _root_rule(2, -1)}),
            PieceMap(source_apex=(3, 1), target_apex=(1,)),
        ]
        g = make_sphero([(1,), (1, 1), (2,), (3,), (3, 1)], [(1,), (2,), (2, 1), (3,), (4,)], pieces)
    else:
        return invert(generator_sphero(Generator.T))
    return ensure_valid(g)


def mobius_sphero(m: Mobius) -> Spheromorphism:
    """Ξ ∘ m ∘ Ξ⁻¹：按分解字依次复合生成元的球同构"""
    word = mobius_decompose(m)
    if not word:
        return identity()
    g = perfect_forest(compose_all(*(generator_sphero(gen) for gen in word)))
    logger.debug(f"mobius_sphero {m}: word of length {len(word)}, {g.piece_count()} pieces")
    return g
