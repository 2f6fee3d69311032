"""
常用固定样例
E1：最小的非自同构球同构（完美森林两块，双树为三角形），
以及三角形 (0, 1, ∞) 上的三阶旋转
"""

from fractions import Fraction

from .continued_fraction import INF
from .relabel import TailAffineBijection
from .sphero import NeighborRule, PieceMap, Spheromorphism, ensure_valid, make_sphero
from .thompson import IdealPolygon, ThompsonElement, make_polygon, thompson_from_polygons


def e1() -> Spheromorphism:
    """
    E1：源森林 {(1), (1,1)}，目标森林 {(1), (2)}

    ε ↦ ε，子标签 k ≥ 2 ↦ k + 1；(1) ↦ (1)，子标签 k ≥ 2 ↦ k − 1；(1,1) ↦ (2) 按标签复制
    """
    pieces = [
        PieceMap(source_apex=(), target_apex=(), rules={
            (): NeighborRule(parent_image=None, child_map=TailAffineBijection.make({}, 2, 1)),
        }),
        PieceMap(source_apex=(1,), target_apex=(1,), rules={
            (1,): NeighborRule(parent_image=None, child_map=TailAffineBijection.make({}, 2, -1)),
        }),
        PieceMap(source_apex=(1, 1), target_apex=(2,)),
    ]
    return ensure_valid(make_sphero([(1,), (1, 1)], [(1,), (2,)], pieces))


def triangle() -> IdealPolygon:
    return make_polygon([Fraction(0), Fraction(1), INF])


def order3_rotation() -> ThompsonElement:
    """x ↦ 1/(1 − x)，三角形 (0, 1, ∞) 的边循环平移一位"""
    t = triangle()
    return thompson_from_polygons(t, t, 1)
