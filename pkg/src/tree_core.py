"""
树 𝕋 的基础几何
顶点地址为正整数标签的有限序列（空序列为初始点 ε），
提供路径、最近公共祖先、距离、张成子树以及有限子树模型
"""

from typing import FrozenSet, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from .errors import InvalidAddressError

Address = Tuple[int, ...]
ROOT: Address = ()

# 方向编码：0 = 父方向，k ≥ 1 = 第 k 个子方向
PARENT = 0


# ==================== 地址基础 ====================

def check_address(v: Iterable[int]) -> Address:
    """校验并规范化地址，标签必须 ≥ 1"""
    v = tuple(int(x) for x in v)
    for label in v:
        if label < 1:
            raise InvalidAddressError(f"Invalid label {label} in address {v}")
    return v


def address_key(v: Address) -> Tuple[int, Address]:
    """确定性排序键：先按长度，再按字典序"""
    return (len(v), v)


def parse_address(text: str) -> Address:
    """
    解析文本地址

    Args:
        text: "1.2.3" 形式，根用 "eps"

    Returns:
        地址元组
    """
    text = text.strip()
    if text in ("eps", "ε", ""):
        return ROOT
    try:
        return check_address(int(part) for part in text.split("."))
    except ValueError as e:
        if isinstance(e, InvalidAddressError):
            raise
        raise InvalidAddressError(f"Invalid address text: {text!r}") from e


def format_address(v: Address) -> str:
    return "eps" if not v else ".".join(str(x) for x in v)


def parent(v: Address) -> Address:
    if not v:
        raise InvalidAddressError("The initial point has no parent")
    return v[:-1]


def is_ancestor(a: Address, v: Address) -> bool:
    """a 是否为 v 的祖先（含 a == v）"""
    return len(a) <= len(v) and v[:len(a)] == a


def step(v: Address, direction: int) -> Address:
    """沿方向走一步"""
    if direction == PARENT:
        return parent(v)
    return v + (direction,)


def direction_to(v: Address, w: Address) -> int:
    """相邻顶点 v → w 的方向"""
    if w == v[:-1] and v:
        return PARENT
    if len(w) == len(v) + 1 and w[:-1] == v:
        return w[-1]
    raise InvalidAddressError(f"{format_address(v)} and {format_address(w)} are not adjacent")


# ==================== 几何运算 ====================

def meet(v: Address, w: Address) -> Address:
    """最近公共祖先（最长公共前缀）"""
    n = 0
    for a, b in zip(v, w):
        if a != b:
            break
        n += 1
    return v[:n]


def distance(v: Address, w: Address) -> int:
    return len(v) + len(w) - 2 * len(meet(v, w))


def path(v: Address, w: Address) -> List[Address]:
    """v 到 w 的唯一简单路径，经过 meet(v, w)"""
    m = len(meet(v, w))
    up = [v[:i] for i in range(len(v), m - 1, -1)]
    down = [w[:i] for i in range(m + 1, len(w) + 1)]
    return up + down


def span(vertices: Iterable[Address]) -> "FiniteSubtree":
    """
    包含给定顶点的最小子树

    Args:
        vertices: 非空顶点集合

    Returns:
        FiniteSubtree
    """
    vs = [tuple(v) for v in vertices]
    if not vs:
        raise InvalidAddressError("span of an empty vertex set")
    top = vs[0]
    for v in vs[1:]:
        top = meet(top, v)
    out = set()
    for v in vs:
        for i in range(len(top), len(v) + 1):
            out.add(v[:i])
    return FiniteSubtree(vertices=frozenset(out))


def span_set(vertices: Iterable[Address]) -> FrozenSet[Address]:
    """span 的裸集合版本，空输入返回空集"""
    vs = list(vertices)
    return span(vs).vertices if vs else frozenset()


def is_connected(vertices: Iterable[Address]) -> bool:
    """有限顶点集是否连通：恰有一个顶点的父亲不在集合中"""
    vs = set(vertices)
    if not vs:
        return False
    tops = [v for v in vs if not v or v[:-1] not in vs]
    return len(tops) == 1


# ==================== 有限子树 ====================

class FiniteSubtree(BaseModel):
    """非空有限连通子树 J ⊂ 𝕋"""
    model_config = ConfigDict(frozen=True)

    vertices: FrozenSet[Address]

    @field_validator("vertices")
    @classmethod
    def _connected(cls, vs: FrozenSet[Address]) -> FrozenSet[Address]:
        vs = frozenset(check_address(v) for v in vs)
        if not is_connected(vs):
            raise InvalidAddressError(f"Vertex set is empty or not connected: {sorted(vs, key=address_key)}")
        return vs

    @classmethod
    def of(cls, *vertices: Iterable[int]) -> "FiniteSubtree":
        return cls(vertices=frozenset(tuple(v) for v in vertices))

    def top(self) -> Address:
        """离根最近的顶点"""
        return min(self.vertices, key=address_key)

    def sorted(self) -> List[Address]:
        return sorted(self.vertices, key=address_key)

    def edges(self) -> List[Address]:
        """内部边，用子端点表示"""
        top = self.top()
        return [v for v in self.sorted() if v != top]

    def leaves(self) -> List[Address]:
        """度为 1 的顶点"""
        vs = self.vertices
        out = []
        for v in self.sorted():
            degree = sum(1 for w in vs if w and w[:-1] == v)
            if v and v[:-1] in vs:
                degree += 1
            if degree <= 1 and len(vs) > 1:
                out.append(v)
        return out

    def __contains__(self, v: object) -> bool:
        return v in self.vertices

    def __len__(self) -> int:
        return len(self.vertices)


def subtree_or_none(vertices: Iterable[Address]) -> Optional[FiniteSubtree]:
    vs = frozenset(vertices)
    return FiniteSubtree(vertices=vs) if vs else None
