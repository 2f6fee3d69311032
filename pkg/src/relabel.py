"""
子标签的尾仿射双射
有限个例外点加上最终平移 k ↦ k + c（k ≥ t），用来把树同构保持为有限数据
"""

from typing import Dict, Iterable, List, Tuple

from pydantic import BaseModel, ConfigDict

from .errors import DomainError


class TailAffineBijection(BaseModel):
    """
    尾仿射双射 f

    语义：k ∈ dom(exceptions) 时 k ↦ exceptions[k]；k ≥ threshold 时 k ↦ k + shift。
    定义域 = dom(exceptions) ∪ [threshold, ∞)。实例总是规范形式，请用 make() 构造。
    """
    model_config = ConfigDict(frozen=True)

    exceptions: Tuple[Tuple[int, int], ...] = ()
    threshold: int = 1
    shift: int = 0

    # ==================== 构造 ====================

    @classmethod
    def make(cls, exceptions: Dict[int, int] = None, threshold: int = 1, shift: int = 0) -> "TailAffineBijection":
        """
        校验并规范化

        Args:
            exceptions: 例外映射，键必须 < threshold
            threshold: 平移开始的位置 t ≥ 1
            shift: 平移量 c，要求 t + c ≥ 1

        Returns:
            规范形式的双射
        """
        exc = dict(exceptions or {})
        t, c = int(threshold), int(shift)
        if t < 1 or t + c < 1:
            raise DomainError(f"Invalid tail: threshold={t}, shift={c}")
        for k, v in exc.items():
            if k < 1 or v < 1:
                raise DomainError(f"Invalid exception {k} -> {v}")
            if k >= t:
                raise DomainError(f"Exception key {k} is not below threshold {t}")
            if v >= t + c:
                raise DomainError(f"Exception image {v} collides with the tail image [{t + c}, ∞)")
        if len(set(exc.values())) != len(exc):
            raise DomainError(f"Exceptions are not injective: {exc}")

        while t > 1 and exc.get(t - 1) == t - 1 + c and t - 1 + c >= 1:
            del exc[t - 1]
            t -= 1
        return cls(exceptions=tuple(sorted(exc.items())), threshold=t, shift=c)

    @classmethod
    def identity(cls) -> "TailAffineBijection":
        return cls.make()

    @classmethod
    def identity_excluding(cls, labels: Iterable[int]) -> "TailAffineBijection":
        """ℕ ∖ labels 上的恒等映射"""
        labels = set(labels)
        t = max(labels, default=0) + 1
        return cls.make({k: k for k in range(1, t) if k not in labels}, t, 0)

    @classmethod
    def order_preserving(cls, domain_excluded: Iterable[int], image_excluded: Iterable[int]) -> "TailAffineBijection":
        """
        ℕ ∖ S → ℕ ∖ T 的保序双射

        Args:
            domain_excluded: 定义域的有限补 S
            image_excluded: 像集的有限补 T
        """
        s, t_set = set(domain_excluded), set(image_excluded)
        bound = max(s | t_set, default=0) + 1 + max(len(s), len(t_set))
        dom = [k for k in range(1, bound) if k not in s]
        img = [k for k in range(1, bound + len(t_set) + len(s) + 1) if k not in t_set]
        exc = {k: img[i] for i, k in enumerate(dom)}
        return cls.make(exc, bound, len(t_set) - len(s))

    # ==================== 查询 ====================

    @property
    def exc(self) -> Dict[int, int]:
        return dict(self.exceptions)

    def in_domain(self, k: int) -> bool:
        return k >= self.threshold or k in self.exc

    def apply(self, k: int) -> int:
        exc = self.exc
        if k in exc:
            return exc[k]
        if k >= self.threshold:
            return k + self.shift
        raise DomainError(f"{k} is outside the domain of {self.describe()}")

    def in_image(self, m: int) -> bool:
        return m >= self.threshold + self.shift or m in self.exc.values()

    def preimage(self, m: int) -> int:
        for k, v in self.exceptions:
            if v == m:
                return k
        if m >= self.threshold + self.shift:
            return m - self.shift
        raise DomainError(f"{m} is outside the image of {self.describe()}")

    def domain_excluded(self) -> List[int]:
        """定义域的有限补"""
        exc = self.exc
        return [k for k in range(1, self.threshold) if k not in exc]

    def image_excluded(self) -> List[int]:
        """像集的有限补"""
        values = set(self.exc.values())
        return [m for m in range(1, self.threshold + self.shift) if m not in values]

    def is_identity(self) -> bool:
        return not self.exceptions and self.threshold == 1 and self.shift == 0

    def describe(self) -> str:
        return f"TAB(exc={self.exc}, t={self.threshold}, c={self.shift})"

    # ==================== 运算 ====================

    def invert(self) -> "TailAffineBijection":
        exc = {v: k for k, v in self.exceptions}
        return TailAffineBijection.make(exc, self.threshold + self.shift, -self.shift)

    def compose(self, g: "TailAffineBijection") -> "TailAffineBijection":
        """self ∘ g，要求 g 的像包含于 self 的定义域"""
        big_t = max(g.threshold, self.threshold - g.shift)
        exc = {}
        for k in list(g.exc) + list(range(g.threshold, big_t)):
            m = g.apply(k)
            if not self.in_domain(m):
                raise DomainError(f"compose: {m} = g({k}) is outside the domain of f")
            exc[k] = self.apply(m)
        return TailAffineBijection.make(exc, big_t, self.shift + g.shift)

    def restrict(self, key: int) -> "TailAffineBijection":
        """从定义域中去掉一个点"""
        exc = self.exc
        if key in exc:
            del exc[key]
            return TailAffineBijection.make(exc, self.threshold, self.shift)
        if key >= self.threshold:
            for k in range(self.threshold, key):
                exc[k] = k + self.shift
            return TailAffineBijection.make(exc, key + 1, self.shift)
        raise DomainError(f"restrict: {key} is outside the domain")

    def extend(self, key: int, value: int) -> "TailAffineBijection":
        """向定义域添加一个点 key ↦ value"""
        if self.in_domain(key):
            raise DomainError(f"extend: {key} is already in the domain")
        if self.in_image(value):
            raise DomainError(f"extend: {value} is already in the image")
        exc = self.exc
        exc[key] = value
        return TailAffineBijection.make(exc, self.threshold, self.shift)

    def to_json(self) -> dict:
        return {"exc": {str(k): v for k, v in self.exceptions}, "t": self.threshold, "c": self.shift}

    @classmethod
    def from_json(cls, data: dict) -> "TailAffineBijection":
        return cls.make({int(k): int(v) for k, v in data.get("exc", {}).items()}, int(data["t"]), int(data["c"]))
