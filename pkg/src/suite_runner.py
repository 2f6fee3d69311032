"""
性质测试套件
每个性质在若干随机实例上检查一条代数恒等式或数值界，
随机种子由 (seed, 性质序号) 决定，同一配置下结果可完全复现。
失败时记录第一个反例（JSON 形式），供 CLI 以退出码 1 输出。
"""

import math
import random
import traceback
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field, field_validator
from tqdm import tqdm

from .bitree import (
    bitree_of,
    diamond,
    equivalent,
    ij_bitree_of,
    product_via_recoloring,
    random_bitree,
    realize,
    recoloring_link,
    source_support,
    spherical_value,
    target_support,
)
from .config import config
from .continued_fraction import (
    INF,
    NEG_INF,
    CFWord,
    ExtRational,
    QuadraticIrrational,
    cf_value,
    format_rational,
    interval_to_region,
    intervals_to_region,
    region_to_intervals,
    tails_agree,
    xi_of_point,
)
from .fixtures import order3_rotation
from .forest import BoundaryRegion, apexes, region_canonical, region_member, skeleton, skeleton_equivalent
from .kernel_numerics import GramSpec, block_rank_check, factorization_check, gram, psd_check
from .mobius import Generator, Mobius, mobius_apply, mobius_sphero, word_matrix
from .relabel import TailAffineBijection
from .serialization import from_json, to_json
from .sphero import (
    Spheromorphism,
    apply_vertex,
    compose,
    compose_all,
    equals,
    identity,
    invert,
    is_identity,
    perfect_forest,
    refine,
)
from .sphero_builders import (
    random_address,
    random_automorphism,
    random_cutset,
    random_sphero,
    random_stabilizer_element,
    random_subtree,
    region_image,
    separator,
    transport_region,
)
from .thompson import boundary_agrees, random_thompson, thompson_apply, thompson_compose, thompson_sphero
from .tree_core import ROOT, FiniteSubtree, format_address, span

Counterexample = Optional[dict]


# ==================== 配置与报告 ====================

class SuiteConfig(BaseModel):
    """套件运行参数，缺省值取自 config.suite"""

    seed: int = Field(default_factory=lambda: config.suite.suite_seed)
    trials: int = Field(default_factory=lambda: config.suite.suite_trials)
    max_cuts: int = Field(default_factory=lambda: config.suite.suite_max_cuts)
    max_subtree_size: int = Field(default_factory=lambda: config.suite.suite_max_subtree_size)
    max_depth: int = Field(default_factory=lambda: config.suite.suite_max_depth)
    rank_tol: Optional[float] = None
    psd_tol: Optional[float] = None
    factorization_tol: Optional[float] = None
    only: Optional[List[str]] = None

    @field_validator("trials", "max_cuts", "max_subtree_size", "max_depth")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    @field_validator("rank_tol", "psd_tol", "factorization_tol")
    @classmethod
    def _positive_tol(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and v <= 0:
            raise ValueError(f"tolerance must be > 0, got {v}")
        return v

    @field_validator("only")
    @classmethod
    def _known(cls, names: Optional[List[str]]) -> Optional[List[str]]:
        if names is not None:
            unknown = [n for n in names if n not in PROPERTIES]
            if unknown:
                raise ValueError(f"unknown properties: {unknown}")
        return names


class PropertyResult(BaseModel):
    name: str
    trials: int
    passed: int
    skipped: int = 0
    ok: bool
    counterexample: Counterexample = None


class SuiteReport(BaseModel):
    seed: int
    results: List[PropertyResult] = []

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> List[PropertyResult]:
        return [r for r in self.results if not r.ok]


class TrialSkipped(Exception):
    """本次随机输入不适用于该性质；计入 skipped，不计入 passed"""


# ==================== 可替换的运算 ====================

# 变异测试用：run_suite(mutate={"diamond": ...}) 替换其中的实现
DEFAULT_OPS: Dict[str, Callable] = {
    "compose": compose,
    "invert": invert,
    "perfect_forest": perfect_forest,
    "diamond": diamond,
    "product_via_recoloring": product_via_recoloring,
    "interval_to_region": interval_to_region,
    "region_to_intervals": region_to_intervals,
    "mobius_sphero": mobius_sphero,
    "thompson_sphero": thompson_sphero,
}

PropertyFn = Callable[[random.Random, SuiteConfig, Mapping[str, Callable]], Counterexample]

# name -> (函数, 相对于 trials 的比例)
PROPERTIES: Dict[str, Tuple[PropertyFn, float]] = {}


def register(name: str, weight: float = 1.0):
    """注册一条性质；weight 缩放该性质的试验次数"""
    def wrap(fn: PropertyFn) -> PropertyFn:
        PROPERTIES[name] = (fn, weight)
        return fn
    return wrap


# ==================== 随机输入 ====================

def _seed(rng: random.Random) -> int:
    return rng.randrange(2 ** 31)


def _sphero(rng: random.Random, cfg: SuiteConfig) -> Spheromorphism:
    return random_sphero(_seed(rng), cfg.max_cuts, cfg.max_depth)


def _subtree(rng: random.Random, cfg: SuiteConfig) -> FiniteSubtree:
    return random_subtree(rng, cfg.max_subtree_size, cfg.max_depth)


def _rational(rng: random.Random) -> Fraction:
    """短连分数给出的有理数，部分商有界，区域的割边数随之有界"""
    head = rng.randint(-4, 4)
    tail = [rng.randint(1, 4) for _ in range(rng.randint(0, 3))]
    return cf_value(CFWord(terms=(head, *tail)))


def _interval(rng: random.Random) -> Tuple[ExtRational, ExtRational]:
    while True:
        u, v = sorted([_rational(rng), _rational(rng)])
        if u == v:
            continue
        if rng.random() < 0.15:
            u = NEG_INF
        elif rng.random() < 0.15:
            v = INF
        return u, v


def _surd(rng: random.Random) -> QuadraticIrrational:
    d = rng.choice([2, 3, 5, 6, 7, 10, 11, 13])
    b = rng.choice([-2, -1, 1, 2])
    return QuadraticIrrational.make(rng.randint(-6, 6), b, rng.randint(1, 4), d)


def _mobius(rng: random.Random) -> Mobius:
    word = [rng.choice(list(Generator)) for _ in range(rng.randint(0, 6))]
    return word_matrix(word)


def _region(rng: random.Random, cfg: SuiteConfig) -> BoundaryRegion:
    """非平凡的随机区域"""
    while True:
        cuts = random_cutset(rng, rng.randint(1, cfg.max_cuts), cfg.max_depth)
        selected = [a for a in apexes(cuts) if rng.random() < 0.5]
        r = region_canonical(BoundaryRegion(cuts=cuts, selected=frozenset(selected)))
        if not r.is_trivial():
            return r


def _bijection(rng: random.Random, domain_excluded: List[int], image_excluded: List[int]) -> TailAffineBijection:
    """保序双射后再打乱若干小标签"""
    base = TailAffineBijection.order_preserving(domain_excluded, image_excluded)
    bound = max(image_excluded, default=0) + 5
    labels = [k for k in range(1, bound) if k not in image_excluded]
    shuffled = labels[:]
    rng.shuffle(shuffled)
    perm = TailAffineBijection.make(dict(zip(labels, shuffled)), bound, 0)
    return perm.compose(base)


# ==================== 球同构 ====================

@register("group_laws", weight=2.0)
def _group_laws(rng, cfg, ops) -> Counterexample:
    f, g, h = _sphero(rng, cfg), _sphero(rng, cfg), _sphero(rng, cfg)
    comp, inv = ops["compose"], ops["invert"]
    checks = {
        "associativity": equals(comp(comp(f, g), h), comp(f, comp(g, h))),
        "left_identity": equals(comp(identity(), f), f),
        "right_identity": equals(comp(f, identity()), f),
        "inverse": is_identity(comp(f, inv(f))) and is_identity(comp(inv(f), f)),
    }
    failed = [k for k, v in checks.items() if not v]
    if failed:
        return {"failed": failed, "f": to_json(f), "g": to_json(g), "h": to_json(h)}
    return None


@register("perfect_forest_refinement")
def _perfect_forest_refinement(rng, cfg, ops) -> Counterexample:
    g = _sphero(rng, cfg)
    extra = random_cutset(rng, rng.randint(1, 3), cfg.max_depth) - g.source_cuts
    g2 = refine(g, extra)
    pf1, pf2 = ops["perfect_forest"](g), ops["perfect_forest"](g2)
    if (pf1.source_cuts, pf1.target_cuts) != (pf2.source_cuts, pf2.target_cuts) or not equals(g, g2):
        return {"g": to_json(g), "extra": [format_address(e) for e in sorted(extra)]}
    return None


@register("relabel_laws")
def _relabel_laws(rng, cfg, ops) -> Counterexample:
    pool = list(range(1, 7))
    s = rng.sample(pool, rng.randint(0, 2))
    t = rng.sample(pool, rng.randint(0, 2))
    u = rng.sample(pool, rng.randint(0, 2))
    f, g = _bijection(rng, t, u), _bijection(rng, s, t)
    fg = f.compose(g)
    pointwise = all(fg.apply(k) == f.apply(g.apply(k)) for k in range(1, 30) if k not in s)
    inverse = f.invert().compose(f) == TailAffineBijection.identity_excluding(t)
    anti = fg.invert() == g.invert().compose(f.invert())
    if not (pointwise and inverse and anti):
        return {"f": f.to_json(), "g": g.to_json(), "pointwise": pointwise, "inverse": inverse, "anti": anti}
    return None


@register("transport_region", weight=0.5)
def _transport_region(rng, cfg, ops) -> Counterexample:
    r1, r2 = _region(rng, cfg), _region(rng, cfg)
    g = transport_region(r1, r2)
    if region_image(g, r1) != r2:
        return {"r1": to_json(r1), "r2": to_json(r2), "g": to_json(g)}
    return None


@register("skeleton_orbit")
def _skeleton_orbit(rng, cfg, ops) -> Counterexample:
    a = random_automorphism(_seed(rng))
    cuts = random_cutset(rng, rng.randint(1, cfg.max_cuts), cfg.max_depth)
    moved = set()
    for e in cuts:
        x, y = apply_vertex(a, e[:-1]), apply_vertex(a, e)
        moved.add(x if len(x) > len(y) else y)
    if not skeleton_equivalent(skeleton(cuts), skeleton(frozenset(moved))):
        return {"a": to_json(a), "cuts": [format_address(e) for e in sorted(cuts)]}
    return None


# ==================== 双树 ====================

@register("bitree_double_coset")
def _bitree_double_coset(rng, cfg, ops) -> Counterexample:
    g = _sphero(rng, cfg)
    a, b = random_automorphism(_seed(rng)), random_automorphism(_seed(rng))
    comp = ops["compose"]
    if not equivalent(bitree_of(comp(a, comp(g, b))), bitree_of(g)):
        return {"g": to_json(g), "a": to_json(a), "b": to_json(b)}
    return None


@register("ij_bitree_stabilizer")
def _ij_bitree_stabilizer(rng, cfg, ops) -> Counterexample:
    g = _sphero(rng, cfg)
    I, J = _subtree(rng, cfg), _subtree(rng, cfg)
    k1, k2 = random_stabilizer_element(I, _seed(rng)), random_stabilizer_element(J, _seed(rng))
    comp = ops["compose"]
    if not equivalent(ij_bitree_of(comp(k1, comp(g, k2)), I, J), ij_bitree_of(g, I, J)):
        return {"g": to_json(g), "I": to_json(I), "J": to_json(J), "k1": to_json(k1), "k2": to_json(k2)}
    return None


def _partner(rng: random.Random, cfg: SuiteConfig, g: Spheromorphism) -> Spheromorphism:
    """一半概率取 g⁻¹·a（a 为随机自同构），它的目标割边恰为 g 的源割边"""
    if rng.random() < 0.5:
        return compose(invert(g), random_automorphism(_seed(rng)))
    return _sphero(rng, cfg)


def _middle(rng: random.Random, cfg: SuiteConfig, g1: Spheromorphism, g2: Spheromorphism) -> FiniteSubtree:
    """
    ⋄-乘积中间的 J₂

    一半概率取 g1 源割边与 g2 目标割边的端点张成的子树，J₂ 上因此带有蓝、红边
    """
    if rng.random() < 0.5:
        points = []
        for e in perfect_forest(g1).source_cuts | perfect_forest(g2).target_cuts:
            points.extend([e, e[:-1]])
        if points:
            return span(points)
    return _subtree(rng, cfg)


@register("diamond_associativity")
def _diamond_associativity(rng, cfg, ops) -> Counterexample:
    g1 = _sphero(rng, cfg)
    g2 = _partner(rng, cfg, g1)
    g3 = _partner(rng, cfg, g2)
    gs = [g1, g2, g3]
    js = [_subtree(rng, cfg), _middle(rng, cfg, g1, g2), _middle(rng, cfg, g2, g3), _subtree(rng, cfg)]
    d1, d2, d3 = (ij_bitree_of(g, js[i], js[i + 1]) for i, g in enumerate(gs))
    dm = ops["diamond"]
    if not equivalent(dm(dm(d1, d2), d3), dm(d1, dm(d2, d3))):
        return {"J": [to_json(j) for j in js], "g": [to_json(g) for g in gs]}
    return None


@register("diamond_generic_product")
def _diamond_generic_product(rng, cfg, ops) -> Counterexample:
    """分离 g1 与 g2 的支撑后，乘积的双树等于 ⋄-乘积"""
    g1 = _sphero(rng, cfg)
    g2 = _partner(rng, cfg, g1)
    j1, j2, j3 = _subtree(rng, cfg), _middle(rng, cfg, g1, g2), _subtree(rng, cfg)
    delta, gamma = ij_bitree_of(g1, j1, j2), ij_bitree_of(g2, j2, j3)
    A = source_support(g1, delta.vertices, j2)
    B = target_support(g2, gamma.vertices, j2)
    h = separator(j2, A, B, _seed(rng))
    comp = ops["compose"]
    product = ij_bitree_of(comp(g1, comp(h, g2)), j1, j3)
    if not equivalent(product, ops["diamond"](delta, gamma)):
        return {
            "J1": to_json(j1), "J2": to_json(j2), "J3": to_json(j3),
            "g1": to_json(g1), "g2": to_json(g2), "h": to_json(h),
        }
    return None


@register("diamond_coset_invariance")
def _diamond_coset_invariance(rng, cfg, ops) -> Counterexample:
    """g1、g2 换成同一双陪集中的元素，⋄-乘积不变"""
    g1 = _sphero(rng, cfg)
    g2 = _partner(rng, cfg, g1)
    j1, j2, j3 = _subtree(rng, cfg), _middle(rng, cfg, g1, g2), _subtree(rng, cfg)
    ks = [random_stabilizer_element(j, _seed(rng)) for j in (j1, j2, j2, j3)]
    g1b = compose_all(ks[0], g1, ks[1])
    g2b = compose_all(ks[2], g2, ks[3])
    dm = ops["diamond"]
    before = dm(ij_bitree_of(g1, j1, j2), ij_bitree_of(g2, j2, j3))
    after = dm(ij_bitree_of(g1b, j1, j2), ij_bitree_of(g2b, j2, j3))
    if not equivalent(before, after):
        return {
            "J1": to_json(j1), "J2": to_json(j2), "J3": to_json(j3),
            "g1": to_json(g1), "g2": to_json(g2), "k": [to_json(k) for k in ks],
        }
    return None


@register("recoloring_product")
def _recoloring_product(rng, cfg, ops) -> Counterexample:
    g1 = _sphero(rng, cfg)
    g2 = _partner(rng, cfg, g1)
    j1, j2, j3 = _subtree(rng, cfg), _middle(rng, cfg, g1, g2), _subtree(rng, cfg)
    delta, gamma = ij_bitree_of(g1, j1, j2), ij_bitree_of(g2, j2, j3)
    product = ops["product_via_recoloring"](delta, gamma, recoloring_link(g2, gamma))
    if not equivalent(product, ij_bitree_of(ops["compose"](g1, g2), j1, j3)):
        return {"J1": to_json(j1), "J2": to_json(j2), "J3": to_json(j3), "g1": to_json(g1), "g2": to_json(g2)}
    return None


@register("realize_roundtrip")
def _realize_roundtrip(rng, cfg, ops) -> Counterexample:
    """独立生成的 ({ε},{ε})-双树，以及从随机球同构画出的 (I,J)-双树，实现后再画回来不变"""
    root = FiniteSubtree.of(ROOT)
    generated = random_bitree(_seed(rng), max_blue=cfg.max_cuts)
    if not equivalent(ij_bitree_of(realize(generated), root, root), generated):
        return {"bitree": to_json(generated)}
    I, J = _subtree(rng, cfg), _subtree(rng, cfg)
    g = _sphero(rng, cfg)
    bt = ij_bitree_of(g, I, J)
    if not equivalent(ij_bitree_of(realize(bt), I, J), bt):
        return {"g": to_json(g), "I": to_json(I), "J": to_json(J), "bitree": to_json(bt)}
    return None


@register("spherical_function")
def _spherical_function(rng, cfg, ops) -> Counterexample:
    g = _sphero(rng, cfg)
    a, b = random_automorphism(_seed(rng)), random_automorphism(_seed(rng))
    nu = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    comp = ops["compose"]
    if spherical_value(comp(a, comp(g, b)), nu) != spherical_value(g, nu) or spherical_value(a, nu) != 1:
        return {"g": to_json(g), "a": to_json(a), "b": to_json(b), "nu": str(nu)}
    return None


# ==================== 连分数与 Thompson ====================

@register("interval_roundtrip", weight=2.0)
def _interval_roundtrip(rng, cfg, ops) -> Counterexample:
    u, v = _interval(rng)
    back = ops["region_to_intervals"](ops["interval_to_region"](u, v))
    if back != [(u, v)]:
        return {"interval": [format_rational(u), format_rational(v)],
                "intervals": [[format_rational(a), format_rational(b)] for a, b in back]}
    return None


@register("region_roundtrip")
def _region_roundtrip(rng, cfg, ops) -> Counterexample:
    r = intervals_to_region([_interval(rng) for _ in range(rng.randint(1, 3))])
    back = intervals_to_region(ops["region_to_intervals"](r))
    if back != r:
        return {"region": to_json(r), "back": to_json(back)}
    return None


@register("region_membership", weight=0.5)
def _region_membership(rng, cfg, ops) -> Counterexample:
    """一个二次无理数对 20 个随机区间的归属"""
    x = _surd(rng)
    for _ in range(20):
        u, v = _interval(rng)
        r = ops["interval_to_region"](u, v)
        depth = config.cf.cf_oracle_depth
        status = region_member(r, xi_of_point(x, depth))
        while status == "undecided":
            depth *= 2
            status = region_member(r, xi_of_point(x, depth))
        expected = x.compare(u) > 0 and x.compare(v) < 0
        if (status == "inside") != expected:
            return {"interval": [format_rational(u), format_rational(v)], "x": to_json(x), "status": status}
    return None


@register("mobius_homomorphism", weight=0.5)
def _mobius_homomorphism(rng, cfg, ops) -> Counterexample:
    m, n = _mobius(rng), _mobius(rng)
    ms = ops["mobius_sphero"]
    if not equals(ms(m @ n), ops["compose"](ms(m), ms(n))):
        return {"m": to_json(m), "n": to_json(n)}
    return None


def _agrees(g: Spheromorphism, x: QuadraticIrrational, image: QuadraticIrrational) -> bool:
    return boundary_agrees(g, x, image, config.cf.cf_oracle_depth)


@register("mobius_boundary")
def _mobius_boundary(rng, cfg, ops) -> Counterexample:
    m, x = _mobius(rng), _surd(rng)
    if not _agrees(ops["mobius_sphero"](m), x, mobius_apply(m, x)):
        return {"m": to_json(m), "x": to_json(x)}
    return None


@register("thompson_order3", weight=0.01)
def _thompson_order3(rng, cfg, ops) -> Counterexample:
    g = ops["thompson_sphero"](order3_rotation())
    if is_identity(g) or not is_identity(compose_all(g, g, g)):
        return {"g": to_json(g)}
    return None


@register("thompson_homomorphism", weight=0.3)
def _thompson_homomorphism(rng, cfg, ops) -> Counterexample:
    t1, t2 = random_thompson(rng), random_thompson(rng)
    ts = ops["thompson_sphero"]
    if not equals(ts(thompson_compose(t1, t2)), ops["compose"](ts(t1), ts(t2))):
        return {"t1": to_json(t1), "t2": to_json(t2)}
    return None


@register("thompson_boundary", weight=0.5)
def _thompson_boundary(rng, cfg, ops) -> Counterexample:
    t, x = random_thompson(rng), _surd(rng)
    if not _agrees(ops["thompson_sphero"](t), x, thompson_apply(t, x)):
        return {"t": to_json(t), "x": to_json(x)}
    return None


@register("cf_tail_invariance")
def _cf_tail_invariance(rng, cfg, ops) -> Counterexample:
    m, x = _mobius(rng), _surd(rng)
    if not tails_agree(x, mobius_apply(m, x), config.cf.cf_tail_depth, config.cf.cf_tail_max_shift):
        return {"m": to_json(m), "x": to_json(x)}
    return None


# ==================== 核函数 ====================

_LAMBDAS = [-0.9, -0.6, -0.3, 0.2, 0.5, 0.8, 0.95]
_PSD_LAMBDAS = [-0.9, -0.5, 0.0, 0.5, 0.9]


@register("gram_psd", weight=0.3)
def _gram_psd(rng, cfg, ops) -> Counterexample:
    lam = rng.choice(_PSD_LAMBDAS + [-1.0, 1.0])
    vertices = set()
    while len(vertices) < 40:
        vertices.add(random_address(rng, max_depth=6, max_label=4))
    ordered = tuple(sorted(vertices))
    tol = cfg.psd_tol or config.numerics.psd_tol
    if not psd_check(gram(GramSpec(lam=lam, vertices=ordered)), tol):
        return {"lambda": lam, "vertices": [format_address(v) for v in ordered]}
    return None


def _multi_piece(rng: random.Random, cfg: SuiteConfig) -> Spheromorphism:
    """完美森林有 2 到 4 块的随机球同构"""
    for _ in range(20):
        g = _sphero(rng, cfg)
        if 2 <= perfect_forest(g).piece_count() <= 4:
            return g
    raise TrialSkipped("no spheromorphism with 2 to 4 pieces in 20 draws")


@register("block_rank", weight=0.2)
def _block_rank(rng, cfg, ops) -> Counterexample:
    g = _multi_piece(rng, cfg)
    lam = rng.choice(_LAMBDAS)
    report = block_rank_check(g, lam, n=20, tol=cfg.rank_tol, seed=_seed(rng))
    if not report.ok:
        return {"g": to_json(g), "lambda": lam, "report": report.model_dump()}
    return None


@register("nearest_point_factorization", weight=0.2)
def _nearest_point_factorization(rng, cfg, ops) -> Counterexample:
    g = _multi_piece(rng, cfg)
    lam = rng.choice(_LAMBDAS)
    err = factorization_check(g, lam, seed=_seed(rng))
    tol = cfg.factorization_tol or config.numerics.factorization_tol
    if not err <= tol:
        return {"g": to_json(g), "lambda": lam, "error": err}
    return None


# ==================== 序列化 ====================

@register("json_roundtrip")
def _json_roundtrip(rng, cfg, ops) -> Counterexample:
    g = _sphero(rng, cfg)
    bt = ij_bitree_of(g, _subtree(rng, cfg), _subtree(rng, cfg))
    if not equals(from_json(to_json(g)), g) or from_json(to_json(bt)) != bt:
        return {"g": to_json(g)}
    return None


# ==================== 运行 ====================

def trials_for(name: str, cfg: SuiteConfig) -> int:
    _, weight = PROPERTIES[name]
    return max(1, math.ceil(cfg.trials * weight))


def run_property(name: str, cfg: SuiteConfig, seed: int, ops: Mapping[str, Callable]) -> PropertyResult:
    """运行单条性质，遇到第一个反例即停"""
    fn, _ = PROPERTIES[name]
    rng = random.Random(seed)
    n = trials_for(name, cfg)
    skipped = 0
    for i in range(n):
        try:
            cex = fn(rng, cfg, ops)
        except TrialSkipped as e:
            logger.debug(f"{name}: trial {i} skipped: {e}")
            skipped += 1
            continue
        except Exception as e:
            logger.error(f"{name}: trial {i} raised {type(e).__name__}: {e}")
            cex = {"error": f"{type(e).__name__}: {e}", "traceback": traceback.format_exc(limit=3)}
        if cex is not None:
            logger.warning(f"{name}: counterexample at trial {i}")
            return PropertyResult(name=name, trials=i + 1, passed=i - skipped, skipped=skipped, ok=False,
                                  counterexample={"trial": i, **cex})
    if skipped:
        logger.warning(f"{name}: {skipped} of {n} trials skipped")
    return PropertyResult(name=name, trials=n, passed=n - skipped, skipped=skipped, ok=True)


def run_suite(cfg: Optional[SuiteConfig] = None, mutate: Optional[Mapping[str, Callable]] = None,
              show_progress: bool = True) -> SuiteReport:
    """
    运行全部（或 cfg.only 指定的）性质

    Args:
        cfg: 运行参数
        mutate: 替换 DEFAULT_OPS 中的部分运算，用于检验套件能发现错误
        show_progress: 是否显示 tqdm 进度条

    Returns:
        SuiteReport，ok 为 False 时含反例
    """
    cfg = cfg or SuiteConfig()
    ops = {**DEFAULT_OPS, **(mutate or {})}
    names = list(PROPERTIES)
    selected = [n for n in names if cfg.only is None or n in cfg.only]
    logger.info(f"Running {len(selected)} properties with seed {cfg.seed}, {cfg.trials} trials")

    report = SuiteReport(seed=cfg.seed)
    for name in tqdm(selected, desc="properties", disable=not show_progress):
        # 种子只依赖性质在注册表中的位置，单独运行某条性质时结果不变
        seed = cfg.seed * 1000 + names.index(name)
        result = run_property(name, cfg, seed, ops)
        report.results.append(result)
        logger.info(f"{name}: {'ok' if result.ok else 'FAILED'} ({result.passed}/{result.trials}, {result.skipped} skipped)")

    failed = report.failures()
    if failed:
        logger.warning(f"{len(failed)} properties failed: {[r.name for r in failed]}")
    else:
        logger.success(f"All {len(selected)} properties passed")
    return report
