"""
距离核的有限维数值验证
K_λ(v, w) = λ^{d(v,w)} 的 Gram 矩阵、半正定检查、
球同构的亏量形式及其分块秩与最近点秩一分解
"""

import random
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, ConfigDict, field_validator

from .config import config
from .errors import KernelError
from .forest import CutSet, apex_of, cut_children
from .sphero import Spheromorphism, apply_vertex, ensure_valid, perfect_forest
from .tree_core import Address, address_key, distance, format_address, path


class GramSpec(BaseModel):
    """λ 与有序顶点列表"""
    model_config = ConfigDict(frozen=True)

    lam: float
    vertices: Tuple[Address, ...]

    @field_validator("lam")
    @classmethod
    def _lambda_range(cls, lam: float) -> float:
        if not -1.0 <= lam <= 1.0:
            raise ValueError(f"lambda must lie in [-1, 1], got {lam}")
        return lam

    @field_validator("vertices")
    @classmethod
    def _distinct(cls, vs: Tuple[Address, ...]) -> Tuple[Address, ...]:
        if len(set(vs)) != len(vs):
            raise ValueError("vertices must be pairwise distinct")
        return vs


class BlockRankReport(BaseModel):
    """block_rank_check 的结果"""
    lam: float
    piece_count: int
    block_ranks: Dict[str, int] = {}
    total_rank: int = 0
    max_block_rank: int = 0
    ok: bool = True


# ==================== 矩阵 ====================

def distance_matrix(vertices: Sequence[Address]) -> np.ndarray:
    n = len(vertices)
    d = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            d[i, j] = d[j, i] = distance(vertices[i], vertices[j])
    return d


def _kernel(lam: float, d: np.ndarray) -> np.ndarray:
    # 指数保持为精确整数，只做一次浮点乘方
    return np.power(float(lam), d)


def gram(spec: GramSpec) -> np.ndarray:
    """Gram 矩阵 (λ^{d(v,w)})，对角线为 1"""
    return _kernel(spec.lam, distance_matrix(spec.vertices))


def psd_check(m: np.ndarray, tol: Optional[float] = None) -> bool:
    """
    最小特征值是否 ≥ −tol

    Raises:
        KernelError: 矩阵不对称
    """
    tol = config.numerics.psd_tol if tol is None else tol
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.allclose(m, m.T):
        raise KernelError("psd_check needs a symmetric matrix")
    if m.size == 0:
        return True
    smallest = float(np.linalg.eigvalsh(m)[0])
    logger.debug(f"psd_check: smallest eigenvalue {smallest:.3e}")
    return smallest >= -tol


def defect_form(g: Spheromorphism, lam: float, vertices: Sequence[Address]) -> np.ndarray:
    """
    亏量形式 λ^{d(gv,gw)} − λ^{d(v,w)}

    同一完美森林分块内的两个顶点距离不变，对应元素恰为 0
    """
    if not -1.0 < lam < 1.0:
        raise KernelError(f"defect_form needs |lambda| < 1, got {lam}")
    ensure_valid(g)
    vertices = list(vertices)
    images = [apply_vertex(g, v) for v in vertices]
    return _kernel(lam, distance_matrix(images)) - _kernel(lam, distance_matrix(vertices))


# ==================== 采样 ====================

def sample_piece_vertices(cuts: CutSet, apex: Address, n: int, max_depth: Optional[int] = None,
                          rng: Optional[random.Random] = None) -> List[Address]:
    """
    在 apex 所在分量中随机取 n 个不同顶点

    从 apex 出发向下随机走至多 max_depth 步，子标签取 1..5 且跳过被割掉的子方向；
    先收集约 4n 个候选，再用 rng 从中抽 n 个
    """
    max_depth = config.numerics.max_sample_depth if max_depth is None else max_depth
    rng = rng or random.Random(0)
    pool = {apex}
    attempts = 0
    while len(pool) < 4 * n and attempts < 200 * n:
        attempts += 1
        v = apex
        for _ in range(rng.randint(0, max_depth)):
            labels = [k for k in range(1, 6) if k not in cut_children(v, cuts)]
            v = v + (rng.choice(labels),)
        pool.add(v)
    ordered = sorted(pool, key=address_key)
    if len(ordered) <= n:
        return ordered
    return sorted(rng.sample(ordered, n), key=address_key)


def _piece_samples(g: Spheromorphism, n: int, seed: int) -> Dict[Address, List[Address]]:
    rng = random.Random(seed)
    return {p.source_apex: sample_piece_vertices(g.source_cuts, p.source_apex, n, rng=rng) for p in g.pieces}


def _numerical_rank(block: np.ndarray, tol: float) -> int:
    if block.size == 0:
        return 0
    s = np.linalg.svd(block, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def block_rank_check(g: Spheromorphism, lam: float, n: Optional[int] = None, tol: Optional[float] = None,
                     seed: int = 0) -> BlockRankReport:
    """
    亏量形式在完美森林分块之间的数值秩

    每对不同分块的秩应 ≤ 2（两个秩一形式之差）

    Raises:
        KernelError: λ ∈ {−1, 0, 1}
    """
    if lam in (-1.0, 0.0, 1.0):
        raise KernelError(f"block_rank_check excludes the degenerate lambda {lam}")
    n = config.numerics.samples_per_piece if n is None else n
    tol = config.numerics.rank_tol if tol is None else tol
    pf = perfect_forest(ensure_valid(g))
    samples = _piece_samples(pf, n, seed)
    order = [a for a in samples]
    vertices = [v for a in order for v in samples[a]]
    m = defect_form(pf, lam, vertices)
    offsets, start = {}, 0
    for a in order:
        offsets[a] = (start, start + len(samples[a]))
        start += len(samples[a])

    report = BlockRankReport(lam=lam, piece_count=len(order))
    ranks: Dict[str, int] = {}
    for a in order:
        for b in order:
            if a == b:
                continue
            (i0, i1), (j0, j1) = offsets[a], offsets[b]
            ranks[f"{format_address(a)}|{format_address(b)}"] = _numerical_rank(m[i0:i1, j0:j1], tol)
    total = _numerical_rank(m, tol)
    worst = max(ranks.values(), default=0)
    n_pieces = len(order)
    ok = worst <= 2 and total <= 2 * n_pieces * (n_pieces - 1)
    if not ok:
        logger.warning(f"block_rank_check: block rank {worst}, total {total} for {n_pieces} pieces")
    return report.model_copy(update={"block_ranks": ranks, "total_rank": total, "max_block_rank": worst, "ok": ok})


# ==================== 最近点分解 ====================

def _bridge(cuts: CutSet, a: Address, b: Address) -> Tuple[Address, Address]:
    """从分量 a 到分量 b 的路径上，a 中最后一个顶点与 b 中第一个顶点"""
    route = path(a, b)
    last_a = max(i for i, x in enumerate(route) if apex_of(x, cuts) == a)
    first_b = min(i for i, x in enumerate(route) if apex_of(x, cuts) == b)
    return route[last_a], route[first_b]


def factorization_check(g: Spheromorphism, lam: float, samples: Optional[Dict[Address, List[Address]]] = None,
                        seed: int = 0) -> float:
    """
    每个非对角块与两个秩一矩阵之差的最大逐项误差

    u, v 为两块之间的最近点，u′, v′ 为像分量之间的最近点：
    块 = λ^{d(u′,v′)}·c′·r′ᵀ − λ^{d(u,v)}·c·rᵀ

    Returns:
        最大绝对误差
    """
    pf = perfect_forest(ensure_valid(g))
    samples = samples or _piece_samples(pf, config.numerics.samples_per_piece, seed)
    t = pf.target_cuts
    index = pf.piece_index()
    target_apex = {a: apex_of(index[a].target_apex, t) for a in samples}
    worst = 0.0
    for a in samples:
        for b in samples:
            if a == b:
                continue
            xs, ys = samples[a], samples[b]
            u, v = _bridge(pf.source_cuts, a, b)
            u2, v2 = _bridge(t, target_apex[a], target_apex[b])
            gx = [apply_vertex(pf, x) for x in xs]
            gy = [apply_vertex(pf, y) for y in ys]
            col = _kernel(lam, np.array([distance(x, u) for x in xs]))
            row = _kernel(lam, np.array([distance(y, v) for y in ys]))
            col2 = _kernel(lam, np.array([distance(x, u2) for x in gx]))
            row2 = _kernel(lam, np.array([distance(y, v2) for y in gy]))
            predicted = lam ** distance(u2, v2) * np.outer(col2, row2) - lam ** distance(u, v) * np.outer(col, row)
            actual = defect_form(pf, lam, xs + ys)[: len(xs), len(xs):]
            worst = max(worst, float(np.max(np.abs(actual - predicted))))
    logger.debug(f"factorization_check: max error {worst:.3e}")
    return worst


# ==================== 导出 ====================

def export_matrix_csv(matrix: np.ndarray, labels: Sequence[str], path_out) -> Path:
    """以顶点地址为行列标签写出 CSV"""
    frame = pd.DataFrame(np.asarray(matrix), index=list(labels), columns=list(labels))
    path_out = Path(path_out)
    frame.to_csv(path_out)
    logger.info(f"Matrix {frame.shape} written to {path_out}")
    return path_out
