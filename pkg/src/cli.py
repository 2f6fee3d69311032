"""
命令行入口 hier-tree
子命令：sphero / bitree / cf / mobius / thompson / kernel / suite / export

对象以 JSON 文件读入（"-" 表示标准输入），--json 时以 JSON 输出。
退出码：0 成功；1 性质失败（反例 JSON 写到标准输出）；2 用法或定义域错误
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import ValidationError

from .bitree import (
    BiTree,
    bitree_of,
    certificate,
    check_bitree,
    diamond,
    equivalent,
    ij_bitree_of,
    realize,
    spherical_value,
)
from .continued_fraction import (
    CFWord,
    Quadrant,
    QuadraticIrrational,
    cf_expand,
    cf_stream,
    format_rational,
    interval_to_region,
    parse_rational,
    parse_surd,
    region_to_intervals,
    xi_address,
    xi_inverse,
    xi_of_point,
)
from .errors import HierTreeError
from .fixtures import e1
from .forest import BoundaryRegion, ColoredFiniteTree
from .kernel_numerics import (
    GramSpec,
    block_rank_check,
    defect_form,
    export_matrix_csv,
    factorization_check,
    gram,
    psd_check,
)
from .logging_setup import setup_logging
from .mobius import mobius_apply, mobius_decompose, mobius_sphero, parse_mobius
from .serialization import dumps, export_dot, from_json, to_json
from .sphero import (
    Spheromorphism,
    apply_vertex,
    compose,
    ensure_valid,
    equals,
    invert,
    perfect_forest,
    validate,
)
from .sphero_builders import random_sphero
from .suite_runner import PROPERTIES, SuiteConfig, run_suite
from .thompson import make_polygon, thompson_apply, thompson_from_polygons, thompson_sphero
from .tree_core import FiniteSubtree, format_address, parse_address

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """参数组合不合法"""


# ==================== 输入输出 ====================

def _load(source: str):
    """从文件或标准输入读 JSON 对象；"e1" 为内置样例"""
    if source == "e1":
        return e1()
    text = sys.stdin.read() if source == "-" else Path(source).read_text(encoding="utf-8")
    return from_json(text)


def _load_as(source: str, kind: type):
    obj = _load(source)
    if not isinstance(obj, kind):
        raise UsageError(f"{source}: expected {kind.__name__}, got {type(obj).__name__}")
    return obj


def _subtree(text: str) -> FiniteSubtree:
    """"eps,1,1.2" 形式的顶点列表"""
    return FiniteSubtree(vertices=frozenset(parse_address(s) for s in text.split(",")))


def _emit(args: argparse.Namespace, obj=None, text: Optional[str] = None, data=None) -> None:
    """--json 时输出 JSON，--dot 时输出 DOT，否则输出文本"""
    if getattr(args, "dot", False) and isinstance(obj, (BiTree, ColoredFiniteTree)):
        print(export_dot(obj), end="")
    elif args.json:
        if obj is not None:
            print(dumps(obj))
        else:
            print(json.dumps(data, ensure_ascii=False, indent=2))
    elif text is not None:
        print(text)
    elif obj is not None:
        print(dumps(obj))
    else:
        print(json.dumps(data, ensure_ascii=False, indent=2))


# ==================== sphero ====================

def cmd_sphero(args: argparse.Namespace) -> int:
    if args.action == "random":
        _emit(args, obj=random_sphero(args.seed, args.max_cuts, args.max_depth))
        return EXIT_OK
    g = _load_as(args.input, Spheromorphism)
    if args.action == "validate":
        report = validate(g)
        _emit(args, text="ok" if report.ok else f"invalid: {report.diagnostic}", data=report.model_dump())
        return EXIT_OK if report.ok else EXIT_FAILURE
    g = ensure_valid(g)
    if args.action == "perfect":
        pf = perfect_forest(g)
        _emit(args, obj=pf)
    elif args.action == "invert":
        _emit(args, obj=invert(g))
    elif args.action == "compose":
        if not args.other:
            raise UsageError("compose needs a second spheromorphism")
        _emit(args, obj=compose(g, ensure_valid(_load_as(args.other, Spheromorphism))))
    elif args.action == "equals":
        if not args.other:
            raise UsageError("equals needs a second spheromorphism")
        same = equals(g, ensure_valid(_load_as(args.other, Spheromorphism)))
        _emit(args, text=str(same).lower(), data={"equal": same})
        return EXIT_OK if same else EXIT_FAILURE
    elif args.action == "apply":
        if not args.vertex:
            raise UsageError("apply needs --vertex")
        w = apply_vertex(g, parse_address(args.vertex))
        _emit(args, text=format_address(w), data={"image": format_address(w)})
    return EXIT_OK


# ==================== bitree ====================

def cmd_bitree(args: argparse.Namespace) -> int:
    if args.action == "of":
        g = ensure_valid(_load_as(args.input, Spheromorphism))
        if args.I or args.J:
            if not (args.I and args.J):
                raise UsageError("anchored bi-trees need both --I and --J")
            bt = ij_bitree_of(g, _subtree(args.I), _subtree(args.J))
        else:
            bt = bitree_of(g)
        _emit(args, obj=bt)
    elif args.action == "diamond":
        if not args.other:
            raise UsageError("diamond needs a second bi-tree")
        _emit(args, obj=diamond(_load_as(args.input, BiTree), _load_as(args.other, BiTree)))
    elif args.action == "realize":
        _emit(args, obj=realize(_load_as(args.input, BiTree)))
    elif args.action == "check":
        problems = check_bitree(_load_as(args.input, BiTree))
        _emit(args, text="ok" if not problems else "\n".join(problems), data={"problems": problems})
        return EXIT_OK if not problems else EXIT_FAILURE
    elif args.action == "equivalent":
        if not args.other:
            raise UsageError("equivalent needs a second bi-tree")
        same = equivalent(_load_as(args.input, BiTree), _load_as(args.other, BiTree))
        _emit(args, text=str(same).lower(), data={"equivalent": same})
        return EXIT_OK if same else EXIT_FAILURE
    elif args.action == "certificate":
        h = certificate(_load_as(args.input, BiTree))
        _emit(args, text=h, data={"certificate": h})
    elif args.action == "spherical":
        g = ensure_valid(_load_as(args.input, Spheromorphism))
        value = spherical_value(g, parse_rational(args.nu))
        _emit(args, text=str(value), data={"nu": args.nu, "value": str(value)})
    return EXIT_OK


# ==================== cf ====================

def cmd_cf(args: argparse.Namespace) -> int:
    action, values = args.action, args.values
    if action == "expand":
        w = cf_expand(parse_rational(values[0]))
        _emit(args, obj=w, text=str(w))
    elif action == "value":
        w = CFWord(terms=tuple(int(v) for v in values))
        _emit(args, text=str(w.value()), data={"value": str(w.value())})
    elif action == "stream":
        w = cf_stream(parse_surd(values[0]), args.depth)
        _emit(args, obj=w, text=str(w))
    elif action == "xi-addr":
        if values and values[0] in {q.value for q in Quadrant}:
            p = xi_address(values[0], [int(v) for v in values[1:]])
        else:
            p = xi_of_point(parse_surd(values[0]), args.depth)
        _emit(args, text=format_address(p), data={"address": format_address(p)})
    elif action == "xi-inv":
        quadrant, digits = xi_inverse(parse_address(values[0]))
        _emit(args, text=f"{quadrant.value} {list(digits)}", data={"quadrant": quadrant.value, "digits": list(digits)})
    elif action == "region":
        if len(values) != 2:
            raise UsageError("region needs two endpoints u v")
        _emit(args, obj=interval_to_region(parse_rational(values[0]), parse_rational(values[1])))
    elif action == "back":
        intervals = region_to_intervals(_load_as(values[0], BoundaryRegion))
        rendered = [[format_rational(u), format_rational(v)] for u, v in intervals]
        _emit(args, text=" ".join(f"({u}, {v})" for u, v in rendered), data={"intervals": rendered})
    return EXIT_OK


def cmd_xi(args: argparse.Namespace) -> int:
    return cmd_cf(argparse.Namespace(**{**vars(args), "action": f"xi-{args.action}"}))


def cmd_interval(args: argparse.Namespace) -> int:
    return cmd_cf(args)


# ==================== mobius ====================

def cmd_mobius(args: argparse.Namespace) -> int:
    m = parse_mobius(args.matrix)
    if args.action == "decompose":
        word = [g.value for g in mobius_decompose(m)]
        _emit(args, text=" ".join(word) or "id", data={"word": word})
    elif args.action == "sphero":
        _emit(args, obj=mobius_sphero(m))
    elif args.action == "apply":
        if not args.point:
            raise UsageError("apply needs --point")
        x = parse_surd(args.point) if "," in args.point or "sqrt" in args.point else parse_rational(args.point)
        y = mobius_apply(m, x)
        text = str(y) if isinstance(y, QuadraticIrrational) else format_rational(y)
        _emit(args, text=text, data={"image": text})
    return EXIT_OK


# ==================== thompson ====================

def _polygon(text: str):
    return make_polygon([parse_rational(s) for s in text.split(",")])


def cmd_thompson(args: argparse.Namespace) -> int:
    t = thompson_from_polygons(_polygon(args.U), _polygon(args.V), args.k)
    if args.action == "polygons":
        _emit(args, obj=t)
    elif args.action == "sphero":
        _emit(args, obj=thompson_sphero(t))
    elif args.action == "eval":
        if not args.point:
            raise UsageError("eval needs --point")
        x = parse_surd(args.point) if "," in args.point or "sqrt" in args.point else parse_rational(args.point)
        y = thompson_apply(t, x)
        text = str(y) if isinstance(y, QuadraticIrrational) else format_rational(y)
        _emit(args, text=text, data={"image": text})
    return EXIT_OK


# ==================== kernel ====================

def cmd_kernel(args: argparse.Namespace) -> int:
    lam = float(args.lam)
    if args.action in ("gram", "psd", "defect"):
        if not args.vertices:
            raise UsageError(f"{args.action} needs --vertices")
        vertices = tuple(parse_address(s) for s in args.vertices.split(","))
        labels = [format_address(v) for v in vertices]
        if args.action == "defect":
            m = defect_form(ensure_valid(_load_as(args.input, Spheromorphism)), lam, vertices)
        else:
            m = gram(GramSpec(lam=lam, vertices=vertices))
        if args.action == "psd":
            ok = psd_check(m, args.tol)
            smallest = float(np.linalg.eigvalsh(m)[0]) if m.size else 0.0
            _emit(args, text=f"{'psd' if ok else 'not psd'} (min eigenvalue {smallest:.3e})",
                  data={"psd": ok, "min_eigenvalue": smallest})
            return EXIT_OK if ok else EXIT_FAILURE
        if args.csv:
            export_matrix_csv(m, labels, args.csv)
        _emit(args, text=np.array2string(m, precision=6), data={"labels": labels, "matrix": m.tolist()})
    elif args.action == "blockrank":
        report = block_rank_check(_load_as(args.input, Spheromorphism), lam, tol=args.tol, seed=args.seed)
        _emit(args, text=f"{'ok' if report.ok else 'FAILED'}: max block rank {report.max_block_rank}, "
                         f"total {report.total_rank}, {report.piece_count} pieces",
              data=report.model_dump())
        return EXIT_OK if report.ok else EXIT_FAILURE
    elif args.action == "factor":
        err = factorization_check(_load_as(args.input, Spheromorphism), lam, seed=args.seed)
        _emit(args, text=f"max error {err:.3e}", data={"max_error": err})
    return EXIT_OK


# ==================== suite ====================

def cmd_suite(args: argparse.Namespace) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.tol is not None:
        overrides.update(rank_tol=args.tol, psd_tol=args.tol, factorization_tol=args.tol)
    if args.only:
        overrides["only"] = args.only.split(",")
    if args.list:
        print("\n".join(PROPERTIES))
        return EXIT_OK
    try:
        cfg = SuiteConfig(**overrides)
    except ValidationError as e:
        raise UsageError(str(e)) from e
    report = run_suite(cfg, show_progress=not args.json)
    if args.json or not report.ok:
        print(report.model_dump_json(indent=2))
    else:
        for r in report.results:
            skipped = f", {r.skipped} skipped" if r.skipped else ""
            print(f"{r.name:32s} ok ({r.trials} trials{skipped})")
    return EXIT_OK if report.ok else EXIT_FAILURE


# ==================== export ====================

def cmd_export(args: argparse.Namespace) -> int:
    obj = _load(args.input)
    if args.dot:
        if not isinstance(obj, (BiTree, ColoredFiniteTree)):
            raise UsageError("--dot needs a BiTree or ColoredFiniteTree")
        print(export_dot(obj), end="")
    else:
        print(json.dumps(to_json(obj), ensure_ascii=False, indent=2))
    return EXIT_OK


# ==================== 参数 ====================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON 输出")
    common.add_argument("--log-level", default=None, help="日志级别（缺省取配置）")

    parser = argparse.ArgumentParser(prog="hier-tree", description="球同构群 Hier(𝕋) 的计算工具")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sphero", parents=[common], help="球同构")
    p.add_argument("action", choices=["validate", "perfect", "invert", "compose", "equals", "apply", "random"])
    p.add_argument("input", nargs="?", default="e1", help="JSON 文件，'-' 为标准输入，'e1' 为内置样例")
    p.add_argument("other", nargs="?")
    p.add_argument("--vertex")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-cuts", type=int, default=4)
    p.add_argument("--max-depth", type=int, default=3)
    p.set_defaults(func=cmd_sphero)

    p = sub.add_parser("bitree", parents=[common], help="双树")
    p.add_argument("action", choices=["of", "diamond", "realize", "check", "equivalent", "certificate", "spherical"])
    p.add_argument("input", nargs="?", default="e1")
    p.add_argument("other", nargs="?")
    p.add_argument("--I", help="左锚点子树，如 eps,1")
    p.add_argument("--J", help="右锚点子树")
    p.add_argument("--nu", default="2")
    p.add_argument("--dot", action="store_true", help="DOT 输出")
    p.set_defaults(func=cmd_bitree)

    p = sub.add_parser("cf", parents=[common], help="连分数与 Ξ")
    p.add_argument("action", choices=["expand", "value", "stream", "xi-addr", "xi-inv", "region", "back"])
    p.add_argument("values", nargs="+")
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("xi", parents=[common], help="Ξ 地址（同 cf xi-addr / xi-inv）")
    p.add_argument("action", choices=["addr", "inv"])
    p.add_argument("values", nargs="+", help="象限与数字、二次无理数或顶点地址")
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("interval", parents=[common], help="区间与边界区域互转（同 cf region / back）")
    p.add_argument("action", choices=["region", "back"])
    p.add_argument("values", nargs="+", help="端点 u v，或区域 JSON 文件")
    p.set_defaults(func=cmd_interval)

    p = sub.add_parser("mobius", parents=[common], help="PGL₂(ℤ) 矩阵")
    p.add_argument("action", choices=["decompose", "sphero", "apply"])
    p.add_argument("matrix", help="a,b,c,d 或 S / T / T^-1")
    p.add_argument("--point")
    p.set_defaults(func=cmd_mobius)

    p = sub.add_parser("thompson", parents=[common], help="Thompson 群元素")
    p.add_argument("action", choices=["polygons", "sphero", "eval"])
    p.add_argument("--U", required=True, help="尖点列表，如 0,1,inf")
    p.add_argument("--V", required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--point")
    p.set_defaults(func=cmd_thompson)

    p = sub.add_parser("kernel", parents=[common], help="距离核数值检查")
    p.add_argument("action", choices=["gram", "psd", "defect", "blockrank", "factor"])
    p.add_argument("input", nargs="?", default="e1")
    p.add_argument("--lam", required=True)
    p.add_argument("--vertices")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", help="把矩阵写成 CSV")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("suite", parents=[common], help="运行性质测试套件")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--only", help="逗号分隔的性质名")
    p.add_argument("--list", action="store_true", help="列出全部性质")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("export", parents=[common], help="JSON / DOT 导出")
    p.add_argument("input")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    setup_logging(args.log_level)
    try:
        return args.func(args)
    except (UsageError, HierTreeError, ValidationError, OSError, ValueError) as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
