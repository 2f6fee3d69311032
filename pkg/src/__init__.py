"""
hier_tree：无穷度树上的球同构群 Hier(𝕋)
"""

__version__ = "0.1.0"

from .config import config
from .errors import (
    BiTreeError,
    DomainError,
    HierTreeError,
    InvalidAddressError,
    InvalidSpheromorphismError,
    KernelError,
    NeedMoreDigits,
    SerializationError,
    ThompsonError,
)
from .tree_core import FiniteSubtree, parse_address, format_address
from .relabel import TailAffineBijection
from .forest import BoundaryRegion, ColoredFiniteTree, Component
from .sphero import NeighborRule, PieceMap, Spheromorphism, compose, invert, perfect_forest, validate
from .bitree import BiTree, bitree_of, ij_bitree_of, diamond, equivalent, realize
from .continued_fraction import CFWord, QuadraticIrrational, interval_to_region, region_to_intervals
from .mobius import Mobius, mobius_sphero
from .thompson import IdealPolygon, ThompsonElement, thompson_sphero
from .suite_runner import SuiteConfig, SuiteReport, run_suite

__all__ = [
    "config",
    "HierTreeError",
    "InvalidAddressError",
    "DomainError",
    "InvalidSpheromorphismError",
    "NeedMoreDigits",
    "BiTreeError",
    "ThompsonError",
    "KernelError",
    "SerializationError",
    "FiniteSubtree",
    "parse_address",
    "format_address",
    "TailAffineBijection",
    "BoundaryRegion",
    "ColoredFiniteTree",
    "Component",
    "NeighborRule",
    "PieceMap",
    "Spheromorphism",
    "compose",
    "invert",
    "perfect_forest",
    "validate",
    "BiTree",
    "bitree_of",
    "ij_bitree_of",
    "diamond",
    "equivalent",
    "realize",
    "CFWord",
    "QuadraticIrrational",
    "interval_to_region",
    "region_to_intervals",
    "Mobius",
    "mobius_sphero",
    "IdealPolygon",
    "ThompsonElement",
    "thompson_sphero",
    "SuiteConfig",
    "SuiteReport",
    "run_suite",
]
