"""Solver for joint RCC8 topology and rectangle-relation direction networks."""

from .algebra import Calculus, Network, Relation, converse, path_consistency, weak_compose
from .boxes import RA, Rectangle
from .interaction import JointNetwork, biclose
from .interval import IA, Interval
from .netfile import parse_network, serialize_network
from .solver import Verdict, bipath_consistency, check_general, decide_dir49, epsilon_solve
from .topology import RCC8

__all__ = [
    "Calculus",
    "Network",
    "Relation",
    "converse",
    "weak_compose",
    "path_consistency",
    "IA",
    "RA",
    "RCC8",
    "Interval",
    "Rectangle",
    "JointNetwork",
    "biclose",
    "bipath_consistency",
    "check_general",
    "decide_dir49",
    "epsilon_solve",
    "Verdict",
    "parse_network",
    "serialize_network",
]
