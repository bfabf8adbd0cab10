"""Interaction between topology and direction constraints.

A topological basic relation restricts the possible relations between the
minimum bounding rectangles, and a rectangle relation restricts the possible
topological relations. Both maps are precomputed tables; on general
relations they act as unions over the contained basics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import Network, Relation, iter_bits
from .boxes import MRCC8_MASKS, RA, Mrcc8Class, product_bits
from .interval import IA
from .topology import RCC8

__all__ = [
    "JointNetwork",
    "induced_era",
    "induced_rcc",
    "induced_era_bits",
    "induced_rcc_bits",
    "restrict_pair",
    "biclose",
    "is_biclosed",
]

_FULL_RA = RA.universe
_SDFEQ = IA.bits_of(("s", "d", "f", "eq"))
_SDFEQ_I = IA.bits_of(("si", "di", "fi", "eq"))


def _ra(*names: str) -> int:
    return RA.bits_of(names)


# topological basic -> RA relation between the bounding rectangles
_ERA_BASIC: dict[str, int] = {
    "EQ": _ra("eq*eq"),
    "NTPP": _ra("d*d"),
    "NTPPi": _ra("di*di"),
    "TPP": product_bits(_SDFEQ, _SDFEQ),
    "TPPi": product_bits(_SDFEQ_I, _SDFEQ_I),
    "DC": _FULL_RA,
    "EC": _FULL_RA & ~MRCC8_MASKS[Mrcc8Class.MDC],
    "PO": _FULL_RA & ~MRCC8_MASKS[Mrcc8Class.MDC] & ~MRCC8_MASKS[Mrcc8Class.MEC],
}
_ERA_TABLE: tuple[int, ...] = tuple(_ERA_BASIC[t] for t in RCC8.basic_names)

_RCC_BY_CLASS: dict[Mrcc8Class, int] = {
    Mrcc8Class.MDC: RCC8.bits_of(("DC",)),
    Mrcc8Class.MEC: RCC8.bits_of(("DC", "EC")),
    Mrcc8Class.MPO: RCC8.bits_of(("DC", "EC", "PO")),
    Mrcc8Class.MTPP: RCC8.bits_of(("DC", "EC", "PO", "TPP")),
    Mrcc8Class.MNTPP: RCC8.bits_of(("DC", "EC", "PO", "TPP", "NTPP")),
    Mrcc8Class.MTPPi: RCC8.bits_of(("DC", "EC", "PO", "TPPi")),
    Mrcc8Class.MNTPPi: RCC8.bits_of(("DC", "EC", "PO", "TPPi", "NTPPi")),
    Mrcc8Class.MEQ: RCC8.bits_of(("DC", "EC", "PO", "EQ", "TPP", "TPPi")),
}
_CLASS_MASKS = tuple((MRCC8_MASKS[c], _RCC_BY_CLASS[c]) for c in Mrcc8Class)


def induced_era_bits(theta: int) -> int:
    if not theta:
        raise ValueError("induced ERA relation of the empty relation")
    out = 0
    for i in iter_bits(theta):
        out |= _ERA_TABLE[i]
    return out


def induced_rcc_bits(delta: int) -> int:
    if not delta:
        raise ValueError("induced RCC8 relation of the empty relation")
    out = 0
    for mask, rcc in _CLASS_MASKS:
        if delta & mask:
            out |= rcc
    return out


def induced_era(theta: Relation) -> Relation:
    """RA relations the bounding rectangles may have under ``theta``."""
    return Relation(RA, induced_era_bits(theta.bits))


def induced_rcc(delta: Relation) -> Relation:
    """RCC8 relations two regions may have when their MBRs satisfy ``delta``."""
    return Relation(RCC8, induced_rcc_bits(delta.bits))


def restrict_pair(theta: Relation, delta: Relation) -> tuple[Relation, Relation]:
    """Mutually restrict a topological and a directional constraint.

    Either result may be empty, which signals joint inconsistency.
    """
    return (
        Relation(RCC8, theta.bits & induced_rcc_bits(delta.bits)),
        Relation(RA, delta.bits & induced_era_bits(theta.bits)),
    )


@dataclass
class JointNetwork:
    """An RCC8 network and an RA network over the same variables."""

    top: Network
    dir: Network

    def __post_init__(self) -> None:
        if self.top.calculus is not RCC8 or self.dir.calculus is not RA:
            raise ValueError("JointNetwork needs an RCC8 and an RA network")
        if self.top.names != self.dir.names:
            raise ValueError("component networks must share their variables")

    @classmethod
    def empty(cls, names: Sequence[str]) -> "JointNetwork":
        return cls(Network(RCC8, names), Network(RA, names))

    @property
    def names(self) -> tuple[str, ...]:
        return self.top.names

    @property
    def n(self) -> int:
        return self.top.n

    def copy(self) -> "JointNetwork":
        return JointNetwork(self.top.copy(), self.dir.copy())

    def is_basic(self) -> bool:
        return self.top.is_basic() and self.dir.is_basic()

    def refines(self, other: "JointNetwork") -> bool:
        return self.top.refines(other.top) and self.dir.refines(other.dir)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JointNetwork):
            return NotImplemented
        return self.top == other.top and self.dir == other.dir


def biclose(net: JointNetwork) -> Optional[JointNetwork]:
    """Restrict every pair by its partner constraint; ``None`` if one empties.

    A single pass reaches the fixpoint because each restriction only removes
    basics that have no partner in the other relation.
    """
    out = net.copy()
    top, dir_ = out.top, out.dir
    n = out.n
    for i in range(n):
        if not top.m[i][i] & RCC8.identity or not dir_.m[i][i] & RA.identity:
            return None
        top.m[i][i] = RCC8.identity
        dir_.m[i][i] = RA.identity
    for i, j in top.pairs():
        theta = top.m[i][j] & RCC8.converse_bits(top.m[j][i])
        delta = dir_.m[i][j] & RA.converse_bits(dir_.m[j][i])
        if not theta or not delta:
            return None
        theta_r = theta & induced_rcc_bits(delta)
        delta_r = delta & induced_era_bits(theta)
        if not theta_r or not delta_r:
            return None
        top.set(i, j, theta_r)
        dir_.set(i, j, delta_r)
    return out


def is_biclosed(net: JointNetwork) -> bool:
    return all(
        induced_rcc_bits(net.dir.m[i][j]) & net.top.m[i][j] == net.top.m[i][j]
        and induced_era_bits(net.top.m[i][j]) & net.dir.m[i][j] == net.dir.m[i][j]
        for i, j in net.top.pairs()
        if net.top.m[i][j] and net.dir.m[i][j]
    )

