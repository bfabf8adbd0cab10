"""Rectangle Algebra: products of interval relations on the two axes.

Basic relation ``x*y`` has index ``13*x + y``. Because the IA converse maps
index ``i`` to ``12 - i``, the RA converse maps ``k`` to ``168 - k`` and is a
plain bit reversal of the 169-bit set.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .algebra import Calculus, Network, Relation, iter_bits
from .interval import (
    IA,
    IA_BASICS,
    IA7_ATOM_BITS,
    Interval,
    NotBasicError,
    canonical_solution,
    coarsen_bits,
    ia_relation_of,
)

__all__ = [
    "Rectangle",
    "RA",
    "RA_BASICS",
    "Mrcc8Class",
    "ra_index",
    "ra_name",
    "ra_relation_of",
    "ra_compose",
    "product_bits",
    "x_projection",
    "y_projection",
    "is_product",
    "mrcc8_class",
    "MRCC8_MASKS",
    "cardinal",
    "dir49_generalize",
    "dir49_generalize_bits",
    "is_dir49",
    "DIR49_ATOMS",
    "axis_networks",
    "rectangle_solution",
    "network_from_rectangles",
]

_ROW = (1 << 13) - 1
_FULL = (1 << 169) - 1

RA_BASICS: tuple[str, ...] = tuple(f"{a}*{b}" for a in IA_BASICS for b in IA_BASICS)
_IA_IDX = {t: i for i, t in enumerate(IA_BASICS)}


def ra_index(x: str, y: str) -> int:
    return 13 * _IA_IDX[x] + _IA_IDX[y]


def ra_name(k: int) -> str:
    return RA_BASICS[k]


@dataclass(frozen=True, order=True)
class Rectangle:
    """Axis-aligned box given by its x- and y-projections."""

    ix: Interval
    iy: Interval

    @classmethod
    def of(cls, x0, x1, y0, y1) -> "Rectangle":
        return cls(Interval(x0, x1), Interval(y0, y1))

    @property
    def x0(self):
        return self.ix.lo

    @property
    def x1(self):
        return self.ix.hi

    @property
    def y0(self):
        return self.iy.lo

    @property
    def y1(self):
        return self.iy.hi

    def __repr__(self) -> str:
        return f"Rectangle([{self.x0}, {self.x1}] x [{self.y0}, {self.y1}])"


def product_bits(xbits: int, ybits: int) -> int:
    """The RA relation ``X (x) Y`` for IA bitsets X and Y."""
    out = 0
    for a in iter_bits(xbits):
        out |= ybits << (13 * a)
    return out


def _rows(bits: int) -> list[tuple[int, int]]:
    """Decompose an RA bitset into (x basic, y bitset) rows."""
    rows = []
    a = 0
    while bits:
        row = bits & _ROW
        if row:
            rows.append((a, row))
        bits >>= 13
        a += 1
    return rows


def x_projection(bits: int) -> int:
    out = 0
    for a, _ in _rows(bits):
        out |= 1 << a
    return out


def y_projection(bits: int) -> int:
    out = 0
    for _, row in _rows(bits):
        out |= row
    return out


def is_product(bits: int) -> bool:
    return bits == product_bits(x_projection(bits), y_projection(bits))


class _ProductCalculus(Calculus):
    """RA with row-decomposed composition and bit-reversal converse."""

    _CACHE_LIMIT = 200_000

    def __init__(self) -> None:
        table = [
            [product_bits(IA.compose_basic(a, c), IA.compose_basic(b, d)) for c in range(13) for d in range(13)]
            for a in range(13)
            for b in range(13)
        ]
        super().__init__("RA", RA_BASICS, [168 - k for k in range(169)], table, 1 << (13 * 6 + 6))
        self._cache: dict[tuple[int, int], int] = {}

    def converse_bits(self, bits: int) -> int:
        return int(format(bits, "0169b")[::-1], 2)

    def compose_bits(self, r1: int, r2: int) -> int:
        if not r1 or not r2:
            return 0
        key = (r1, r2)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        ia = IA.compose_bits
        out = 0
        rows2 = _rows(r2)
        for a, ya in _rows(r1):
            for c, zc in rows2:
                out |= product_bits(IA.compose_basic(a, c), ia(ya, zc))
                if out == _FULL:
                    break
        if len(self._cache) > self._CACHE_LIMIT:
            self._cache.clear()
        self._cache[key] = out
        return out


RA: Calculus = _ProductCalculus()


def ra_relation_of(r1: Rectangle, r2: Rectangle) -> str:
    """``x*y`` basic relation between two rectangles."""
    return f"{ia_relation_of(r1.ix, r2.ix)}*{ia_relation_of(r1.iy, r2.iy)}"


def ra_compose(r1: Relation, r2: Relation) -> Relation:
    return Relation(RA, RA.compose_bits(r1.bits, r2.bits))


# -- MRCC8 -----------------------------------------------------------------


class Mrcc8Class(Enum):
    MDC = "MDC"
    MEC = "MEC"
    MPO = "MPO"
    MEQ = "MEQ"
    MTPP = "MTPP"
    MNTPP = "MNTPP"
    MTPPi = "MTPPi"
    MNTPPi = "MNTPPi"


_SDFEQ = frozenset(("s", "d", "f", "eq"))
_SDFEQ_I = frozenset(("si", "di", "fi", "eq"))


def _classify(x: str, y: str) -> Mrcc8Class:
    if x == "eq" and y == "eq":
        return Mrcc8Class.MEQ
    if x == "d" and y == "d":
        return Mrcc8Class.MNTPP
    if x == "di" and y == "di":
        return Mrcc8Class.MNTPPi
    if x in _SDFEQ and y in _SDFEQ:
        return Mrcc8Class.MTPP
    if x in _SDFEQ_I and y in _SDFEQ_I:
        return Mrcc8Class.MTPPi
    if x in ("b", "bi") or y in ("b", "bi"):
        return Mrcc8Class.MDC
    if x in ("m", "mi") or y in ("m", "mi"):
        return Mrcc8Class.MEC
    return Mrcc8Class.MPO


_CLASS_OF: tuple[Mrcc8Class, ...] = tuple(_classify(a, b) for a in IA_BASICS for b in IA_BASICS)
MRCC8_MASKS: dict[Mrcc8Class, int] = {c: 0 for c in Mrcc8Class}
for _k, _c in enumerate(_CLASS_OF):
    MRCC8_MASKS[_c] |= 1 << _k


def mrcc8_class(basic: str | int) -> Mrcc8Class:
    """MRCC8 class of an RA basic given as ``"x*y"`` or as an index."""
    if isinstance(basic, str):
        x, _, y = basic.partition("*")
        return _CLASS_OF[ra_index(x, y)]
    return _CLASS_OF[basic]


# -- cardinal directions and DIR49 ---------------------------------------

_B, _BI = 1 << _IA_IDX["b"], 1 << _IA_IDX["bi"]


def cardinal(name: str) -> Relation:
    """West, east, south or north as a union of RA basics."""
    table = {
        "W": product_bits(_B, IA.universe),
        "E": product_bits(_BI, IA.universe),
        "S": product_bits(IA.universe, _B),
        "N": product_bits(IA.universe, _BI),
    }
    try:
        return Relation(RA, table[name])
    except KeyError:
        raise ValueError(f"unknown cardinal direction {name!r}") from None


DIR49_ATOMS: tuple[int, ...] = tuple(
    product_bits(xa, ya) for xa in IA7_ATOM_BITS for ya in IA7_ATOM_BITS
)
_BLOCK_OF: tuple[int, ...] = tuple(
    product_bits(coarsen_bits(1 << a), coarsen_bits(1 << b)) for a in range(13) for b in range(13)
)


def dir49_generalize_bits(bits: int) -> int:
    if not bits:
        raise ValueError("cannot generalize the empty relation")
    out = 0
    for k in iter_bits(bits):
        out |= _BLOCK_OF[k]
    return out


def dir49_generalize(delta: Relation) -> Relation:
    """Smallest DIR49 relation containing ``delta``."""
    return Relation(RA, dir49_generalize_bits(delta.bits))


def is_dir49(delta: Relation | int) -> bool:
    bits = delta.bits if isinstance(delta, Relation) else delta
    return bool(bits) and dir49_generalize_bits(bits) == bits


def dir49_atoms_of(bits: int) -> list[int]:
    """The DIR49 atoms contained in a DIR49 relation."""
    return [atom for atom in DIR49_ATOMS if atom & bits == atom]


# -- solutions -------------------------------------------------------------


def axis_networks(net: Network) -> tuple[Network, Network]:
    """Per-axis IA networks of an RA network whose entries are products."""
    xs = Network(IA, net.names)
    ys = Network(IA, net.names)
    for i, j in net.pairs():
        bits = net.m[i][j]
        if not is_product(bits):
            raise ValueError(
                f"constraint ({net.names[i]}, {net.names[j]}) is not a product relation"
            )
        xs.set(i, j, x_projection(bits))
        ys.set(i, j, y_projection(bits))
    return xs, ys


def rectangle_solution(net: Network) -> Optional[list[Rectangle]]:
    """Canonical rectangle solution of a basic RA network, or ``None``."""
    if net.calculus is not RA:
        raise ValueError("rectangle_solution expects an RA network")
    for i, j in net.pairs():
        bits = net.m[i][j]
        if not bits or bits & (bits - 1):
            raise NotBasicError(
                f"constraint ({net.names[i]}, {net.names[j]}) is not a basic relation"
            )
    xs, ys = axis_networks(net)
    sx = canonical_solution(xs)
    if sx is None:
        return None
    sy = canonical_solution(ys)
    if sy is None:
        return None
    return [Rectangle(a, b) for a, b in zip(sx, sy)]


def network_from_rectangles(names: Sequence[str], rects: Sequence[Rectangle]) -> Network:
    net = Network(RA, names)
    for a in range(len(rects)):
        for b in range(a + 1, len(rects)):
            x, _, y = ra_relation_of(rects[a], rects[b]).partition("*")
            net.set(a, b, 1 << ra_index(x, y))
    return net
