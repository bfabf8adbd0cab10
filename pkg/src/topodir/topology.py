"""RCC8: basic relations, the bundled composition table, the refinement map
used to extract scenarios from the tractable subclass H8, H8 membership data
and an exact RCC8 oracle for finite unions of rectangles.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional, Sequence

from .algebra import Calculus, Relation
from .boxes import Rectangle

__all__ = [
    "RCC8",
    "RCC8_BASICS",
    "h_refine",
    "h_refine_bits",
    "HRefineError",
    "RectUnionRegion",
    "rcc8_of_regions",
    "load_h8",
    "h8_members",
    "in_h8",
    "H8_ENV",
]

RCC8_BASICS: tuple[str, ...] = ("DC", "EC", "PO", "TPP", "NTPP", "TPPi", "NTPPi", "EQ")
_IDX = {t: i for i, t in enumerate(RCC8_BASICS)}
_CONVERSE = {"DC": "DC", "EC": "EC", "PO": "PO", "TPP": "TPPi", "NTPP": "NTPPi",
             "TPPi": "TPP", "NTPPi": "NTPP", "EQ": "EQ"}
H8_ENV = "QSR_H8_TABLE"


def _parse_tokens(cell: str) -> int:
    cell = cell.strip()
    if cell == "*":
        return (1 << 8) - 1
    bits = 0
    for token in cell.split(","):
        token = token.strip()
        if token not in _IDX:
            raise ValueError(f"unknown RCC8 token {token!r}")
        bits |= 1 << _IDX[token]
    return bits


def _load_composition() -> list[list[int]]:
    text = resources.files("topodir").joinpath("data/rcc8_composition.tsv").read_text("utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = lines[0].split("\t")[1:]
    if tuple(header) != RCC8_BASICS:
        raise ValueError("RCC8 table header does not list the basics in canonical order")
    table = [[0] * 8 for _ in range(8)]
    for line in lines[1:]:
        cells = line.split("\t")
        row = _IDX[cells[0]]
        for col, cell in enumerate(cells[1:]):
            table[row][col] = _parse_tokens(cell)
    return table


RCC8 = Calculus(
    "RCC8",
    RCC8_BASICS,
    [_IDX[_CONVERSE[t]] for t in RCC8_BASICS],
    _load_composition(),
    1 << _IDX["EQ"],
)


class HRefineError(ValueError):
    """The relation lies outside the domain of the refinement map."""


_CASCADE = tuple(1 << _IDX[t] for t in ("DC", "EC", "PO", "TPP", "TPPi"))


def h_refine_bits(bits: int) -> int:
    if not bits:
        raise HRefineError("cannot refine the empty relation")
    for b in _CASCADE:
        if bits & b:
            return b
    if bits & (bits - 1):
        raise HRefineError(
            f"relation {{{','.join(RCC8.names_of(bits))}}} is outside mapping domain"
        )
    return bits


def h_refine(theta: Relation) -> str:
    """First of DC, EC, PO, TPP, TPPi contained in theta; else theta if basic."""
    return RCC8_BASICS[h_refine_bits(theta.bits).bit_length() - 1]


# -- H8 membership -----------------------------------------------------------


def _read_h8(text: str) -> frozenset[int]:
    members = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            members.add(_parse_tokens(line))
        except ValueError as exc:
            raise ValueError(f"H8 table line {lineno}: {exc}") from None
    for bits in members:
        if RCC8.converse_bits(bits) not in members:
            raise ValueError("H8 table is not closed under converse")
    for a in members:
        for b in members:
            if a & b and a & b not in members:
                raise ValueError("H8 table is not closed under intersection")
    for i in range(8):
        if 1 << i not in members:
            raise ValueError("H8 table must contain every basic relation")
    return frozenset(members)


@lru_cache(maxsize=None)
def load_h8(path: Optional[str] = None) -> frozenset[int]:
    """Load H8 as a set of bitsets from ``path``, ``$QSR_H8_TABLE`` or the bundled file."""
    path = path or os.environ.get(H8_ENV)
    if path:
        with open(path, encoding="utf-8") as handle:
            return _read_h8(handle.read())
    return _read_h8(resources.files("topodir").joinpath("data/h8.txt").read_text("utf-8"))


def h8_members() -> frozenset[int]:
    return load_h8(os.environ.get(H8_ENV))


def in_h8(theta: Relation | int) -> bool:
    bits = theta.bits if isinstance(theta, Relation) else theta
    return bits in h8_members()


# -- rectangle-union regions -------------------------------------------------


@dataclass(frozen=True)
class RectUnionRegion:
    """A regular closed region: the union of finitely many closed rectangles."""

    pieces: tuple[Rectangle, ...]

    def __init__(self, pieces: Iterable[Rectangle]) -> None:
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("a region needs at least one rectangle")
        object.__setattr__(self, "pieces", pieces)

    def mbr(self) -> Rectangle:
        return Rectangle.of(
            min(p.x0 for p in self.pieces),
            max(p.x1 for p in self.pieces),
            min(p.y0 for p in self.pieces),
            max(p.y1 for p in self.pieces),
        )


def _cells(region: RectUnionRegion, xs: Sequence[Fraction], ys: Sequence[Fraction]) -> set[tuple[int, int]]:
    xpos = {v: i for i, v in enumerate(xs)}
    ypos = {v: i for i, v in enumerate(ys)}
    cells = set()
    for p in region.pieces:
        for i in range(xpos[p.x0], xpos[p.x1]):
            for j in range(ypos[p.y0], ypos[p.y1]):
                cells.add((i, j))
    return cells


_AROUND = tuple((dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1))


def rcc8_of_regions(a: RectUnionRegion, b: RectUnionRegion) -> str:
    """Exact basic RCC8 relation between two rectangle-union regions.

    Both regions are cut into the cells of the common coordinate grid. Two
    closed cells meet iff they are equal or 8-adjacent, and a closed cell lies
    in the interior of a region iff all cells around it belong to it.
    """
    xs = sorted({v for r in (a, b) for p in r.pieces for v in (p.x0, p.x1)})
    ys = sorted({v for r in (a, b) for p in r.pieces for v in (p.y0, p.y1)})
    ca, cb = _cells(a, xs, ys), _cells(b, xs, ys)
    if not ca & cb:
        touching = any((i + dx, j + dy) in cb for i, j in ca for dx, dy in _AROUND)
        return "EC" if touching else "DC"
    if ca == cb:
        return "EQ"

    def inside_interior(inner: set, outer: set) -> bool:
        return all((i + dx, j + dy) in outer for i, j in inner for dx, dy in _AROUND)

    if ca <= cb:
        return "NTPP" if inside_interior(ca, cb) else "TPP"
    if cb <= ca:
        return "NTPPi" if inside_interior(cb, ca) else "TPPi"
    return "PO"
