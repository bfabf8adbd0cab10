"""Interval Algebra over rational intervals.

The composition table is not typed in: :func:`ia_compose_oracle` derives it
by enumerating every interval triple with endpoints in ``0..5``, which covers
all order types of six endpoints. The module also provides the IA3/IA7
coarsenings, the tau map, canonical integer solutions of basic networks, the
chi closeness measure and the epsilon-shift construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence, Union

from .algebra import Calculus, Network, Relation, iter_bits, path_consistency

__all__ = [
    "Interval",
    "IA_BASICS",
    "IA",
    "ia_relation_of",
    "ia_compose_oracle",
    "coarsen",
    "tau",
    "tau_bits",
    "tau_network",
    "TAU_IMAGE",
    "canonical_solution",
    "chi",
    "epsilon_shift",
    "NotBasicError",
    "Rational",
]

Rational = Union[int, Fraction, str]

IA_BASICS: tuple[str, ...] = (
    "b", "m", "o", "s", "d", "f", "eq", "fi", "di", "si", "oi", "mi", "bi",
)
_IDX = {t: i for i, t in enumerate(IA_BASICS)}
EQ = _IDX["eq"]


class NotBasicError(ValueError):
    """A network that must be basic has a non-singleton constraint."""


def _q(value: Rational) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True, order=True)
class Interval:
    """Closed rational interval ``[lo, hi]`` with ``lo < hi``."""

    lo: Fraction
    hi: Fraction

    def __init__(self, lo: Rational, hi: Rational) -> None:
        lo_q, hi_q = _q(lo), _q(hi)
        if not lo_q < hi_q:
            raise ValueError(f"degenerate interval [{lo_q}, {hi_q}]")
        object.__setattr__(self, "lo", lo_q)
        object.__setattr__(self, "hi", hi_q)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def __repr__(self) -> str:
        return f"Interval({self.lo}, {self.hi})"


def _sign(a: Fraction | int, b: Fraction | int) -> int:
    return (a > b) - (a < b)


# (sign(x-, y-), sign(x-, y+), sign(x+, y-), sign(x+, y+)) -> basic
_SIGNATURES: dict[tuple[int, int, int, int], str] = {
    (-1, -1, -1, -1): "b",
    (-1, -1, 0, -1): "m",
    (-1, -1, 1, -1): "o",
    (0, -1, 1, -1): "s",
    (1, -1, 1, -1): "d",
    (1, -1, 1, 0): "f",
    (0, -1, 1, 0): "eq",
    (-1, -1, 1, 0): "fi",
    (-1, -1, 1, 1): "di",
    (0, -1, 1, 1): "si",
    (1, -1, 1, 1): "oi",
    (1, 0, 1, 1): "mi",
    (1, 1, 1, 1): "bi",
}


def _signature(xl, xh, yl, yh) -> tuple[int, int, int, int]:
    return (_sign(xl, yl), _sign(xl, yh), _sign(xh, yl), _sign(xh, yh))


def ia_relation_of(i: Interval, j: Interval) -> str:
    """The basic relation holding between two intervals."""
    return _SIGNATURES[_signature(i.lo, i.hi, j.lo, j.hi)]


def _ia_relation_index(xl, xh, yl, yh) -> int:
    return _IDX[_SIGNATURES[_signature(xl, xh, yl, yh)]]


@lru_cache(maxsize=None)
def _oracle_table() -> tuple[tuple[int, ...], ...]:
    spans = [(lo, hi) for lo in range(6) for hi in range(lo + 1, 6)]
    table = [[0] * 13 for _ in range(13)]
    for (il, ih), (jl, jh), (kl, kh) in product(spans, repeat=3):
        a = _ia_relation_index(il, ih, jl, jh)
        b = _ia_relation_index(jl, jh, kl, kh)
        c = _ia_relation_index(il, ih, kl, kh)
        table[a][b] |= 1 << c
    return tuple(tuple(row) for row in table)


def ia_compose_oracle(a: str, b: str) -> frozenset[str]:
    """Every basic ``c`` with intervals ``I a J``, ``J b K`` and ``I c K``."""
    bits = _oracle_table()[_IDX[a]][_IDX[b]]
    return frozenset(IA_BASICS[i] for i in iter_bits(bits))


IA = Calculus(
    "IA",
    IA_BASICS,
    [12 - i for i in range(13)],
    _oracle_table(),
    1 << EQ,
)

# IA7 atoms: b, (mo), (sfd), eq, (sfd)~, (mo)~, bi
_IA7_ATOMS = (
    ("b",), ("m", "o"), ("s", "f", "d"), ("eq",), ("si", "fi", "di"), ("mi", "oi"), ("bi",),
)
_IA3_ATOMS = (
    ("b",), tuple(t for t in IA_BASICS if t not in ("b", "bi")), ("bi",),
)


def _atom_map(atoms) -> tuple[int, ...]:
    out = [0] * 13
    for atom in atoms:
        bits = IA.bits_of(atom)
        for token in atom:
            out[_IDX[token]] = bits
    return tuple(out)


_COARSE = {3: _atom_map(_IA3_ATOMS), 7: _atom_map(_IA7_ATOMS)}
IA7_ATOM_BITS: tuple[int, ...] = tuple(IA.bits_of(a) for a in _IA7_ATOMS)


def coarsen(a: str, granularity: int) -> Relation:
    """The IA3 or IA7 atom containing basic ``a``."""
    if granularity not in _COARSE:
        raise ValueError("granularity must be 3 or 7")
    return Relation(IA, _COARSE[granularity][_IDX[a]])


def coarsen_bits(bits: int, granularity: int = 7) -> int:
    table = _COARSE[granularity]
    out = 0
    for i in iter_bits(bits):
        out |= table[i]
    return out


_TAU = {"m": "o", "s": "d", "f": "d", "si": "di", "fi": "di", "mi": "oi"}
_TAU_IDX = tuple(_IDX[_TAU.get(t, t)] for t in IA_BASICS)
TAU_IMAGE: int = IA.bits_of(("b", "o", "d", "eq", "di", "oi", "bi"))


def tau(a: str) -> str:
    """Collapse m to o, s/f to d, si/fi to di and mi to oi."""
    if a not in _IDX:
        raise ValueError(f"unknown IA basic relation {a!r}")
    return _TAU.get(a, a)


def tau_index(i: int) -> int:
    return _TAU_IDX[i]


def tau_bits(bits: int) -> int:
    out = 0
    for i in iter_bits(bits):
        out |= 1 << _TAU_IDX[i]
    return out


def tau_network(net: Network) -> Network:
    """Pointwise tau image of an IA network."""
    if net.calculus is not IA:
        raise ValueError("tau is defined on IA networks")
    return Network(IA, net.names, [[tau_bits(b) for b in row] for row in net.m])


# -- canonical solutions -------------------------------------------------


def _require_basic(net: Network) -> None:
    for i, j in net.pairs():
        bits = net.m[i][j]
        if not bits or bits & (bits - 1):
            raise NotBasicError(
                f"constraint ({net.names[i]}, {net.names[j]}) is not a basic relation"
            )


def _eq_classes(net: Network) -> list[int]:
    """Representative (smallest index) of the eq-class of every variable."""
    parent = list(range(net.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in net.pairs():
        if net.m[i][j] == 1 << EQ:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return [find(i) for i in range(net.n)]


# signature of each basic, as endpoint comparisons (x-,y-),(x-,y+),(x+,y-),(x+,y+)
_BASIC_SIGNATURE = {_IDX[name]: sig for sig, name in _SIGNATURES.items()}


def _canonical_levels(net: Network) -> Optional[tuple[list[int], list[int], int]]:
    """Gap-free integer levels for the endpoints of a PC-consistent basic net.

    Returns (lo levels, hi levels, number of eq classes) per variable.
    """
    reps = _eq_classes(net)
    classes = sorted(set(reps))
    k = len(classes)
    # endpoint 2c is the lower end of class c, 2c+1 the upper end
    pos = {c: p for p, c in enumerate(classes)}
    npts = 2 * k
    cmp = [[0] * npts for _ in range(npts)]
    for p in range(k):
        cmp[2 * p][2 * p + 1] = -1
        cmp[2 * p + 1][2 * p] = 1
    for a in range(k):
        for b in range(a + 1, k):
            bits = net.m[classes[a]][classes[b]]
            sll, slh, shl, shh = _BASIC_SIGNATURE[bits.bit_length() - 1]
            for (pa, pb, s) in (
                (2 * a, 2 * b, sll),
                (2 * a, 2 * b + 1, slh),
                (2 * a + 1, 2 * b, shl),
                (2 * a + 1, 2 * b + 1, shh),
            ):
                cmp[pa][pb] = s
                cmp[pb][pa] = -s
    # a consistent basic net induces a total preorder on endpoints
    below = [sum(1 for q in range(npts) if cmp[q][p] < 0) for p in range(npts)]
    distinct = sorted(set(below))
    rank = {v: r for r, v in enumerate(distinct)}
    level = [rank[below[p]] for p in range(npts)]
    for p in range(npts):
        for q in range(npts):
            if p != q and _sign(level[p], level[q]) != cmp[p][q]:
                return None
    lo = [level[2 * pos[reps[i]]] for i in range(net.n)]
    hi = [level[2 * pos[reps[i]] + 1] for i in range(net.n)]
    return lo, hi, k


def canonical_solution(net: Network) -> Optional[list[Interval]]:
    """Unique gap-free integer solution of a basic IA network, or ``None``.

    Variables related by ``eq`` share one interval. Levels start at 0.
    """
    if net.calculus is not IA:
        raise ValueError("canonical_solution expects an IA network")
    _require_basic(net)
    closed = path_consistency(net)
    if closed is None:
        return None
    levels = _canonical_levels(closed)
    if levels is None:
        return None
    lo, hi, _ = levels
    return [Interval(a, b) for a, b in zip(lo, hi)]


# -- chi and epsilon shift -------------------------------------------------


def chi(a: str, i: Interval, j: Interval) -> Fraction:
    """How far an instance of ``tau(a)`` is from being an instance of ``a``."""
    expected = tau(a)
    got = ia_relation_of(i, j)
    if got != expected:
        raise ValueError(f"({i}, {j}) is a {got}-instance, not an instance of tau({a}) = {expected}")
    if a == "m":
        return (i.hi - j.lo) / min(i.length, j.length)
    if a == "s":
        return (i.lo - j.lo) / i.length
    if a == "f":
        return (j.hi - i.hi) / i.length
    if a in ("mi", "si", "fi"):
        return chi(a[:-1], j, i)
    return Fraction(0)


def epsilon_shift(net: Network, eps: Rational) -> list[Interval]:
    """Intervals solving the tau-version of ``net`` exactly while every pair
    stays within ``eps`` of its original basic relation.

    Endpoint ``k`` is placed at ``t_k + s_k * eps / (4 m)`` where ``t`` is the
    canonical solution of ``net``, ``s`` that of its tau-version and ``m`` the
    number of eq classes.
    """
    eps_q = _q(eps)
    if not 0 < eps_q < 1:
        raise ValueError("eps must lie strictly between 0 and 1")
    if net.calculus is not IA:
        raise ValueError("epsilon_shift expects an IA network")
    _require_basic(net)
    closed = path_consistency(net)
    if closed is None:
        raise ValueError("network is unsatisfiable")
    t = _canonical_levels(closed)
    tau_closed = path_consistency(tau_network(net))
    if t is None or tau_closed is None:
        raise ValueError("network is unsatisfiable")
    s = _canonical_levels(tau_closed)
    if s is None:
        raise ValueError("tau-version of the network is unsatisfiable")
    t_lo, t_hi, k = t
    s_lo, s_hi, _ = s
    step = eps_q / (4 * k)
    return [
        Interval(t_lo[v] + s_lo[v] * step, t_hi[v] + s_hi[v] * step) for v in range(net.n)
    ]


def network_from_intervals(names: Sequence[str], intervals: Sequence[Interval]) -> Network:
    """Basic IA network read off a list of intervals."""
    net = Network(IA, names)
    for a in range(len(intervals)):
        for b in range(a + 1, len(intervals)):
            net.set(a, b, 1 << _IDX[ia_relation_of(intervals[a], intervals[b])])
    return net
