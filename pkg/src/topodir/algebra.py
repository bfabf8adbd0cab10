"""Finite qualitative calculi: basic-relation universes, relation bitsets,
converse, weak composition, constraint networks and path-consistency.

A relation of a calculus with ``k`` basic relations is a ``k``-bit integer;
bit ``i`` set means basic relation ``i`` is allowed. :class:`Relation` wraps
such a bitset together with its calculus for the public API, while the
propagation loops work on the raw integers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "Calculus",
    "Relation",
    "Network",
    "CalculusMismatch",
    "iter_bits",
    "converse",
    "weak_compose",
    "path_consistency",
]


class CalculusMismatch(ValueError):
    """Raised when relations of two different calculi are combined."""


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``bits`` in increasing order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class Calculus:
    """A finite qualitative calculus given by tables.

    ``composition_table[a][b]`` is the weak composition of basic relations
    ``a`` and ``b`` as a bitset. Nothing beyond the listed fields is assumed:
    the calculus need not be closed under converse or contain the identity
    as a basic relation.
    """

    # bitsets up to this width get a precomputed basic-by-relation row table
    _ROW_TABLE_LIMIT = 13

    def __init__(
        self,
        name: str,
        basic_names: Sequence[str],
        converse_map: Sequence[int],
        composition_table: Sequence[Sequence[int]],
        identity: int,
    ) -> None:
        size = len(basic_names)
        if len(set(basic_names)) != size:
            raise ValueError(f"{name}: duplicate basic relation names")
        if len(converse_map) != size:
            raise ValueError(f"{name}: converse map has wrong length")
        for i, j in enumerate(converse_map):
            if converse_map[j] != i:
                raise ValueError(f"{name}: converse map is not an involution at {basic_names[i]}")
        if len(composition_table) != size or any(len(row) != size for row in composition_table):
            raise ValueError(f"{name}: composition table must be {size}x{size}")
        for a, row in enumerate(composition_table):
            for b, entry in enumerate(row):
                if not entry:
                    raise ValueError(
                        f"{name}: empty composition {basic_names[a]} o {basic_names[b]}"
                    )
        if not identity:
            raise ValueError(f"{name}: identity relation is empty")

        self.name = name
        self.basic_names: tuple[str, ...] = tuple(basic_names)
        self.size = size
        self.universe = (1 << size) - 1
        self.identity = identity
        self.index = {token: i for i, token in enumerate(self.basic_names)}
        self._conv = tuple(converse_map)
        self._table = tuple(tuple(row) for row in composition_table)

        self._conv_all: Optional[tuple[int, ...]] = None
        self._rows: Optional[tuple[tuple[int, ...], ...]] = None
        if size <= self._ROW_TABLE_LIMIT:
            self._build_fast_tables()

    def _build_fast_tables(self) -> None:
        width = 1 << self.size
        conv = [0] * width
        for bits in range(1, width):
            low = bits & -bits
            conv[bits] = conv[bits ^ low] | (1 << self._conv[low.bit_length() - 1])
        self._conv_all = tuple(conv)
        rows = []
        for a in range(self.size):
            row = [0] * width
            table_a = self._table[a]
            for bits in range(1, width):
                low = bits & -bits
                row[bits] = row[bits ^ low] | table_a[low.bit_length() - 1]
            rows.append(tuple(row))
        self._rows = tuple(rows)

    def __repr__(self) -> str:
        return f"Calculus({self.name!r}, {self.size} basics)"

    # -- raw bitset operations -------------------------------------------

    def converse_basic(self, a: int) -> int:
        return self._conv[a]

    def compose_basic(self, a: int, b: int) -> int:
        return self._table[a][b]

    def converse_bits(self, bits: int) -> int:
        if self._conv_all is not None:
            return self._conv_all[bits]
        out = 0
        for i in iter_bits(bits):
            out |= 1 << self._conv[i]
        return out

    def compose_bits(self, r1: int, r2: int) -> int:
        if not r1 or not r2:
            return 0
        out = 0
        if self._rows is not None:
            for a in iter_bits(r1):
                out |= self._rows[a][r2]
            return out
        for a in iter_bits(r1):
            row = self._table[a]
            for b in iter_bits(r2):
                out |= row[b]
        return out

    # -- relation constructors -------------------------------------------

    def bits_of(self, names: Iterable[str]) -> int:
        bits = 0
        for token in names:
            try:
                bits |= 1 << self.index[token]
            except KeyError:
                raise ValueError(f"unknown {self.name} basic relation {token!r}") from None
        return bits

    def rel(self, *names: str) -> "Relation":
        return Relation(self, self.bits_of(names))

    def basic(self, i: int) -> "Relation":
        return Relation(self, 1 << i)

    def empty(self) -> "Relation":
        return Relation(self, 0)

    def top(self) -> "Relation":
        return Relation(self, self.universe)

    def identity_rel(self) -> "Relation":
        return Relation(self, self.identity)

    def names_of(self, bits: int) -> list[str]:
        return [self.basic_names[i] for i in iter_bits(bits)]


@dataclass(frozen=True)
class Relation:
    """A relation of ``calculus``: a union of its basic relations."""

    calculus: Calculus
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits > self.calculus.universe:
            raise ValueError(f"bitset does not fit {self.calculus.name}")

    def _check(self, other: "Relation") -> None:
        if other.calculus is not self.calculus:
            raise CalculusMismatch(
                f"cannot combine {self.calculus.name} and {other.calculus.name} relations"
            )

    def __and__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.calculus, self.bits & other.bits)

    def __or__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.calculus, self.bits | other.bits)

    def __sub__(self, other: "Relation") -> "Relation":
        self._check(other)
        return Relation(self.calculus, self.bits & ~other.bits)

    def __invert__(self) -> "Relation":
        return Relation(self.calculus, self.calculus.universe & ~self.bits)

    def __le__(self, other: "Relation") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __ge__(self, other: "Relation") -> bool:
        return other <= self

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __bool__(self) -> bool:
        return self.bits != 0

    def is_basic(self) -> bool:
        return self.bits != 0 and self.bits & (self.bits - 1) == 0

    def basic_index(self) -> int:
        if not self.is_basic():
            raise ValueError("relation is not basic")
        return self.bits.bit_length() - 1

    def names(self) -> list[str]:
        return self.calculus.names_of(self.bits)

    def converse(self) -> "Relation":
        return Relation(self.calculus, self.calculus.converse_bits(self.bits))

    def __repr__(self) -> str:
        return f"{self.calculus.name}{{{', '.join(self.names())}}}"


def converse(rel: Relation) -> Relation:
    return rel.converse()


def weak_compose(r1: Relation, r2: Relation) -> Relation:
    """Union of the composition-table entries over all basic pairs of r1 x r2."""
    r1._check(r2)
    return Relation(r1.calculus, r1.calculus.compose_bits(r1.bits, r2.bits))


class Network:
    """A constraint network over one calculus on named variables.

    ``m[i][j]`` is the bitset constraining ``(v_i, v_j)``. The constructors
    keep the matrix converse-consistent; the diagonal starts at the identity.
    """

    __slots__ = ("calculus", "names", "m")

    def __init__(
        self,
        calculus: Calculus,
        names: Sequence[str],
        matrix: Optional[Sequence[Sequence[int]]] = None,
    ) -> None:
        self.calculus = calculus
        self.names: tuple[str, ...] = tuple(names)
        n = len(self.names)
        if matrix is None:
            top = calculus.universe
            self.m = [[calculus.identity if i == j else top for j in range(n)] for i in range(n)]
        else:
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise ValueError("matrix shape does not match variable count")
            self.m = [list(row) for row in matrix]

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def copy(self) -> "Network":
        return Network(self.calculus, self.names, self.m)

    def get(self, i: int, j: int) -> Relation:
        return Relation(self.calculus, self.m[i][j])

    def set(self, i: int, j: int, rel: Relation | int) -> None:
        bits = rel.bits if isinstance(rel, Relation) else rel
        self.m[i][j] = bits
        self.m[j][i] = self.calculus.converse_bits(bits)

    def constrain(self, i: int, j: int, rel: Relation | int) -> None:
        """Intersect the (i, j) constraint with ``rel`` (and (j, i) with its converse)."""
        bits = rel.bits if isinstance(rel, Relation) else rel
        self.m[i][j] &= bits
        self.m[j][i] &= self.calculus.converse_bits(bits)

    def pairs(self) -> Iterator[tuple[int, int]]:
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j

    def is_basic(self) -> bool:
        return all(self.m[i][j] and not self.m[i][j] & (self.m[i][j] - 1) for i, j in self.pairs())

    def has_empty(self) -> bool:
        return any(not bits for row in self.m for bits in row)

    def is_converse_consistent(self) -> bool:
        conv = self.calculus.converse_bits
        return all(self.m[j][i] == conv(self.m[i][j]) for i, j in self.pairs())

    def refines(self, other: "Network") -> bool:
        return all(
            self.m[i][j] & ~other.m[i][j] == 0 for i in range(self.n) for j in range(self.n)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.calculus is other.calculus and self.names == other.names and self.m == other.m
        )

    def __repr__(self) -> str:
        body = "; ".join(
            f"{self.names[i]} {{{','.join(self.calculus.names_of(self.m[i][j]))}}} {self.names[j]}"
            for i, j in self.pairs()
        )
        return f"Network[{self.calculus.name}]({body})"


def path_consistency(net: Network) -> Optional[Network]:
    """Enforce path-consistency with a queue of revised pairs.

    Returns the refined network, or ``None`` when some constraint empties.
    The input is left untouched.
    """
    calc = net.calculus
    compose = calc.compose_bits
    conv = calc.converse_bits
    n = net.n
    m = [row[:] for row in net.m]

    for i in range(n):
        if not m[i][i] & calc.identity:
            return None
        m[i][i] &= calc.identity
        for j in range(i + 1, n):
            bits = m[i][j] & conv(m[j][i])
            if not bits:
                return None
            m[i][j] = bits
            m[j][i] = conv(bits)

    queue = deque((i, j) for i in range(n) for j in range(i + 1, n))
    queued = set(queue)
    while queue:
        i, j = queue.popleft()
        queued.discard((i, j))
        rij = m[i][j]
        for k in range(n):
            if k == i or k == j:
                continue
            # (i,k) through j
            old = m[i][k]
            new = old & compose(rij, m[j][k])
            if new != old:
                if not new:
                    return None
                m[i][k] = new
                m[k][i] = conv(new)
                key = (i, k) if i < k else (k, i)
                if key not in queued:
                    queued.add(key)
                    queue.append(key)
            # (k,j) through i
            old = m[k][j]
            new = old & compose(m[k][i], rij)
            if new != old:
                if not new:
                    return None
                m[k][j] = new
                m[j][k] = conv(new)
                key = (k, j) if k < j else (j, k)
                if key not in queued:
                    queued.add(key)
                    queue.append(key)
            rij = m[i][j]
    return Network(calc, net.names, m)
