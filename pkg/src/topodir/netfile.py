"""Text format for joint networks.

::

    # comment
    vars a b c
    top a b DC,NTPP
    dir a b m*m,MO*eq
    dir b c W

A ``top`` relation is ``T`` or comma-joined RCC8 basics. A ``dir`` relation
is a comma-joined list of terms; a term is ``T``, a cardinal ``W E N S``, or
``X*Y`` where each side is ``T``, one of the macros ``MO SDF SDFI MOI SDFEQ``
or ``|``-joined IA basics. Pairs left out are unconstrained.
"""

from __future__ import annotations

from typing import Optional

from .algebra import Network
from .boxes import RA, cardinal, product_bits
from .interaction import JointNetwork
from .interval import IA
from .topology import RCC8

__all__ = ["NetworkFileError", "parse_network", "serialize_network", "parse_dir_relation", "parse_top_relation"]


class NetworkFileError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_IA_MACROS = {
    "T": IA.universe,
    "MO": IA.bits_of(("m", "o")),
    "MOI": IA.bits_of(("mi", "oi")),
    "SDF": IA.bits_of(("s", "d", "f")),
    "SDFI": IA.bits_of(("si", "di", "fi")),
    "SDFEQ": IA.bits_of(("s", "d", "f", "eq")),
}


def _ia_side(text: str) -> int:
    text = text.strip()
    if text in _IA_MACROS:
        return _IA_MACROS[text]
    bits = 0
    for token in text.split("|"):
        token = token.strip()
        if token not in IA.index:
            raise ValueError(f"unknown interval relation {token!r}")
        bits |= 1 << IA.index[token]
    return bits


def parse_dir_relation(text: str) -> int:
    bits = 0
    for term in text.split(","):
        term = term.strip()
        if not term:
            raise ValueError("empty relation term")
        if term == "T":
            bits |= RA.universe
        elif term in ("W", "E", "N", "S"):
            bits |= cardinal(term).bits
        elif "*" in term:
            x, _, y = term.partition("*")
            bits |= product_bits(_ia_side(x), _ia_side(y))
        else:
            raise ValueError(f"bad rectangle relation term {term!r}")
    return bits


def parse_top_relation(text: str) -> int:
    bits = 0
    for token in text.split(","):
        token = token.strip()
        if token == "T":
            bits |= RCC8.universe
        elif token in RCC8.index:
            bits |= 1 << RCC8.index[token]
        else:
            raise ValueError(f"unknown RCC8 relation {token!r}")
    return bits


def parse_network(text: str) -> JointNetwork:
    """Parse the network format; errors carry the offending line number."""
    net: Optional[JointNetwork] = None
    seen: dict[tuple[str, int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split(None, 1)
        if head == "vars":
            if net is not None:
                raise NetworkFileError("duplicate vars line", lineno)
            names = rest[0].split() if rest else []
            if not names:
                raise NetworkFileError("vars line lists no variables", lineno)
            if len(set(names)) != len(names):
                raise NetworkFileError("repeated variable name", lineno)
            net = JointNetwork.empty(names)
            continue
        if head not in ("top", "dir"):
            raise NetworkFileError(f"unknown statement {head!r}", lineno)
        if net is None:
            raise NetworkFileError("constraint before the vars line", lineno)
        parts = rest[0].split(None, 2) if rest else []
        if len(parts) != 3:
            raise NetworkFileError(f"expected '{head} VAR VAR RELATION'", lineno)
        a, b, rel_text = parts
        try:
            i, j = net.top.index(a), net.top.index(b)
        except KeyError as exc:
            raise NetworkFileError(str(exc.args[0]), lineno) from None
        try:
            bits = parse_top_relation(rel_text) if head == "top" else parse_dir_relation(rel_text)
        except ValueError as exc:
            raise NetworkFileError(str(exc), lineno) from None
        component = net.top if head == "top" else net.dir
        calc = component.calculus
        if i == j:
            if not bits & calc.identity:
                raise NetworkFileError(f"diagonal conflict: ({a}, {a}) must allow the identity", lineno)
            continue
        if (head, i, j) in seen:
            raise NetworkFileError(f"duplicate {head} constraint for ({a}, {b})", lineno)
        if (head, j, i) in seen:
            if calc.converse_bits(bits) != component.m[j][i]:
                raise NetworkFileError(
                    f"converse conflict with line {seen[(head, j, i)]} for ({a}, {b})", lineno
                )
        seen[(head, i, j)] = lineno
        component.set(i, j, bits)
    if net is None:
        raise NetworkFileError("missing vars line")
    return net


def _top_text(bits: int) -> str:
    return "T" if bits == RCC8.universe else ",".join(RCC8.names_of(bits))


def _dir_text(bits: int) -> str:
    return "T" if bits == RA.universe else ",".join(RA.names_of(bits))


def serialize_network(net: JointNetwork, comments: Optional[list[str]] = None) -> str:
    """Canonical text: constrained pairs in variable order, basics in table order."""
    lines = [f"# {c}" for c in comments or []]
    lines.append("vars " + " ".join(net.names))
    for i, j in net.top.pairs():
        if net.top.m[i][j] != RCC8.universe:
            lines.append(f"top {net.names[i]} {net.names[j]} {_top_text(net.top.m[i][j])}")
    for i, j in net.dir.pairs():
        if net.dir.m[i][j] != RA.universe:
            lines.append(f"dir {net.names[i]} {net.names[j]} {_dir_text(net.dir.m[i][j])}")
    return "\n".join(lines) + "\n"


def network_to_dict(net: Network) -> dict[str, str]:
    """Pairwise constraints keyed ``"a b"``."""
    text = _top_text if net.calculus is RCC8 else _dir_text
    return {f"{net.names[i]} {net.names[j]}": text(net.m[i][j]) for i, j in net.pairs()}
