"""Propagation and decision procedures for joint topology/direction networks.

``decide_dir49`` is complete when every direction constraint is a DIR49
relation. On the fast path (all topological constraints in H8) the two
components are handled separately after bipath-consistency: a topological
scenario comes from the refinement map, a direction scenario from a search
restricted to the tau-image basics ``{b, o, d, eq, di, oi, bi}`` per axis, and
the witness regions are built and verified. Topological constraints outside
H8 are split into basics by backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .algebra import Network, path_consistency
from .boxes import (
    RA,
    Rectangle,
    axis_networks,
    dir49_generalize_bits,
    is_dir49,
    is_product,
    product_bits,
    ra_index,
    ra_relation_of,
    rectangle_solution,
)
from .interaction import JointNetwork, biclose, induced_era_bits
from .interval import IA_BASICS, TAU_IMAGE, Rational, chi, epsilon_shift
from .realize import (
    RealizationError,
    SymbolicRegion,
    VerificationUndecided,
    compatible,
    realize_regions,
    verify_regions,
)
from .topology import HRefineError, h8_members, h_refine_bits

__all__ = [
    "path_consistency",
    "bipath_consistency",
    "scenario_h8",
    "decide_dir49",
    "check_general",
    "epsilon_solve",
    "Verdict",
    "Witness",
    "ChiEntry",
    "NotDir49Error",
    "StageError",
    "search_scenario",
]

_T2 = product_bits(TAU_IMAGE, TAU_IMAGE)


class NotDir49Error(ValueError):
    """A direction constraint is not a DIR49 relation."""


class StageError(ValueError):
    """A precondition of the epsilon pipeline failed at ``stage``."""

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass
class Witness:
    scenario_top: Network
    scenario_dir: Network
    rectangles: list[Rectangle]
    regions: Optional[list[SymbolicRegion]] = None


@dataclass(frozen=True)
class ChiEntry:
    i: str
    j: str
    axis: str
    basic: str
    value: Fraction


@dataclass
class Verdict:
    status: str
    witness: Optional[Witness] = None
    chi_report: Optional[list[ChiEntry]] = None
    trace: list[str] = field(default_factory=list)
    fragment: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.status not in ("sat", "unsat", "unknown"):
            raise ValueError(f"bad status {self.status!r}")


# -- propagation -------------------------------------------------------------


def bipath_consistency(net: JointNetwork) -> Optional[JointNetwork]:
    """Alternate bi-closure and path-consistency on both components until
    nothing changes. ``None`` signals inconsistency."""
    current = net
    while True:
        closed = biclose(current)
        if closed is None:
            return None
        top = path_consistency(closed.top)
        if top is None:
            return None
        dir_ = path_consistency(closed.dir)
        if dir_ is None:
            return None
        nxt = JointNetwork(top, dir_)
        if nxt == current:
            return nxt
        current = nxt


def scenario_h8(net: Network) -> Network:
    """Apply the refinement map to every constraint of a PC network."""
    out = net.copy()
    for i, j in net.pairs():
        out.set(i, j, h_refine_bits(net.m[i][j]))
    return out


def search_scenario(net: Network) -> Optional[Network]:
    """A path-consistent basic refinement found by backtracking, or ``None``."""
    closed = path_consistency(net)
    if closed is None:
        return None
    best = None
    for i, j in closed.pairs():
        bits = closed.m[i][j]
        if bits & (bits - 1):
            count = bits.bit_count()
            if best is None or count < best[0]:
                best = (count, i, j)
    if best is None:
        return closed
    _, i, j = best
    bits = closed.m[i][j]
    while bits:
        low = bits & -bits
        bits ^= low
        child = closed.copy()
        child.set(i, j, low)
        found = search_scenario(child)
        if found is not None:
            return found
    return None


def _dir_scenario(dir_net: Network) -> Optional[Network]:
    """Basic RA scenario inside ``dir_net`` using only tau-image basics."""
    net = dir_net.copy()
    for i, j in net.pairs():
        net.set(i, j, net.m[i][j] & _T2)
        if not net.m[i][j]:
            return None
    if all(is_product(net.m[i][j]) for i, j in net.pairs()):
        xs, ys = axis_networks(net)
        sx = search_scenario(xs)
        if sx is None:
            return None
        sy = search_scenario(ys)
        if sy is None:
            return None
        out = Network(RA, net.names)
        for i, j in net.pairs():
            out.set(i, j, product_bits(sx.m[i][j], sy.m[i][j]))
        return out
    return search_scenario(net)


# -- DIR49 decision --------------------------------------------------------------


def _top_in_h8(top: Network, h8: frozenset[int]) -> bool:
    return all(top.m[i][j] in h8 for i, j in top.pairs())


def _fragment(net: JointNetwork, assume_h8: bool) -> dict[str, object]:
    return {
        "top_in_h8": "unknown" if assume_h8 else _top_in_h8(net.top, h8_members()),
        "dir_in_dir49": all(is_dir49(net.dir.m[i][j]) for i, j in net.dir.pairs()),
    }


def _witness_ok(net: JointNetwork, w: Witness) -> bool:
    for i, j in net.top.pairs():
        if w.scenario_top.m[i][j] & ~net.top.m[i][j]:
            return False
        if w.scenario_dir.m[i][j] & ~net.dir.m[i][j]:
            return False
        x, _, y = ra_relation_of(w.rectangles[i], w.rectangles[j]).partition("*")
        if w.scenario_dir.m[i][j] != 1 << ra_index(x, y):
            return False
    return True


def _fast_path(net: JointNetwork, want_regions: bool, trace: list[str]) -> Optional[Verdict]:
    """Decide assuming the topological constraints lie in H8.

    Returns ``None`` when a self-check fails, so the caller can fall back to
    splitting the topology into basics.
    """
    bp = bipath_consistency(net)
    if bp is None:
        trace.append("bipath-consistency emptied a constraint")
        return Verdict("unsat", trace=trace)
    trace.append("bipath-consistency reached a fixpoint")
    try:
        top_s = scenario_h8(bp.top)
    except HRefineError as exc:
        trace.append(f"refinement map failed: {exc}")
        return None
    if path_consistency(top_s) != top_s:
        trace.append("refined topological scenario is not path-consistent")
        return None
    restricted = bp.dir.copy()
    for i, j in restricted.pairs():
        restricted.set(i, j, restricted.m[i][j] & induced_era_bits(top_s.m[i][j]))
    dir_s = _dir_scenario(restricted)
    if dir_s is None:
        if _dir_scenario(bp.dir) is None:
            trace.append("direction component has no scenario")
            return Verdict("unsat", trace=trace)
        trace.append("direction scenario incompatible with refined topology")
        return None
    trace.append("direction scenario found over tau-image basics")
    rects = rectangle_solution(dir_s)
    if rects is None or compatible(rects, top_s):
        trace.append("canonical rectangles failed the compatibility check")
        return None
    witness = Witness(top_s, dir_s, rects)
    if want_regions:
        try:
            regions = realize_regions(top_s, rects)
            report = verify_regions(regions, top_s, rects)
        except (RealizationError, VerificationUndecided) as exc:
            trace.append(f"realization failed: {exc}")
            return None
        if not report.ok:
            trace.append("realized regions failed verification")
            return None
        witness.regions = regions
        trace.append("regions realized and verified")
    if not _witness_ok(net, witness):
        trace.append("witness does not refine the input")
        return None
    return Verdict("sat", witness=witness, trace=trace)


def _split_top(
    net: JointNetwork, h8: frozenset[int], want_regions: bool, trace: list[str], force: bool
) -> Optional[Verdict]:
    bp = bipath_consistency(net)
    if bp is None:
        return None
    pick = None
    for i, j in bp.top.pairs():
        bits = bp.top.m[i][j]
        if bits & (bits - 1) and (force or bits not in h8):
            count = bits.bit_count()
            if pick is None or count < pick[0]:
                pick = (count, i, j)
    if pick is None:
        verdict = _fast_path(bp, want_regions, [])
        if verdict is None:
            if force:
                raise RuntimeError("fast path self-check failed on a basic topology")
            return _split_top(bp, h8, want_regions, trace, force=True)
        return verdict if verdict.status == "sat" else None
    _, i, j = pick
    bits = bp.top.m[i][j]
    while bits:
        low = bits & -bits
        bits ^= low
        child = bp.copy()
        child.top.set(i, j, low)
        found = _split_top(child, h8, want_regions, trace, force)
        if found is not None:
            return found
    return None


def decide_dir49(
    net: JointNetwork, *, witness: bool = True, assume_h8: bool = False
) -> Verdict:
    """Complete satisfiability decision for networks whose direction
    constraints are all DIR49 relations."""
    for i, j in net.dir.pairs():
        if not is_dir49(net.dir.m[i][j]):
            a, b = net.names[i], net.names[j]
            raise NotDir49Error(
                f"direction constraint ({a}, {b}) is not a DIR49 relation; use check_general"
            )
    fragment = _fragment(net, assume_h8)
    trace: list[str] = []
    h8 = h8_members()
    if assume_h8 or fragment["top_in_h8"] is True:
        trace.append("fast path: topology in H8" + (" (assumed)" if assume_h8 else ""))
        verdict = _fast_path(net, witness, trace)
        if verdict is not None:
            verdict.fragment = fragment
            return verdict
        trace.append("fast path self-check failed; splitting topology")
    else:
        trace.append("general path: splitting topology outside H8")
    found = _split_top(net, h8, witness, trace, force=False)
    if found is None:
        trace.append("no branch satisfiable")
        return Verdict("unsat", trace=trace, fragment=fragment)
    found.trace = trace + found.trace
    found.fragment = fragment
    return found


def check_general(net: JointNetwork, *, assume_h8: bool = False, witness: bool = False) -> Verdict:
    """Sound check for arbitrary rectangle constraints.

    ``unsat`` is always correct. ``sat`` is only returned when every direction
    constraint is already a DIR49 relation; otherwise success of the
    generalized network gives ``unknown``.
    """
    fragment = _fragment(net, assume_h8)
    bp = bipath_consistency(net)
    if bp is None:
        return Verdict("unsat", trace=["bipath-consistency emptied a constraint"], fragment=fragment)
    if fragment["dir_in_dir49"]:
        verdict = decide_dir49(net, witness=witness, assume_h8=assume_h8)
        verdict.fragment = fragment
        return verdict
    gen = bp.copy()
    for i, j in gen.dir.pairs():
        gen.dir.set(i, j, dir49_generalize_bits(gen.dir.m[i][j]))
    verdict = decide_dir49(gen, witness=False, assume_h8=assume_h8)
    trace = ["bipath-consistency reached a fixpoint", "decided the DIR49 generalization"]
    trace += verdict.trace
    status = "unsat" if verdict.status == "unsat" else "unknown"
    return Verdict(status, trace=trace, fragment=fragment)


# -- epsilon solving -----------------------------------------------------------


def _basic_name(bits: int) -> str:
    return IA_BASICS[bits.bit_length() - 1]


def epsilon_solve(
    net: JointNetwork, eps: Rational = Fraction(1, 100), *, assume_h8: bool = False
) -> Verdict:
    """Regions meeting the topology exactly and every rectangle constraint
    up to ``eps`` (each pair is an ``eps``-instance of its relation)."""
    eps_q = Fraction(eps)
    if not 0 < eps_q < 1:
        raise StageError("input", "eps must lie strictly between 0 and 1")
    if not net.is_basic():
        raise StageError("basic", "epsilon solving needs basic topology and direction constraints")
    trace = []
    fragment = _fragment(net, assume_h8)
    closed = biclose(net)
    if closed is None:
        return Verdict("unsat", trace=["biclose: a constraint emptied"], fragment=fragment)
    if closed != net:
        trace.append("biclose: input was not bi-closed; using its bi-closure")
    top = path_consistency(closed.top)
    if top is None or top != closed.top:
        return Verdict("unsat", trace=trace + ["top: topology is unsatisfiable"], fragment=fragment)
    xs, ys = axis_networks(closed.dir)
    if path_consistency(xs) is None or path_consistency(ys) is None:
        return Verdict("unsat", trace=trace + ["dir: a rectangle axis is unsatisfiable"], fragment=fragment)
    gen = closed.copy()
    for i, j in gen.dir.pairs():
        gen.dir.set(i, j, dir49_generalize_bits(gen.dir.m[i][j]))
    if decide_dir49(gen, witness=False, assume_h8=assume_h8).status != "sat":
        return Verdict(
            "unsat", trace=trace + ["generalization: DIR49 generalization is unsatisfiable"],
            fragment=fragment,
        )
    trace.append("generalization: DIR49 generalization is satisfiable")
    ix = epsilon_shift(xs, eps_q)
    iy = epsilon_shift(ys, eps_q)
    rects = [Rectangle(a, b) for a, b in zip(ix, iy)]
    trace.append("shift: epsilon-shifted rectangles built per axis")
    problems = compatible(rects, top)
    if problems:
        raise StageError("compatible", "; ".join(problems))
    try:
        regions = realize_regions(top, rects)
        report = verify_regions(regions, top, rects)
    except (RealizationError, VerificationUndecided) as exc:
        raise StageError("realize", str(exc)) from exc
    if not report.ok:
        raise StageError("verify", "; ".join(report.mismatches))
    trace.append("realize: regions built and verified")
    chi_report = []
    names = net.names
    for i, j in net.dir.pairs():
        for axis, axis_net, ivs in (("x", xs, ix), ("y", ys, iy)):
            basic = _basic_name(axis_net.m[i][j])
            chi_report.append(ChiEntry(names[i], names[j], axis, basic, chi(basic, ivs[i], ivs[j])))
    worst = max((c.value for c in chi_report), default=Fraction(0))
    if worst >= eps_q:
        raise StageError("chi", f"max chi {worst} is not below eps {eps_q}")
    trace.append(f"chi: max chi {worst} < eps {eps_q}")
    dir_s = Network(RA, names)
    for i, j in dir_s.pairs():
        x, _, y = ra_relation_of(rects[i], rects[j]).partition("*")
        dir_s.set(i, j, 1 << ra_index(x, y))
    witness = Witness(top, dir_s, rects, regions)
    return Verdict("sat", witness=witness, chi_report=chi_report, trace=trace, fragment=fragment)

