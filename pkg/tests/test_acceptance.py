"""Acceptance criteria, one test each, with their runtime budgets.

Every test records a PASS/FAIL line in ``ACCEPTANCE_RESULTS``; the summary
hook in conftest prints them at the end of the run.
"""

from __future__ import annotations

import random
import subprocess
import sys
import time
from collections import Counter
from contextlib import contextmanager
from fractions import Fraction

from nets import MEET_TRIANGLE, NESTED_CHAIN, PINWHEEL
from oracles import (
    ACCEPTANCE_RESULTS,
    brute_force_joint,
    random_basic_rcc8,
    random_dir49_joint,
    random_interval,
)
from topodir.algebra import path_consistency
from topodir.boxes import RA, Mrcc8Class, dir49_generalize_bits, mrcc8_class, ra_relation_of
from topodir.generate import gen_instance
from topodir.interaction import JointNetwork, biclose, induced_era, induced_rcc
from topodir.interval import (
    IA,
    IA_BASICS,
    Interval,
    canonical_solution,
    ia_relation_of,
    network_from_intervals,
    tau_network,
)
from topodir.netfile import parse_network, serialize_network
from topodir.realize import realize_regions, verify_regions
from topodir.solver import bipath_consistency, decide_dir49, epsilon_solve
from topodir.topology import RCC8


@contextmanager
def criterion(number: int, budget: float):
    """Time the body, record the outcome and enforce the runtime budget."""
    info: dict[str, str] = {"detail": ""}
    start = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_RESULTS[number] = (False, f"{type(exc).__name__}: {exc} ({elapsed:.2f}s)")
        print(f"FAIL criterion {number}")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    detail = f"{info['detail']} ({elapsed:.2f}s, budget {budget:g}s)".strip()
    ACCEPTANCE_RESULTS[number] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, f"criterion {number} took {elapsed:.2f}s, budget {budget}s"


def generalized(net: JointNetwork) -> JointNetwork:
    out = net.copy()
    for i, j in out.dir.pairs():
        out.dir.set(i, j, dir49_generalize_bits(out.dir.m[i][j]))
    return out


def _rational_interval(rng: random.Random) -> Interval:
    while True:
        a = Fraction(rng.randint(0, 40), rng.randint(1, 8))
        b = Fraction(rng.randint(0, 40), rng.randint(1, 8))
        if a != b:
            return Interval(min(a, b), max(a, b))


def test_criterion_1_ia_table():
    with criterion(1, 5.0) as info:
        c = IA.compose_bits
        eq = IA.identity
        for a in range(13):
            assert c(eq, 1 << a) == 1 << a == c(1 << a, eq)
            for b in range(13):
                lhs = IA.converse_bits(IA.compose_basic(a, b))
                assert lhs == IA.compose_basic(IA.converse_basic(b), IA.converse_basic(a))
        triples = 0
        for a in range(13):
            for b in range(13):
                ab = IA.compose_basic(a, b)
                for d in range(13):
                    assert c(ab, 1 << d) == c(1 << a, IA.compose_basic(b, d))
                    triples += 1
        rng = random.Random(2024)
        seen = set()
        for _ in range(10_000):
            x, y, z = (_rational_interval(rng) for _ in range(3))
            xy, yz, xz = ia_relation_of(x, y), ia_relation_of(y, z), ia_relation_of(x, z)
            assert IA.bits_of([xz]) & IA.compose_basic(IA.index[xy], IA.index[yz])
            seen.add((xy, yz, xz))
        assert IA.compose_basic(IA.index["m"], IA.index["m"]) == IA.bits_of(["b"])
        for a in IA_BASICS:
            assert IA.compose_bits(eq, IA.bits_of([a])) == IA.bits_of([a])
        info["detail"] = f"{triples} associativity triples, {len(seen)} distinct observed triples"


def test_criterion_2_interaction_tables():
    with criterion(2, 1.0) as info:
        checks = 0
        for t in range(8):
            era = induced_era(RCC8.basic(t))
            for d in range(169):
                assert (RA.basic(d) <= era) == (RCC8.basic(t) <= induced_rcc(RA.basic(d)))
                checks += 1
        assert len(induced_era(RCC8.rel("EC"))) == 121
        assert len(induced_era(RCC8.rel("PO"))) == 81
        counts = Counter(mrcc8_class(k) for k in range(169))
        assert counts[Mrcc8Class.MDC] == 48
        assert counts[Mrcc8Class.MEC] == 40
        assert sum(counts.values()) == 169 and set(counts) == set(Mrcc8Class)
        info["detail"] = f"{checks} pairs agree; classes {dict(sorted((k.name, v) for k, v in counts.items()))}"


def test_criterion_3_counterexamples():
    with criterion(3, 1.0) as info:
        for text in (MEET_TRIANGLE, PINWHEEL):
            net = parse_network(text)
            assert bipath_consistency(net) == net
        chain = parse_network(NESTED_CHAIN)
        closed = biclose(chain)
        sdf = ("s", "d", "f")
        assert closed.top.get(0, 1) == RCC8.rel("PO")
        assert closed.top.get(1, 2) == RCC8.rel("TPP")
        assert closed.top.get(0, 2) == RCC8.rel("DC", "NTPP")
        assert closed.dir.get(0, 1) == RA.rel("eq*eq")
        assert closed.dir.get(1, 2) == RA.rel("eq*eq")
        assert closed.dir.get(0, 2) == RA.rel(*(f"{a}*{b}" for a in sdf for b in sdf), "eq*eq")
        assert decide_dir49(chain).status == "unsat"
        info["detail"] = "two bipath fixpoints unchanged; bi-closure entries match; chain unsat"


def _witness_reverifies(net: JointNetwork, verdict) -> bool:
    w = verdict.witness
    closed = biclose(net)
    if path_consistency(w.scenario_top) != w.scenario_top:
        return False
    for i, j in net.top.pairs():
        if w.scenario_top.m[i][j] & ~closed.top.m[i][j]:
            return False
        rel = ra_relation_of(w.rectangles[i], w.rectangles[j])
        if not RA.rel(rel).bits & w.scenario_dir.m[i][j] & closed.dir.m[i][j]:
            return False
    return verify_regions(w.regions, w.scenario_top, w.rectangles).ok


def test_criterion_4_separation_fast_path():
    with criterion(4, 60.0) as info:
        fast = 0
        for seed in range(200):
            net = generalized(gen_instance(seed, 2 + seed % 6).network)
            verdict = decide_dir49(net)
            assert verdict.status == "sat", (seed, verdict.trace)
            assert _witness_reverifies(net, verdict), seed
            fast += verdict.trace[0].startswith("fast path")
        info["detail"] = f"200/200 sat with verified witnesses ({fast} on the fast path)"


def test_criterion_5_oracle_equivalence():
    with criterion(5, 120.0) as info:
        rng = random.Random(55)
        sat = 0
        for k in range(100):
            net = random_dir49_joint(rng.randint(2, 4), rng)
            expected = brute_force_joint(net)
            got = decide_dir49(net, witness=False).status
            assert got == ("sat" if expected else "unsat"), k
            sat += expected
        info["detail"] = f"100/100 agree ({sat} sat, {100 - sat} unsat)"


def test_criterion_6_realization_round_trip():
    with criterion(6, 60.0) as info:
        rng = random.Random(66)
        for k in range(200):
            top = random_basic_rcc8(rng.randint(2, 6), rng)
            net = JointNetwork(top, JointNetwork.empty(top.names).dir)
            rects = decide_dir49(net, witness=False).witness.rectangles
            regions = realize_regions(top, rects)
            report = verify_regions(regions, top, rects)
            assert report.ok, (k, report.mismatches)
            assert [r.computed_mbr() for r in regions] == rects
        info["detail"] = "200/200 networks realized with exact MBRs"


def test_criterion_7_epsilon_approximation():
    with criterion(7, 30.0) as info:
        worst: dict[Fraction, Fraction] = {}
        epsilons = (Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000))
        for seed in range(50):
            net = gen_instance(1000 + seed, 2 + seed % 4).network
            assert biclose(net) == net
            for eps in epsilons:
                verdict = epsilon_solve(net, eps)
                assert verdict.status == "sat", (seed, eps)
                w = verdict.witness
                assert verify_regions(w.regions, net.top, w.rectangles).ok
                top_chi = max((c.value for c in verdict.chi_report), default=Fraction(0))
                assert top_chi < eps
                worst[eps] = max(worst.get(eps, Fraction(0)), top_chi)
        pair = JointNetwork.empty(["x", "y"])
        pair.top.set(0, 1, RCC8.rel("DC"))
        pair.dir.set(0, 1, RA.rel("m*m"))
        rx, ry = epsilon_solve(pair, Fraction(8, 100)).witness.rectangles
        assert (rx.x0, rx.x1) == (0, Fraction("1.02"))
        assert (ry.x0, ry.x1) == (Fraction("1.01"), Fraction("2.03"))
        info["detail"] = "150 solves; max chi " + ", ".join(f"{worst[e]} < {e}" for e in epsilons)


def test_criterion_8_tau_soundness():
    with criterion(8, 10.0) as info:
        rng = random.Random(88)
        for _ in range(500):
            n = rng.randint(2, 6)
            names = [f"v{k}" for k in range(n)]
            net = network_from_intervals(names, [random_interval(rng) for _ in range(n)])
            tnet = tau_network(net)
            assert path_consistency(tnet) is not None
            sol = canonical_solution(tnet)
            assert network_from_intervals(names, sol) == tnet
        info["detail"] = "500/500 tau-versions satisfiable with verified canonical solutions"


def _cli(*args: str) -> bytes:
    proc = subprocess.run([sys.executable, "-m", "topodir", *args], capture_output=True)
    assert proc.returncode in (0, 1, 2), proc.stderr
    return proc.stdout


def test_criterion_9_determinism(tmp_path):
    with criterion(9, 120.0) as info:
        gen = _cli("gen", "--seed", "9", "--vars", "4")
        assert gen == _cli("gen", "--seed", "9", "--vars", "4")
        basic = tmp_path / "basic.net"
        basic.write_bytes(gen)
        dir49 = tmp_path / "dir49.net"
        dir49.write_text(serialize_network(generalized(parse_network(gen.decode()))))
        svg = tmp_path / "out.svg"
        runs = []
        for _ in range(2):
            solve = _cli("solve", str(dir49))
            eps = _cli("epsilon", str(basic), "--eps", "1/1000")
            realize = _cli("realize", str(dir49), "--svg", str(svg))
            runs.append((solve, eps, realize, svg.read_bytes()))
        assert runs[0] == runs[1]
        assert b'"status": "sat"' in runs[0][0]
        info["detail"] = "gen, solve, epsilon and realize --svg outputs identical across runs"
