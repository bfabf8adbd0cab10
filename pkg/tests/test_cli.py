from __future__ import annotations

import json
import subprocess
import sys

import pytest

from nets import MEET_TRIANGLE, NESTED_CHAIN, PINWHEEL
from topodir.boxes import RA, cardinal, dir49_generalize_bits
from topodir.cli import main
from topodir.generate import gen_instance
from topodir.netfile import NetworkFileError, parse_network, serialize_network
from topodir.solver import decide_dir49
from topodir.topology import RCC8


def test_parse_meet_triangle():
    net = parse_network(MEET_TRIANGLE)
    assert list(net.names) == ["v1", "v2", "v3"]
    assert net.top.get(0, 1) == RCC8.rel("EC")
    assert net.top.get(2, 1) == RCC8.rel("DC")
    assert net.dir.get(1, 0) == RA.rel("mi*mi")
    assert net.dir.get(1, 2) == RA.rel("eq*eq")


def test_parse_macros():
    net = parse_network("vars a b c\ndir a b W\ndir b c MO*SDFEQ,b|bi*T\n")
    assert net.dir.get(0, 1) == cardinal("W")
    bc = net.dir.get(1, 2)
    assert RA.rel("m*eq", "o*s", "bi*oi") <= bc
    assert len(bc) == 2 * 4 + 2 * 13
    assert net.top.get(0, 1) == RCC8.top()


def test_parse_comments_and_converse_lines():
    text = "# header\nvars a b  # two regions\ntop a b TPP\ntop b a TPPi\n"
    assert parse_network(text).top.get(0, 1) == RCC8.rel("TPP")


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("vars a b\ntop a b DC\ntop b a EC\n", 3, "converse conflict"),
        ("vars a b\ntop a b DC\ntop a b DC\n", 3, "duplicate"),
        ("vars a b\ntop a a DC\n", 2, "diagonal"),
        ("vars a b\ntop a c DC\n", 2, "c"),
        ("vars a b\n\ndir a b q*m\n", 3, "q"),
        ("top a b DC\n", 1, "before the vars"),
        ("vars a\nvars b\n", 2, "duplicate vars"),
        ("vars a b\nfoo a b\n", 2, "unknown statement"),
        ("vars a b\ntop a b\n", 2, "expected"),
    ],
)
def test_parse_errors(text, line, fragment):
    with pytest.raises(NetworkFileError) as info:
        parse_network(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_missing_vars():
    with pytest.raises(NetworkFileError, match="missing vars"):
        parse_network("# nothing\n")


@pytest.mark.parametrize("text", [MEET_TRIANGLE, PINWHEEL, NESTED_CHAIN])
def test_serialize_round_trip(text):
    net = parse_network(text)
    canonical = serialize_network(net)
    assert parse_network(canonical) == net
    assert serialize_network(parse_network(canonical)) == canonical


def test_gen_instance_contract():
    assert gen_instance(5, 3).text == gen_instance(5, 3).text
    single = gen_instance(1, 1)
    assert list(single.network.names) == ["v1"]
    assert parse_network(single.text) == single.network
    inst = gen_instance(1, 2)
    assert parse_network(inst.text) == inst.network
    assert inst.network.is_basic()
    with pytest.raises(ValueError):
        gen_instance(1, 0)


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_cli_check_unknown(tmp_path, capsys):
    path = tmp_path / "meet.net"
    path.write_text(MEET_TRIANGLE)
    code, out = _run(capsys, "check", str(path))
    assert code == 2
    data = json.loads(out.out)
    assert data["status"] == "unknown"
    assert data["fragment"] == {"top_in_h8": True, "dir_in_dir49": False}


def test_cli_solve_unsat_and_sat(tmp_path, capsys):
    path = tmp_path / "chain.net"
    path.write_text(NESTED_CHAIN)
    code, out = _run(capsys, "solve", str(path))
    assert code == 1 and json.loads(out.out)["status"] == "unsat"

    path.write_text("vars a b\ntop a b EC\ndir a b MO*T\n")
    svg = tmp_path / "out.svg"
    code, out = _run(capsys, "solve", str(path), "--svg", str(svg))
    data = json.loads(out.out)
    assert code == 0 and data["status"] == "sat"
    assert data["svg_path"] == str(svg) and svg.read_text().startswith("<?xml")
    assert set(data["rectangles"]) == {"a", "b"}
    assert all("/" in v for v in data["rectangles"]["a"]["x"])


def test_cli_propagation(tmp_path, capsys):
    path = tmp_path / "chain.net"
    path.write_text(NESTED_CHAIN)
    code, out = _run(capsys, "biclose", str(path))
    data = json.loads(out.out)
    assert code == 0 and data["result"] == "fixpoint"
    assert "top v2 v3 TPP" in data["network"]
    code, out = _run(capsys, "bipath", str(path))
    assert code == 1 and json.loads(out.out)["result"] == "inconsistent"
    code, out = _run(capsys, "pc", str(path))
    assert code == 0


def test_cli_epsilon(tmp_path, capsys):
    path = tmp_path / "meet.net"
    path.write_text(MEET_TRIANGLE)
    code, out = _run(capsys, "epsilon", str(path), "--eps", "1/1000")
    data = json.loads(out.out)
    assert code == 0
    assert len(data["chi_report"]) == 6
    assert all(entry["chi"].count("/") == 1 for entry in data["chi_report"])


def test_cli_input_errors(tmp_path, capsys):
    path = tmp_path / "bad.net"
    path.write_text("vars a b\ntop a b XX\n")
    code, out = _run(capsys, "check", str(path))
    assert code == 3 and "line 2" in out.err
    path.write_text(MEET_TRIANGLE)
    code, out = _run(capsys, "solve", str(path))
    assert code == 3 and "DIR49" in out.err
    code, out = _run(capsys, "check", str(tmp_path / "missing.net"))
    assert code == 3


def test_cli_tables(capsys):
    code, out = _run(capsys, "tables", "--calculus", "IA")
    assert code == 0
    assert "m\tm\tb" in out.out.splitlines()
    assert len(out.out.splitlines()) == 1 + 13 * 13


def test_cli_gen_matches_library(capsys):
    code, out = _run(capsys, "gen", "--seed", "4", "--vars", "3")
    assert code == 0 and out.out == gen_instance(4, 3).text


def test_module_entry_point_exit_code(tmp_path):
    path = tmp_path / "chain.net"
    path.write_text(NESTED_CHAIN)
    proc = subprocess.run(
        [sys.executable, "-m", "topodir", "check", str(path)], capture_output=True, text=True
    )
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["status"] == "unsat"


def test_generated_networks_decide_sat():
    for seed in range(5):
        net = gen_instance(seed, 3).network
        gen = net.copy()
        for i, j in gen.dir.pairs():
            gen.dir.set(i, j, dir49_generalize_bits(gen.dir.m[i][j]))
        assert decide_dir49(gen, witness=False).status == "sat"
