from __future__ import annotations

import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from hublab.cli import decimal_string, jsonable, main


def run(argv, stdin="", capsys=None, monkeypatch=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def cli(capsys, monkeypatch):
    return lambda argv, stdin="": run(argv, stdin, capsys, monkeypatch)


def test_pipeline_diameter(cli):
    _, graph, _ = cli(["gen", "--family", "path", "--n", "3"])
    _, labels, _ = cli(["label", "build", "--method", "pruned"], graph)
    code, out, _ = cli(["stats", "diameter", "--mode", "source"], labels)
    assert code == 0 and out.strip() == "2"


def test_shell_pipeline():
    cmd = ("hublab gen --family path --n 3 | hublab label build --method pruned"
           " | hublab stats diameter --mode source")
    out = subprocess.run(cmd, shell=True, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "2"


def test_index_harary_json(cli, tmp_path):
    _, graph, _ = cli(["gen", "--family", "path", "--n", "3"])
    report = tmp_path / "r.json"
    code, out, _ = cli(["index", "--which", "harary", "--json", str(report)], graph)
    assert code == 0
    value = json.loads(out)["harary"]
    assert (value["num"], value["den"]) == (5, 2)
    data = json.loads(report.read_text())
    assert data["schema"] == "hublab/1" and data["command"] == "index"
    assert data["results"]["harary"]["num"] == 5
    assert data["inputs"]["graph"].startswith("sha256:")
    assert all(t >= 0 for t in data["timings"].values())


def test_rationals_and_inf_render():
    assert jsonable(Fraction(1, 3)) == {"num": 1, "den": 3, "decimal": "0.333333333333"}
    assert jsonable(Fraction(4, 2)) == 2
    assert jsonable(float("inf")) == "inf"
    assert decimal_string(Fraction(-2, 3)) == "-0.666666666667"


def test_query_and_oracle_agree(cli, tmp_path):
    g = tmp_path / "g.gr"
    _, text, _ = cli(["gen", "--family", "strong", "--n", "30", "--m", "64", "--wmax", "9", "--seed", "4"])
    g.write_text(text)
    _, labels, _ = cli(["label", "build", "--graph", str(g)])
    for what in ("ecc", "dsum"):
        for mode in ("source", "min", "max", "roundtrip"):
            _, got, _ = cli(["query", what, "--mode", mode, "--all", "--cap", "32"], labels)
            _, want, _ = cli(["oracle", what, "--mode", mode, "--all", "--graph", str(g)])
            assert [ln.split()[:2] for ln in got.splitlines()] == [ln.split() for ln in want.splitlines()]


def test_twdnc_and_diamk(cli, tmp_path):
    g, td = tmp_path / "k.gr", tmp_path / "k.td"
    _, text, _ = cli(["gen", "--family", "ktree", "--n", "70", "--k", "2", "--directed", "--wmax", "5",
                      "--td-out", str(td)])
    g.write_text(text)
    _, got, _ = cli(["twdnc", "--graph", str(g), "--td", str(td)])
    _, auto, _ = cli(["twdnc", "--graph", str(g), "--td", "auto"])
    _, want, _ = cli(["oracle", "twdnc", "--graph", str(g)])
    assert got == want == auto
    _, sparse, _ = cli(["gen", "--family", "sparse", "--n", "50", "--extra", "1", "--seed", "2"])
    _, got, _ = cli(["diamk", "--k", "3"], sparse)
    _, want, _ = cli(["oracle", "diamk", "--k", "3"], sparse)
    assert got.split()[0] == want.strip()


def test_label_validate_exit_codes(cli, tmp_path):
    g = tmp_path / "p.gr"
    _, text, _ = cli(["gen", "--family", "path", "--n", "4"])
    g.write_text(text)
    bad = "hl 4 1 exact\n" + "".join(f"out {v} {v}:0\nin {v} {v}:0\n" for v in range(4))
    code, out, _ = cli(["label", "validate", "--graph", str(g), "--labels", "-"], bad)
    assert code == 2 and "valid: False" in out


def test_split_and_elimination_methods(cli, tmp_path):
    g, c = tmp_path / "s.gr", tmp_path / "c.txt"
    _, text, _ = cli(["gen", "--family", "split", "--n", "12", "--k", "4", "--clique-out", str(c)])
    g.write_text(text)
    _, labels, _ = cli(["label", "build", "--graph", str(g), "--method", "split", "--clique", str(c)])
    code, _, _ = cli(["label", "validate", "--graph", str(g), "--labels", "-"], labels)
    assert code == 0
    _, labels, _ = cli(["label", "build", "--graph", str(g), "--method", "elimination"])
    _, tight, _ = cli(["label", "tighten", "--graph", str(g), "--labels", "-"], labels)
    code, _, _ = cli(["label", "validate", "--graph", str(g), "--labels", "-", "--exact"], tight)
    assert code == 0


def test_input_errors_exit_3(cli):
    with pytest.raises(SystemExit) as exc:
        main(["query", "ecc", "--no-such-flag"])
    assert exc.value.code == 3
    code, _, err = cli(["stats", "diameter"], "garbage\n")
    assert code == 3 and "error" in err
    code, _, _ = cli(["label", "validate", "--graph", "/nonexistent/file", "--labels", "-"], "")
    assert code == 3


def test_cap_exit_4(cli):
    _, graph, _ = cli(["gen", "--family", "complete", "--n", "8"])
    _, labels, _ = cli(["label", "build"], graph)
    code, _, err = cli(["query", "ecc", "--all", "--cap", "2"], labels)
    assert code == 4 and "cap" in err


def test_verify_and_bench(cli):
    code, out, _ = cli(["verify", "--n", "30", "--seeds", "2", "--threads", "2"])
    assert code == 0 and out.strip() == "mismatches: 0"
    code, out, _ = cli(["verify", "--family", "ktree", "--n", "40", "--seeds", "1"])
    assert code == 0
    code, out, _ = cli(["bench", "--sizes", "200,400", "--queries", "5"])
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("family,n,k") and len(lines) == 3


def test_deterministic_output(cli):
    a = cli(["gen", "--family", "strong", "--n", "20", "--seed", "9"])[1]
    b = cli(["gen", "--family", "strong", "--n", "20", "--seed", "9"])[1]
    c = cli(["gen", "--family", "strong", "--n", "20", "--seed", "10"])[1]
    assert a == b != c
