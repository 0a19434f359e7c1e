"""File formats, experiment reports, CLI."""

import json

import pytest

from ranklab import instances as inst
from ranklab import solver as sv
from ranklab.labkit import experiments, io
from ranklab.labkit.cli import main


def test_rd_instance_round_trip(tmp_path):
    rd = inst.gen_rd(2, 7, 8, 4, 2, seed=1)
    path = tmp_path / "i.rdi"
    io.write_instance(str(path), rd)
    back = io.read_instance(str(path))
    assert isinstance(back, inst.RdInstance)
    assert (back.gen == rd.gen).all() and (back.received == rd.received).all()
    assert back.verify_witness()
    assert (back.witness.error == rd.witness.error).all()


def test_rd_instance_round_trip_q4(tmp_path):
    rd = inst.gen_rd(4, 5, 8, 3, 2, seed=2)
    path = tmp_path / "i.rdi"
    io.write_instance(str(path), rd)
    back = io.read_instance(str(path))
    assert back.q == 4 and back.verify_witness()


def test_minrank_instance_round_trip(tmp_path):
    mi = inst.gen_minrank(2, 6, 8, 14, 2, seed=3)
    path = tmp_path / "i.mri"
    io.write_instance(str(path), mi)
    back = io.read_instance(str(path))
    assert isinstance(back, inst.MinRankInstance)
    assert back.verify_witness()
    assert all((a == b).all() for a, b in zip(back.mats, mi.mats))


def test_reader_rejects_unknown_fields(tmp_path):
    rd = inst.gen_rd(2, 3, 5, 2, 1, seed=1)
    path = tmp_path / "i.rdi"
    io.write_instance(str(path), rd)
    doc = json.loads(path.read_text())
    doc["surprise"] = 1
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="unknown fields"):
        io.read_instance(str(path))


def test_reader_rejects_foreign_modulus(tmp_path):
    rd = inst.gen_rd(2, 3, 5, 2, 1, seed=1)
    path = tmp_path / "i.rdi"
    io.write_instance(str(path), rd)
    doc = json.loads(path.read_text())
    doc["ext_modulus"] = [1, 0, 1, 1]
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="modulus"):
        io.read_instance(str(path))


def test_reader_rejects_bad_witness(tmp_path):
    rd = inst.gen_rd(2, 3, 5, 2, 1, seed=1)
    path = tmp_path / "i.rdi"
    io.write_instance(str(path), rd)
    doc = json.loads(path.read_text())
    doc["witness"]["x"] = [0] * rd.k
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="witness"):
        io.read_instance(str(path))


def test_report_reproducible():
    a = experiments.verify("mm-rank", (2, 3, 5, 2, 1), trials=4, seed=3)
    b = experiments.verify("mm-rank", (2, 3, 5, 2, 1), trials=4, seed=3)
    assert a.measured == b.measured and a.verdict == b.verdict
    assert a.passes == b.passes


def test_verify_unknown_property():
    with pytest.raises(ValueError, match="unknown property"):
        experiments.verify("nope", (2, 3, 5, 2, 1))


@pytest.mark.parametrize("prop,params", [
    ("q0-span", (2, 3, 5, 2, 1)),
    ("lt-independence", (2, 3, 5, 2, 1)),
    ("q1-correspondence", (2, 3, 5, 2, 1)),
    ("unfold-sm", (2, 3, 5, 2, 1)),
    ("unfold-sm", (4, 5, 8, 3, 2)),
    ("mm-rank", (4, 5, 8, 3, 2)),
    ("nb-rank", (2, 3, 5, 2, 1)),
])
def test_exact_properties_pass(prop, params):
    rep = experiments.verify(prop, params, trials=3, seed=2)
    assert rep.verdict, rep.failures


def test_syzygy_property_small():
    rep = experiments.verify("syzygy-count", (2, 7, 8, 4, 2), trials=2, seed=5)
    assert rep.verdict, rep.failures


def test_hybrid_properties_small():
    rep = experiments.verify("hybrid-correct", (2, 7, 12, 5, 2), trials=2, seed=1)
    assert rep.verdict, rep.failures
    rep2 = experiments.verify("hybrid-correct-minrank", (2, 6, 8, 14, 2),
                              trials=2, seed=1)
    assert rep2.verdict, rep2.failures


def test_report_renderers():
    rep = experiments.verify("mm-rank", (2, 3, 5, 2, 1), trials=2, seed=1)
    text = io.report_text(rep)
    assert "mm-rank" in text and "pass" in text
    doc = json.loads(io.report_json(rep))
    assert doc["property_name"] == "mm-rank"


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_gen_attack_rd(tmp_path, capsys):
    path = str(tmp_path / "i.rdi")
    assert main(["gen", "rd", "--q", "2", "--m", "7", "--n", "8", "--k", "4",
                 "--r", "2", "--seed", "1", "--unique-envelope",
                 "-o", path]) == 0
    capsys.readouterr()
    assert main(["attack", path, "--report", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verified"] and doc["weight"] == 2
    assert any("verified" in line for line in doc["transcript"])


def test_cli_attack_hybrid_minrank(tmp_path, capsys):
    path = str(tmp_path / "i.mri")
    assert main(["gen", "minrank", "--q", "2", "--m", "6", "--n", "8",
                 "--K", "14", "--r", "2", "--seed", "3", "-o", path]) == 0
    capsys.readouterr()
    assert main(["attack", path, "--a", "1", "--report", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verified"] and doc["achieved_rank"] <= 2


def test_cli_estimate_preset(capsys):
    assert main(["estimate", "--preset", "new2rollo-i-128",
                 "--report", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    rows = {r["attack"]: r for r in doc["new2rollo-i-128"]}
    assert abs(rows["smplus"]["bits"] - 202) <= 2
    assert abs(rows["mm"]["bits"] - 205) <= 3
    assert abs(rows["comb"]["bits"] - 212) <= 2


def test_cli_estimate_custom(capsys):
    assert main(["estimate", "--kind", "minrank", "--q", "16", "--m", "16",
                 "--n", "16", "--K", "142", "--r", "4",
                 "--report", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    rows = {r["attack"]: r for r in doc["custom"]}
    assert abs(rows["kernel"]["bits"] - 166) <= 1


def test_cli_verify(capsys):
    assert main(["verify", "--property", "mm-rank", "--params", "2,3,5,2,1",
                 "--trials", "3", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "pass" in out


def test_cli_attack_unsolved_is_clean(tmp_path, capsys):
    # an out-of-envelope instance with several decodings: reported, not a crash
    rd = inst.gen_rd(2, 7, 8, 4, 2, seed=1)
    assert len(sv.rd_solutions_brute(rd)) > 1
    path = str(tmp_path / "bad.rdi")
    io.write_instance(path, rd)
    code = main(["attack", path, "--report", "machine"])
    doc = json.loads(capsys.readouterr().out)
    assert code == 1 and doc["outcome"] == "unsolved"
    assert doc["transcript"]
