import csv
import json

import numpy as np
import pytest

from eberlein import cli, io, probes
from eberlein.corpus import DEFAULT_LINE
from eberlein.group import Finite, dual
from eberlein.measure import ConcreteMeasure


def _run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def heaviside_dual(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "heaviside.json"
    assert _run("corpus", "build", "heaviside", "--dual", "--out", path) == 0
    return path


def test_corpus_list(capsys):
    assert _run("corpus", "list") == 0
    names = [line.split("\t")[0] for line in capsys.readouterr().out.splitlines()]
    assert "heaviside" in names and "finite_comb" in names


def test_corpus_unknown_name_is_schema_error(capsys):
    assert _run("corpus", "build", "nope") == cli.EXIT_SCHEMA
    assert "unknown corpus entry" in capsys.readouterr().err


def test_decompose_point_mass_plus_lebesgue(tmp_path, capsys):
    gd = dual(DEFAULT_LINE)
    nu = ConcreteMeasure.dirac(gd, 0.0, 2.0) + ConcreteMeasure.haar(gd)
    src = tmp_path / "nu.json"
    io.write_json(src, io.measure_to_json(nu))
    assert _run("decompose", src, "--out-prefix", tmp_path / "out") == 0
    written = json.loads(capsys.readouterr().out)["parts"]
    assert set(written) == {"pp", "ac", "sc"}
    pp = io.read_json(written["pp"])
    io.validate(pp, "semimeasure")
    atoms = pp["dual_measure"]["atoms"]
    assert len(atoms) == 1 and atoms[0]["weight"] == [2.0, 0.0]
    assert pp["dual_measure"]["ac_density"] is None
    ac = io.read_json(written["ac"])
    assert ac["dual_measure"]["atoms"] == [] and ac["dual_measure"]["ac_density"] is not None
    assert pp["meta"]["part"] == "pp" and pp["meta"]["verb"] == "decompose"


def test_probe_measure_on_heaviside_fails(heaviside_dual, tmp_path):
    out = tmp_path / "probe.json"
    trace = tmp_path / "trace.csv"
    code = _run("probe", "measure", heaviside_dual, "--out", out, "--trace-csv", trace)
    assert code == 1
    doc = io.read_json(out)
    assert doc["report"]["verdict"] == "fail"
    assert doc["report"]["fit"]["rate"] > 0
    assert doc["meta"]["seed"] == probes.default_seed() and doc["meta"]["group"]["kind"] == "real_line"
    rows = list(csv.reader(trace.open()))
    assert rows[0] == ["n", "value"] and len(rows) > 4


def test_bochner_on_delta_zero(tmp_path):
    src = tmp_path / "d0.json"
    assert _run("corpus", "build", "delta_0", "--out", src) == 0
    out = tmp_path / "b.json"
    assert _run("bochner", src, "--size", 8, "--out", out) == 0
    assert io.read_json(out)["report"]["verdict"] == "pass"
    src2 = tmp_path / "dq.json"
    assert _run("corpus", "build", "delta_quarter", "--out", src2) == 0
    assert _run("bochner", src2, "--size", 8, "--out", out) == 1


def test_schema_violation_exit_code(tmp_path, capsys):
    doc = io.measure_to_json(ConcreteMeasure.dirac(Finite([4]), [1]))
    doc["atoms"][0]["weight"] = "heavy"
    src = tmp_path / "bad.json"
    io.write_json(src, doc)
    assert _run("transform", src) == cli.EXIT_SCHEMA
    assert "/atoms/0/weight" in capsys.readouterr().err
    (tmp_path / "junk.json").write_text("{not json")
    assert _run("transform", tmp_path / "junk.json") == cli.EXIT_SCHEMA


def test_finite_transform_round_trip(tmp_path, rng):
    G = Finite([3, 4])
    mu = ConcreteMeasure.from_atoms(G, G.points(), rng.normal(size=12) + 1j * rng.normal(size=12))
    src, fwd, back = tmp_path / "mu.json", tmp_path / "fwd.json", tmp_path / "back.json"
    io.write_json(src, io.measure_to_json(mu))
    assert _run("transform", src, "--out", fwd) == 0
    assert io.read_json(fwd)["group"]["dual"] is True
    assert _run("transform", fwd, "--inverse", "--out", back) == 0
    doc = io.read_json(back)
    assert doc["meta"]["direction"] == "inverse" and doc["meta"]["version"]
    got = io.measure_from_json(doc)
    assert np.max(np.abs(got.to_finite_weights() - mu.to_finite_weights())) < 1e-9


def test_line_transform_of_off_grid_atom_is_numeric_error(tmp_path, capsys):
    src = tmp_path / "mu.json"
    io.write_json(src, io.measure_to_json(ConcreteMeasure.dirac(DEFAULT_LINE, 1e-3)))
    assert _run("transform", src) == cli.EXIT_NUMERIC
    assert "error" in capsys.readouterr().err


def test_fb_on_finite_comb(tmp_path):
    src = tmp_path / "comb.json"
    assert _run("corpus", "build", "finite_comb", "--out", src) == 0
    fwd = tmp_path / "hat.json"
    assert _run("transform", src, "--out", fwd) == 0
    out = tmp_path / "fb.json"
    trace = tmp_path / "fb.csv"
    assert _run("fb", fwd, "--chi", 4, "--n-max", 3, "--out", out, "--trace-csv", trace) == 0
    doc = io.read_json(out)
    assert [e["chi"] for e in doc["entries"]] == [[0.0], [4.0], [8.0]]
    assert doc["averaging"]["gap"] < 1e-12
    assert list(csv.reader(trace.open()))[0][-1] == "scaled_error"


def test_convolve_writes_csv_and_meta(tmp_path):
    src = tmp_path / "d.json"
    assert _run("corpus", "build", "delta_quarter", "--out", src) == 0
    out = tmp_path / "conv.csv"
    assert _run("convolve", src, "--out", out, "--t-min", -1, "--t-max", 1) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "re", "im"]
    t = np.array([float(r[0]) for r in rows[1:]])
    assert t.min() >= -1 and t.max() <= 1
    meta = io.read_json(out.with_suffix(".meta.json"))
    assert meta["verb"] == "convolve"


def test_seed_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("EBERLEIN_SEED", "9")
    src = tmp_path / "d.json"
    assert _run("corpus", "build", "delta_0", "--out", src) == 0
    assert io.read_json(src)["meta"]["seed"] == 9
