import csv
import json

import numpy as np
import pytest

from hime import __version__
from hime.bench import PlantSpec, plant_motifs, random_walk
from hime.cli import main


@pytest.fixture(scope="module")
def series_file(tmp_path_factory):
    series, _ = plant_motifs(random_walk(30_000, 2), [PlantSpec(1000, 5)], seed=6)
    path = tmp_path_factory.mktemp("data") / "x.csv"
    path.write_text("# planted\n" + "\n".join(repr(v) for v in series.values.tolist()) + "\n")
    return path


def run(args, out):
    return main([*args, "--output-dir", str(out)])


def test_discover_writes_reports(series_file, tmp_path, capsys):
    code = run(["discover", "--input", str(series_file), "--min-length", "300", "--paa", "6",
                "--alpha", "auto", "--threshold-factor", "0.02", "--density"], tmp_path)
    assert code == 0
    motifs = json.loads((tmp_path / "motifs.json").read_text())
    rows = list(csv.DictReader((tmp_path / "motifs.csv").open()))
    assert motifs and len(rows) == len(motifs)
    for m, r in zip(motifs, rows):
        assert int(r["start1"]) == m["start1"] and int(r["length"]) == m["length"]
        assert m["distance"] <= 0.02 * m["length"] + 1e-12
    man = json.loads((tmp_path / "discover_manifest.json").read_text())
    assert man["version"] == __version__ and man["seed"] == 0
    assert man["config"]["paa_size"] == 6 and man["config"]["alphabet"] == "auto"
    assert len(man["input_sha256"]) == 64 and man["n_motifs"] == len(motifs)
    density = (tmp_path / "density.csv").read_text().splitlines()
    assert density[0] == "index,count" and len(density) == 30_001
    assert max(int(line.split(",")[1]) for line in density[1:]) >= 1
    assert "motifs" in capsys.readouterr().out


def test_discover_is_byte_identical(series_file, tmp_path):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        assert run(["discover", "--input", str(series_file), "--seed", "4"], d) == 0
        outs.append(((d / "motifs.json").read_bytes(), (d / "motifs.csv").read_bytes()))
    assert outs[0] == outs[1]


def test_discover_fixed_alphabet_without_nr(series_file, tmp_path):
    assert run(["discover", "--input", str(series_file), "--alpha", "7", "--no-nr", "--format", "json"],
               tmp_path) == 0
    man = json.loads((tmp_path / "discover_manifest.json").read_text())
    assert man["alphabet"] == 7 and man["config"]["numerosity_reduction"] is False
    assert not (tmp_path / "motifs.csv").exists()


def test_discover_retrieve_adds_instances(series_file, tmp_path):
    assert run(["discover", "--input", str(series_file), "--retrieve", "--format", "json"], tmp_path) == 0
    motifs = json.loads((tmp_path / "motifs.json").read_text())
    assert all(len(m["instances"]) >= 2 for m in motifs)


def test_missing_input_fails(tmp_path, capsys):
    assert run(["discover", "--input", str(tmp_path / "nope.csv")], tmp_path) == 1
    assert "hime: error" in capsys.readouterr().err
    assert not (tmp_path / "discover_manifest.json").exists()


def test_bad_values_fail(series_file, tmp_path, capsys):
    assert run(["discover", "--input", str(series_file), "--min-length", "10"], tmp_path) == 1
    assert "min_length" in capsys.readouterr().err
    bad = tmp_path / "bad.csv"
    bad.write_text("1\n2\nabc\n")
    assert run(["tune", "--input", str(bad)], tmp_path) == 1


def test_bad_flags_exit_with_usage(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["discover", "--input", "x", "--alpha", "many"], tmp_path)
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main([])


def test_tune_reports(series_file, tmp_path, capsys):
    assert run(["tune", "--input", str(series_file), "--seed", "3"], tmp_path) == 0
    rep = json.loads((tmp_path / "tune.json").read_text())
    assert 2 <= rep["alphabet"] <= 20 and rep["samples"] >= 100
    out = capsys.readouterr().out
    assert f"a={rep['alphabet']}" in out and "samples=" in out
    assert (tmp_path / "tune_manifest.json").exists()


def test_bench_small(tmp_path):
    args = ["bench", "--n", "40000", "--lengths", "800", "--instances", "4", "--alpha", "6", "--seed", "1"]
    assert run(args, tmp_path) == 0
    rep = json.loads((tmp_path / "bench.json").read_text())
    assert rep["motifs"][0]["planted_length"] == 800
    truth = (tmp_path / "ground_truth.csv").read_text().splitlines()
    assert truth[0] == "motif_id,start,end" and len(truth) == 5
    man = json.loads((tmp_path / "bench_manifest.json").read_text())
    assert man["config"]["lengths"] == [800] and man["input"] is None


def test_oracle_small(tmp_path):
    series, _ = plant_motifs(random_walk(6000, 3), [PlantSpec(400, 3)], seed=2)
    path = tmp_path / "s.txt"
    np.savetxt(path, series.values)
    assert run(["oracle", "--input", str(path), "--lengths", "400"], tmp_path) == 0
    rows = json.loads((tmp_path / "oracle.json").read_text())
    assert rows[0]["oracle_length"] == 400
    assert rows[0]["hime_distance"] is None or rows[0]["hime_distance"] >= rows[0]["oracle_distance"] - 1e-9
