import json
import random

import pytest

from artifact.cli import Config, ConfigError, main
from artifact.pantsgraph import random_walk, standard_pants
from artifact.surface import Surface

S5 = "standard:S(0,5)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def walk_file(tmp_path):
    w = random_walk(standard_pants(Surface(0, 5)), 2, random.Random(1))
    path = tmp_path / "path.json"
    path.write_text(json.dumps([p.serialize() for p in w]))
    end = tmp_path / "end.json"
    end.write_text(json.dumps(w[-1].serialize()))
    return path, end


def test_pants_dist_equal_inputs(capsys):
    code, out = run_json(capsys, "pants-dist", S5, S5)
    assert code == 0 and out == {"distance": 0}


def test_pants_dist_and_geodesic(capsys, walk_file):
    _, end = walk_file
    code, out = run_json(capsys, "pants-dist", S5, f"@{end}")
    assert code == 0 and out["distance"] == 2
    code, out = run_json(capsys, "pants-geodesic", S5, f"@{end}")
    assert out["length"] == 2 and len(out["moves"]) == 2
    code, text, _ = run(capsys, "pants-geodesic", S5, f"@{end}", "--format", "dot")
    assert text.startswith("graph pants_path {") and text.count("--") == 2


def test_uncertified_distance_exits_nonzero(capsys, walk_file):
    _, end = walk_file
    code, out = run_json(capsys, "pants-dist", S5, f"@{end}", "--budget", "1", "--cap", "1")
    assert code == 2 and out["distance"] is None


def test_output_is_deterministic(capsys, walk_file):
    path, _ = walk_file
    a = run(capsys, "compile-model", "--path", f"@{path}")
    b = run(capsys, "compile-model", "--path", f"@{path}")
    assert a[1] == b[1]


def test_compile_model_writes_table(capsys, tmp_path, walk_file):
    path, _ = walk_file
    out_file = tmp_path / "table.txt"
    code, out = run_json(capsys, "compile-model", "--path", f"@{path}", "--out", str(out_file))
    assert code == 0
    assert out["non_twist_blocks"] == 3 * out["path_length"] == 6
    assert out["pseudo_manifold_errors"] == []
    assert out_file.read_text().startswith("tet 0:")


def test_export_tri_formats(capsys):
    code, out = run_json(capsys, "export-tri", "standard:S(2,0)")
    assert (out["vertices"], out["edges"], out["faces"]) == (6, 24, 16)
    assert out["errors"] == []
    code, text, _ = run(capsys, "export-tri", S5, "--format", "table")
    assert text.count("\n") == 24
    code, text, _ = run(capsys, "export-tri", S5, "--format", "dot")
    assert text.startswith("graph triangulation")


def test_project_and_dist_formula(capsys):
    p = standard_pants(Surface(0, 5))
    a, b = (c.serialize() for c in p.curves)
    code, out = run_json(capsys, "project", json.dumps([a]), "--boundary", json.dumps([b]))
    assert code == 0
    assert any(piece["projection"] == [a] for piece in out["pieces"])
    code, out = run_json(capsys, "dist-formula", S5, S5)
    assert out["sum"] == 0 and out["threshold"] == 5


def test_fn_subcommands(capsys, tmp_path):
    pt = tmp_path / "x.json"
    pt.write_text(json.dumps({"S(1,1):slope:0/1": {"length": 1.3, "twist": 0.4}}))
    code, out = run_json(capsys, "fn-lengths", f"@{pt}")
    assert code == 0
    assert out["lengths"]["S(1,1):slope:0/1"] == pytest.approx(1.3, abs=1e-9)
    code, out = run_json(capsys, "short-pants", f"@{pt}", "--level", "2")
    assert out["pants"] == ["S(1,1):slope:0/1"]
    code, out = run_json(capsys, "short-pants", f"@{pt}", "--level", "0.5", "--cap", "3")
    assert code == 2 and "cap" in out["error"]
    code, out = run_json(capsys, "wp-est", f"@{pt}", f"@{pt}", "--level", "2")
    assert out["pants_distance"]["exact"] == 0


def test_config_loading(tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("# constants\nbers_level = 3.5\nmm_threshold = 6\nseed=4\n")
    cfg = Config.load(str(f))
    assert (cfg.bers_level, cfg.mm_threshold, cfg.seed) == (3.5, 6, 4)


@pytest.mark.parametrize("text", ["mm_threshold = 4", "nonsense = 1", "bers_level", "seed = x",
                                  "bers_level = -1"])
def test_bad_config(tmp_path, text):
    f = tmp_path / "c.cfg"
    f.write_text(text + "\n")
    with pytest.raises(ConfigError):
        Config.load(str(f))


def test_bad_config_exits_nonzero(capsys, tmp_path):
    f = tmp_path / "c.cfg"
    f.write_text("mm_threshold = 3\n")
    code, out, err = run(capsys, "--config", str(f), "pants-dist", S5, S5)
    assert code == 1 and "mm_threshold" in err and out == ""


def test_unsupported_surface(capsys):
    code, out, err = run(capsys, "export-tri", "standard:S(0,9)")
    assert code == 1 and "complexity" in err


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_selftest(capsys):
    code, out = run_json(capsys, "selftest", "--samples", "2")
    assert code == 0 and out["passed"]
    assert out["constants"]["provenance"] == "empirical fit"
    assert out["constants"]["V3"] == pytest.approx(1.0149416, abs=1e-6)
